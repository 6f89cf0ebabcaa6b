#pragma once

// Data-parallel kernels over trace enumerations. Each kernel has a serial
// path that is the reference implementation; the OpenMP path must return
// exactly the same result in the same order.

#include <cstddef>
#include <exception>
#include <span>
#include <type_traits>
#include <vector>

#include "tracemob/trace.hpp"

namespace tracemob {

enum class Execution { serial, parallel };

int worker_count();

// Calls body(i) for i in [0, n). Exceptions thrown by the body are
// rethrown after the loop; the one with the smallest index wins.
template <typename Body>
void for_each_index(std::size_t n, Body&& body, Execution exec = Execution::parallel) {
  if (exec == Execution::serial || n < 2) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 4)
  for (long long i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (const auto& error : errors) {
    if (error) std::rethrow_exception(error);
  }
}

// out[i] = fn(traces[i]).
template <typename Fn>
auto map_traces(std::span<const Trace> traces, Fn&& fn, Execution exec = Execution::parallel)
    -> std::vector<std::invoke_result_t<Fn&, const Trace&>> {
  using R = std::invoke_result_t<Fn&, const Trace&>;
  std::vector<R> out(traces.size());
  for_each_index(traces.size(), [&](std::size_t i) { out[i] = fn(traces[i]); }, exec);
  return out;
}

// Same result and order as enumerate_by_height; chains are grown in
// parallel, one task per first clique.
std::vector<Trace> enumerate_by_height_parallel(const IndependenceGraph& g, std::size_t n,
                                                std::size_t cap = kDefaultEnumerationCap);

std::vector<Trace> enumerate_up_to_height(const IndependenceGraph& g, std::size_t n, Execution exec,
                                          std::size_t cap = kDefaultEnumerationCap);

}  // namespace tracemob
