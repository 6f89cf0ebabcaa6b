#include "tracemob/parallel.hpp"

#include <iterator>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "tracemob/errors.hpp"

namespace tracemob {

int worker_count() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

std::vector<Trace> enumerate_by_height_parallel(const IndependenceGraph& g, std::size_t n, std::size_t cap) {
  const std::size_t count = count_by_height(g, n, cap);
  if (count > cap) {
    throw CapExceeded("more than " + std::to_string(cap) + " traces of height " + std::to_string(n));
  }
  if (n == 0) return {Trace()};
  const AdmissibilityTable table(g);
  std::vector<std::vector<Trace>> parts(table.nonempty.size());
  for_each_index(parts.size(), [&](std::size_t first) { enumerate_chains_from(table, first, n, parts[first]); });
  std::vector<Trace> out;
  out.reserve(count);
  for (auto& part : parts) {
    out.insert(out.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
  }
  return out;
}

std::vector<Trace> enumerate_up_to_height(const IndependenceGraph& g, std::size_t n, Execution exec,
                                          std::size_t cap) {
  if (exec == Execution::serial) return enumerate_up_to_height(g, n, cap);
  std::vector<Trace> out;
  for (std::size_t k = 0; k <= n; ++k) {
    auto level = enumerate_by_height_parallel(g, k, cap);
    if (out.size() + level.size() > cap) throw CapExceeded("more than " + std::to_string(cap) + " traces");
    out.insert(out.end(), std::make_move_iterator(level.begin()), std::make_move_iterator(level.end()));
  }
  return out;
}

}  // namespace tracemob
