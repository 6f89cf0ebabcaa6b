#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tracemob/parallel.hpp"
#include "tracemob/valuation.hpp"

namespace tracemob {

struct CheckResult {
  std::string section;  // "combinatorial" or "probabilistic"
  std::string name;
  bool passed = false;
  double max_deviation = 0.0;
  std::size_t cases = 0;
  std::string detail;
  double seconds = 0.0;
};

struct VerifyOptions {
  std::size_t height = 2;
  std::uint64_t seed = 1;
  std::size_t random_tables = 20;
  std::size_t confluence_words = 1000;
  std::size_t word_length = 12;
  std::size_t sampler_count = 20000;
  Execution exec = Execution::parallel;
};

struct VerifyReport {
  std::vector<CheckResult> checks;
  // Set when the probabilistic section could not run.
  std::optional<std::string> probabilistic_skipped;

  bool passed() const;
};

// Identities that only involve the monoid: clique counts, normal forms,
// prefix order, same-height extensions, and the graded inversion formula on
// random exact tables.
VerifyReport verify_combinatorics(const GraphPtr& g, const VerifyOptions& options);

// Combinatorial section followed by every identity that needs the
// valuation: Bernoulli conditions, chain identities, atom decompositions,
// the martingale step, the Poisson round trip, Green and Martin kernels,
// and the positivity inequality.
template <Scalar T>
VerifyReport verify_all(const Valuation<T>& f, const VerifyOptions& options);

extern template VerifyReport verify_all<double>(const Valuation<double>&, const VerifyOptions&);
extern template VerifyReport verify_all<Rational>(const Valuation<Rational>&, const VerifyOptions&);

}  // namespace tracemob
