#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <span>
#include <vector>

#include "tracemob/errors.hpp"
#include "tracemob/parallel.hpp"
#include "tracemob/trace.hpp"
#include "tracemob/valuation.hpp"

namespace tracemob {

// Probability of the atom {C1..Cn = x} for a non-empty trace x, which is
// f(v)·h(c) for x = v·c; for the identity it is h(∅).
template <Scalar T>
T atom_weight(const Valuation<T>& f, const CliqueTransform<T>& h, const Trace& x) {
  if (x.is_identity()) return h.at(Clique());
  return f(x.without_last()) * h.at(x.last());
}

// The Markov chain of Cartier-Foata cliques under a Bernoulli measure.
// States are the non-empty cliques in enumeration order.
template <Scalar T>
class CliqueChain {
 public:
  const Valuation<T>& valuation() const { return f_; }
  const CliqueTransform<T>& transform() const { return h_; }
  const IndependenceGraph& graph() const { return f_.graph(); }
  const AdmissibilityTable& table() const { return table_; }

  std::size_t state_count() const { return table_.nonempty.size(); }
  Clique state(std::size_t i) const { return table_.nonempty[i]; }
  std::size_t state_of(Clique c) const {
    if (c.empty()) throw std::invalid_argument("the empty clique is not a chain state");
    return graph().clique_position(c) - 1;
  }

  const T& initial(std::size_t i) const { return initial_[i]; }
  T initial(Clique c) const { return initial_[state_of(c)]; }
  const T& transition(std::size_t from, std::size_t to) const { return transition_[from * state_count() + to]; }
  T transition(Clique c, Clique c2) const { return transition(state_of(c), state_of(c2)); }
  // g(c) = Σ_{c → c'} h(c'), defined on every clique (zero on ∅).
  const T& normalizer(Clique c) const { return normalizer_[graph().clique_position(c)]; }

  const std::vector<double>& initial_cdf() const { return initial_cdf_; }
  // Cumulative transition row over admissible successors (state, cdf).
  const std::vector<std::pair<std::size_t, double>>& row_cdf(std::size_t from) const { return row_cdf_[from]; }

  template <Scalar U>
  friend CliqueChain<U> build_chain(const Valuation<U>& f);

 private:
  CliqueChain(Valuation<T> f, CliqueTransform<T> h)
      : f_(std::move(f)), h_(std::move(h)), table_(f_.graph()) {}

  Valuation<T> f_;
  CliqueTransform<T> h_;
  AdmissibilityTable table_;
  std::vector<T> initial_;
  std::vector<T> transition_;
  std::vector<T> normalizer_;
  std::vector<double> initial_cdf_;
  std::vector<std::vector<std::pair<std::size_t, double>>> row_cdf_;
};

// Throws NotBernoulli unless h(∅) = 0 and h > 0 on non-empty cliques. The
// construction checks h = f·g on every clique and row-stochasticity; a
// failure there throws NumericError.
template <Scalar U>
CliqueChain<U> build_chain(const Valuation<U>& f) {
  using Traits = NumericTraits<U>;
  auto report = is_bernoulli(f);
  if (!report.bernoulli) {
    std::string message = "valuation is not Bernoulli: h(∅) = " + Traits::format(report.h_empty);
    for (const auto& [c, value] : report.nonpositive) {
      message += ", h" + format_clique(f.graph(), c) + " = " + Traits::format(value);
    }
    throw NotBernoulli(message);
  }
  CliqueChain<U> chain(f, std::move(*report.transform));
  const auto& g = f.graph();
  const std::size_t k = chain.state_count();
  chain.initial_.resize(k);
  for (std::size_t i = 0; i < k; ++i) chain.initial_[i] = chain.h_.at(chain.table_.nonempty[i]);

  chain.normalizer_.assign(g.cliques().size(), Traits::zero());
  for (std::size_t i = 0; i < k; ++i) {
    U total = Traits::zero();
    for (std::size_t j : chain.table_.successors[i]) total += chain.initial_[j];
    chain.normalizer_[g.clique_position(chain.table_.nonempty[i])] = total;
  }
  for (Clique c : g.cliques()) {
    if (!nearly_equal(U(chain.h_.at(c)), U(f.of_clique(c) * chain.normalizer(c)))) {
      throw NumericError("h(c) = f(c)·g(c) fails at " + format_clique(g, c));
    }
  }

  chain.transition_.assign(k * k, Traits::zero());
  chain.row_cdf_.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    const U& norm = chain.normalizer_[g.clique_position(chain.table_.nonempty[i])];
    U row_sum = Traits::zero();
    double cumulative = 0.0;
    for (std::size_t j : chain.table_.successors[i]) {
      U p = chain.initial_[j] / norm;
      row_sum += p;
      cumulative += Traits::to_double(p);
      chain.row_cdf_[i].emplace_back(j, cumulative);
      chain.transition_[i * k + j] = std::move(p);
    }
    if (!nearly_equal(row_sum, Traits::one())) {
      throw NumericError("transition row of " + format_clique(g, chain.table_.nonempty[i]) + " does not sum to 1");
    }
  }
  U total = Traits::zero();
  double cumulative = 0.0;
  for (const U& p : chain.initial_) {
    total += p;
    cumulative += Traits::to_double(p);
    chain.initial_cdf_.push_back(cumulative);
  }
  if (!nearly_equal(total, Traits::one())) throw NumericError("initial distribution does not sum to 1");
  return chain;
}

// f(c1)⋯f(c_{n−1})·h(c_n). Throws InputError if the prefix is empty or not a CF chain.
template <Scalar T>
T path_probability(const CliqueChain<T>& chain, const Trace& prefix) {
  if (prefix.is_identity()) throw InputError("boundary prefix must be non-empty");
  if (!is_cf_chain(chain.graph(), prefix.cliques)) throw InputError("prefix violates the Cartier-Foata chain condition");
  return atom_weight(chain.valuation(), chain.transform(), prefix);
}

// initial(c1)·P(c1,c2)⋯P(c_{n−1},c_n), the same probability read off the chain.
template <Scalar T>
T markov_path_probability(const CliqueChain<T>& chain, const Trace& prefix) {
  if (prefix.is_identity()) throw InputError("boundary prefix must be non-empty");
  if (!is_cf_chain(chain.graph(), prefix.cliques)) throw InputError("prefix violates the Cartier-Foata chain condition");
  T out = chain.initial(prefix.cliques.front());
  for (std::size_t i = 1; i < prefix.height(); ++i) out *= chain.transition(prefix.cliques[i - 1], prefix.cliques[i]);
  return out;
}

template <Scalar T>
T cylinder_probability(const Valuation<T>& f, const Trace& u) {
  return f(u);
}

// Σ_{x ∈ M(u)} P(C1⋯C_{τ(u)} = x): the cylinder as a union of atoms.
template <Scalar T>
T cylinder_probability_by_atoms(const Valuation<T>& f, const CliqueTransform<T>& h, const Trace& u) {
  T out = NumericTraits<T>::zero();
  for (const Trace& x : extensions_same_height(f.graph(), u)) out += atom_weight(f, h, x);
  return out;
}

// P(↑w1 ∩ … ∩ ↑wk) as the total mass of the atoms of height
// m = max(1, τ(wi)) lying above every wi. Those atoms all lie above a base b
// of maximal height, so only M(b) is scanned; probability_by_level scans the
// whole level instead and is kept as the reference. Level lists are built
// lazily and shared between threads.
template <Scalar T>
class IntersectionOracle {
 public:
  explicit IntersectionOracle(Valuation<T> f, std::size_t cap = kDefaultEnumerationCap)
      : f_(std::move(f)), h_(mobius_transform(f_)), cap_(cap) {}

  const Valuation<T>& valuation() const { return f_; }
  const CliqueTransform<T>& transform() const { return h_; }

  T probability(std::span<const Trace> bases) const {
    const auto& g = f_.graph();
    const Trace* highest = nullptr;
    for (const Trace& w : bases) {
      if (!highest || w.height() > highest->height()) highest = &w;
    }
    T out = NumericTraits<T>::zero();
    if (!highest || highest->is_identity()) {
      for (Clique c : g.cliques()) out += h_.at(c);
      return out;
    }
    for (const Trace& x : extensions_same_height(g, *highest)) {
      if (above_all(bases, x)) out += atom_weight(f_, h_, x);
    }
    return out;
  }

  T probability_by_level(std::span<const Trace> bases) const {
    std::size_t m = 1;
    for (const Trace& w : bases) m = std::max(m, w.height());
    const Level& atoms = level(m);
    T out = NumericTraits<T>::zero();
    for (std::size_t i = 0; i < atoms.traces.size(); ++i) {
      if (above_all(bases, atoms.traces[i])) out += atoms.weights[i];
    }
    return out;
  }

  T probability(const Trace& u, const Trace& w) const {
    const Trace bases[] = {u, w};
    return probability(std::span<const Trace>(bases));
  }

 private:
  bool above_all(std::span<const Trace> bases, const Trace& x) const {
    for (const Trace& w : bases) {
      if (!leq_gamma(f_.graph(), w, x)) return false;
    }
    return true;
  }

  struct Level {
    std::vector<Trace> traces;
    std::vector<T> weights;
  };

  const Level& level(std::size_t m) const {
    std::lock_guard<std::mutex> lock(mutex_);
    auto& slot = levels_[m];
    if (!slot) {
      auto fresh = std::make_unique<Level>();
      fresh->traces = enumerate_by_height(f_.graph(), m, cap_);
      fresh->weights.reserve(fresh->traces.size());
      for (const Trace& x : fresh->traces) fresh->weights.push_back(atom_weight(f_, h_, x));
      slot = std::move(fresh);
    }
    return *slot;
  }

  Valuation<T> f_;
  CliqueTransform<T> h_;
  std::size_t cap_;
  mutable std::mutex mutex_;
  mutable std::map<std::size_t, std::unique_ptr<Level>> levels_;
};

template <Scalar T>
T cylinder_intersection_probability(const Valuation<T>& f, const Trace& u, const Trace& w,
                                    std::size_t cap = kDefaultEnumerationCap) {
  return IntersectionOracle<T>(f, cap).probability(u, w);
}

template <Scalar T>
struct AtomDecomposition {
  T atom;               // P(C1 = c1, …, Cn = cn)
  T cylinder;           // P(↑u)
  T union_probability;  // P(⋃_{c > cn} ↑(v·c))
  bool holds = false;
};

// Letters that can join the last clique of u: not in it and independent of all of it.
std::vector<LetterIndex> letters_parallel_to(const IndependenceGraph& g, Clique c);

// Checks atom = cylinder − union, the union being expanded by
// inclusion-exclusion over the letters parallel to cn; each intersection
// of cylinders comes from the atom oracle.
template <Scalar T>
AtomDecomposition<T> atom_decomposition(const IntersectionOracle<T>& oracle, const Trace& u) {
  if (u.is_identity()) throw InputError("atom decomposition needs a non-empty trace");
  const auto& f = oracle.valuation();
  const auto& g = f.graph();
  const auto letters = letters_parallel_to(g, u.last());
  if (letters.size() > 20) throw CapExceeded("too many letters for inclusion-exclusion");
  AtomDecomposition<T> out;
  out.atom = atom_weight(f, oracle.transform(), u);
  out.cylinder = f(u);
  out.union_probability = NumericTraits<T>::zero();
  const std::uint64_t subsets = std::uint64_t{1} << letters.size();
  std::vector<Trace> bases;
  for (std::uint64_t s = 1; s < subsets; ++s) {
    bases.clear();
    for (std::size_t i = 0; i < letters.size(); ++i) {
      if ((s >> i) & 1U) bases.push_back(concat(g, u, Trace({Clique::singleton(letters[i])})));
    }
    const T term = oracle.probability(bases);
    if (std::popcount(s) % 2 == 1) {
      out.union_probability += term;
    } else {
      out.union_probability -= term;
    }
  }
  out.holds = nearly_equal(out.atom, T(out.cylinder - out.union_probability));
  return out;
}

// SplitMix64 step; used to derive independent generator streams.
std::uint64_t splitmix64(std::uint64_t x);
// Seed of stream `index` under master seed `seed`.
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index);

// The sampler draws from std::mt19937_64 seeded with splitmix64(seed); each
// draw takes one 64-bit output, keeps its top 53 bits as a uniform in [0,1),
// and inverts the cumulative distribution over states in enumeration order.
class PrefixRng {
 public:
  explicit PrefixRng(std::uint64_t seed) : engine_(splitmix64(seed)) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

template <Scalar T>
Trace sample_prefix(const CliqueChain<T>& chain, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw InputError("prefix height must be at least 1");
  PrefixRng rng(seed);
  const auto& init = chain.initial_cdf();
  auto pick_initial = [&](double u) {
    for (std::size_t i = 0; i < init.size(); ++i) {
      if (u < init[i]) return i;
    }
    return init.size() - 1;
  };
  Trace out;
  std::size_t state = pick_initial(rng.uniform());
  out.cliques.push_back(chain.state(state));
  for (std::size_t step = 1; step < n; ++step) {
    const auto& row = chain.row_cdf(state);
    const double u = rng.uniform() * row.back().second;
    std::size_t next = row.back().first;
    for (const auto& [to, cdf] : row) {
      if (u < cdf) {
        next = to;
        break;
      }
    }
    state = next;
    out.cliques.push_back(chain.state(state));
  }
  return out;
}

// Prefix i is drawn from stream_seed(seed, i), so the output does not
// depend on the number of workers.
template <Scalar T>
std::vector<Trace> sample_prefixes(const CliqueChain<T>& chain, std::size_t n, std::size_t count, std::uint64_t seed,
                                   Execution exec = Execution::parallel) {
  std::vector<Trace> out(count);
  for_each_index(count, [&](std::size_t i) { out[i] = sample_prefix(chain, n, stream_seed(seed, i)); }, exec);
  return out;
}

// marginals[k][s] = P(C_{k+1} = state s), k < n.
template <Scalar T>
std::vector<std::vector<T>> exact_marginals(const CliqueChain<T>& chain, std::size_t n) {
  std::vector<std::vector<T>> out;
  if (n == 0) return out;
  const std::size_t k = chain.state_count();
  std::vector<T> current(k);
  for (std::size_t i = 0; i < k; ++i) current[i] = chain.initial(i);
  out.push_back(current);
  for (std::size_t step = 1; step < n; ++step) {
    std::vector<T> next(k, NumericTraits<T>::zero());
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j : chain.table().successors[i]) next[j] += current[i] * chain.transition(i, j);
    }
    current = std::move(next);
    out.push_back(current);
  }
  return out;
}

// counts[k][s] = number of samples whose (k+1)-th clique is state s.
template <Scalar T>
std::vector<std::vector<std::size_t>> empirical_counts(const CliqueChain<T>& chain, std::span<const Trace> samples,
                                                       std::size_t n) {
  std::vector<std::vector<std::size_t>> counts(n, std::vector<std::size_t>(chain.state_count(), 0));
  for (const Trace& x : samples) {
    for (std::size_t k = 0; k < n && k < x.height(); ++k) ++counts[k][chain.state_of(x.cliques[k])];
  }
  return counts;
}

}  // namespace tracemob
