#pragma once

#include <algorithm>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tracemob/boundary.hpp"
#include "tracemob/errors.hpp"
#include "tracemob/parallel.hpp"
#include "tracemob/trace.hpp"
#include "tracemob/valuation.hpp"

namespace tracemob {

// φ = Σ aᵢ·1_{↑wᵢ}; with non-negative weights also read as the measure
// ν(A) = Σ aᵢ·P(A ∩ ↑wᵢ).
template <Scalar T>
struct CylinderCombination {
  struct Term {
    T weight;
    Trace base;
  };
  std::vector<Term> terms;

  // Σ|aᵢ|, an upper bound for |φ|.
  T weight_bound() const {
    T out = NumericTraits<T>::zero();
    for (const auto& t : terms) out += NumericTraits<T>::abs(t.weight);
    return out;
  }
  bool nonnegative() const {
    return std::all_of(terms.begin(), terms.end(), [](const Term& t) { return !(t.weight < NumericTraits<T>::zero()); });
  }

  template <Scalar U>
  CylinderCombination<U> convert() const {
    CylinderCombination<U> out;
    for (const auto& t : terms) {
      if constexpr (std::is_same_v<T, Rational>) {
        out.terms.push_back({NumericTraits<U>::from_rational(t.weight), t.base});
      } else {
        out.terms.push_back({U(t.weight), t.base});
      }
    }
    return out;
  }
};

// `term: <weight> <letters…>` lines; `#` comments. An empty word is the identity.
CylinderCombination<Rational> parse_cylinder_combination(const IndependenceGraph& g, std::string_view text);
CylinderCombination<Rational> load_cylinder_combination(const IndependenceGraph& g, const std::string& path);

template <Scalar T>
using HarmonicCandidate = TraceFunction<T>;

// Δλ(u) = Σ_{c} (−1)^{|c|} f(c) λ(u·c).
template <Scalar T>
T laplace(const Valuation<T>& f, const HarmonicCandidate<T>& lambda, const Trace& u) {
  const auto& g = f.graph();
  T out = NumericTraits<T>::zero();
  for (Clique c : g.cliques()) {
    T term = f.of_clique(c) * lambda(concat(g, u, clique_trace(c)));
    if (c.size() % 2 == 0) {
      out += term;
    } else {
      out -= term;
    }
  }
  return out;
}

template <Scalar T>
struct HarmonicReport {
  bool harmonic = true;
  std::optional<Trace> witness;  // first violation in enumeration order
  T witness_value{};
  double max_abs_laplace = 0.0;
  std::size_t checked = 0;
};

// Checks Δλ = 0 on every trace of height ≤ height_bound. Exact for Rational;
// in float mode the tolerance is kFloatTolerance·max(1, max|λ|) over the
// traces touched at that point.
template <Scalar T>
HarmonicReport<T> is_harmonic(const Valuation<T>& f, const HarmonicCandidate<T>& lambda, std::size_t height_bound,
                              Execution exec = Execution::parallel) {
  using Traits = NumericTraits<T>;
  const auto& g = f.graph();
  const auto traces = enumerate_up_to_height(g, height_bound, exec);
  struct Point {
    T delta{};
    double scale = 1.0;
  };
  const auto points = map_traces(
      std::span<const Trace>(traces),
      [&](const Trace& u) {
        Point p;
        p.delta = Traits::zero();
        for (Clique c : g.cliques()) {
          const T value = lambda(concat(g, u, clique_trace(c)));
          p.scale = std::max(p.scale, Traits::to_double(Traits::abs(value)));
          T term = f.of_clique(c) * value;
          if (c.size() % 2 == 0) {
            p.delta += term;
          } else {
            p.delta -= term;
          }
        }
        return p;
      },
      exec);
  HarmonicReport<T> report;
  report.checked = traces.size();
  for (std::size_t i = 0; i < traces.size(); ++i) {
    const double magnitude = Traits::to_double(Traits::abs(points[i].delta));
    report.max_abs_laplace = std::max(report.max_abs_laplace, magnitude);
    if (report.harmonic && !Traits::is_zero(points[i].delta, points[i].scale)) {
      report.harmonic = false;
      report.witness = traces[i];
      report.witness_value = points[i].delta;
    }
  }
  return report;
}

// λ(u) = (1/f(u))·Σ aᵢ·P(↑u ∩ ↑wᵢ), evaluated exactly through the atom oracle.
template <Scalar T>
HarmonicCandidate<T> from_boundary(const Valuation<T>& f, const CylinderCombination<T>& phi,
                                   std::size_t cap = kDefaultEnumerationCap) {
  if (!is_bernoulli(f).bernoulli) throw NotBernoulli("boundary integrals need a Bernoulli valuation");
  auto oracle = std::make_shared<const IntersectionOracle<T>>(f, cap);
  return HarmonicCandidate<T>::from_rule([oracle, phi](const Trace& u) {
    T total = NumericTraits<T>::zero();
    for (const auto& term : phi.terms) total += term.weight * oracle->probability(u, term.base);
    return T(total / oracle->valuation()(u));
  });
}

// λ(u) = ν(↑u)/P(↑u) for ν = Σ aᵢ·P(· ∩ ↑wᵢ) with aᵢ ≥ 0.
template <Scalar T>
HarmonicCandidate<T> measure_harmonic(const Valuation<T>& f, const CylinderCombination<T>& nu,
                                      std::size_t cap = kDefaultEnumerationCap) {
  if (!nu.nonnegative()) throw InputError("measure weights must be non-negative");
  return from_boundary(f, nu, cap);
}

// Y_n on the atom {C1..Cn = prefix}:
// (1/h(Cn))·Σ_{c ⊇ Cn} (−1)^{|c|−|Cn|} f(c) λ(V·c), V = C1⋯C_{n−1}.
template <Scalar T>
T martingale_Y(const Valuation<T>& f, const CliqueTransform<T>& h, const HarmonicCandidate<T>& lambda,
               const Trace& prefix) {
  if (prefix.is_identity()) throw InputError("martingale needs a non-empty prefix");
  const auto& g = f.graph();
  const Clique last = prefix.last();
  const T& denominator = h.at(last);
  if (NumericTraits<T>::is_zero(denominator)) throw NumericError("h vanishes on the last clique");
  const Trace v = prefix.without_last();
  T sum = NumericTraits<T>::zero();
  for (Clique c : g.cliques()) {
    if (!last.is_subset_of(c)) continue;
    T term = f.of_clique(c) * lambda(concat(g, v, clique_trace(c)));
    if ((c.size() - last.size()) % 2 == 0) {
      sum += term;
    } else {
      sum -= term;
    }
  }
  return T(sum / denominator);
}

template <Scalar T>
T martingale_Y(const Valuation<T>& f, const HarmonicCandidate<T>& lambda, const Trace& prefix) {
  return martingale_Y(f, mobius_transform(f), lambda, prefix);
}

// E(Y_{n+1} | C1..Cn = prefix) = Σ_{c : Cn → c} P(Cn, c)·Y_{n+1}(prefix·c).
template <Scalar T>
T martingale_step(const CliqueChain<T>& chain, const HarmonicCandidate<T>& lambda, const Trace& prefix) {
  if (prefix.is_identity()) throw InputError("martingale needs a non-empty prefix");
  const std::size_t from = chain.state_of(prefix.last());
  T out = NumericTraits<T>::zero();
  Trace extended = prefix;
  extended.cliques.emplace_back();
  for (std::size_t to : chain.table().successors[from]) {
    extended.cliques.back() = chain.state(to);
    out += chain.transition(from, to) *
           martingale_Y(chain.valuation(), chain.transform(), lambda, extended);
  }
  return out;
}

// E(φ | C1..Cn = prefix) by removing from ↑u the cylinders ↑(u·a), a ∥ Cn,
// with inclusion-exclusion; every integral ∫_{∩↑z} φ dP is a sum of
// intersection probabilities.
template <Scalar T>
T conditional_expectation(const IntersectionOracle<T>& oracle, const CylinderCombination<T>& phi,
                          const Trace& prefix) {
  if (prefix.is_identity()) throw InputError("conditional expectation needs a non-empty prefix");
  const auto& f = oracle.valuation();
  const auto& g = f.graph();
  auto integral = [&](std::vector<Trace> bases) {
    T out = NumericTraits<T>::zero();
    bases.emplace_back();
    for (const auto& term : phi.terms) {
      bases.back() = term.base;
      out += term.weight * oracle.probability(bases);
    }
    return out;
  };
  T total = integral({prefix});
  const auto letters = letters_parallel_to(g, prefix.last());
  if (letters.size() > 20) throw CapExceeded("too many letters for inclusion-exclusion");
  const std::uint64_t subsets = std::uint64_t{1} << letters.size();
  for (std::uint64_t s = 1; s < subsets; ++s) {
    std::vector<Trace> bases;
    for (std::size_t i = 0; i < letters.size(); ++i) {
      if ((s >> i) & 1U) bases.push_back(concat(g, prefix, Trace({Clique::singleton(letters[i])})));
    }
    const T term = integral(std::move(bases));
    if (std::popcount(s) % 2 == 1) {
      total -= term;
    } else {
      total += term;
    }
  }
  return T(total / atom_weight(f, oracle.transform(), prefix));
}

template <Scalar T>
struct PoissonReport {
  bool holds = true;
  double max_deviation = 0.0;
  std::optional<Trace> worst;
  std::size_t checked = 0;
};

// For λ = from_boundary(φ) and F = f·λ, compares F(u) with
// Σ_{x ∈ M(u)} H(x), H the graded transform of F, on all traces up to the bound.
template <Scalar T>
PoissonReport<T> poisson_roundtrip(const Valuation<T>& f, const CylinderCombination<T>& phi, std::size_t height_bound,
                                   Execution exec = Execution::parallel) {
  using Traits = NumericTraits<T>;
  const auto& g = f.graph();
  const auto lambda = from_boundary(f, phi);
  const auto F = TraceFunction<T>::from_rule([f, lambda](const Trace& u) { return T(f(u) * lambda(u)); });
  const auto traces = enumerate_up_to_height(g, height_bound, exec);
  const auto deviations = map_traces(
      std::span<const Trace>(traces),
      [&](const Trace& u) {
        T sum = Traits::zero();
        for (const Trace& x : extensions_same_height(g, u)) sum += graded_mobius_transform(g, F, x);
        return T(sum - F(u));
      },
      exec);
  PoissonReport<T> report;
  report.checked = traces.size();
  for (std::size_t i = 0; i < traces.size(); ++i) {
    const double d = Traits::to_double(Traits::abs(deviations[i]));
    if (d > report.max_deviation || (!report.worst && !Traits::is_zero(deviations[i]))) {
      report.max_deviation = std::max(report.max_deviation, d);
      report.worst = traces[i];
    }
    if (!Traits::is_zero(deviations[i])) report.holds = false;
  }
  return report;
}

// Σ_{δ ∥ c} (−1)^{|δ|} f(δ) λ(u·δ), c the last clique of u.
template <Scalar T>
T corollary_sum(const Valuation<T>& f, const HarmonicCandidate<T>& lambda, const Trace& u) {
  if (u.is_identity()) throw InputError("corollary sum needs a non-empty trace");
  const auto& g = f.graph();
  const Clique last = u.last();
  T out = NumericTraits<T>::zero();
  for (Clique delta : g.cliques()) {
    if (!parallel(g, delta, last)) continue;
    T term = f.of_clique(delta) * lambda(concat(g, u, clique_trace(delta)));
    if (delta.size() % 2 == 0) {
      out += term;
    } else {
      out -= term;
    }
  }
  return out;
}

// G(x, y) = f(y)/f(x) if x ≤ y, else 0.
template <Scalar T>
T green_kernel(const Valuation<T>& f, const Trace& x, const Trace& y) {
  if (!leq_gamma(f.graph(), x, y)) return NumericTraits<T>::zero();
  return T(f(y) / f(x));
}

// x ↦ G(x, y).
template <Scalar T>
HarmonicCandidate<T> green_section(const Valuation<T>& f, const Trace& y) {
  return HarmonicCandidate<T>::from_rule([f, y](const Trace& x) { return green_kernel(f, x, y); });
}

// K_y(x) = 1_{x ≤ y}/f(x).
template <Scalar T>
T martin_kernel(const Valuation<T>& f, const Trace& y, const Trace& x) {
  if (!leq_gamma(f.graph(), x, y)) return NumericTraits<T>::zero();
  return T(NumericTraits<T>::one() / f(x));
}

// K_ξ(x) = 1_{x ≤ ξ}/f(x) for the infinite trace starting with `prefix`.
// Whether x ≤ ξ is fixed by the first τ(x) cliques, so heights beyond the
// prefix are refused with DomainError.
template <Scalar T>
T martin_limit(const Valuation<T>& f, const Trace& prefix, const Trace& x) {
  if (x.height() > prefix.height()) {
    throw DomainError("x has height " + std::to_string(x.height()) + " but the boundary prefix only " +
                      std::to_string(prefix.height()));
  }
  if (!leq_gamma(f.graph(), x, prefix)) return NumericTraits<T>::zero();
  return T(NumericTraits<T>::one() / f(x));
}

template <Scalar T>
HarmonicCandidate<T> martin_limit_function(const Valuation<T>& f, const Trace& prefix) {
  return HarmonicCandidate<T>::from_rule([f, prefix](const Trace& x) { return martin_limit(f, prefix, x); },
                                         prefix.height());
}

// λ(u) = (p/p0)^{|u|} for the uniform valuation (all weights p0) and a
// root p of the Möbius polynomial. Throws NumericError otherwise.
template <Scalar T>
HarmonicCandidate<T> power_harmonic(const Valuation<T>& f, const T& p) {
  using Traits = NumericTraits<T>;
  if (!f.is_uniform()) throw NumericError("power harmonic functions need the uniform valuation");
  const auto mu = mobius_polynomial(f.graph());
  const T p0 = f.weight(0);
  if (!Traits::is_zero(mu.evaluate(p0))) throw NumericError("letter weight is not a root of the Möbius polynomial");
  if (!Traits::is_zero(mu.evaluate(p))) {
    throw NumericError(Traits::format(p) + " is not a root of the Möbius polynomial");
  }
  const T ratio = p / p0;
  return HarmonicCandidate<T>::from_rule([ratio](const Trace& u) { return power(ratio, u.length()); });
}

}  // namespace tracemob
