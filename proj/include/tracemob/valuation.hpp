#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "tracemob/errors.hpp"
#include "tracemob/graph.hpp"
#include "tracemob/numeric.hpp"
#include "tracemob/trace.hpp"

namespace tracemob {

using GraphPtr = std::shared_ptr<const IndependenceGraph>;

// A positive multiplicative weight on traces, fixed by its letter weights.
// The scalar type selects the numeric mode: Rational is exact, double uses
// the absolute tolerance kFloatTolerance.
template <Scalar T>
class Valuation {
 public:
  Valuation(GraphPtr graph, std::vector<T> weights) : graph_(std::move(graph)), weights_(std::move(weights)) {
    if (!graph_) throw std::invalid_argument("valuation needs a graph");
    if (weights_.size() != graph_->letter_count()) {
      throw InputError("valuation needs one weight per letter");
    }
    for (std::size_t a = 0; a < weights_.size(); ++a) {
      if (!(weights_[a] > NumericTraits<T>::zero())) {
        throw InputError("weight of '" + graph_->name(a) + "' must be positive");
      }
    }
  }

  const IndependenceGraph& graph() const { return *graph_; }
  const GraphPtr& graph_ptr() const { return graph_; }
  const std::vector<T>& weights() const { return weights_; }
  const T& weight(LetterIndex a) const { return weights_.at(a); }

  T of_clique(Clique c) const {
    T out = NumericTraits<T>::one();
    for (LetterIndex a : c.members()) out *= weights_[a];
    return out;
  }

  T operator()(const Trace& u) const {
    T out = NumericTraits<T>::one();
    for (Clique c : u.cliques) out *= of_clique(c);
    return out;
  }

  // True when every letter carries the same weight.
  bool is_uniform() const {
    for (const T& w : weights_) {
      if (!nearly_equal(w, weights_.front())) return false;
    }
    return true;
  }

  static NumericMode mode() { return NumericTraits<T>::mode; }

 private:
  GraphPtr graph_;
  std::vector<T> weights_;
};

// Every letter weighted by the smallest root p0 of the Möbius polynomial.
Valuation<double> uniform_valuation(GraphPtr graph);

template <Scalar T>
T valuate(const Valuation<T>& f, const Trace& u) {
  return f(u);
}

// Values indexed like graph.cliques().
template <Scalar T>
class CliqueTransform {
 public:
  CliqueTransform(GraphPtr graph, std::vector<T> values) : graph_(std::move(graph)), values_(std::move(values)) {}
  const T& at(Clique c) const { return values_.at(graph_->clique_position(c)); }
  const std::vector<T>& values() const { return values_; }
  const IndependenceGraph& graph() const { return *graph_; }

 private:
  GraphPtr graph_;
  std::vector<T> values_;
};

// Alternating superclique sum of an arbitrary function on cliques.
template <Scalar T>
std::vector<T> clique_mobius_transform(const IndependenceGraph& g, const std::function<T(Clique)>& value) {
  const auto& cliques = g.cliques();
  std::vector<T> base;
  base.reserve(cliques.size());
  for (Clique c : cliques) base.push_back(value(c));
  std::vector<T> out(cliques.size(), NumericTraits<T>::zero());
  for (std::size_t i = 0; i < cliques.size(); ++i) {
    for (std::size_t j = 0; j < cliques.size(); ++j) {
      if (!cliques[i].is_subset_of(cliques[j])) continue;
      if ((cliques[j].size() - cliques[i].size()) % 2 == 0) {
        out[i] += base[j];
      } else {
        out[i] -= base[j];
      }
    }
  }
  return out;
}

// h(c) = Σ_{c' ⊇ c} (−1)^{|c'|−|c|} f(c').
template <Scalar T>
CliqueTransform<T> mobius_transform(const Valuation<T>& f) {
  return CliqueTransform<T>(f.graph_ptr(), clique_mobius_transform<T>(f.graph(), [&](Clique c) { return f.of_clique(c); }));
}

template <Scalar T>
struct BernoulliReport {
  bool bernoulli = false;
  bool irreducible = true;
  T h_empty{};
  bool h_empty_vanishes = false;
  // Non-empty cliques with h(c) ≤ 0.
  std::vector<std::pair<Clique, T>> nonpositive;
  std::optional<CliqueTransform<T>> transform;
};

template <Scalar T>
BernoulliReport<T> is_bernoulli(const Valuation<T>& f) {
  BernoulliReport<T> report;
  report.irreducible = is_irreducible(f.graph());
  auto h = mobius_transform(f);
  report.h_empty = h.at(Clique());
  report.h_empty_vanishes = NumericTraits<T>::is_zero(report.h_empty);
  for (Clique c : f.graph().cliques()) {
    if (c.empty()) continue;
    if (!NumericTraits<T>::is_positive(h.at(c))) report.nonpositive.emplace_back(c, h.at(c));
  }
  report.bernoulli = report.h_empty_vanishes && report.nonpositive.empty();
  report.transform = std::move(h);
  return report;
}

// A function on traces with an explicit domain: either a rule, optionally
// restricted to a height bound, or a frozen table on all traces up to a bound.
// Evaluating outside the domain throws DomainError.
template <Scalar T>
class TraceFunction {
 public:
  using Rule = std::function<T(const Trace&)>;
  using Table = std::unordered_map<Trace, T, TraceHash>;

  static TraceFunction from_rule(Rule rule, std::optional<std::size_t> height_bound = std::nullopt) {
    TraceFunction out;
    out.rule_ = std::move(rule);
    out.bound_ = height_bound;
    return out;
  }

  static TraceFunction from_table(Table table, std::size_t height_bound) {
    TraceFunction out;
    auto shared = std::make_shared<const Table>(std::move(table));
    out.rule_ = [shared](const Trace& u) -> T {
      const auto it = shared->find(u);
      if (it == shared->end()) throw DomainError("trace missing from table");
      return it->second;
    };
    out.bound_ = height_bound;
    return out;
  }

  T operator()(const Trace& u) const {
    if (bound_ && u.height() > *bound_) {
      throw DomainError("trace of height " + std::to_string(u.height()) + " outside domain (bound " +
                        std::to_string(*bound_) + ")");
    }
    return rule_(u);
  }

  bool in_domain(const Trace& u) const { return !bound_ || u.height() <= *bound_; }
  std::optional<std::size_t> height_bound() const { return bound_; }

 private:
  Rule rule_;
  std::optional<std::size_t> bound_;
};

enum class GradedForm {
  // Σ_{c' ⊇ c} (−1)^{|c'|−|c|} F(v·c') with u = v·c.
  superclique,
  // Σ_{δ ∥ c} (−1)^{|δ|} F(u·δ).
  parallel,
};

template <Scalar T>
T graded_mobius_transform(const IndependenceGraph& g, const TraceFunction<T>& F, const Trace& u,
                          GradedForm form = GradedForm::superclique) {
  T out = NumericTraits<T>::zero();
  auto accumulate = [&](std::size_t sign_exponent, const Trace& x) {
    if (sign_exponent % 2 == 0) {
      out += F(x);
    } else {
      out -= F(x);
    }
  };
  const Clique last = u.last();
  if (form == GradedForm::superclique) {
    const Trace v = u.without_last();
    for (Clique c : g.cliques()) {
      if (!last.is_subset_of(c)) continue;
      accumulate(c.size() - last.size(), concat(g, v, clique_trace(c)));
    }
  } else {
    for (Clique delta : g.cliques()) {
      if (!parallel(g, delta, last)) continue;
      accumulate(delta.size(), concat(g, u, clique_trace(delta)));
    }
  }
  return out;
}

// H as a trace function, with the domain of F.
template <Scalar T>
TraceFunction<T> graded_transform_function(GraphPtr g, TraceFunction<T> F,
                                           GradedForm form = GradedForm::superclique) {
  const auto bound = F.height_bound();
  return TraceFunction<T>::from_rule(
      [g = std::move(g), F = std::move(F), form](const Trace& u) { return graded_mobius_transform(*g, F, u, form); },
      bound);
}

// Σ_{x ∈ M(u)} H(x); reproduces F(u) when H is the graded transform of F.
template <Scalar T>
T inversion_sum(const IndependenceGraph& g, const TraceFunction<T>& H, const Trace& u) {
  T out = NumericTraits<T>::zero();
  for (const Trace& x : extensions_same_height(g, u)) out += H(x);
  return out;
}

// `weight: <letter> <value>` lines, or a single `weight: * uniform`.
struct ValuationSpec {
  bool uniform = false;
  std::vector<std::pair<std::string, Rational>> weights;
  std::vector<std::size_t> lines;
};

ValuationSpec parse_valuation_spec(std::string_view text);
ValuationSpec load_valuation_spec(const std::string& path);

// Letter weights in declaration order. Throws InputError on unknown,
// duplicate or missing letters, or when the spec is uniform.
std::vector<Rational> resolve_weights(const IndependenceGraph& g, const ValuationSpec& spec);

template <Scalar T>
Valuation<T> make_valuation(GraphPtr g, const ValuationSpec& spec) {
  if (spec.uniform) {
    if constexpr (NumericTraits<T>::mode == NumericMode::floating) {
      return uniform_valuation(std::move(g));
    } else {
      throw InputError("the uniform valuation has irrational weights in general; use float mode");
    }
  } else {
    std::vector<T> weights;
    for (const Rational& q : resolve_weights(*g, spec)) weights.push_back(NumericTraits<T>::from_rational(q));
    return Valuation<T>(std::move(g), std::move(weights));
  }
}

}  // namespace tracemob
