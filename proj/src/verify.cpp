#include "tracemob/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <sstream>
#include <unordered_set>

#include "tracemob/boundary.hpp"
#include "tracemob/harmonic.hpp"

namespace tracemob {

namespace {

// Accumulates one named identity over many cases; keeps the first failure.
class Tally {
 public:
  Tally(std::string section, std::string name) {
    result_.section = std::move(section);
    result_.name = std::move(name);
    result_.passed = true;
  }

  void add(bool ok, double deviation, const std::string& where) {
    ++result_.cases;
    if (std::isfinite(deviation)) result_.max_deviation = std::max(result_.max_deviation, deviation);
    if (!ok && result_.passed) {
      result_.passed = false;
      result_.detail = "first failure at " + where;
    }
  }

  void fail(const std::string& why) {
    result_.passed = false;
    if (result_.detail.empty()) result_.detail = why;
  }

  void note(const std::string& text) {
    if (result_.passed) result_.detail = text;
  }

  CheckResult take() && {
    result_.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    return std::move(result_);
  }

 private:
  CheckResult result_;
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

template <Scalar T>
double deviation(const T& a, const T& b) {
  return NumericTraits<T>::to_double(NumericTraits<T>::abs(T(a - b)));
}

template <Scalar T>
bool same(const T& a, const T& b, double scale = 1.0) {
  return nearly_equal(a, b, scale);
}

Word random_word(std::mt19937_64& rng, std::size_t letters, std::size_t length) {
  std::uniform_int_distribution<std::size_t> pick(0, letters - 1);
  Word w(length);
  for (auto& a : w) a = pick(rng);
  return w;
}

std::vector<TraceFunction<Rational>::Table> random_tables(const std::vector<Trace>& domain, std::size_t count,
                                                          std::uint64_t seed) {
  std::mt19937_64 rng(splitmix64(seed));
  std::uniform_int_distribution<long> numerator(-20, 20);
  std::uniform_int_distribution<long> denominator(1, 7);
  std::vector<TraceFunction<Rational>::Table> out(count);
  for (auto& table : out) {
    for (const Trace& u : domain) {
      Rational value(numerator(rng), denominator(rng));
      value.canonicalize();
      table.emplace(u, value);
    }
  }
  return out;
}

}  // namespace

bool VerifyReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

VerifyReport verify_combinatorics(const GraphPtr& graph, const VerifyOptions& options) {
  const auto& g = *graph;
  const std::string section = "combinatorial";
  VerifyReport report;
  const std::size_t bound = options.height;
  const auto traces = enumerate_up_to_height(g, bound, options.exec);

  {
    Tally t(section, "clique_counts_match_mobius_polynomial");
    const auto poly = mobius_polynomial(g);
    std::vector<long long> counts;
    for (Clique c : g.cliques()) {
      t.add(g.is_clique(c.mask()), 0.0, format_clique(g, c));
      if (counts.size() <= c.size()) counts.resize(c.size() + 1, 0);
      ++counts[c.size()];
    }
    for (std::size_t k = 0; k < counts.size(); ++k) {
      const long long coef = k < poly.coefficients().size() ? poly.coefficients()[k] : 0;
      t.add(std::llabs(coef) == counts[k], 0.0, "size " + std::to_string(k));
    }
    t.note("μ(X) = " + poly.to_string());
    report.checks.push_back(std::move(t).take());
  }

  {
    Tally t(section, "smallest_root_residual");
    const auto poly = mobius_polynomial(g);
    try {
      const double p0 = smallest_root(poly);
      const double residual = std::abs(poly.evaluate(p0));
      t.add(residual <= kFloatTolerance && p0 > 0.0 && p0 < 1.0, residual, "p0");
      t.note("p0 = " + format_double(p0));
    } catch (const NumericError& e) {
      t.fail(e.what());
    }
    report.checks.push_back(std::move(t).take());
  }

  {
    Tally t(section, "normal_form_confluence");
    std::mt19937_64 rng(splitmix64(options.seed + 17));
    for (std::size_t k = 0; k < options.confluence_words; ++k) {
      const Word w = random_word(rng, g.letter_count(), options.word_length);
      const Trace base = normalize(g, w);
      bool ok = is_cf_chain(g, base.cliques) && base.length() == w.size();
      for (std::size_t i = 0; i + 1 < w.size() && ok; ++i) {
        if (!g.independent(w[i], w[i + 1])) continue;
        Word swapped = w;
        std::swap(swapped[i], swapped[i + 1]);
        ok = normalize(g, swapped) == base;
      }
      t.add(ok, 0.0, "random word #" + std::to_string(k));
    }
    report.checks.push_back(std::move(t).take());
  }

  {
    Tally t(section, "normal_form_is_canonical");
    for (const Trace& x : traces) {
      const bool ok = is_cf_chain(g, x.cliques) && normalize(g, x.linearize()) == x;
      t.add(ok, 0.0, format_trace(g, x));
    }
    report.checks.push_back(std::move(t).take());
  }

  {
    Tally t(section, "prefix_order_divide_vs_gamma");
    const auto agree = map_traces(
        std::span<const Trace>(traces),
        [&](const Trace& u) {
          for (const Trace& v : traces) {
            if (leq(g, u, v) != leq_gamma(g, u, v)) return false;
          }
          return true;
        },
        options.exec);
    for (std::size_t i = 0; i < traces.size(); ++i) t.add(agree[i], 0.0, format_trace(g, traces[i]));
    report.checks.push_back(std::move(t).take());
  }

  {
    Tally t(section, "same_height_extensions_vs_brute_force");
    for (std::size_t n = 0; n <= bound; ++n) {
      const auto level = enumerate_by_height(g, n);
      for (const Trace& u : level) {
        auto got = extensions_same_height(g, u);
        std::vector<Trace> expected;
        if (u.is_identity()) {
          for (Clique c : g.cliques()) expected.push_back(clique_trace(c));
        } else {
          for (const Trace& x : level) {
            if (leq(g, u, x)) expected.push_back(x);
          }
        }
        std::unordered_set<Trace, TraceHash> a(got.begin(), got.end());
        std::unordered_set<Trace, TraceHash> b(expected.begin(), expected.end());
        t.add(a == b && a.size() == got.size(), 0.0, format_trace(g, u));
      }
    }
    report.checks.push_back(std::move(t).take());
  }

  {
    Tally inversion(section, "graded_inversion_random_tables");
    Tally forms(section, "graded_transform_forms_agree");
    // H at the identity reads F on cliques, so tables reach height 1 at least.
    const std::size_t table_bound = std::max<std::size_t>(bound, 1);
    const auto domain = enumerate_up_to_height(g, table_bound, options.exec);
    const auto tables = random_tables(domain, options.random_tables, options.seed);
    for (std::size_t k = 0; k < tables.size(); ++k) {
      const auto F = TraceFunction<Rational>::from_table(tables[k], table_bound);
      const auto H = graded_transform_function(graph, F);
      const auto ok = map_traces(
          std::span<const Trace>(traces),
          [&](const Trace& u) {
            const bool inv = inversion_sum(g, H, u) == F(u);
            const bool alt = graded_mobius_transform(g, F, u, GradedForm::superclique) ==
                             graded_mobius_transform(g, F, u, GradedForm::parallel);
            return std::pair<bool, bool>(inv, alt);
          },
          options.exec);
      for (std::size_t i = 0; i < traces.size(); ++i) {
        const std::string where = "table " + std::to_string(k) + ", u = " + format_trace(g, traces[i]);
        inversion.add(ok[i].first, 0.0, where);
        forms.add(ok[i].second, 0.0, where);
      }
    }
    report.checks.push_back(std::move(inversion).take());
    report.checks.push_back(std::move(forms).take());
  }
  return report;
}

template <Scalar T>
VerifyReport verify_all(const Valuation<T>& f, const VerifyOptions& options) {
  using Traits = NumericTraits<T>;
  const auto& g = f.graph();
  VerifyReport report = verify_combinatorics(f.graph_ptr(), options);
  const std::string section = "probabilistic";
  const std::size_t bound = options.height;

  // The Green kernel identity holds for every valuation.
  const auto traces = enumerate_up_to_height(g, bound, options.exec);
  {
    Tally t("kernel", "green_kernel_point_mass");
    const auto results = map_traces(
        std::span<const Trace>(traces),
        [&](const Trace& y) {
          const auto section_y = green_section(f, y);
          double worst = 0.0;
          bool ok = true;
          for (const Trace& x : traces) {
            const T value = laplace(f, section_y, x);
            const T expected = x == y ? Traits::one() : Traits::zero();
            ok = ok && same(value, expected);
            worst = std::max(worst, deviation(value, expected));
          }
          return std::pair<bool, double>(ok, worst);
        },
        options.exec);
    for (std::size_t i = 0; i < traces.size(); ++i) {
      t.add(results[i].first, results[i].second, "y = " + format_trace(g, traces[i]));
    }
    report.checks.push_back(std::move(t).take());
  }

  const auto bernoulli = is_bernoulli(f);
  {
    Tally t(section, "bernoulli_conditions");
    std::string detail = "h(∅) = " + Traits::format(bernoulli.h_empty);
    if (!bernoulli.h_empty_vanishes) detail += " (must be 0)";
    for (const auto& [c, value] : bernoulli.nonpositive) {
      detail += "; h" + format_clique(g, c) + " = " + Traits::format(value) + " (must be > 0)";
    }
    if (!bernoulli.irreducible) detail += "; warning: monoid is not irreducible";
    if (bernoulli.bernoulli) {
      t.note(detail);
    } else {
      t.fail(detail);
    }
    t.add(bernoulli.h_empty_vanishes, Traits::to_double(Traits::abs(bernoulli.h_empty)), "h(∅)");
    for (const auto& [c, value] : bernoulli.nonpositive) {
      t.add(false, Traits::to_double(Traits::abs(value)), "h" + format_clique(g, c));
    }
    report.checks.push_back(std::move(t).take());
  }
  if (!bernoulli.bernoulli) {
    report.probabilistic_skipped = "valuation is not Bernoulli (h(∅) = " + Traits::format(bernoulli.h_empty) +
                                   "); probabilistic identities skipped";
    return report;
  }

  const auto chain = build_chain(f);
  const auto& h = chain.transform();
  const IntersectionOracle<T> oracle(f);
  const std::size_t prefix_bound = std::max<std::size_t>(bound, 1);
  std::vector<Trace> prefixes;
  for (std::size_t n = 1; n <= prefix_bound; ++n) {
    auto level = enumerate_by_height(g, n);
    prefixes.insert(prefixes.end(), level.begin(), level.end());
  }

  {
    Tally t(section, "chain_h_equals_f_times_g");
    for (Clique c : g.cliques()) {
      const T rhs = f.of_clique(c) * chain.normalizer(c);
      t.add(same(h.at(c), rhs), deviation(h.at(c), rhs), format_clique(g, c));
    }
    for (std::size_t i = 0; i < chain.state_count(); ++i) {
      T row = Traits::zero();
      for (std::size_t j = 0; j < chain.state_count(); ++j) row += chain.transition(i, j);
      t.add(same(row, Traits::one()), deviation(row, Traits::one()), "row " + format_clique(g, chain.state(i)));
    }
    report.checks.push_back(std::move(t).take());
  }

  {
    Tally t(section, "path_probability_equals_graded_transform");
    const auto F = TraceFunction<T>::from_rule([&f](const Trace& u) { return f(u); });
    for (const Trace& x : prefixes) {
      const T p = path_probability(chain, x);
      const T graded = graded_mobius_transform(g, F, x);
      const T markov = markov_path_probability(chain, x);
      t.add(same(p, graded) && same(p, markov), std::max(deviation(p, graded), deviation(p, markov)),
            format_trace(g, x));
    }
    for (std::size_t n = 1; n <= prefix_bound; ++n) {
      T total = Traits::zero();
      for (const Trace& x : enumerate_by_height(g, n)) total += path_probability(chain, x);
      t.add(same(total, Traits::one()), deviation(total, Traits::one()), "partition at height " + std::to_string(n));
    }
    report.checks.push_back(std::move(t).take());
  }

  {
    Tally t(section, "cylinder_equals_sum_of_atoms");
    for (const Trace& u : traces) {
      const T direct = cylinder_probability(f, u);
      const T atoms = cylinder_probability_by_atoms(f, h, u);
      t.add(same(direct, atoms), deviation(direct, atoms), format_trace(g, u));
    }
    report.checks.push_back(std::move(t).take());
  }

  {
    Tally t(section, "atom_decomposition");
    const auto parts = map_traces(
        std::span<const Trace>(prefixes), [&](const Trace& u) { return atom_decomposition(oracle, u); },
        options.exec);
    for (std::size_t i = 0; i < prefixes.size(); ++i) {
      const T rhs = parts[i].cylinder - parts[i].union_probability;
      t.add(parts[i].holds, deviation(parts[i].atom, rhs), format_trace(g, prefixes[i]));
    }
    report.checks.push_back(std::move(t).take());
  }

  {
    Tally t(section, "intersection_oracle_matches_level_scan");
    const std::size_t pair_bound = std::min<std::size_t>(bound, 2);
    const auto small = enumerate_up_to_height(g, pair_bound, options.exec);
    const auto results = map_traces(
        std::span<const Trace>(small),
        [&](const Trace& u) {
          double worst = 0.0;
          bool ok = true;
          for (const Trace& w : small) {
            const Trace bases[] = {u, w};
            const T fast = oracle.probability(std::span<const Trace>(bases));
            const T slow = oracle.probability_by_level(std::span<const Trace>(bases));
            ok = ok && same(fast, slow);
            worst = std::max(worst, deviation(fast, slow));
          }
          return std::pair<bool, double>(ok, worst);
        },
        options.exec);
    for (std::size_t i = 0; i < small.size(); ++i) t.add(results[i].first, results[i].second, format_trace(g, small[i]));
    report.checks.push_back(std::move(t).take());
  }

  // Boundary functions: constant, one cylinder, a signed mix, and a
  // non-negative mix used for the positivity checks.
  const Trace first_letter({Clique::singleton(0)});
  const Trace second_letter({Clique::singleton(1)});
  const Trace two_letters = normalize(g, Word{0, 1});
  const LetterIndex last_index = g.letter_count() - 1;
  const Trace last_letter({Clique::singleton(last_index)});
  std::vector<std::pair<std::string, CylinderCombination<T>>> phis;
  auto rational = [](long p, long q) {
    Rational r(p, q);
    r.canonicalize();
    return Traits::from_rational(r);
  };
  phis.push_back({"1", {{{Traits::one(), Trace()}}}});
  phis.push_back({"1_{↑" + g.name(0) + "}", {{{Traits::one(), first_letter}}}});
  phis.push_back({"mixed",
                  {{{rational(1, 2), first_letter}, {rational(-1, 3), second_letter}, {rational(2, 1), two_letters}}}});
  phis.push_back({"nonnegative mix", {{{rational(1, 2), first_letter}, {rational(1, 2), last_letter}}}});

  std::vector<HarmonicCandidate<T>> lambdas;
  for (const auto& [name, phi] : phis) lambdas.push_back(from_boundary(f, phi));

  {
    Tally t(section, "boundary_functions_are_harmonic");
    for (std::size_t k = 0; k < phis.size(); ++k) {
      const auto r = is_harmonic(f, lambdas[k], bound, options.exec);
      t.add(r.harmonic, r.max_abs_laplace,
            phis[k].first + (r.witness ? " at " + format_trace(g, *r.witness) : std::string()));
    }
    report.checks.push_back(std::move(t).take());
  }

  {
    Tally t(section, "boundary_functions_bounded_and_positive");
    const auto wider = enumerate_up_to_height(g, bound + 1, options.exec);
    for (std::size_t k = 0; k < phis.size(); ++k) {
      const T limit = phis[k].second.weight_bound();
      const bool nonneg = phis[k].second.nonnegative();
      const auto values = map_traces(std::span<const Trace>(wider), [&](const Trace& u) { return lambdas[k](u); },
                                     options.exec);
      for (std::size_t i = 0; i < wider.size(); ++i) {
        const T magnitude = Traits::abs(values[i]);
        bool ok = !(magnitude > limit) || same(magnitude, limit);
        if (nonneg) ok = ok && (!(values[i] < Traits::zero()) || Traits::is_zero(values[i]));
        t.add(ok, 0.0, phis[k].first + " at " + format_trace(g, wider[i]));
      }
    }
    report.checks.push_back(std::move(t).take());
  }

  {
    Tally t(section, "martingale_step");
    for (std::size_t k = 0; k < phis.size(); ++k) {
      const auto results = map_traces(
          std::span<const Trace>(prefixes),
          [&](const Trace& x) {
            const T y = martingale_Y(f, h, lambdas[k], x);
            const T step = martingale_step(chain, lambdas[k], x);
            return std::pair<T, T>(y, step);
          },
          options.exec);
      for (std::size_t i = 0; i < prefixes.size(); ++i) {
        const auto& [y, step] = results[i];
        bool ok = same(y, step);
        if (k == 0) ok = ok && same(y, Traits::one());
        t.add(ok, deviation(y, step), phis[k].first + " at " + format_trace(g, prefixes[i]));
      }
    }
    report.checks.push_back(std::move(t).take());
  }

  {
    Tally t(section, "poisson_roundtrip");
    for (const auto& [name, phi] : phis) {
      const auto r = poisson_roundtrip(f, phi, bound, options.exec);
      t.add(r.holds, r.max_deviation, name + (r.worst ? " at " + format_trace(g, *r.worst) : std::string()));
    }
    report.checks.push_back(std::move(t).take());
  }

  {
    Tally t(section, "conditional_expectation_matches_martingale");
    for (std::size_t k = 0; k < phis.size(); ++k) {
      const auto results = map_traces(
          std::span<const Trace>(prefixes),
          [&](const Trace& x) {
            return std::pair<T, T>(conditional_expectation(oracle, phis[k].second, x),
                                   martingale_Y(f, h, lambdas[k], x));
          },
          options.exec);
      for (std::size_t i = 0; i < prefixes.size(); ++i) {
        const auto& [expectation, y] = results[i];
        t.add(same(expectation, y), deviation(expectation, y), phis[k].first + " at " + format_trace(g, prefixes[i]));
      }
    }
    report.checks.push_back(std::move(t).take());
  }

  {
    Tally t(section, "positivity_inequality");
    for (std::size_t k = 0; k < phis.size(); ++k) {
      if (!phis[k].second.nonnegative()) continue;
      const auto sums = map_traces(std::span<const Trace>(prefixes),
                                   [&](const Trace& u) { return corollary_sum(f, lambdas[k], u); }, options.exec);
      for (std::size_t i = 0; i < prefixes.size(); ++i) {
        const bool ok = !(sums[i] < Traits::zero()) || Traits::is_zero(sums[i]);
        t.add(ok, 0.0, phis[k].first + " at " + format_trace(g, prefixes[i]));
      }
    }
    report.checks.push_back(std::move(t).take());
  }

  {
    Tally t(section, "martin_kernel_harmonic");
    const Trace xi = sample_prefix(chain, bound + 1, options.seed);
    const auto k_xi = martin_limit_function(f, xi);
    const auto r = is_harmonic(f, k_xi, bound, options.exec);
    t.add(r.harmonic, r.max_abs_laplace, "ξ = " + format_trace(g, xi));
    t.note("ξ prefix " + format_trace(g, xi));
    report.checks.push_back(std::move(t).take());
  }

  if constexpr (Traits::mode == NumericMode::floating) {
    if (f.is_uniform()) {
      const auto poly = mobius_polynomial(g);
      const auto roots = roots_in_interval(poly, 0.0, 1.0);
      const double p0 = f.weight(0);
      for (double p : roots) {
        if (std::abs(p - p0) <= 1e-9) continue;
        Tally t(section, "power_harmonic_counterexample");
        const auto lambda = power_harmonic(f, p);
        const auto r = is_harmonic(f, lambda, bound, options.exec);
        t.add(r.harmonic, r.max_abs_laplace, "p = " + format_double(p));
        const T sum = corollary_sum(f, lambda, first_letter);
        std::ostringstream detail;
        detail << "p = " << format_double(p) << "; positivity sum at " << format_trace(g, first_letter) << " = "
               << format_double(sum) << (sum < 0.0 ? " (negative: unbounded harmonic function)" : "");
        t.note(detail.str());
        report.checks.push_back(std::move(t).take());
      }
    }
  }

  {
    Tally t(section, "sampler_initial_frequencies");
    const auto samples = sample_prefixes(chain, 1, options.sampler_count, options.seed, options.exec);
    const auto counts = empirical_counts(chain, std::span<const Trace>(samples), 1);
    const double n = static_cast<double>(options.sampler_count);
    for (std::size_t s = 0; s < chain.state_count(); ++s) {
      const double q = Traits::to_double(chain.initial(s));
      const double freq = static_cast<double>(counts[0][s]) / n;
      const double band = 5.0 * std::sqrt(q * (1.0 - q) / n) + 1e-12;
      t.add(std::abs(freq - q) <= band, std::abs(freq - q), format_clique(g, chain.state(s)));
    }
    t.note(std::to_string(options.sampler_count) + " samples, 5σ bands");
    report.checks.push_back(std::move(t).take());
  }

  return report;
}

template VerifyReport verify_all<double>(const Valuation<double>&, const VerifyOptions&);
template VerifyReport verify_all<Rational>(const Valuation<Rational>&, const VerifyOptions&);

}  // namespace tracemob
