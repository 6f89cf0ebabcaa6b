#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <memory>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "tracemob/errors.hpp"
#include "tracemob/valuation.hpp"

using namespace tracemob;

namespace {

GraphPtr pentagon() { return std::make_shared<const IndependenceGraph>(oracle::pentagon()); }
GraphPtr free_ab() { return std::make_shared<const IndependenceGraph>(oracle::free_ab()); }

Valuation<Rational> rational_valuation(GraphPtr g, Rational w) {
  return Valuation<Rational>(g, std::vector<Rational>(g->letter_count(), w));
}

}  // namespace

TEST_CASE("valuations are multiplicative") {
  const auto g = pentagon();
  const Valuation<Rational> f(g, {Rational(1, 2), Rational(1, 3), Rational(1, 5), Rational(1, 7), Rational(1, 11)});
  const Trace u = parse_trace(*g, "a1 a3 a2 a1");
  CHECK(f(u) == Rational(1, 2) * Rational(1, 5) * Rational(1, 3) * Rational(1, 2));
  CHECK(f(Trace()) == 1);
  CHECK_THROWS_AS(Valuation<Rational>(g, std::vector<Rational>(5, Rational(0))), InputError);
  CHECK_THROWS_AS(Valuation<Rational>(g, std::vector<Rational>(3, Rational(1))), InputError);
}

TEST_CASE("uniform pentagon transform has the closed form") {
  const auto f = uniform_valuation(pentagon());
  const double p0 = oracle::kP0;
  CHECK(f.weight(0) == doctest::Approx(p0).epsilon(1e-14));
  const auto h = mobius_transform(f);
  for (Clique c : f.graph().cliques()) {
    // A singleton lies in two pairs; pairs are maximal.
    const double expected = c.empty() ? 1 - 5 * p0 + 5 * p0 * p0 : c.size() == 1 ? p0 - 2 * p0 * p0 : p0 * p0;
    CHECK(h.at(c) == doctest::Approx(expected).epsilon(1e-12));
  }
  CHECK(h.at(Clique::singleton(0)) == doctest::Approx(0.1236067977).epsilon(1e-9));
  const auto report = is_bernoulli(f);
  CHECK(report.bernoulli);
  CHECK(std::abs(report.h_empty) <= 1e-9);
}

TEST_CASE("Bernoulli characterization on the free monoid") {
  const auto half = is_bernoulli(rational_valuation(free_ab(), Rational(1, 2)));
  CHECK(half.bernoulli);
  CHECK(half.h_empty == 0);
  const auto bad = is_bernoulli(rational_valuation(free_ab(), Rational(3, 5)));
  CHECK_FALSE(bad.bernoulli);
  CHECK(bad.h_empty == Rational(-1, 5));
  const auto low = is_bernoulli(rational_valuation(free_ab(), Rational(1, 3)));
  CHECK_FALSE(low.bernoulli);
  CHECK(low.h_empty == Rational(1, 3));
}

TEST_CASE("graded transform on the free monoid") {
  const auto g = free_ab();
  const auto F = TraceFunction<Rational>::from_rule([](const Trace& u) { return Rational(static_cast<long>(u.length() * u.length() + 1)); });
  // Only the letter itself contains a letter, so H = F away from the identity.
  const Trace ab = parse_trace(*g, "a b");
  CHECK(graded_mobius_transform(*g, F, ab) == F(ab));
  // H(0) = F(0) − F(a) − F(b).
  CHECK(graded_mobius_transform(*g, F, Trace()) == Rational(1 - 2 - 2));
}

TEST_CASE("graded transform example on the pentagon") {
  const auto g = pentagon();
  const auto F = TraceFunction<Rational>::from_rule([](const Trace& u) { return Rational(static_cast<long>(u.length())); });
  // u = (a1): supercliques {a1}, {a1,a3}, {a1,a4}: 1 − 2 − 2.
  CHECK(graded_mobius_transform(*g, F, parse_trace(*g, "a1")) == -3);
  CHECK(graded_mobius_transform(*g, F, parse_trace(*g, "a1"), GradedForm::parallel) == -3);
}

TEST_CASE("inversion formula with random rational tables") {
  for (const auto& g : {pentagon(), free_ab()}) {
    const auto traces = enumerate_up_to_height(*g, 3);
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<long> num(-50, 50), den(1, 9);
    for (int k = 0; k < 5; ++k) {
      TraceFunction<Rational>::Table table;
      for (const Trace& u : traces) {
        Rational q(num(rng), den(rng));
        q.canonicalize();
        table.emplace(u, q);
      }
      const auto F = TraceFunction<Rational>::from_table(table, 3);
      const auto H = graded_transform_function(g, F);
      for (const Trace& u : traces) CHECK(inversion_sum(*g, H, u) == F(u));
    }
  }
}

TEST_CASE("the transform of the valuation itself") {
  // H of F = f on cliques is h.
  const auto g = free_ab();
  const auto f = rational_valuation(g, Rational(1, 2));
  const auto F = TraceFunction<Rational>::from_rule([f](const Trace& u) { return f(u); });
  const auto h = mobius_transform(f);
  for (Clique c : g->cliques()) CHECK(graded_mobius_transform(*g, F, clique_trace(c)) == h.at(c));
}

TEST_CASE("trace function domains") {
  const auto F = TraceFunction<Rational>::from_rule([](const Trace&) { return Rational(1); }, 1);
  const auto g = free_ab();
  CHECK(F(parse_trace(*g, "a")) == 1);
  CHECK_THROWS_AS(F(parse_trace(*g, "a b")), DomainError);
}

TEST_CASE("valuation files") {
  const auto g = pentagon();
  const auto spec = parse_valuation_spec("weight: a1 1/3\nweight: a2 0.25\nweight: a3 1\nweight: a4 2/7\nweight: a5 1e-1\n");
  const auto f = make_valuation<Rational>(g, spec);
  CHECK(f.weight(0) == Rational(1, 3));
  CHECK(f.weight(1) == Rational(1, 4));
  CHECK(f.weight(4) == Rational(1, 10));
  CHECK(parse_valuation_spec("weight: * uniform\n").uniform);
  CHECK_THROWS_AS(make_valuation<Rational>(g, parse_valuation_spec("weight: * uniform\n")), InputError);
  CHECK_THROWS_AS(resolve_weights(*g, parse_valuation_spec("weight: a1 1/3\n")), InputError);
  CHECK_THROWS_AS(parse_valuation_spec("weight: a1 x\n"), InputError);
  CHECK(parse_rational("3/5") == Rational(3, 5));
  CHECK(parse_rational("0.6") == Rational(3, 5));
  CHECK(parse_rational("-1.5e1") == Rational(-15));
}
