#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "oracles.hpp"
#include "tracemob/errors.hpp"
#include "tracemob/graph.hpp"

using namespace tracemob;

TEST_CASE("pentagon cliques match the exhaustive scan") {
  const auto g = oracle::pentagon();
  const auto cliques = enumerate_cliques(g);
  const auto masks = oracle::clique_masks(g);
  REQUIRE(cliques.size() == 11);
  REQUIRE(masks.size() == 11);
  for (Clique c : cliques) {
    CHECK(std::find(masks.begin(), masks.end(), c.mask()) != masks.end());
  }
  CHECK(cliques.front().empty());
  for (std::size_t i = 1; i < cliques.size(); ++i) CHECK(clique_order_less(cliques[i - 1], cliques[i]));
}

TEST_CASE("clique count by size equals the polynomial coefficients") {
  for (const auto& g : {oracle::pentagon(), oracle::free_ab(),
                        IndependenceGraph({"a", "b", "c", "d"}, {{"a", "b"}, {"b", "c"}, {"a", "c"}, {"c", "d"}})}) {
    const auto poly = mobius_polynomial(g);
    std::vector<long long> by_size(poly.coefficients().size(), 0);
    for (auto mask : oracle::clique_masks(g)) ++by_size.at(static_cast<std::size_t>(std::popcount(mask)));
    for (std::size_t k = 0; k < by_size.size(); ++k) {
      CHECK(std::llabs(poly.coefficients()[k]) == by_size[k]);
      CHECK((poly.coefficients()[k] < 0) == (k % 2 == 1));
    }
  }
}

TEST_CASE("Möbius polynomial examples") {
  CHECK(mobius_polynomial(oracle::pentagon()).coefficients() == std::vector<long long>{1, -5, 5});
  CHECK(mobius_polynomial(oracle::free_ab()).coefficients() == std::vector<long long>{1, -2});
  const IndependenceGraph three({"a", "b", "c"}, {{"a", "b"}});
  CHECK(mobius_polynomial(three).coefficients() == std::vector<long long>{1, -3, 1});
  CHECK(mobius_polynomial(oracle::pentagon()).to_string() == "1 − 5X + 5X²");
  CHECK(mobius_polynomial(oracle::free_ab()).to_string() == "1 − 2X");
}

TEST_CASE("smallest root") {
  CHECK(smallest_root(mobius_polynomial(oracle::pentagon())) == doctest::Approx(oracle::kP0).epsilon(1e-14));
  CHECK(smallest_root(mobius_polynomial(oracle::free_ab())) == doctest::Approx(0.5));
  const auto roots = roots_in_interval(mobius_polynomial(oracle::pentagon()), 0.0, 1.0);
  REQUIRE(roots.size() == 2);
  CHECK(roots[1] == doctest::Approx(oracle::kP1).epsilon(1e-14));
  // Commuting letters have no root in (0, 1].
  const IndependenceGraph commuting({"a", "b"}, {{"a", "b"}});
  CHECK(mobius_polynomial(commuting).coefficients() == std::vector<long long>{1, -2, 1});
  CHECK(smallest_root(mobius_polynomial(commuting)) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("admissibility and parallelism") {
  const auto g = oracle::pentagon();
  const auto a = [&](const char* n) { return Clique::singleton(*g.find(n)); };
  for (Clique c : g.cliques()) {
    if (!c.empty()) CHECK(cf_admissible(g, c, c));
    CHECK(cf_admissible(g, c, Clique()));
    if (!c.empty()) CHECK_FALSE(cf_admissible(g, Clique(), c));
    for (Clique d : g.cliques()) {
      CHECK(parallel(g, c, d) == parallel(g, d, c));
      if (parallel(g, c, d)) CHECK(g.is_clique((c | d).mask()));
    }
  }
  CHECK(cf_admissible(g, a("a1"), a("a2")));
  CHECK_FALSE(cf_admissible(g, a("a1"), a("a3")));
  CHECK(cf_admissible(g, a("a1") | a("a3"), a("a2")));
  CHECK(parallel(g, a("a1"), a("a3")));
  CHECK_FALSE(parallel(g, a("a1"), a("a1")));
}

TEST_CASE("irreducibility") {
  CHECK(is_irreducible(oracle::pentagon()));
  CHECK(is_irreducible(oracle::free_ab()));
  CHECK_FALSE(is_irreducible(IndependenceGraph({"a", "b"}, {{"a", "b"}})));
  CHECK_FALSE(is_irreducible(IndependenceGraph({"a", "b", "c"}, {{"a", "b"}, {"a", "c"}})));
}

TEST_CASE("free and empty independence") {
  const IndependenceGraph g({"x", "y", "z"}, {});
  CHECK(g.cliques().size() == 4);
}

TEST_CASE("spec parsing") {
  const auto spec = parse_monoid_spec("# comment\nletters: a b c\nindependent: a b\n\n");
  const auto g = build_graph(spec);
  CHECK(g.letter_count() == 3);
  CHECK(g.independent(0, 1));
  CHECK_FALSE(g.independent(0, 2));

  CHECK_THROWS_AS(build_graph(parse_monoid_spec("letters: a b\nindependent: a q\n")), InputError);
  CHECK_THROWS_AS(build_graph(parse_monoid_spec("letters: a b\nindependent: a a\n")), InputError);
  CHECK_THROWS_AS(build_graph(parse_monoid_spec("letters: a\n")), InputError);
  CHECK_THROWS_AS(build_graph(parse_monoid_spec("letters: a a\n")), InputError);
  CHECK_THROWS_AS(parse_monoid_spec("letters: a b\nbogus line\n"), InputError);
  try {
    build_graph(parse_monoid_spec("letters: a b\n\nindependent: a z\n"));
    FAIL("expected an error");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}

TEST_CASE("clique formatting") {
  const auto g = oracle::pentagon();
  CHECK(format_clique(g, Clique::singleton(2) | Clique::singleton(0)) == "(a1 a3)");
  CHECK(format_clique(g, Clique()) == "()");
}
