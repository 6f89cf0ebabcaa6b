#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tracemob/graph.hpp"

namespace tracemob {

using Word = std::vector<LetterIndex>;

// A trace in Cartier-Foata form: a chain c1 → c2 → … → cn of non-empty
// cliques. The empty chain is the identity. Because the decomposition is
// unique, the chain is the canonical key of the trace.
struct Trace {
  std::vector<Clique> cliques;

  Trace() = default;
  explicit Trace(std::vector<Clique> chain) : cliques(std::move(chain)) {}

  std::size_t height() const { return cliques.size(); }
  std::size_t length() const;
  bool is_identity() const { return cliques.empty(); }
  Clique last() const { return cliques.empty() ? Clique() : cliques.back(); }
  // v in u = v·c where c is the last clique.
  Trace without_last() const;
  // The first n cliques.
  Trace prefix(std::size_t n) const;
  // Letters in CF order, members ascending inside each clique.
  Word linearize() const;

  friend bool operator==(const Trace&, const Trace&) = default;
};

struct TraceHash {
  std::size_t operator()(const Trace& u) const noexcept;
};

// The trace made of a single clique (identity for the empty clique).
Trace clique_trace(Clique c);

bool is_cf_chain(const IndependenceGraph& g, std::span<const Clique> cliques);

// Heap stacking: each letter lands one level above the highest letter it depends on.
Trace normalize(const IndependenceGraph& g, std::span<const LetterIndex> word);

Trace concat(const IndependenceGraph& g, const Trace& u, const Trace& v);

// w with v = u·w, or nullopt when u is not a prefix of v. Letters of u are
// cancelled from the front of v one at a time; a letter cancels iff it lies
// in the current first clique.
std::optional<Trace> divide_left(const IndependenceGraph& g, const Trace& u, const Trace& v);

bool leq(const IndependenceGraph& g, const Trace& u, const Trace& v);

struct GammaDecomposition {
  std::vector<Clique> gammas;
  std::size_t remainder_height = 0;
};

// Prefix test through clique comparisons: u = c1..cn ≤ v = d1..dp iff n ≤ p,
// each d_i = c_i ⊔ γ_i, and γ_i ∥ c_j whenever i ≤ j.
std::optional<GammaDecomposition> gamma_decomposition(const IndependenceGraph& g, const Trace& u,
                                                      const Trace& v);
bool leq_gamma(const IndependenceGraph& g, const Trace& u, const Trace& v);

inline constexpr std::size_t kDefaultEnumerationCap = 10'000'000;

// Non-empty cliques with their Cartier-Foata successors; CF chains of
// height n are exactly the length-n paths in this graph.
struct AdmissibilityTable {
  explicit AdmissibilityTable(const IndependenceGraph& g);
  std::vector<Clique> nonempty;
  std::vector<std::vector<std::size_t>> successors;
};

// Appends all height-n chains starting at nonempty[first], in enumeration order.
void enumerate_chains_from(const AdmissibilityTable& table, std::size_t first, std::size_t n,
                           std::vector<Trace>& out);

// Same-height extensions {x : τ(x) = τ(u), u ≤ x}; for u = 0 all cliques
// (the empty clique as the identity trace).
std::vector<Trace> extensions_same_height(const IndependenceGraph& g, const Trace& u);

// Number of traces of height n, saturating at the enumeration cap + 1.
std::size_t count_by_height(const IndependenceGraph& g, std::size_t n,
                            std::size_t cap = kDefaultEnumerationCap);

// All traces of height exactly n in lexicographic clique-enumeration order.
// Throws CapExceeded when more than `cap` traces would be produced.
std::vector<Trace> enumerate_by_height(const IndependenceGraph& g, std::size_t n,
                                       std::size_t cap = kDefaultEnumerationCap);

// Heights 0..n concatenated.
std::vector<Trace> enumerate_up_to_height(const IndependenceGraph& g, std::size_t n,
                                          std::size_t cap = kDefaultEnumerationCap);

// Whitespace-separated letter names. Throws InputError for unknown names.
Word parse_word(const IndependenceGraph& g, std::string_view text);
Trace parse_trace(const IndependenceGraph& g, std::string_view text);

// "(a1 a3)(a2)"; the identity prints as "()".
std::string format_trace(const IndependenceGraph& g, const Trace& u);

}  // namespace tracemob
