#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "tracemob/numeric.hpp"

namespace tracemob {

using LetterIndex = std::size_t;

// Letters are stored as bits of a 64-bit word, so alphabets are capped at 64.
inline constexpr std::size_t kMaxLetters = 64;

struct Letter {
  LetterIndex index = 0;
  std::string name;
};

// A set of pairwise independent letters, stored as a bitmask over letter
// indices. The mask is the canonical form: two cliques are equal iff their
// sorted member sequences are equal.
class Clique {
 public:
  constexpr Clique() = default;
  constexpr explicit Clique(std::uint64_t mask) : mask_(mask) {}

  static Clique singleton(LetterIndex a) { return Clique(std::uint64_t{1} << a); }

  constexpr std::uint64_t mask() const { return mask_; }
  constexpr std::size_t size() const { return static_cast<std::size_t>(std::popcount(mask_)); }
  constexpr bool empty() const { return mask_ == 0; }
  constexpr bool contains(LetterIndex a) const { return (mask_ >> a) & 1U; }
  constexpr bool is_subset_of(Clique other) const { return (mask_ & ~other.mask_) == 0; }

  std::vector<LetterIndex> members() const;

  friend constexpr Clique operator|(Clique a, Clique b) { return Clique(a.mask_ | b.mask_); }
  friend constexpr Clique operator&(Clique a, Clique b) { return Clique(a.mask_ & b.mask_); }
  friend constexpr bool operator==(Clique a, Clique b) = default;

 private:
  std::uint64_t mask_ = 0;
};

// Enumeration order: by size, then lexicographically by sorted members.
bool clique_order_less(Clique a, Clique b);

struct CliqueHash {
  std::size_t operator()(Clique c) const noexcept { return std::hash<std::uint64_t>{}(c.mask()); }
};

// The pair (alphabet, independence relation). Immutable after construction.
class IndependenceGraph {
 public:
  // Validates and builds. Pairs are deduplicated and symmetrized.
  // Throws InputError on duplicate names, unknown letters, reflexive pairs,
  // alphabets with fewer than two letters or more than kMaxLetters.
  IndependenceGraph(std::vector<std::string> names,
                    const std::vector<std::pair<std::string, std::string>>& independent_pairs);

  std::size_t letter_count() const { return letters_.size(); }
  const std::vector<Letter>& letters() const { return letters_; }
  const std::string& name(LetterIndex a) const { return letters_.at(a).name; }
  std::optional<LetterIndex> find(std::string_view name) const;

  // Unordered pairs (a, b) with a < b.
  const std::vector<std::pair<LetterIndex, LetterIndex>>& independent_pairs() const { return pairs_; }

  bool independent(LetterIndex a, LetterIndex b) const { return (independent_[a] >> b) & 1U; }
  // Letters dependent on a, a itself included.
  std::uint64_t dependent_mask(LetterIndex a) const { return dependent_[a]; }
  std::uint64_t independent_mask(LetterIndex a) const { return independent_[a]; }
  std::uint64_t alphabet_mask() const { return alphabet_; }

  bool is_clique(std::uint64_t mask) const;

  // All cliques, the empty clique first, in enumeration order.
  const std::vector<Clique>& cliques() const { return cliques_; }
  // Position of a clique in cliques().
  std::size_t clique_position(Clique c) const { return clique_position_.at(c.mask()); }

 private:
  std::vector<Letter> letters_;
  std::vector<std::pair<LetterIndex, LetterIndex>> pairs_;
  std::vector<std::uint64_t> independent_;
  std::vector<std::uint64_t> dependent_;
  std::uint64_t alphabet_ = 0;
  std::vector<Clique> cliques_;
  std::unordered_map<std::uint64_t, std::size_t> clique_position_;
};

// Parsed, not yet validated, content of a monoid spec file.
struct MonoidSpec {
  std::vector<std::string> letters;
  std::vector<std::pair<std::string, std::string>> independent;
  std::vector<std::size_t> pair_lines;
};

// Line format: `letters: a b c` once, then `independent: x y` lines; `#` comments.
MonoidSpec parse_monoid_spec(std::string_view text);
IndependenceGraph build_graph(const MonoidSpec& spec);
IndependenceGraph load_graph(const std::string& path);

std::vector<Clique> enumerate_cliques(const IndependenceGraph& g);

// Connectivity of the dependence graph (Σ, D).
bool is_irreducible(const IndependenceGraph& g);

// c → c2: every letter of c2 depends on some letter of c.
bool cf_admissible(const IndependenceGraph& g, Clique c, Clique c2);

// c × c2 ⊆ I.
bool parallel(const IndependenceGraph& g, Clique c, Clique c2);

class MobiusPolynomial {
 public:
  explicit MobiusPolynomial(std::vector<long long> coefficients) : coefficients_(std::move(coefficients)) {}

  const std::vector<long long>& coefficients() const { return coefficients_; }
  std::size_t degree() const { return coefficients_.size() - 1; }

  template <Scalar T>
  T evaluate(const T& x) const {
    T result = NumericTraits<T>::zero();
    for (auto it = coefficients_.rbegin(); it != coefficients_.rend(); ++it) {
      result = result * x + T(static_cast<long>(*it));
    }
    return result;
  }

  // "1 − 5X + 5X²"
  std::string to_string() const;

 private:
  std::vector<long long> coefficients_;
};

MobiusPolynomial mobius_polynomial(const IndependenceGraph& g);

// Real roots in (lo, hi], located by a sign-change scan with the given step
// and refined by bisection until the bracket is below `tolerance` (0: adjacent doubles).
std::vector<double> roots_in_interval(const MobiusPolynomial& p, double lo, double hi,
                                      double step = 1e-3, double tolerance = 0.0);

// Smallest positive root, found by scanning (0, 1]. Throws NumericError when
// no sign change exists there.
double smallest_root(const MobiusPolynomial& p);

std::string format_clique(const IndependenceGraph& g, Clique c);

}  // namespace tracemob
