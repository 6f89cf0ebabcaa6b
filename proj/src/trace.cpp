#include "tracemob/trace.hpp"

#include <algorithm>
#include <cctype>
#include <functional>

#include "tracemob/errors.hpp"

namespace tracemob {

namespace {

// Letters stacked into levels; level l holds the letters of the l-th clique.
class Heap {
 public:
  explicit Heap(const IndependenceGraph& g) : g_(g), top_(g.letter_count(), 0) {}

  void push(LetterIndex a) {
    std::size_t below = 0;
    for (std::uint64_t m = g_.dependent_mask(a); m != 0; m &= m - 1) {
      below = std::max(below, top_[static_cast<LetterIndex>(std::countr_zero(m))]);
    }
    const std::size_t level = below + 1;
    if (levels_.size() < level) levels_.resize(level, 0);
    levels_[level - 1] |= std::uint64_t{1} << a;
    top_[a] = level;
  }

  void push(const Trace& u) {
    for (LetterIndex a : u.linearize()) push(a);
  }

  Trace take() && {
    Trace out;
    out.cliques.reserve(levels_.size());
    for (std::uint64_t mask : levels_) out.cliques.emplace_back(mask);
    return out;
  }

 private:
  const IndependenceGraph& g_;
  std::vector<std::size_t> top_;
  std::vector<std::uint64_t> levels_;
};

}  // namespace

std::size_t Trace::length() const {
  std::size_t total = 0;
  for (Clique c : cliques) total += c.size();
  return total;
}

Trace Trace::without_last() const {
  if (cliques.empty()) return {};
  return Trace(std::vector<Clique>(cliques.begin(), cliques.end() - 1));
}

Trace Trace::prefix(std::size_t n) const {
  n = std::min(n, cliques.size());
  return Trace(std::vector<Clique>(cliques.begin(), cliques.begin() + static_cast<std::ptrdiff_t>(n)));
}

Word Trace::linearize() const {
  Word out;
  for (Clique c : cliques) {
    for (LetterIndex a : c.members()) out.push_back(a);
  }
  return out;
}

std::size_t TraceHash::operator()(const Trace& u) const noexcept {
  std::size_t seed = u.cliques.size();
  for (Clique c : u.cliques) {
    seed ^= std::hash<std::uint64_t>{}(c.mask()) + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
  }
  return seed;
}

Trace clique_trace(Clique c) {
  if (c.empty()) return {};
  return Trace({c});
}

bool is_cf_chain(const IndependenceGraph& g, std::span<const Clique> cliques) {
  for (std::size_t i = 0; i < cliques.size(); ++i) {
    if (cliques[i].empty() || !g.is_clique(cliques[i].mask())) return false;
    if (i > 0 && !cf_admissible(g, cliques[i - 1], cliques[i])) return false;
  }
  return true;
}

Trace normalize(const IndependenceGraph& g, std::span<const LetterIndex> word) {
  Heap heap(g);
  for (LetterIndex a : word) {
    if (a >= g.letter_count()) throw InputError("letter index out of range");
    heap.push(a);
  }
  return std::move(heap).take();
}

Trace concat(const IndependenceGraph& g, const Trace& u, const Trace& v) {
  if (v.is_identity()) return u;
  if (u.is_identity()) return v;
  Heap heap(g);
  heap.push(u);
  heap.push(v);
  return std::move(heap).take();
}

std::optional<Trace> divide_left(const IndependenceGraph& g, const Trace& u, const Trace& v) {
  Trace rest = v;
  for (LetterIndex a : u.linearize()) {
    if (rest.cliques.empty() || !rest.cliques.front().contains(a)) return std::nullopt;
    Word word = rest.linearize();
    // Members of the first clique come first in the linearization.
    word.erase(std::find(word.begin(), word.end(), a));
    rest = normalize(g, word);
  }
  return rest;
}

bool leq(const IndependenceGraph& g, const Trace& u, const Trace& v) {
  return divide_left(g, u, v).has_value();
}

std::optional<GammaDecomposition> gamma_decomposition(const IndependenceGraph& g, const Trace& u,
                                                      const Trace& v) {
  const std::size_t n = u.height();
  if (n > v.height()) return std::nullopt;
  GammaDecomposition out;
  out.gammas.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!u.cliques[i].is_subset_of(v.cliques[i])) return std::nullopt;
    const Clique gamma(v.cliques[i].mask() & ~u.cliques[i].mask());
    for (std::size_t j = i; j < n; ++j) {
      if (!parallel(g, gamma, u.cliques[j])) return std::nullopt;
    }
    out.gammas.push_back(gamma);
  }
  out.remainder_height = v.height() - n;
  return out;
}

bool leq_gamma(const IndependenceGraph& g, const Trace& u, const Trace& v) {
  return gamma_decomposition(g, u, v).has_value();
}

AdmissibilityTable::AdmissibilityTable(const IndependenceGraph& g) {
  for (Clique c : g.cliques()) {
    if (!c.empty()) nonempty.push_back(c);
  }
  successors.resize(nonempty.size());
  for (std::size_t i = 0; i < nonempty.size(); ++i) {
    for (std::size_t j = 0; j < nonempty.size(); ++j) {
      if (cf_admissible(g, nonempty[i], nonempty[j])) successors[i].push_back(j);
    }
  }
}

std::vector<Trace> extensions_same_height(const IndependenceGraph& g, const Trace& u) {
  std::vector<Trace> out;
  if (u.is_identity()) {
    for (Clique c : g.cliques()) out.push_back(clique_trace(c));
    return out;
  }
  const std::size_t n = u.height();
  // Candidates for γ_i: cliques parallel to c_i, …, c_n.
  std::vector<std::vector<Clique>> candidates(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (Clique gamma : g.cliques()) {
      bool ok = true;
      for (std::size_t j = i; j < n && ok; ++j) ok = parallel(g, gamma, u.cliques[j]);
      if (ok) candidates[i].push_back(gamma);
    }
  }
  std::vector<Clique> chain(n);
  std::function<void(std::size_t)> descend = [&](std::size_t i) {
    if (i == n) {
      out.emplace_back(chain);
      return;
    }
    for (Clique gamma : candidates[i]) {
      const Clique d = u.cliques[i] | gamma;
      if (i > 0 && !cf_admissible(g, chain[i - 1], d)) continue;
      chain[i] = d;
      descend(i + 1);
    }
  };
  descend(0);
  return out;
}

std::size_t count_by_height(const IndependenceGraph& g, std::size_t n, std::size_t cap) {
  if (n == 0) return 1;
  const AdmissibilityTable table(g);
  const std::size_t saturated = cap + 1;
  std::vector<std::size_t> ways(table.nonempty.size(), 1);
  for (std::size_t step = 1; step < n; ++step) {
    std::vector<std::size_t> next(table.nonempty.size(), 0);
    for (std::size_t i = 0; i < table.nonempty.size(); ++i) {
      for (std::size_t j : table.successors[i]) next[j] = std::min(saturated, next[j] + ways[i]);
    }
    ways = std::move(next);
  }
  std::size_t total = 0;
  for (std::size_t w : ways) total = std::min(saturated, total + w);
  return total;
}

void enumerate_chains_from(const AdmissibilityTable& table, std::size_t first, std::size_t n,
                           std::vector<Trace>& out) {
  std::vector<Clique> chain(n);
  std::function<void(std::size_t, std::size_t)> descend = [&](std::size_t depth, std::size_t at) {
    chain[depth] = table.nonempty[at];
    if (depth + 1 == n) {
      out.emplace_back(chain);
      return;
    }
    for (std::size_t next : table.successors[at]) descend(depth + 1, next);
  };
  descend(0, first);
}

std::vector<Trace> enumerate_by_height(const IndependenceGraph& g, std::size_t n, std::size_t cap) {
  const std::size_t count = count_by_height(g, n, cap);
  if (count > cap) {
    throw CapExceeded("more than " + std::to_string(cap) + " traces of height " + std::to_string(n));
  }
  if (n == 0) return {Trace()};
  const AdmissibilityTable table(g);
  std::vector<Trace> out;
  out.reserve(count);
  for (std::size_t first = 0; first < table.nonempty.size(); ++first) {
    enumerate_chains_from(table, first, n, out);
  }
  return out;
}

std::vector<Trace> enumerate_up_to_height(const IndependenceGraph& g, std::size_t n, std::size_t cap) {
  std::vector<Trace> out;
  for (std::size_t k = 0; k <= n; ++k) {
    auto level = enumerate_by_height(g, k, cap);
    if (out.size() + level.size() > cap) throw CapExceeded("more than " + std::to_string(cap) + " traces");
    out.insert(out.end(), std::make_move_iterator(level.begin()), std::make_move_iterator(level.end()));
  }
  return out;
}

// Parentheses count as separators so printed traces parse back.
static bool separator(char ch) {
  return std::isspace(static_cast<unsigned char>(ch)) || ch == '(' || ch == ')';
}

Word parse_word(const IndependenceGraph& g, std::string_view text) {
  Word out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && separator(text[i])) ++i;
    std::size_t j = i;
    while (j < text.size() && !separator(text[j])) ++j;
    if (j > i) {
      const auto name = text.substr(i, j - i);
      const auto index = g.find(name);
      if (!index) throw InputError("unknown letter '" + std::string(name) + "'");
      out.push_back(*index);
    }
    i = j;
  }
  return out;
}

Trace parse_trace(const IndependenceGraph& g, std::string_view text) {
  return normalize(g, parse_word(g, text));
}

std::string format_trace(const IndependenceGraph& g, const Trace& u) {
  if (u.is_identity()) return "()";
  std::string out;
  for (Clique c : u.cliques) out += format_clique(g, c);
  return out;
}

}  // namespace tracemob
