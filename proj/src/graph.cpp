#include "tracemob/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "tracemob/errors.hpp"

namespace tracemob {

namespace {

constexpr std::size_t kExhaustiveCliqueScanLimit = 20;

std::uint64_t bit(LetterIndex a) { return std::uint64_t{1} << a; }

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) tokens.push_back(line.substr(i, j - i));
    i = j;
  }
  return tokens;
}

std::vector<Clique> scan_all_subsets(const IndependenceGraph& g) {
  std::vector<Clique> out;
  const std::uint64_t limit = std::uint64_t{1} << g.letter_count();
  for (std::uint64_t mask = 0; mask < limit; ++mask) {
    if (g.is_clique(mask)) out.emplace_back(mask);
  }
  return out;
}

// Extends cliques by letters of larger index that are independent of every
// member; each clique is produced exactly once.
void extend_cliques(const IndependenceGraph& g, std::uint64_t current, std::uint64_t candidates,
                    std::vector<Clique>& out) {
  out.emplace_back(current);
  while (candidates != 0) {
    const auto a = static_cast<LetterIndex>(std::countr_zero(candidates));
    candidates &= candidates - 1;
    extend_cliques(g, current | bit(a), candidates & g.independent_mask(a), out);
  }
}

}  // namespace

std::vector<LetterIndex> Clique::members() const {
  std::vector<LetterIndex> out;
  out.reserve(size());
  for (std::uint64_t m = mask_; m != 0; m &= m - 1) {
    out.push_back(static_cast<LetterIndex>(std::countr_zero(m)));
  }
  return out;
}

bool clique_order_less(Clique a, Clique b) {
  if (a.size() != b.size()) return a.size() < b.size();
  const auto ma = a.members();
  const auto mb = b.members();
  return ma < mb;
}

IndependenceGraph::IndependenceGraph(
    std::vector<std::string> names,
    const std::vector<std::pair<std::string, std::string>>& independent_pairs) {
  if (names.size() < 2) throw InputError("alphabet must contain at least 2 letters");
  if (names.size() > kMaxLetters) {
    throw InputError("alphabet has more than " + std::to_string(kMaxLetters) + " letters");
  }
  std::unordered_map<std::string, LetterIndex> by_name;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i].empty()) throw InputError("empty letter name");
    if (!by_name.emplace(names[i], i).second) throw InputError("duplicate letter name '" + names[i] + "'");
    letters_.push_back(Letter{i, std::move(names[i])});
  }
  const std::size_t n = letters_.size();
  alphabet_ = n == 64 ? ~std::uint64_t{0} : (bit(n) - 1);
  independent_.assign(n, 0);
  std::set<std::pair<LetterIndex, LetterIndex>> seen;
  for (const auto& [x, y] : independent_pairs) {
    const auto ix = by_name.find(x);
    const auto iy = by_name.find(y);
    if (ix == by_name.end()) throw InputError("unknown letter '" + x + "' in pair");
    if (iy == by_name.end()) throw InputError("unknown letter '" + y + "' in pair");
    if (ix->second == iy->second) throw InputError("reflexive pair (" + x + "," + y + ")");
    const auto key = std::minmax(ix->second, iy->second);
    if (seen.insert(key).second) pairs_.emplace_back(key.first, key.second);
    independent_[ix->second] |= bit(iy->second);
    independent_[iy->second] |= bit(ix->second);
  }
  std::sort(pairs_.begin(), pairs_.end());
  dependent_.resize(n);
  for (std::size_t a = 0; a < n; ++a) dependent_[a] = alphabet_ & ~independent_[a];

  cliques_ = n <= kExhaustiveCliqueScanLimit ? scan_all_subsets(*this) : [&] {
    std::vector<Clique> out;
    extend_cliques(*this, 0, alphabet_, out);
    return out;
  }();
  std::sort(cliques_.begin(), cliques_.end(), clique_order_less);
  for (std::size_t i = 0; i < cliques_.size(); ++i) clique_position_.emplace(cliques_[i].mask(), i);
}

std::optional<LetterIndex> IndependenceGraph::find(std::string_view name) const {
  for (const auto& letter : letters_) {
    if (letter.name == name) return letter.index;
  }
  return std::nullopt;
}

bool IndependenceGraph::is_clique(std::uint64_t mask) const {
  if ((mask & ~alphabet_) != 0) return false;
  for (std::uint64_t m = mask; m != 0; m &= m - 1) {
    const auto a = static_cast<LetterIndex>(std::countr_zero(m));
    if ((mask & ~bit(a) & ~independent_[a]) != 0) return false;
  }
  return true;
}

MonoidSpec parse_monoid_spec(std::string_view text) {
  MonoidSpec spec;
  bool have_letters = false;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string_view::npos || line[first] == '#') {
      if (end == text.size()) break;
      continue;
    }
    line.remove_prefix(first);
    const auto colon = line.find(':');
    if (colon == std::string_view::npos) throw InputError("expected 'key: values'", line_no);
    const auto key = line.substr(0, colon);
    const auto values = split_ws(line.substr(colon + 1));
    if (key == "letters") {
      if (have_letters) throw InputError("duplicate 'letters:' line", line_no);
      if (values.empty()) throw InputError("'letters:' needs at least one name", line_no);
      for (auto v : values) spec.letters.emplace_back(v);
      have_letters = true;
    } else if (key == "independent") {
      if (!have_letters) throw InputError("'independent:' before 'letters:'", line_no);
      if (values.size() != 2) throw InputError("'independent:' expects exactly two letters", line_no);
      spec.independent.emplace_back(std::string(values[0]), std::string(values[1]));
      spec.pair_lines.push_back(line_no);
    } else {
      throw InputError("unknown key '" + std::string(key) + "'", line_no);
    }
    if (end == text.size()) break;
  }
  if (!have_letters) throw InputError("missing 'letters:' line");
  return spec;
}

IndependenceGraph build_graph(const MonoidSpec& spec) {
  // Validate pairs one by one first so errors can carry their line numbers.
  std::set<std::string> names(spec.letters.begin(), spec.letters.end());
  for (std::size_t i = 0; i < spec.independent.size(); ++i) {
    const auto& [x, y] = spec.independent[i];
    const std::size_t line = i < spec.pair_lines.size() ? spec.pair_lines[i] : 0;
    if (!names.contains(x)) throw InputError("unknown letter '" + x + "' in pair", line);
    if (!names.contains(y)) throw InputError("unknown letter '" + y + "' in pair", line);
    if (x == y) throw InputError("reflexive pair (" + x + "," + y + ")", line);
  }
  return IndependenceGraph(spec.letters, spec.independent);
}

IndependenceGraph load_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open monoid spec '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return build_graph(parse_monoid_spec(buffer.str()));
}

std::vector<Clique> enumerate_cliques(const IndependenceGraph& g) { return g.cliques(); }

bool is_irreducible(const IndependenceGraph& g) {
  std::uint64_t reached = 1;
  std::uint64_t frontier = 1;
  while (frontier != 0) {
    std::uint64_t next = 0;
    for (std::uint64_t m = frontier; m != 0; m &= m - 1) {
      next |= g.dependent_mask(static_cast<LetterIndex>(std::countr_zero(m)));
    }
    frontier = next & ~reached;
    reached |= next;
  }
  return reached == g.alphabet_mask();
}

bool cf_admissible(const IndependenceGraph& g, Clique c, Clique c2) {
  for (std::uint64_t m = c2.mask(); m != 0; m &= m - 1) {
    const auto b = static_cast<LetterIndex>(std::countr_zero(m));
    if ((g.dependent_mask(b) & c.mask()) == 0) return false;
  }
  return true;
}

bool parallel(const IndependenceGraph& g, Clique c, Clique c2) {
  for (std::uint64_t m = c.mask(); m != 0; m &= m - 1) {
    const auto a = static_cast<LetterIndex>(std::countr_zero(m));
    if ((c2.mask() & ~g.independent_mask(a)) != 0) return false;
  }
  return true;
}

MobiusPolynomial mobius_polynomial(const IndependenceGraph& g) {
  std::vector<long long> coefficients;
  for (Clique c : g.cliques()) {
    if (coefficients.size() <= c.size()) coefficients.resize(c.size() + 1, 0);
    coefficients[c.size()] += (c.size() % 2 == 0) ? 1 : -1;
  }
  return MobiusPolynomial(std::move(coefficients));
}

std::string MobiusPolynomial::to_string() const {
  static const char* const kSuperscripts[] = {"⁰", "¹", "²", "³", "⁴", "⁵", "⁶", "⁷", "⁸", "⁹"};
  std::string out;
  for (std::size_t k = 0; k < coefficients_.size(); ++k) {
    long long coef = coefficients_[k];
    if (coef == 0) continue;
    if (out.empty()) {
      if (coef < 0) out += "−";
    } else {
      out += coef < 0 ? " − " : " + ";
    }
    const long long magnitude = coef < 0 ? -coef : coef;
    if (k == 0 || magnitude != 1) out += std::to_string(magnitude);
    if (k >= 1) {
      out += "X";
      if (k >= 2) {
        for (char digit : std::to_string(k)) out += kSuperscripts[digit - '0'];
      }
    }
  }
  return out.empty() ? "0" : out;
}

std::vector<double> roots_in_interval(const MobiusPolynomial& p, double lo, double hi, double step,
                                      double tolerance) {
  std::vector<double> roots;
  double prev_x = lo;
  double prev_v = p.evaluate(lo);
  const auto steps = static_cast<long>(std::ceil((hi - lo) / step));
  for (long i = 1; i <= steps; ++i) {
    const double x = std::min(hi, lo + static_cast<double>(i) * step);
    const double v = p.evaluate(x);
    if (v == 0.0) {
      roots.push_back(x);
    } else if (prev_v != 0.0 && (v < 0.0) != (prev_v < 0.0)) {
      double a = prev_x;
      double b = x;
      const bool a_positive = prev_v > 0.0;
      while (b - a > tolerance) {
        const double mid = 0.5 * (a + b);
        if (mid <= a || mid >= b) break;  // adjacent doubles
        const double vm = p.evaluate(mid);
        if (vm == 0.0) {
          a = b = mid;
          break;
        }
        if ((vm > 0.0) == a_positive) {
          a = mid;
        } else {
          b = mid;
        }
      }
      roots.push_back(0.5 * (a + b));
    }
    prev_x = x;
    prev_v = v;
  }
  return roots;
}

double smallest_root(const MobiusPolynomial& p) {
  const auto roots = roots_in_interval(p, 0.0, 1.0);
  if (roots.empty()) throw NumericError("Möbius polynomial has no sign change in (0,1]");
  return roots.front();
}

std::string format_clique(const IndependenceGraph& g, Clique c) {
  std::vector<std::string> names;
  for (LetterIndex a : c.members()) names.push_back(g.name(a));
  std::sort(names.begin(), names.end());
  std::string out = "(";
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i > 0) out += ' ';
    out += names[i];
  }
  return out + ")";
}

}  // namespace tracemob
