#include "tracemob/harmonic.hpp"

#include <fstream>
#include <sstream>

namespace tracemob {

CylinderCombination<Rational> parse_cylinder_combination(const IndependenceGraph& g, std::string_view text) {
  CylinderCombination<Rational> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto colon = line.find(':');
    if (colon == std::string::npos || line.substr(first, colon - first) != "term") {
      throw InputError("expected 'term: <weight> <word>'", line_no);
    }
    std::istringstream values(line.substr(colon + 1));
    std::string weight;
    if (!(values >> weight)) throw InputError("missing term weight", line_no);
    std::string word;
    std::getline(values, word);
    try {
      out.terms.push_back({parse_rational(weight), parse_trace(g, word)});
    } catch (const InputError& e) {
      throw InputError(e.what(), line_no);
    } catch (const std::invalid_argument& e) {
      throw InputError(e.what(), line_no);
    }
  }
  if (out.terms.empty()) throw InputError("boundary function has no terms");
  return out;
}

CylinderCombination<Rational> load_cylinder_combination(const IndependenceGraph& g, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open boundary function '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_cylinder_combination(g, buffer.str());
}

}  // namespace tracemob
