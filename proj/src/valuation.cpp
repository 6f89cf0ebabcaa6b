#include "tracemob/valuation.hpp"

#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

namespace tracemob {

Valuation<double> uniform_valuation(GraphPtr graph) {
  const double p0 = smallest_root(mobius_polynomial(*graph));
  std::vector<double> weights(graph->letter_count(), p0);
  return Valuation<double>(std::move(graph), std::move(weights));
}

ValuationSpec parse_valuation_spec(std::string_view text) {
  ValuationSpec spec;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto colon = line.find(':');
    if (colon == std::string::npos) throw InputError("expected 'weight: <letter> <value>'", line_no);
    std::string key = line.substr(first, colon - first);
    while (!key.empty() && std::isspace(static_cast<unsigned char>(key.back()))) key.pop_back();
    if (key != "weight") throw InputError("unknown key '" + key + "'", line_no);
    std::istringstream values(line.substr(colon + 1));
    std::string letter;
    std::string value;
    std::string extra;
    if (!(values >> letter >> value) || (values >> extra)) {
      throw InputError("expected 'weight: <letter> <value>'", line_no);
    }
    if (letter == "*") {
      if (value != "uniform") throw InputError("'weight: *' only accepts 'uniform'", line_no);
      spec.uniform = true;
      continue;
    }
    try {
      spec.weights.emplace_back(letter, parse_rational(value));
    } catch (const std::invalid_argument& e) {
      throw InputError(e.what(), line_no);
    }
    spec.lines.push_back(line_no);
  }
  if (spec.uniform && !spec.weights.empty()) {
    throw InputError("'weight: * uniform' cannot be combined with letter weights");
  }
  if (!spec.uniform && spec.weights.empty()) throw InputError("valuation spec has no weights");
  return spec;
}

ValuationSpec load_valuation_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open valuation spec '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_valuation_spec(buffer.str());
}

std::vector<Rational> resolve_weights(const IndependenceGraph& g, const ValuationSpec& spec) {
  if (spec.uniform) throw InputError("uniform valuation has no explicit weights");
  std::vector<std::optional<Rational>> slots(g.letter_count());
  for (std::size_t i = 0; i < spec.weights.size(); ++i) {
    const auto& [name, value] = spec.weights[i];
    const std::size_t line = i < spec.lines.size() ? spec.lines[i] : 0;
    const auto index = g.find(name);
    if (!index) throw InputError("unknown letter '" + name + "'", line);
    if (slots[*index]) throw InputError("duplicate weight for '" + name + "'", line);
    if (sgn(value) <= 0) throw InputError("weight of '" + name + "' must be positive", line);
    slots[*index] = value;
  }
  std::vector<Rational> out;
  for (std::size_t a = 0; a < slots.size(); ++a) {
    if (!slots[a]) throw InputError("missing weight for '" + g.name(a) + "'");
    out.push_back(*slots[a]);
  }
  return out;
}

}  // namespace tracemob
