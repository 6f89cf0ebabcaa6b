// tracemob command-line front end.
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "tracemob/boundary.hpp"
#include "tracemob/harmonic.hpp"
#include "tracemob/verify.hpp"

using json = nlohmann::ordered_json;
using namespace tracemob;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailed = 1;
constexpr int kExitInput = 2;

struct Config {
  std::string monoid;
  std::string valuation = "uniform";
  bool exact = false;
  bool floating = false;
  std::size_t height = 2;
  std::uint64_t seed = 1;
  bool json = false;
};

struct Options {
  std::vector<std::string> word;
  // verify
  std::size_t tables = 20;
  std::size_t words = 1000;
  std::size_t samples = 20000;
  // sample
  std::size_t count = 1;
  bool stats = false;
  // harmonic
  std::string phi;
  std::vector<std::string> eval;
  bool check = false;
  bool measure = false;
  // kernel
  std::string x;
  std::optional<std::string> y;
  std::optional<std::string> xi;
};

template <Scalar T>
json number(const T& value) {
  return {{"value", NumericTraits<T>::format(value)}, {"approx", NumericTraits<T>::to_double(value)}};
}

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) {
    if (!out.empty()) out += ' ';
    out += p;
  }
  return out;
}

int print(const Config& config, const json& doc, const std::string& text) {
  if (config.json) {
    std::cout << doc.dump(2) << '\n';
  } else {
    std::cout << text;
  }
  return kExitOk;
}

GraphPtr load_monoid(const Config& config) {
  if (config.monoid.empty()) throw InputError("--monoid <path> is required");
  return std::make_shared<const IndependenceGraph>(load_graph(config.monoid));
}

ValuationSpec load_weights(const Config& config) {
  if (config.valuation == "uniform") {
    ValuationSpec spec;
    spec.uniform = true;
    return spec;
  }
  return load_valuation_spec(config.valuation);
}

// ---- commands that do not need a valuation ----

int cmd_info(const Config& config) {
  const auto g = load_monoid(config);
  const auto poly = mobius_polynomial(*g);
  std::vector<std::size_t> by_size;
  for (Clique c : g->cliques()) {
    if (by_size.size() <= c.size()) by_size.resize(c.size() + 1, 0);
    ++by_size[c.size()];
  }
  const bool irreducible = is_irreducible(*g);
  const double p0 = smallest_root(poly);

  json doc;
  std::ostringstream text;
  std::vector<std::string> names;
  for (const auto& l : g->letters()) names.push_back(l.name);
  std::vector<std::string> pairs;
  for (LetterIndex a = 0; a < g->letter_count(); ++a) {
    for (LetterIndex b = a + 1; b < g->letter_count(); ++b) {
      if (g->independent(a, b)) pairs.push_back(g->name(a) + " " + g->name(b));
    }
  }
  doc["alphabet"] = names;
  doc["independent"] = pairs;
  doc["cliques_by_size"] = by_size;
  doc["clique_count"] = g->cliques().size();
  doc["mobius_polynomial"] = {{"coefficients", poly.coefficients()}, {"text", poly.to_string()}};
  doc["irreducible"] = irreducible;
  doc["p0"] = number(p0);

  text << "alphabet: " << join(names) << '\n';
  text << "independent pairs: " << pairs.size() << '\n';
  text << "cliques by size:";
  for (std::size_t k = 0; k < by_size.size(); ++k) text << ' ' << k << ':' << by_size[k];
  text << " (total " << g->cliques().size() << ")\n";
  text << "mobius polynomial: " << poly.to_string() << '\n';
  text << "irreducible: " << (irreducible ? "yes" : "no") << '\n';
  text << "p0: " << format_double(p0) << '\n';
  return print(config, doc, text.str());
}

int cmd_normalize(const Config& config, const Options& opt) {
  const auto g = load_monoid(config);
  const Trace u = parse_trace(*g, join(opt.word));
  json doc = {{"trace", format_trace(*g, u)}, {"length", u.length()}, {"height", u.height()}};
  std::ostringstream text;
  text << format_trace(*g, u) << "\nlength: " << u.length() << "\nheight: " << u.height() << '\n';
  return print(config, doc, text.str());
}

// ---- commands that need a valuation ----

template <Scalar T>
int cmd_mobius(const Config& config, const Valuation<T>& f) {
  const auto& g = f.graph();
  const auto report = is_bernoulli(f);
  json doc;
  std::ostringstream text;
  json rows = json::array();
  for (Clique c : g.cliques()) {
    rows.push_back({{"clique", format_clique(g, c)}, {"f", number(f.of_clique(c))}, {"h", number(report.transform->at(c))}});
    text << format_clique(g, c) << "  f = " << NumericTraits<T>::format(f.of_clique(c))
         << "  h = " << NumericTraits<T>::format(report.transform->at(c)) << '\n';
  }
  doc["cliques"] = rows;
  doc["h_empty"] = number(report.h_empty);
  doc["irreducible"] = report.irreducible;
  doc["bernoulli"] = report.bernoulli;
  text << "h(∅) = " << NumericTraits<T>::format(report.h_empty) << '\n';
  text << "bernoulli: " << (report.bernoulli ? "yes" : "no") << '\n';
  return print(config, doc, text.str());
}

int emit_report(const Config& config, const VerifyReport& report, std::string_view mode) {
  json checks = json::array();
  std::ostringstream text;
  for (const auto& c : report.checks) {
    checks.push_back({{"section", c.section},
                      {"name", c.name},
                      {"passed", c.passed},
                      {"max_deviation", c.max_deviation},
                      {"cases", c.cases},
                      {"detail", c.detail},
                      {"seconds", c.seconds}});
    text << (c.passed ? "PASS " : "FAIL ") << c.section << '/' << c.name << "  cases=" << c.cases
         << "  max_dev=" << format_double(c.max_deviation);
    if (!c.detail.empty()) text << "  " << c.detail;
    text << '\n';
  }
  if (report.probabilistic_skipped) text << "skipped: " << *report.probabilistic_skipped << '\n';
  text << (report.passed() ? "all identities hold" : "verification FAILED") << '\n';
  json doc = {{"mode", mode}, {"height", config.height}, {"passed", report.passed()}, {"checks", checks}};
  doc["probabilistic_skipped"] = report.probabilistic_skipped ? json(*report.probabilistic_skipped) : json(nullptr);
  print(config, doc, text.str());
  return report.passed() ? kExitOk : kExitFailed;
}

template <Scalar T>
int cmd_verify(const Config& config, const Options& opt, const Valuation<T>& f) {
  VerifyOptions options;
  options.height = config.height;
  options.seed = config.seed;
  options.random_tables = opt.tables;
  options.confluence_words = opt.words;
  options.sampler_count = opt.samples;
  const auto report = verify_all(f, options);
  return emit_report(config, report, NumericTraits<T>::mode == NumericMode::exact ? "exact" : "float");
}

template <Scalar T>
int cmd_sample(const Config& config, const Options& opt, const Valuation<T>& f) {
  const auto chain = build_chain(f);
  const auto& g = f.graph();
  const std::size_t n = std::max<std::size_t>(config.height, 1);
  const auto samples = sample_prefixes(chain, n, opt.count, config.seed);
  if (opt.stats) {
    const auto exact = exact_marginals(chain, n);
    const auto counts = empirical_counts(chain, std::span<const Trace>(samples), n);
    json levels = json::array();
    for (std::size_t level = 0; level < n; ++level) {
      json rows = json::array();
      for (std::size_t s = 0; s < chain.state_count(); ++s) {
        const double q = NumericTraits<T>::to_double(exact[level][s]);
        const double freq = static_cast<double>(counts[level][s]) / static_cast<double>(opt.count);
        rows.push_back({{"clique", format_clique(g, chain.state(s))},
                        {"exact", number(exact[level][s])},
                        {"count", counts[level][s]},
                        {"frequency", freq},
                        {"sigma", std::sqrt(q * (1.0 - q) / static_cast<double>(opt.count))}});
      }
      levels.push_back({{"level", level + 1}, {"cliques", rows}});
    }
    json doc = {{"height", n}, {"count", opt.count}, {"seed", config.seed}, {"levels", levels}};
    std::cout << doc.dump(2) << '\n';
    return kExitOk;
  }
  std::ostringstream text;
  json rows = json::array();
  for (const Trace& x : samples) {
    text << format_trace(g, x) << '\n';
    rows.push_back(format_trace(g, x));
  }
  return print(config, json{{"height", n}, {"seed", config.seed}, {"samples", rows}}, text.str());
}

template <Scalar T>
int cmd_harmonic(const Config& config, const Options& opt, const Valuation<T>& f) {
  const auto& g = f.graph();
  if (opt.phi.empty()) throw InputError("harmonic needs --phi <file>");
  const auto phi = load_cylinder_combination(g, opt.phi).template convert<T>();
  const auto lambda = opt.measure ? measure_harmonic(f, phi) : from_boundary(f, phi);

  std::vector<Trace> points;
  if (opt.eval.empty()) {
    points = enumerate_up_to_height(g, config.height, Execution::parallel);
  } else {
    for (const auto& w : opt.eval) points.push_back(parse_trace(g, w));
  }
  json values = json::array();
  std::ostringstream text;
  for (const Trace& u : points) {
    const T value = lambda(u);
    values.push_back({{"trace", format_trace(g, u)}, {"lambda", number(value)}});
    text << "λ" << format_trace(g, u) << " = " << NumericTraits<T>::format(value) << '\n';
  }
  json doc = {{"values", values}};
  int code = kExitOk;
  if (opt.check) {
    const auto r = is_harmonic(f, lambda, config.height);
    doc["harmonic"] = {{"height", config.height},
                       {"passed", r.harmonic},
                       {"checked", r.checked},
                       {"max_abs_laplace", r.max_abs_laplace},
                       {"witness", r.witness ? json(format_trace(g, *r.witness)) : json(nullptr)}};
    text << "harmonic to height " << config.height << ": " << (r.harmonic ? "yes" : "no");
    if (r.witness) text << " (Δλ" << format_trace(g, *r.witness) << " = " << NumericTraits<T>::format(r.witness_value) << ")";
    text << '\n';
    if (!r.harmonic) code = kExitFailed;
  }
  print(config, doc, text.str());
  return code;
}

template <Scalar T>
int cmd_kernel(const Config& config, const Options& opt, const Valuation<T>& f, bool green) {
  const auto& g = f.graph();
  const Trace x = parse_trace(g, opt.x);
  T value;
  json doc = {{"kernel", green ? "green" : "martin"}, {"x", format_trace(g, x)}};
  std::string label;
  if (green) {
    if (!opt.y) throw InputError("kernel green needs --y <word>");
    const Trace y = parse_trace(g, *opt.y);
    value = green_kernel(f, x, y);
    doc["y"] = format_trace(g, y);
    label = "G(" + format_trace(g, x) + ", " + format_trace(g, y) + ")";
  } else if (opt.xi) {
    const Trace prefix = parse_trace(g, *opt.xi);
    if (!is_cf_chain(g, prefix.cliques) || prefix.is_identity()) throw InputError("--xi must be a non-empty prefix");
    value = martin_limit(f, prefix, x);
    doc["xi"] = format_trace(g, prefix);
    label = "K_ξ(" + format_trace(g, x) + ")";
  } else if (opt.y) {
    const Trace y = parse_trace(g, *opt.y);
    value = martin_kernel(f, y, x);
    doc["y"] = format_trace(g, y);
    label = "K_" + format_trace(g, y) + "(" + format_trace(g, x) + ")";
  } else {
    throw InputError("kernel martin needs --y <word> or --xi <prefix>");
  }
  doc["value"] = number(value);
  return print(config, doc, label + " = " + NumericTraits<T>::format(value) + '\n');
}

template <Scalar T>
int dispatch(const Config& config, const Options& opt, const std::string& command, const GraphPtr& g,
             const ValuationSpec& spec) {
  const auto f = make_valuation<T>(g, spec);
  if (command == "mobius") return cmd_mobius(config, f);
  if (command == "verify") return cmd_verify(config, opt, f);
  if (command == "sample") return cmd_sample(config, opt, f);
  if (command == "harmonic") return cmd_harmonic(config, opt, f);
  if (command == "green") return cmd_kernel(config, opt, f, true);
  if (command == "martin") return cmd_kernel(config, opt, f, false);
  throw InputError("unknown command '" + command + "'");
}

int run_with_valuation(const Config& config, const Options& opt, const std::string& command) {
  if (config.exact && config.floating) throw InputError("--exact and --float are exclusive");
  const auto g = load_monoid(config);
  const auto spec = load_weights(config);
  const bool exact = config.exact || (!config.floating && !spec.uniform);
  if (exact) return dispatch<Rational>(config, opt, command, g, spec);
  return dispatch<double>(config, opt, command, g, spec);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trace monoids, Bernoulli measures and Möbius harmonic functions"};
  app.require_subcommand(1);
  Config config;
  Options opt;

  auto globals = [&](CLI::App* cmd) {
    cmd->add_option("--monoid", config.monoid, "monoid spec file");
    cmd->add_option("--valuation", config.valuation, "valuation file or 'uniform'");
    cmd->add_flag("--exact", config.exact, "exact rational arithmetic");
    cmd->add_flag("--float", config.floating, "double precision arithmetic");
    cmd->add_option("--height", config.height, "height bound");
    cmd->add_option("--seed", config.seed, "random seed");
    cmd->add_flag("--json", config.json, "structured output");
  };
  globals(&app);

  auto* info = app.add_subcommand("info", "alphabet, cliques, Möbius polynomial");
  auto* normalize_cmd = app.add_subcommand("normalize", "Cartier-Foata normal form of a word");
  normalize_cmd->add_option("word", opt.word, "letters of the word");
  auto* mobius = app.add_subcommand("mobius", "Möbius transform of the valuation on cliques");
  auto* verify = app.add_subcommand("verify", "run the identity suite");
  verify->add_option("--tables", opt.tables, "random tables for the inversion check");
  verify->add_option("--words", opt.words, "random words for the confluence check");
  verify->add_option("--samples", opt.samples, "samples for the frequency check");
  auto* sample = app.add_subcommand("sample", "sample boundary prefixes");
  sample->add_option("--count", opt.count, "number of prefixes");
  sample->add_flag("--stats", opt.stats, "compare empirical and exact clique frequencies");
  auto* harmonic = app.add_subcommand("harmonic", "harmonic function of a boundary combination");
  harmonic->add_option("--phi", opt.phi, "file of 'term: <weight> <word>' lines");
  harmonic->add_option("--eval", opt.eval, "traces to evaluate at");
  harmonic->add_flag("--check", opt.check, "check harmonicity up to --height");
  harmonic->add_flag("--measure", opt.measure, "read the terms as a measure (non-negative weights)");
  auto* kernel = app.add_subcommand("kernel", "Green and Martin kernels");
  kernel->require_subcommand(1);
  auto* green = kernel->add_subcommand("green", "G(x, y)");
  auto* martin = kernel->add_subcommand("martin", "K_y(x) or K_ξ(x)");
  for (auto* k : {green, martin}) {
    k->add_option("--x", opt.x, "trace x");
    k->add_option("--y", opt.y, "trace y");
  }
  martin->add_option("--xi", opt.xi, "boundary prefix");
  for (auto* cmd : {info, normalize_cmd, mobius, verify, sample, harmonic, kernel, green, martin}) {
    cmd->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (info->parsed()) return cmd_info(config);
    if (normalize_cmd->parsed()) return cmd_normalize(config, opt);
    std::string command;
    if (mobius->parsed()) command = "mobius";
    if (verify->parsed()) command = "verify";
    if (sample->parsed()) command = "sample";
    if (harmonic->parsed()) command = "harmonic";
    if (green->parsed()) command = "green";
    if (martin->parsed()) command = "martin";
    return run_with_valuation(config, opt, command);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
}
