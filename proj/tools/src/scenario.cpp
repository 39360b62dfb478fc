#include "queuelib/cli/scenario.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <string>

#include "queuelib/csv.hpp"
#include "queuelib/error.hpp"

namespace queuelib::cli {
namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double number(std::string_view key, std::string_view value) {
  if (auto x = csv::to_double(value)) return *x;
  throw InputError("field '" + std::string(key) + "': '" + std::string(value) +
                   "' is not a number");
}

long long integer(std::string_view key, std::string_view value) {
  long long x = 0;
  const auto* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, x);
  if (ec != std::errc{} || ptr != end) {
    throw InputError("field '" + std::string(key) + "': '" + std::string(value) +
                     "' is not an integer");
  }
  return x;
}

std::ifstream open(const std::filesystem::path& p, std::string_view what) {
  std::ifstream in(p);
  if (!in) throw InputError("cannot open " + std::string(what) + " file: " + p.string());
  return in;
}

}  // namespace

void ScenarioConfig::set(std::string_view key, std::string_view value) {
  if (key == "nodes") {
    nodes = std::string(value);
  } else if (key == "links") {
    links = std::string(value);
  } else if (key == "demands") {
    demands = std::string(value);
  } else if (key == "paths") {
    paths = std::string(value);
  } else if (key == "k") {
    const auto x = integer(key, value);
    if (x < 1) throw InputError("field 'k': must be >= 1");
    k = static_cast<std::size_t>(x);
  } else if (key == "alpha") {
    params.alpha = number(key, value);
  } else if (key == "beta") {
    params.beta = number(key, value);
  } else if (key == "m") {
    params.m = number(key, value);
  } else if (key == "n") {
    params.n = number(key, value);
  } else if (key == "gamma") {
    params.gamma = number(key, value);
  } else if (key == "phi") {
    params.phi = number(key, value);
  } else if (key == "mode") {
    auto m = parse_queue_mode(value);
    if (!m) throw InputError("field 'mode': unknown queue mode '" + std::string(value) + "'");
    mode = *m;
  } else if (key == "variant") {
    auto v = parse_variant(value);
    if (!v) throw InputError("field 'variant': unknown variant '" + std::string(value) + "'");
    variant = *v;
  } else if (key == "epsilon") {
    epsilon = number(key, value);
    if (!(epsilon > 0.0)) throw InputError("field 'epsilon': must be > 0");
  } else if (key == "max_iter") {
    const auto x = integer(key, value);
    if (x < 1) throw InputError("field 'max_iter': must be >= 1");
    max_iter = static_cast<int>(x);
  } else if (key == "seed") {
    const auto x = integer(key, value);
    if (x < 0) throw InputError("field 'seed': must be >= 0");
    seed = static_cast<std::uint64_t>(x);
  } else if (key == "out") {
    out = std::string(value);
  } else {
    throw InputError("unknown config key '" + std::string(key) + "'");
  }
}

std::filesystem::path ScenarioConfig::resolve(const std::filesystem::path& p) const {
  return p.is_absolute() ? p : base / p;
}

SolverOptions ScenarioConfig::solver_options() const {
  SolverOptions o;
  o.queue_mode = mode;
  o.variant = variant;
  o.epsilon = epsilon;
  o.max_outer_iterations = max_iter;
  return o;
}

ScenarioConfig parse_config(std::istream& in, const std::filesystem::path& base) {
  ScenarioConfig c;
  c.base = base;
  std::string line;
  for (int number = 1; std::getline(in, line); ++number) {
    auto text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) {
      throw InputError("config line " + std::to_string(number) + ": expected key = value");
    }
    const auto key = trim(text.substr(0, eq));
    const auto value = trim(text.substr(eq + 1));
    if (value.empty()) throw InputError("field '" + std::string(key) + "': empty value");
    c.set(key, value);
  }
  return c;
}

ScenarioConfig load_config(const std::filesystem::path& file) {
  auto in = open(file, "config");
  return parse_config(in, file.parent_path().empty() ? "." : file.parent_path());
}

Scenario load_scenario(const ScenarioConfig& config) {
  if (config.nodes.empty()) throw InputError("field 'nodes': missing");
  if (config.links.empty()) throw InputError("field 'links': missing");
  if (config.demands.empty()) throw InputError("field 'demands': missing");

  const auto params = config.params.apply(CostParams{});
  params.validate();
  auto node_in = open(config.resolve(config.nodes), "nodes");
  auto link_in = open(config.resolve(config.links), "links");
  auto network = load_network(node_in, link_in, params);
  auto demand_in = open(config.resolve(config.demands), "demands");
  network = load_demands(demand_in, network);

  Scenario s{network, {}, config.solver_options()};
  if (config.paths.empty()) {
    s.path_set = enumerate_paths(s.network, config.k);
  } else {
    auto path_in = open(config.resolve(config.paths), "paths");
    s.path_set = load_path_set(path_in, s.network);
  }
  return s;
}

}  // namespace queuelib::cli
