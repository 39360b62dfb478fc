#include "queuelib/cli/commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "queuelib/analysis.hpp"
#include "queuelib/csv.hpp"
#include "queuelib/error.hpp"

namespace queuelib::cli {
namespace {

namespace fs = std::filesystem;

std::string num(double x) {
  if (x == 0.0) x = 0.0;  // no "-0"
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

std::ofstream create(const fs::path& dir, const char* name) {
  fs::create_directories(dir);
  std::ofstream f(dir / name, std::ios::binary);
  if (!f) throw InputError("cannot write " + (dir / name).string());
  return f;
}

std::string link_list(const PathSet& ps, const Network& net, std::size_t p) {
  std::string s;
  for (auto a : ps.path(p).links) {
    if (!s.empty()) s += ';';
    s += std::to_string(net.link(a).id);
  }
  return s;
}

// A queue within 1e-9 of C_max / gamma leaves no exit capacity.
bool saturated(const Link& link, const CostParams& p, double q) {
  return p.gamma > 0.0 && q >= (1.0 - 1e-9) * link.capacity / p.gamma;
}

template <class F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const InputError& e) {
    for (const auto& issue : e.issues()) err << "error: " << issue << '\n';
    return exit_input_error;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return exit_input_error;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return exit_input_error;
  }
}

Column parse_column(std::string_view s) {
  for (auto c : {Column::flow, Column::queue, Column::capacity, Column::delay,
                 Column::running_time, Column::generalized_cost}) {
    if (s == to_string(c)) return c;
  }
  throw InputError("unknown sweep column '" + std::string(s) + "'");
}

double parse_number(std::string_view s, std::string_view what) {
  if (auto x = csv::to_double(s)) return *x;
  throw InputError(std::string(what) + ": '" + std::string(s) + "' is not a number");
}

LinkId parse_link(std::string_view s, const Network& net) {
  auto id = csv::to_int(s);
  if (!id) throw InputError("'" + std::string(s) + "' is not a link id");
  net.require_link(*id);
  return *id;
}

}  // namespace

int cmd_solve(const ScenarioConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto sc = load_scenario(config);
    const auto& net = sc.network;
    const auto& ps = sc.path_set;
    const auto result = solve(net, ps, sc.options);
    const auto& s = result.state;
    const auto kkt = kkt_report(net, ps, result, sc.options.variant);
    const auto dir = config.resolve(config.out);

    int congested = 0;
    int saturated_links = 0;
    double total_cost = 0.0;
    {
      auto f = create(dir, "links.csv");
      f << "link_id,from_node,to_node,flow,queue,capacity,travel_time,queuing_delay,"
           "generalized_cost,congested\n";
      for (std::size_t a = 0; a < net.link_count(); ++a) {
        const auto& l = net.link(a);
        const double q = s.loads.queue[a];
        const bool c = is_congested(l, q);
        congested += c;
        saturated_links += saturated(l, result.params[a], q);
        total_cost += (s.loads.flow[a] + q) * s.link_cost[a];
        f << l.id << ',' << l.tail << ',' << l.head << ',' << num(s.loads.flow[a]) << ','
          << num(q) << ',' << num(s.capacity[a]) << ',' << num(s.running_time[a]) << ','
          << num(s.delay[a]) << ',' << num(s.link_cost[a]) << ',' << (c ? 1 : 0) << '\n';
      }
    }
    {
      auto f = create(dir, "paths.csv");
      f << "path,origin,destination,links,oversaturated_flow,completed_flow,cost\n";
      const auto ods = net.od_pairs();
      for (std::size_t p = 0; p < ps.size(); ++p) {
        const auto& od = ods[ps.path(p).od];
        f << p + 1 << ',' << od.origin << ',' << od.destination << ',' << link_list(ps, net, p)
          << ',' << num(s.path_flow[p]) << ',' << num(s.completed_flow[p]) << ','
          << num(s.path_cost[p]) << '\n';
      }
    }
    {
      auto f = create(dir, "convergence.csv");
      f << "iteration,objective_half,objective,delta_flow,delta_queue,gap\n";
      for (const auto& h : result.report.history) {
        f << h.iteration << ',' << num(h.objective_half) << ',' << num(h.objective) << ','
          << num(h.delta_flow) << ',' << num(h.delta_queue) << ',' << num(h.gap) << '\n';
      }
    }
    const bool converged = result.report.status == SolveStatus::converged;
    std::ostringstream summary;
    summary << "status: " << (converged ? "converged" : "iteration_limit") << '\n'
            << "iterations: " << result.report.iterations << '\n'
            << "variant: " << to_string(sc.options.variant) << '\n'
            << "mode: " << to_string(sc.options.queue_mode) << '\n'
            << "total_generalized_cost: " << num(total_cost) << '\n'
            << "congested_links: " << congested << '\n'
            << "saturated_links: " << saturated_links << '\n'
            << "relative_gap: " << num(kkt.relative_gap) << '\n'
            << "max_used_cost_deviation: " << num(kkt.max_used_cost_deviation) << '\n'
            << "max_complementarity: " << num(kkt.max_complementarity) << '\n'
            << "max_capacity_excess: " << num(kkt.max_capacity_excess) << '\n';
    create(dir, "summary.txt") << summary.str();
    out << summary.str() << "wall_seconds: " << num(result.report.wall_seconds) << '\n'
        << "outputs: " << dir.string() << '\n';
    if (saturated_links > 0) {
      err << "warning: " << saturated_links
          << " link(s) hold a queue at C_max / gamma; no finite-cost equilibrium was found\n";
    }
    return converged ? exit_ok : exit_not_converged;
  });
}

int cmd_compare(const ScenarioConfig& config, const std::vector<LinkId>& links,
                const std::vector<Variant>& variants, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (links.empty()) throw InputError("compare needs at least one link id (--track)");
    const auto sc = load_scenario(config);
    for (auto id : links) sc.network.require_link(id);
    const auto rows =
        variants.empty() ? compare_models(sc.network, sc.path_set, links, sc.options)
                         : compare_models(sc.network, sc.path_set, links, variants, sc.options);
    std::ostringstream csv;
    csv << "variant,link_id,flow,capacity,queue,queuing_delay,generalized_cost,converged\n";
    bool all = true;
    for (const auto& row : rows) {
      all = all && row.converged;
      for (const auto& l : row.links) {
        csv << to_string(row.model) << ',' << l.link << ',' << num(l.flow) << ','
            << num(l.capacity) << ',' << num(l.queue) << ',' << num(l.delay) << ','
            << num(l.generalized_cost) << ',' << (row.converged ? 1 : 0) << '\n';
      }
    }
    create(config.resolve(config.out), "compare.csv") << csv.str();
    out << csv.str();
    return all ? exit_ok : exit_not_converged;
  });
}

Expectation parse_expectation(std::string_view text, const Network& network) {
  const auto parts = csv::split(text, ':');
  auto fail = [&] { return InputError("malformed expectation '" + std::string(text) + "'"); };
  if (parts.size() < 2) throw fail();
  const auto& kind = parts[0];
  const auto link = parse_link(parts[1], network);
  if (kind == "monotone") {
    if (parts.size() < 4 || parts.size() > 5) throw fail();
    Monotone m{link, parse_column(parts[2]), Direction::increasing, false};
    if (parts[3] == "decreasing") {
      m.direction = Direction::decreasing;
    } else if (parts[3] != "increasing") {
      throw fail();
    }
    if (parts.size() == 5) {
      if (parts[4] != "strict") throw fail();
      m.strict = true;
    }
    return m;
  }
  if (kind == "value") {
    if (parts.size() != 6) throw fail();
    return ValueAt{link, parse_column(parts[2]), parse_number(parts[3], "expectation value"),
                   parse_number(parts[4], "expected value"), parse_number(parts[5], "tolerance")};
  }
  if (kind == "bottleneck") {
    if (parts.size() != 2) throw fail();
    return BottleneckProfile{link, network.link(network.require_link(link)).capacity};
  }
  if (kind == "relief") {
    if (parts.size() != 3) throw fail();
    QueueRelief r{link, {}};
    for (const auto& u : csv::split(parts[2], ',')) r.upstream.push_back(parse_link(u, network));
    if (r.upstream.empty()) throw fail();
    return r;
  }
  throw fail();
}

int cmd_sweep(const ScenarioConfig& config, const SweepRequest& request, std::ostream& out,
              std::ostream& err) {
  return guarded(err, [&] {
    const auto parameter = parse_sweep_parameter(request.parameter);
    if (!parameter) throw InputError("unknown sweep parameter '" + request.parameter + "'");
    if (request.values.empty()) throw InputError("sweep needs at least one value");
    const auto sc = load_scenario(config);

    SweepSpec spec;
    spec.parameter = *parameter;
    spec.values = request.values;
    spec.network = sc.network;
    spec.path_set = sc.path_set;
    spec.options = sc.options;
    spec.tracked = request.tracked;
    if (*parameter == SweepParameter::demand) {
      if (!request.od) throw InputError("demand sweep needs --od ORIGIN,DESTINATION");
      const auto ods = sc.network.od_pairs();
      std::optional<std::size_t> index;
      for (std::size_t r = 0; r < ods.size(); ++r) {
        if (ods[r].origin == request.od->first && ods[r].destination == request.od->second) index = r;
      }
      if (!index) {
        throw InputError("OD pair " + std::to_string(request.od->first) + "," +
                         std::to_string(request.od->second) + " is not in the demand file");
      }
      spec.od = *index;
    }
    std::vector<Expectation> expectations;
    for (const auto& e : request.expectations) {
      expectations.push_back(parse_expectation(e, sc.network));
    }
    spec.validate();

    const auto rows = run_sweep(spec);
    const auto dir = config.resolve(config.out);
    bool all = true;
    {
      auto f = create(dir, "sweep.csv");
      f << request.parameter
        << ",converged,iterations,gap,link_id,flow,queue,capacity,queuing_delay,running_time,"
           "generalized_cost\n";
      for (const auto& row : rows) {
        all = all && row.converged;
        for (const auto& l : row.links) {
          f << num(row.value) << ',' << (row.converged ? 1 : 0) << ',' << row.iterations << ','
            << num(row.gap) << ',' << l.link << ',' << num(l.flow) << ',' << num(l.queue) << ','
            << num(l.capacity) << ',' << num(l.delay) << ',' << num(l.running_time) << ','
            << num(l.generalized_cost) << '\n';
        }
      }
    }
    const auto trends = trend_check(rows, expectations);
    std::ostringstream report;
    report << "rows: " << rows.size() << '\n'
           << "all_converged: " << (all ? "yes" : "no") << '\n'
           << "expectations: " << expectations.size() << '\n';
    for (const auto& v : trends.violations) report << "violation: " << v << '\n';
    report << "trends: " << (trends.pass ? "pass" : "fail") << '\n';
    create(dir, "trends.txt") << report.str();
    out << report.str() << "outputs: " << dir.string() << '\n';
    return all && trends.pass ? exit_ok : exit_not_converged;
  });
}

int cmd_validate(const ScenarioConfig& config, double gradient_tolerance, std::ostream& out,
                 std::ostream& err) {
  return guarded(err, [&] {
    const auto sc = load_scenario(config);
    out << "network: " << sc.network.nodes().size() << " nodes, " << sc.network.link_count()
        << " links, " << sc.network.od_pairs().size() << " OD pairs, " << sc.path_set.size()
        << " paths\n";
    const auto params = link_params(sc.network);
    const auto point = random_feasible_point(sc.network, sc.path_set, params, config.seed);
    const auto check = gradient_check(sc.network, sc.path_set, params, point);
    out << "gradient check: " << check.coordinates << " coordinates, max relative error "
        << num(check.max_relative_error);
    if (!check.worst.empty()) out << " at " << check.worst;
    out << " (tolerance " << num(gradient_tolerance) << ", seed " << config.seed << ")\n";
    if (check.max_relative_error > gradient_tolerance) {
      err << "error: gradient check failed, max relative error "
          << num(check.max_relative_error) << '\n';
      return exit_input_error;
    }
    out << "clean\n";
    return exit_ok;
  });
}

namespace {

std::vector<double> parse_values(const std::string& text) {
  std::vector<double> values;
  for (const auto& v : csv::split(text, ',')) {
    if (v.empty()) continue;
    values.push_back(parse_number(v, "--values"));
  }
  return values;
}

std::vector<double> parse_range(const std::string& text) {
  const auto parts = csv::split(text, ':');
  if (parts.size() != 3) throw InputError("--range: expected LO:HI:STEP, got '" + text + "'");
  const double lo = parse_number(parts[0], "--range");
  const double hi = parse_number(parts[1], "--range");
  const double step = parse_number(parts[2], "--range");
  if (!(step > 0.0) || hi < lo) throw InputError("--range: need LO <= HI and STEP > 0");
  return sweep_range(lo, hi, step);
}

std::pair<NodeId, NodeId> parse_od(const std::string& text) {
  const auto parts = csv::split(text, ',');
  if (parts.size() == 2) {
    const auto o = csv::to_int(parts[0]);
    const auto d = csv::to_int(parts[1]);
    if (o && d) return {*o, *d};
  }
  throw InputError("--od: expected ORIGIN,DESTINATION, got '" + text + "'");
}

std::vector<LinkId> parse_links(const std::vector<std::string>& items) {
  std::vector<LinkId> ids;
  for (const auto& item : items) {
    for (const auto& s : csv::split(item, ',')) {
      const auto id = csv::to_int(s);
      if (!id) throw InputError("--track: '" + s + "' is not a link id");
      ids.push_back(*id);
    }
  }
  return ids;
}

struct Overrides {
  std::string config;
  std::vector<std::string> set;
  std::string mode;
  std::string epsilon;
  std::string max_iter;
  std::string seed;
  std::string out;

  void add(CLI::App& app) {
    app.add_option("--config", config, "Scenario file (key = value)")->required();
    app.add_option("--set", set, "Override a config key, KEY=VALUE (repeatable)");
    app.add_option("--mode", mode, "fixed_point or smoothed_gradient");
    app.add_option("--epsilon", epsilon, "Convergence tolerance on path flows, veh/hr");
    app.add_option("--max-iter", max_iter, "Outer iteration limit");
    app.add_option("--seed", seed, "Seed for randomized checks");
    app.add_option("--out", out, "Output directory");
  }

  // Command-line values take precedence over the file.
  ScenarioConfig load() const {
    auto c = load_config(config);
    for (const auto& kv : set) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw InputError("--set: expected KEY=VALUE, got '" + kv + "'");
      c.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (!mode.empty()) c.set("mode", mode);
    if (!epsilon.empty()) c.set("epsilon", epsilon);
    if (!max_iter.empty()) c.set("max_iter", max_iter);
    if (!seed.empty()) c.set("seed", seed);
    if (!out.empty()) c.out = std::filesystem::absolute(out);
    return c;
  }
};

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Static traffic assignment with residual queues and queue-dependent capacity",
               "queuelib"};
  app.require_subcommand(1);

  Overrides solve_o, compare_o, sweep_o, validate_o;
  std::string solve_variant;
  auto* solve = app.add_subcommand("solve", "Solve one scenario and write links/paths/convergence");
  solve_o.add(*solve);
  solve->add_option("--variant", solve_variant,
                    "queue_dependent, traditional_ue, fixed_capacity_queue or system_optimum");

  std::vector<std::string> compare_links, compare_variants;
  auto* compare = app.add_subcommand("compare", "Solve each model variant and report chosen links");
  compare_o.add(*compare);
  compare->add_option("--track", compare_links, "Link ids, comma separated")->required();
  compare->add_option("--variant", compare_variants, "Restrict to these variants")
      ->delimiter(',');

  std::string param, values, range, od, sweep_variant;
  std::vector<std::string> sweep_links, expectations;
  auto* sweep = app.add_subcommand("sweep", "Re-solve over a parameter grid");
  sweep_o.add(*sweep);
  sweep->add_option("--param", param, "gamma, m, n or demand")->required();
  auto* values_opt = sweep->add_option("--values", values, "Comma separated values");
  auto* range_opt = sweep->add_option("--range", range, "LO:HI:STEP, inclusive");
  values_opt->excludes(range_opt);
  sweep->add_option("--od", od, "ORIGIN,DESTINATION for demand sweeps");
  sweep->add_option("--track", sweep_links, "Link ids to report, comma separated");
  sweep->add_option("--variant", sweep_variant, "Model variant");
  sweep->add_option("--expect", expectations, "Trend expectation (repeatable)");

  double gradient_tol = 1e-5;
  auto* validate = app.add_subcommand("validate", "Check inputs and analytic gradients");
  validate_o.add(*validate);
  validate->add_option("--gradient-tol", gradient_tol, "Largest accepted relative error");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    out << app.help();
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return exit_input_error;
  }

  return guarded(err, [&] {
    if (*solve) {
      auto c = solve_o.load();
      if (!solve_variant.empty()) c.set("variant", solve_variant);
      return cmd_solve(c, out, err);
    }
    if (*compare) {
      const auto c = compare_o.load();
      std::vector<Variant> variants;
      for (const auto& v : compare_variants) {
        const auto parsed = parse_variant(v);
        if (!parsed) throw InputError("--variant: unknown variant '" + v + "'");
        variants.push_back(*parsed);
      }
      return cmd_compare(c, parse_links(compare_links), variants, out, err);
    }
    if (*sweep) {
      auto c = sweep_o.load();
      if (!sweep_variant.empty()) c.set("variant", sweep_variant);
      SweepRequest r;
      r.parameter = param;
      r.values = range.empty() ? parse_values(values) : parse_range(range);
      if (!od.empty()) r.od = parse_od(od);
      r.tracked = parse_links(sweep_links);
      r.expectations = expectations;
      return cmd_sweep(c, r, out, err);
    }
    return cmd_validate(validate_o.load(), gradient_tol, out, err);
  });
}

}  // namespace queuelib::cli
