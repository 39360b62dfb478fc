#include "queuelib/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "queuelib/cost.hpp"
#include "queuelib/objective.hpp"

namespace queuelib {

bool is_congested(const Link& link, double queue) { return queue > 1e-6 * link.capacity; }

std::vector<double> path_generalized_cost(const Network& network, const PathSet& path_set,
                                          std::span<const CostParams> params,
                                          const SolutionState& state) {
  std::vector<double> link_cost(network.link_count());
  for (std::size_t a = 0; a < network.link_count(); ++a) {
    link_cost[a] = link_travel_time(network.link(a), params[a], state.loads.flow[a],
                                    state.loads.queue[a]);
  }
  std::vector<double> cost(path_set.size(), 0.0);
  for (std::size_t p = 0; p < path_set.size(); ++p) {
    for (auto a : path_set.path(p).links) cost[p] += link_cost[a];
  }
  return cost;
}

EquilibriumReport kkt_report(const Network& network, const PathSet& path_set,
                             std::span<const CostParams> params, const SolutionState& state,
                             CostKind kind) {
  std::vector<double> cost;
  if (kind == CostKind::generalized) {
    cost = path_generalized_cost(network, path_set, params, state);
  } else {
    std::vector<double> link_cost(network.link_count());
    for (std::size_t a = 0; a < network.link_count(); ++a) {
      link_cost[a] = marginal_link_time(network.link(a), params[a], state.loads.flow[a],
                                        state.loads.queue[a]);
    }
    cost.assign(path_set.size(), 0.0);
    for (std::size_t p = 0; p < path_set.size(); ++p) {
      for (auto a : path_set.path(p).links) cost[p] += link_cost[a];
    }
  }

  EquilibriumReport report;
  const auto ods = network.od_pairs();
  report.od.resize(ods.size());
  double excess = 0.0;
  double base = 0.0;
  for (std::size_t r = 0; r < ods.size(); ++r) {
    auto& od = report.od[r];
    const auto paths = path_set.paths_of_od(r);
    double assigned = 0.0;
    od.min_cost = paths.empty() ? 0.0 : cost[paths.front()];
    for (auto p : paths) od.min_cost = std::min(od.min_cost, cost[p]);
    for (auto p : paths) {
      const double f = state.path_flow[p];
      assigned += f;
      if (f > 1e-6) od.used_cost_deviation = std::max(od.used_cost_deviation, cost[p] - od.min_cost);
      excess += f * (cost[p] - od.min_cost);
    }
    od.demand_residual = std::abs(ods[r].demand - assigned);
    base += ods[r].demand * od.min_cost;
    report.max_used_cost_deviation = std::max(report.max_used_cost_deviation, od.used_cost_deviation);
    report.max_demand_residual = std::max(report.max_demand_residual, od.demand_residual);
  }
  report.relative_gap = base > 0.0 ? excess / base : 0.0;

  report.link.resize(network.link_count());
  for (std::size_t a = 0; a < network.link_count(); ++a) {
    const auto& link = network.link(a);
    const double v = state.loads.flow[a];
    const double q = state.loads.queue[a];
    auto& lr = report.link[a];
    const double slack = params[a].gamma > 0.0 ? (link.capacity - v) / params[a].gamma - q
                                               : link.capacity - v;
    lr.complementarity = std::abs(q * slack);
    lr.capacity_excess = std::max(0.0, v - link.capacity);
    report.max_complementarity = std::max(report.max_complementarity, lr.complementarity);
    report.max_capacity_excess = std::max(report.max_capacity_excess, lr.capacity_excess);
  }
  return report;
}

EquilibriumReport kkt_report(const Network& network, const PathSet& path_set,
                             const SolveResult& result, Variant variant) {
  return kkt_report(network, path_set, result.params, result.state,
                    variant == Variant::system_optimum ? CostKind::marginal : CostKind::generalized);
}

std::vector<ComparisonRow> compare_models(const Network& network, const PathSet& path_set,
                                          std::span<const LinkId> links,
                                          std::span<const Variant> variants,
                                          const SolverOptions& options) {
  std::vector<std::size_t> index;
  for (auto id : links) index.push_back(network.require_link(id));
  std::vector<ComparisonRow> rows;
  for (auto variant : variants) {
    const auto result = solve_variant(network, path_set, variant, options);
    ComparisonRow row{variant, result.report.status == SolveStatus::converged, {}};
    for (std::size_t i = 0; i < index.size(); ++i) {
      const auto a = index[i];
      const auto& s = result.state;
      row.links.push_back({links[i], s.loads.flow[a], s.capacity[a], s.loads.queue[a], s.delay[a],
                           s.link_cost[a]});
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<ComparisonRow> compare_models(const Network& network, const PathSet& path_set,
                                          std::span<const LinkId> links,
                                          const SolverOptions& options) {
  const Variant all[] = {Variant::traditional_ue, Variant::fixed_capacity_queue,
                         Variant::queue_dependent, Variant::system_optimum};
  return compare_models(network, path_set, links, all, options);
}

namespace {

std::vector<double> dirichlet_flows(const Network& network, const PathSet& path_set,
                                    std::mt19937_64& rng) {
  std::gamma_distribution<double> draw(1.0, 1.0);
  std::vector<double> flows(path_set.size(), 0.0);
  const auto ods = network.od_pairs();
  for (std::size_t r = 0; r < ods.size(); ++r) {
    const auto paths = path_set.paths_of_od(r);
    double sum = 0.0;
    for (auto p : paths) sum += flows[p] = draw(rng);
    for (auto p : paths) flows[p] = sum > 0.0 ? ods[r].demand * flows[p] / sum : 0.0;
  }
  return flows;
}

}  // namespace

FeasiblePoint random_feasible_point(const Network& network, const PathSet& path_set,
                                    std::span<const CostParams> params, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> share(0.5, 1.5);
  std::uniform_real_distribution<double> held(0.05, 0.3);
  FeasiblePoint point;
  point.path_flow.assign(path_set.size(), 0.0);
  point.path_queue.assign(path_set.incidence_count(), 0.0);

  const auto ods = network.od_pairs();
  for (std::size_t r = 0; r < ods.size(); ++r) {
    const auto paths = path_set.paths_of_od(r);
    double sum = 0.0;
    for (auto p : paths) sum += point.path_flow[p] = share(rng);
    for (auto p : paths) point.path_flow[p] *= ods[r].demand / sum;
  }
  for (std::size_t p = 0; p < path_set.size(); ++p) {
    double moving = point.path_flow[p];
    for (std::size_t i = 0; i < path_set.path(p).links.size(); ++i) {
      auto& q = point.path_queue[path_set.queue_index(p, i)];
      q = held(rng) * moving;
      moving -= q;
    }
  }
  for (std::size_t a = 0; a < network.link_count(); ++a) {
    const auto through = path_set.through(a);
    double total = 0.0;
    for (const auto& pp : through) total += point.path_queue[path_set.queue_index(pp.path, pp.position)];
    const double limit = params[a].gamma > 0.0 ? 0.5 * network.link(a).capacity / params[a].gamma
                                               : network.link(a).capacity;
    if (total <= limit) continue;
    for (const auto& pp : through) point.path_queue[path_set.queue_index(pp.path, pp.position)] *= limit / total;
  }
  return point;
}

GradientCheck gradient_check(const Network& network, const PathSet& path_set,
                             std::span<const CostParams> params, const FeasiblePoint& point) {
  auto f = point.path_flow;
  auto q = point.path_queue;
  const auto g = objective_gradient(network, path_set, params, f, q);
  GradientCheck check;

  auto central = [&](double& x, double h) {
    const double x0 = x;
    x = x0 + h;
    const double up = objective(network, path_set, params, f, q);
    x = x0 - h;
    const double down = objective(network, path_set, params, f, q);
    x = x0;
    return (up - down) / (2.0 * h);
  };
  auto record = [&](double analytic, double& x, double h, const std::string& name) {
    const double d = (4.0 * central(x, h / 2.0) - central(x, h)) / 3.0;
    const double err = std::abs(analytic - d) / std::max({std::abs(analytic), std::abs(d), 1e-6});
    ++check.coordinates;
    if (err > check.max_relative_error) {
      check.max_relative_error = err;
      check.worst = name;
    }
  };

  const auto ods = network.od_pairs();
  for (std::size_t p = 0; p < path_set.size(); ++p) {
    if (ods[path_set.path(p).od].demand <= 0.0) continue;
    // Keep the perturbed point inside the region where every v_a >= 0.
    double moving = f[p];
    for (std::size_t i = 0; i < path_set.path(p).links.size(); ++i) {
      moving -= q[path_set.queue_index(p, i)];
    }
    const double h = std::min(1e-3 * std::max(1.0, f[p]), 0.25 * moving);
    if (h > 0.0) record(g.path[p], f[p], h, "f~[" + std::to_string(p) + "]");
    for (std::size_t i = 0; i < path_set.path(p).links.size(); ++i) {
      const auto idx = path_set.queue_index(p, i);
      const double hq = std::min(1e-3 * std::max(1.0, q[idx]), 0.25 * std::min(q[idx], moving));
      if (hq > 0.0) {
        record(g.queue[idx], q[idx], hq, "Q[" + std::to_string(p) + "," + std::to_string(i) + "]");
      }
    }
  }
  return check;
}

std::vector<double> random_path_flows(const Network& network, const PathSet& path_set,
                                      std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return dirichlet_flows(network, path_set, rng);
}

UniquenessReport uniqueness_probe(const Network& network, const PathSet& path_set,
                                  const SolverOptions& options, int runs, std::uint64_t seed) {
  UniquenessReport report;
  report.runs = runs;
  std::mt19937_64 rng(seed);
  SolutionState reference;
  std::vector<bool> reference_congested;
  for (int i = 0; i < runs; ++i) {
    auto opts = options;
    opts.initial_flows = dirichlet_flows(network, path_set, rng);
    const auto result = solve(network, path_set, opts);
    report.all_converged = report.all_converged && result.report.status == SolveStatus::converged;
    const auto& s = result.state;
    std::vector<bool> congested(network.link_count());
    for (std::size_t a = 0; a < network.link_count(); ++a) {
      congested[a] = is_congested(network.link(a), s.loads.queue[a]);
    }
    if (i == 0) {
      reference = s;
      reference_congested = std::move(congested);
      continue;
    }
    report.congested_sets_match = report.congested_sets_match && congested == reference_congested;
    for (std::size_t a = 0; a < network.link_count(); ++a) {
      report.max_flow_deviation =
          std::max(report.max_flow_deviation, std::abs(s.loads.flow[a] - reference.loads.flow[a]));
      report.max_queue_deviation = std::max(report.max_queue_deviation,
                                            std::abs(s.loads.queue[a] - reference.loads.queue[a]));
    }
    for (std::size_t p = 0; p < path_set.size(); ++p) {
      report.max_path_deviation = std::max(report.max_path_deviation,
                                           std::abs(s.path_flow[p] - reference.path_flow[p]));
    }
  }
  return report;
}

}  // namespace queuelib
