#include "queuelib/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "queuelib/analysis.hpp"
#include "queuelib/cost.hpp"
#include "queuelib/error.hpp"
#include "queuelib/objective.hpp"

namespace queuelib {

std::string_view to_string(QueueMode mode) {
  switch (mode) {
    case QueueMode::fixed_point: return "fixed_point";
    case QueueMode::smoothed_gradient: return "smoothed_gradient";
  }
  return "?";
}

std::string_view to_string(Variant variant) {
  switch (variant) {
    case Variant::queue_dependent: return "queue_dependent";
    case Variant::traditional_ue: return "traditional_ue";
    case Variant::fixed_capacity_queue: return "fixed_capacity_queue";
    case Variant::system_optimum: return "system_optimum";
  }
  return "?";
}

std::optional<QueueMode> parse_queue_mode(std::string_view text) {
  if (text == "fixed_point" || text == "complementarity-fixed-point" || text == "fixed-point") {
    return QueueMode::fixed_point;
  }
  if (text == "smoothed_gradient" || text == "smoothed-gradient" || text == "gradient") {
    return QueueMode::smoothed_gradient;
  }
  return std::nullopt;
}

std::optional<Variant> parse_variant(std::string_view text) {
  for (auto v : {Variant::queue_dependent, Variant::traditional_ue, Variant::fixed_capacity_queue,
                 Variant::system_optimum}) {
    if (text == to_string(v)) return v;
  }
  return std::nullopt;
}

void SolverOptions::validate() const {
  if (!(epsilon > 0.0)) throw InputError("epsilon must be > 0");
  if (max_outer_iterations < 1) throw InputError("max_iter must be >= 1");
  if (max_inner_passes < 1) throw InputError("max_inner_passes must be >= 1");
  if (!(step_scale > 0.0)) throw InputError("step_scale must be > 0");
  for (double f : initial_flows) {
    if (!(f >= 0.0) || !std::isfinite(f)) throw InputError("initial flows must be >= 0");
  }
}

std::vector<CostParams> variant_params(const Network& network, Variant variant) {
  auto params = link_params(network);
  if (variant == Variant::fixed_capacity_queue) {
    for (auto& p : params) {
      p.phi = 1.0;
      p.gamma = 0.0;
    }
  }
  return params;
}

void refresh_state(const Network& network, const PathSet& path_set,
                   std::span<const CostParams> params, SolutionState& state) {
  state.loads = assemble_link_state(path_set, state.path_flow, state.path_queue);
  const auto n = network.link_count();
  state.capacity.resize(n);
  state.running_time.resize(n);
  state.delay.resize(n);
  state.link_cost.resize(n);
  for (std::size_t a = 0; a < n; ++a) {
    const auto& link = network.link(a);
    const double q = state.loads.queue[a];
    state.capacity[a] = capacity(link, params[a], q);
    state.running_time[a] = running_time(link, params[a], state.loads.flow[a], q);
    state.delay[a] = queuing_delay(link, params[a], q);
    state.link_cost[a] = state.running_time[a] + state.delay[a];
  }
  state.completed_flow = completed_path_flows(path_set, state.path_flow, state.path_queue);
  state.path_cost.assign(path_set.size(), 0.0);
  for (std::size_t p = 0; p < path_set.size(); ++p) {
    for (auto a : path_set.path(p).links) state.path_cost[p] += state.link_cost[a];
  }
}

std::vector<double> initial_path_flows(const Network& network, const PathSet& path_set) {
  std::vector<double> flows(path_set.size(), 0.0);
  const auto ods = network.od_pairs();
  for (std::size_t r = 0; r < ods.size(); ++r) {
    const auto paths = path_set.paths_of_od(r);
    if (paths.empty()) continue;
    auto best = paths.front();
    double best_cost = free_flow_cost(network, path_set.path(best));
    for (auto p : paths) {
      const double c = free_flow_cost(network, path_set.path(p));
      if (c < best_cost) {
        best = p;
        best_cost = c;
      }
    }
    flows[best] = ods[r].demand;
  }
  return flows;
}

namespace {

enum class PathCost { generalized, marginal, smoothed };

PathCost path_cost_kind(const SolverOptions& options) {
  if (options.variant == Variant::system_optimum) return PathCost::marginal;
  if (options.queue_mode == QueueMode::smoothed_gradient &&
      options.variant != Variant::traditional_ue) {
    return PathCost::smoothed;
  }
  return PathCost::generalized;
}

// Per-link cost c(v), its slope, and a merit function whose v-derivative is
// c(v), all at a frozen queue Q.
struct LinkCostModel {
  const Network& network;
  std::span<const CostParams> params;
  PathCost kind;

  double cost(std::size_t a, double v, double q) const {
    const auto& l = network.link(a);
    switch (kind) {
      case PathCost::generalized: return link_travel_time(l, params[a], v, q);
      case PathCost::marginal: return marginal_link_time(l, params[a], v, q);
      case PathCost::smoothed: return smoothed_link_time(l, params[a], v, q);
    }
    return 0.0;
  }

  double slope(std::size_t a, double v, double q) const {
    const auto& l = network.link(a);
    switch (kind) {
      case PathCost::generalized: return travel_time_dv(l, params[a], v, q);
      case PathCost::marginal: return marginal_link_time_dv(l, params[a], v, q);
      case PathCost::smoothed: return smoothed_link_time_dv(l, params[a], v, q);
    }
    return 0.0;
  }

  // Continued linearly below v = 0, where a trial step may push a link that
  // only carries flow released by a queue about to be trimmed.
  double merit(std::size_t a, double v, double q) const {
    if (v < 0.0) return v * cost(a, 0.0, q);
    const auto& l = network.link(a);
    const auto& p = params[a];
    switch (kind) {
      case PathCost::generalized: {
        const double c = capacity(l, p, q);
        return l.free_flow_time * v +
               l.free_flow_time * p.beta * c * std::pow(v / c, p.n + 1.0) / (p.n + 1.0) +
               v * queuing_delay(l, p, q);
      }
      case PathCost::marginal: return (v + q) * link_travel_time(l, p, v, q);
      case PathCost::smoothed: return flow_integral(l, p, v, q);
    }
    return 0.0;
  }
};

double relative_gap(const Network& network, const PathSet& path_set,
                    std::span<const CostParams> params, const SolutionState& state,
                    Variant variant) {
  const auto kind = variant == Variant::system_optimum ? CostKind::marginal : CostKind::generalized;
  return kkt_report(network, path_set, params, state, kind).relative_gap;
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

std::vector<double> starting_flows(const Network& network, const PathSet& path_set,
                                   const SolverOptions& options) {
  if (options.initial_flows.empty()) return initial_path_flows(network, path_set);
  if (options.initial_flows.size() != path_set.size()) {
    throw InputError("initial flows must have one entry per path");
  }
  auto flows = options.initial_flows;
  const auto ods = network.od_pairs();
  const auto fallback = initial_path_flows(network, path_set);
  for (std::size_t r = 0; r < ods.size(); ++r) {
    double sum = 0.0;
    for (auto p : path_set.paths_of_od(r)) sum += flows[p];
    for (auto p : path_set.paths_of_od(r)) {
      flows[p] = sum > 0.0 ? flows[p] * ods[r].demand / sum : fallback[p];
    }
  }
  return flows;
}

// Caps each Q_ap at the flow of path p still moving when it reaches the link,
// so that f_p >= 0. Lowering a queue only raises later arrivals, so one pass
// along each path suffices.
void trim_queues(const PathSet& path_set, std::span<const double> path_flow,
                 std::vector<double>& q) {
  for (std::size_t p = 0; p < path_set.size(); ++p) {
    double arriving = path_flow[p];
    for (std::size_t i = 0; i < path_set.path(p).links.size(); ++i) {
      auto& qi = q[path_set.queue_index(p, i)];
      qi = std::min(qi, std::max(0.0, arriving));
      arriving -= qi;
    }
  }
}

}  // namespace

namespace {

// Gauss-Seidel gradient projection at frozen queues. Each shift off a costlier
// path is scaled by the path-pair curvature and backtracked on the merit.
double path_step(const Network& network, const PathSet& path_set,
                 std::span<const CostParams> params, const SolverOptions& options,
                 SolutionState& state, int passes) {
  const LinkCostModel model{network, params, path_cost_kind(options)};
  const auto ods = network.od_pairs();
  const auto start = state.path_flow;
  auto& f = state.path_flow;
  auto loads = assemble_link_state(path_set, f, state.path_queue);
  auto& v = loads.flow;
  const auto& queue = loads.queue;

  // Frozen queues bound f~ from below.
  std::vector<double> lower(path_set.size(), 0.0);
  for (std::size_t p = 0; p < path_set.size(); ++p) {
    for (std::size_t i = 0; i < path_set.path(p).links.size(); ++i) {
      lower[p] += state.path_queue[path_set.queue_index(p, i)];
    }
  }

  std::vector<int> mark(network.link_count(), 0);
  std::vector<double> trial(network.link_count(), 0.0);
  std::vector<std::size_t> affected;
  std::vector<double> cost;
  std::vector<double> move;

  auto curvature = [&](std::size_t a) { return model.slope(a, std::max(v[a], 1.0), queue[a]); };

  for (int pass = 0; pass < passes; ++pass) {
    double pass_change = 0.0;
    for (std::size_t r = 0; r < ods.size(); ++r) {
      const auto paths = path_set.paths_of_od(r);
      if (paths.size() < 2 || ods[r].demand <= 0.0) continue;

      cost.assign(paths.size(), 0.0);
      std::size_t best = 0;
      for (std::size_t i = 0; i < paths.size(); ++i) {
        for (auto a : path_set.path(paths[i]).links) cost[i] += model.cost(a, v[a], queue[a]);
        if (cost[i] < cost[best]) best = i;
      }

      move.assign(paths.size(), 0.0);
      bool any = false;
      for (auto a : path_set.path(paths[best]).links) mark[a] |= 1;
      for (std::size_t i = 0; i < paths.size(); ++i) {
        if (i == best || cost[i] <= cost[best]) continue;
        const auto p = paths[i];
        const double room = f[p] - lower[p];
        if (room <= 0.0) continue;
        for (auto a : path_set.path(p).links) mark[a] |= 2;
        double h = 0.0;
        for (auto a : path_set.path(p).links) {
          if (mark[a] == 2) h += curvature(a);
        }
        for (auto a : path_set.path(paths[best]).links) {
          if (mark[a] == 1) h += curvature(a);
        }
        for (auto a : path_set.path(p).links) mark[a] &= 1;
        if (!std::isfinite(h)) continue;
        h = std::max(h, 1e-6);
        move[i] = std::min(room, options.step_scale * (cost[i] - cost[best]) / h);
        any = any || move[i] > 0.0;
      }
      for (auto a : path_set.path(paths[best]).links) mark[a] = 0;
      if (!any) continue;

      affected.clear();
      for (auto p : paths) {
        for (auto a : path_set.path(p).links) {
          if (!mark[a]) {
            mark[a] = 1;
            affected.push_back(a);
          }
        }
      }
      for (auto a : affected) mark[a] = 0;

      double before = 0.0;
      for (auto a : affected) before += model.merit(a, v[a], queue[a]);
      double scale = 1.0;
      bool accepted = false;
      for (int attempt = 0; attempt < 60 && !accepted; ++attempt, scale *= 0.5) {
        for (auto a : affected) trial[a] = v[a];
        double shifted = 0.0;
        for (std::size_t i = 0; i < paths.size(); ++i) {
          if (move[i] <= 0.0) continue;
          for (auto a : path_set.path(paths[i]).links) trial[a] -= scale * move[i];
          shifted += scale * move[i];
        }
        for (auto a : path_set.path(paths[best]).links) trial[a] += shifted;
        double after = 0.0;
        for (auto a : affected) after += model.merit(a, trial[a], queue[a]);
        if (std::isfinite(after) && after <= before + 1e-9) accepted = true;
        if (!accepted) continue;

        double others = 0.0;
        for (std::size_t i = 0; i < paths.size(); ++i) {
          const auto p = paths[i];
          if (i == best) continue;
          if (move[i] > 0.0) {
            f[p] = std::max(lower[p], f[p] - scale * move[i]);
            pass_change = std::max(pass_change, scale * move[i]);
          }
          others += f[p];
        }
        const auto pb = paths[best];
        const double updated = ods[r].demand - others;
        pass_change = std::max(pass_change, std::abs(updated - f[pb]));
        f[pb] = updated;
        for (auto a : affected) v[a] = trial[a];
      }
    }
    if (pass_change <= options.epsilon / 10.0) break;
  }
  refresh_state(network, path_set, params, state);
  return max_abs_diff(start, state.path_flow);
}


// One Gauss-Seidel pass for the fixed-point mode. Link costs are predicted
// under the local queue response to a change in arrivals, so a shift stops
// where the two path costs meet once queues have adjusted; the step is found
// by bisection and needs no curvature. Queues are trimmed to the new flows.
double response_step(const Network& network, const PathSet& path_set,
                     std::span<const CostParams> params, const SolverOptions& options,
                     SolutionState& state) {
  const LinkCostModel model{network, params, path_cost_kind(options)};
  const auto ods = network.od_pairs();
  const auto start = state.path_flow;
  auto& f = state.path_flow;
  std::vector<double> arrivals(network.link_count());
  for (std::size_t a = 0; a < network.link_count(); ++a) {
    arrivals[a] = state.loads.flow[a] + state.loads.queue[a];
  }

  auto predicted = [&](std::size_t a, double shift) {
    const auto& link = network.link(a);
    const auto& p = params[a];
    const double x = std::max(0.0, arrivals[a] + shift);
    double q = 0.0;
    if (x > link.capacity) {
      q = (x - link.capacity) / (1.0 - p.gamma);
      if (p.gamma > 0.0) q = std::min(q, (1.0 - 1e-12) * link.capacity / p.gamma);
    }
    return model.cost(a, x - q, q);
  };

  std::vector<int> mark(network.link_count(), 0);
  std::vector<std::size_t> only_path;
  std::vector<std::size_t> only_best;
  std::vector<double> cost;
  std::vector<double> move;

  for (std::size_t r = 0; r < ods.size(); ++r) {
    const auto paths = path_set.paths_of_od(r);
    if (paths.size() < 2 || ods[r].demand <= 0.0) continue;
    cost.assign(paths.size(), 0.0);
    std::size_t best = 0;
    for (std::size_t i = 0; i < paths.size(); ++i) {
      for (auto a : path_set.path(paths[i]).links) cost[i] += predicted(a, 0.0);
      if (cost[i] < cost[best]) best = i;
    }

    move.assign(paths.size(), 0.0);
    const auto& best_links = path_set.path(paths[best]).links;
    for (auto a : best_links) mark[a] = 1;
    for (std::size_t i = 0; i < paths.size(); ++i) {
      const auto p = paths[i];
      if (i == best || cost[i] <= cost[best] || f[p] <= 0.0) continue;
      only_path.clear();
      only_best.clear();
      for (auto a : path_set.path(p).links) {
        if (mark[a] == 1) {
          mark[a] = 2;
        } else {
          only_path.push_back(a);
        }
      }
      for (auto a : best_links) {
        if (mark[a] == 1) only_best.push_back(a);
        mark[a] = 1;
      }
      auto excess = [&](double x) {
        double g = 0.0;
        for (auto a : only_path) g += predicted(a, -x);
        for (auto a : only_best) g -= predicted(a, x);
        return g;
      };
      double lo = 0.0;
      double hi = f[p];
      if (f[p] > options.epsilon && excess(hi) < 0.0) {
        for (int it = 0; it < 60 && hi - lo > 1e-9 * f[p]; ++it) {
          const double mid = 0.5 * (lo + hi);
          (excess(mid) > 0.0 ? lo : hi) = mid;
        }
      }
      move[i] = f[p] <= options.epsilon ? f[p] : options.step_scale * hi;
    }
    for (auto a : best_links) mark[a] = 0;

    double others = 0.0;
    double shifted = 0.0;
    for (std::size_t i = 0; i < paths.size(); ++i) {
      if (i == best) continue;
      const auto p = paths[i];
      if (move[i] > 0.0) {
        f[p] = std::max(0.0, f[p] - move[i]);
        for (auto a : path_set.path(p).links) arrivals[a] -= move[i];
        shifted += move[i];
      }
      others += f[p];
    }
    f[paths[best]] = ods[r].demand - others;
    for (auto a : best_links) arrivals[a] += shifted;
  }
  trim_queues(path_set, f, state.path_queue);
  refresh_state(network, path_set, params, state);
  return max_abs_diff(start, state.path_flow);
}
}  // namespace

double gp_path_step(const Network& network, const PathSet& path_set,
                    std::span<const CostParams> params, const SolverOptions& options,
                    SolutionState& state) {
  return path_step(network, path_set, params, options, state, options.max_inner_passes);
}

double gp_queue_step(const Network& network, const PathSet& path_set,
                     std::span<const CostParams> params, const SolverOptions& options,
                     SolutionState& state) {
  const auto start = state.path_queue;
  auto& q = state.path_queue;
  const auto n = network.link_count();
  std::vector<double> trial(q.size());
  std::vector<double> direction(q.size());

  for (int pass = 0; pass < options.max_inner_passes; ++pass) {
    const auto gradient = objective_gradient(network, path_set, params, state.path_flow, q).queue;
    const double j0 = objective(network, path_set, params, state.path_flow, q);
    const auto loads = assemble_link_state(path_set, state.path_flow, q);
    const auto completed = completed_path_flows(path_set, state.path_flow, q);

    double step = 1e4;
    bool accepted = false;
    double change = 0.0;
    for (int attempt = 0; attempt < 80 && !accepted; ++attempt, step *= 0.5) {
      for (std::size_t k = 0; k < q.size(); ++k) trial[k] = std::max(0.0, q[k] - step * gradient[k]);
      // Box on the aggregate queue: Q_a <= C_max / gamma.
      for (std::size_t a = 0; a < n; ++a) {
        const double bound = queue_bound(network.link(a), params[a]) * (1.0 - 1e-9);
        if (!std::isfinite(bound)) continue;
        double total = 0.0;
        for (const auto& pos : path_set.through(a)) total += trial[path_set.queue_index(pos.path, pos.position)];
        if (total > bound) {
          for (const auto& pos : path_set.through(a)) {
            trial[path_set.queue_index(pos.path, pos.position)] *= bound / total;
          }
        }
      }
      for (std::size_t k = 0; k < q.size(); ++k) direction[k] = trial[k] - q[k];

      // Largest fraction of the move keeping v_a >= 0 and f_p >= 0.
      double t = 1.0;
      std::vector<double> drop(n, 0.0);
      for (std::size_t p = 0; p < path_set.size(); ++p) {
        double held = 0.0;
        double total = 0.0;
        for (std::size_t i = 0; i < path_set.path(p).links.size(); ++i) {
          const auto a = path_set.path(p).links[i];
          const double d = direction[path_set.queue_index(p, i)];
          held += d;
          drop[a] += held;
          total += d;
        }
        if (total > 0.0) t = std::min(t, std::max(0.0, completed[p]) / total);
      }
      for (std::size_t a = 0; a < n; ++a) {
        if (drop[a] > 0.0) t = std::min(t, std::max(0.0, loads.flow[a]) / drop[a]);
      }
      for (std::size_t k = 0; k < q.size(); ++k) trial[k] = std::max(0.0, q[k] + t * direction[k]);

      double j1 = std::numeric_limits<double>::infinity();
      try {
        j1 = objective(network, path_set, params, state.path_flow, trial);
      } catch (const DomainError&) {
        continue;
      }
      if (j1 <= j0) {
        accepted = true;
        change = max_abs_diff(trial, q);
        q = trial;
      }
    }
    if (!accepted || change <= options.epsilon / 10.0) break;
  }
  refresh_state(network, path_set, params, state);
  return max_abs_diff(start, state.path_queue);
}

std::vector<double> queue_response(const Network& network, const PathSet& path_set,
                                   std::span<const CostParams> params,
                                   std::span<const double> path_flow,
                                   std::span<const double> warm) {
  std::vector<double> q(path_set.incidence_count(), 0.0);
  if (warm.size() == q.size()) {
    q.assign(warm.begin(), warm.end());
    trim_queues(path_set, path_flow, q);
  }
  std::vector<double> arrive;
  double scale = 1.0;
  for (double f : path_flow) scale = std::max(scale, f);

  for (int sweep = 0; sweep < 100; ++sweep) {
    double change = 0.0;
    for (auto a : path_set.topological_links()) {
      const auto through = path_set.through(a);
      if (through.empty()) continue;
      const auto& link = network.link(a);
      const auto& pa = params[a];
      if (pa.gamma >= 1.0) throw InputError("gamma = 1 is not supported");
      arrive.assign(through.size(), 0.0);
      double total = 0.0;
      for (std::size_t k = 0; k < through.size(); ++k) {
        const auto [p, position] = through[k];
        double x = path_flow[p];
        for (std::size_t i = 0; i < position; ++i) x -= q[path_set.queue_index(p, i)];
        arrive[k] = std::max(0.0, x);
        total += arrive[k];
      }
      double qa = 0.0;
      if (total > link.capacity) {
        qa = (total - link.capacity) / (1.0 - pa.gamma);
        if (pa.gamma > 0.0) qa = std::min(qa, (1.0 - 1e-12) * link.capacity / pa.gamma);
      }
      for (std::size_t k = 0; k < through.size(); ++k) {
        const auto idx = path_set.queue_index(through[k].path, through[k].position);
        const double next = total > 0.0 ? qa * arrive[k] / total : 0.0;
        change = std::max(change, std::abs(next - q[idx]));
        q[idx] = next;
      }
    }
    if (change <= 1e-12 * scale) break;
  }
  trim_queues(path_set, path_flow, q);
  return q;
}

double queue_response_step(const Network& network, const PathSet& path_set,
                           std::span<const CostParams> params, SolutionState& state) {
  auto next = queue_response(network, path_set, params, state.path_flow);
  const double change = max_abs_diff(next, state.path_queue);
  state.path_queue = std::move(next);
  refresh_state(network, path_set, params, state);
  return change;
}

SolveResult solve(const Network& network, const PathSet& path_set, const SolverOptions& options) {
  options.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const auto ods = network.od_pairs();
  for (std::size_t r = 0; r < ods.size(); ++r) {
    if (ods[r].demand > 0.0 && path_set.paths_of_od(r).empty()) {
      throw InputError("OD pair with positive demand has no path");
    }
  }
  if (path_set.link_count() != network.link_count() || path_set.od_count() != ods.size()) {
    throw InputError("path set does not match the network");
  }

  SolveResult result;
  result.params = variant_params(network, options.variant);
  const auto& params = result.params;
  auto& state = result.state;
  auto& report = result.report;

  state.path_flow = starting_flows(network, path_set, options);
  state.path_queue.assign(path_set.incidence_count(), 0.0);
  refresh_state(network, path_set, params, state);

  const bool queues = options.variant != Variant::traditional_ue;
  const bool smoothed = options.queue_mode == QueueMode::smoothed_gradient && queues;
  const bool fixed_point = queues && !smoothed;

  double j = objective(network, path_set, params, state.path_flow, state.path_queue);
  SolutionState best = state;
  double best_gap = std::numeric_limits<double>::infinity();
  // Halved when the gap stalls, regrown while it improves; breaks the limit
  // cycles the path and queue updates can fall into on congested networks.
  SolverOptions damped = options;
  int since_best = 0;

  for (int k = 1; k <= options.max_outer_iterations; ++k) {
    IterationRecord rec;
    rec.iteration = k;
    const auto queue_before = state.path_queue;

    rec.delta_flow = fixed_point
                         ? response_step(network, path_set, params, damped, state)
                         : gp_path_step(network, path_set, params, options, state);
    rec.objective_half = objective(network, path_set, params, state.path_flow, state.path_queue);

    if (smoothed) {
      gp_queue_step(network, path_set, params, options, state);
    } else if (queues) {
      state.path_queue =
          queue_response(network, path_set, params, state.path_flow, state.path_queue);
      refresh_state(network, path_set, params, state);
    }
    rec.objective = objective(network, path_set, params, state.path_flow, state.path_queue);
    rec.delta_queue = max_abs_diff(queue_before, state.path_queue);
    rec.gap = relative_gap(network, path_set, params, state, options.variant);

    report.max_objective_increase =
        std::max({report.max_objective_increase, rec.objective_half - j, rec.objective - rec.objective_half});
    j = rec.objective;
    report.history.push_back(rec);
    report.iterations = k;

    if (rec.gap < best_gap) {
      best_gap = rec.gap;
      best = state;
      since_best = 0;
      damped.step_scale = std::min(options.step_scale, damped.step_scale * 1.05);
    } else if (++since_best >= 25 && damped.step_scale > options.step_scale / 64.0) {
      damped.step_scale *= 0.5;
      since_best = 0;
    }
    // Damped moves are short by construction; judge them at full length.
    const double undamped = rec.delta_flow * options.step_scale / damped.step_scale;
    if (std::max(undamped, rec.delta_queue) <= options.epsilon) {
      report.status = SolveStatus::converged;
      break;
    }
  }

  if (report.status != SolveStatus::converged) state = std::move(best);
  if (queues && !smoothed) {
    state.path_queue =
        queue_response(network, path_set, params, state.path_flow, state.path_queue);
    refresh_state(network, path_set, params, state);
  }
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

SolveResult solve_variant(const Network& network, const PathSet& path_set, Variant variant,
                          SolverOptions options) {
  options.variant = variant;
  return solve(network, path_set, options);
}

}  // namespace queuelib
