#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "queuelib/network.hpp"
#include "queuelib/params.hpp"
#include "queuelib/state.hpp"

namespace queuelib {

enum class QueueMode {
  // Q_a set from the arriving flow so that Q_a = Gamma(v_a) holds on every
  // congested link; path shifts anticipate that response.
  fixed_point,
  // Projected gradient on Q_ap against the smoothed objective.
  smoothed_gradient,
};

enum class Variant {
  queue_dependent,       // defaults
  traditional_ue,        // Q frozen at zero
  fixed_capacity_queue,  // phi = 1, gamma = 0
  system_optimum,        // marginal costs
};

std::string_view to_string(QueueMode mode);
std::string_view to_string(Variant variant);
std::optional<QueueMode> parse_queue_mode(std::string_view text);
std::optional<Variant> parse_variant(std::string_view text);

struct SolverOptions {
  QueueMode queue_mode = QueueMode::fixed_point;
  Variant variant = Variant::queue_dependent;
  double epsilon = 1e-3;  // veh/hr
  int max_outer_iterations = 2000;
  int max_inner_passes = 50;
  double step_scale = 1.0;  // damping s of the path step
  // Starting f~ per path. Empty means all-or-nothing on the cheapest
  // free-flow path of each OD pair.
  std::vector<double> initial_flows;

  // Throws InputError on an out-of-range field.
  void validate() const;
};

// Decision variables plus everything derived from them.
struct SolutionState {
  std::vector<double> path_flow;   // f~_p
  std::vector<double> path_queue;  // Q_ap, indexed by PathSet::queue_index
  LinkLoads loads;
  std::vector<double> capacity;      // C(Q_a)
  std::vector<double> running_time;  // t_f (1 + beta (v / C)^n)
  std::vector<double> delay;         // alpha (Q / C)^m
  std::vector<double> link_cost;     // generalized cost, running time + delay
  std::vector<double> completed_flow;  // f_p
  std::vector<double> path_cost;       // sum of link_cost along the path
};

struct IterationRecord {
  int iteration = 0;
  double objective_half = 0.0;  // J after the path step
  double objective = 0.0;       // J after the queue step
  double delta_flow = 0.0;      // max |f~^{k+1} - f~^k|
  double delta_queue = 0.0;     // max |Q^{k+1} - Q^k|
  double gap = 0.0;             // relative gap after the iteration
};

enum class SolveStatus { converged, iteration_limit };

struct ConvergenceReport {
  std::vector<IterationRecord> history;
  SolveStatus status = SolveStatus::iteration_limit;
  int iterations = 0;
  double wall_seconds = 0.0;
  // Largest increase of J across a half-step, zero when J never increased.
  double max_objective_increase = 0.0;
};

struct SolveResult {
  SolutionState state;
  ConvergenceReport report;
  std::vector<CostParams> params;  // effective per-link parameters used
};

// Effective per-link parameters for a variant.
std::vector<CostParams> variant_params(const Network& network, Variant variant);

// Fills every derived field of `state` from its decision variables.
void refresh_state(const Network& network, const PathSet& path_set,
                   std::span<const CostParams> params, SolutionState& state);

// All-or-nothing assignment on the cheapest free-flow path per OD pair.
std::vector<double> initial_path_flows(const Network& network, const PathSet& path_set);

// One path step with queues frozen: Gauss-Seidel over OD pairs, moving flow
// toward the cheapest path with curvature-scaled, backtracked steps. Keeps
// f~_p >= sum_{a in p} Q_ap and never increases the merit function.
// Returns the largest change of any f~_p.
double gp_path_step(const Network& network, const PathSet& path_set,
                    std::span<const CostParams> params, const SolverOptions& options,
                    SolutionState& state);

// One projected-gradient queue step on J with f~ frozen. Returns the largest
// change of any Q_ap.
double gp_queue_step(const Network& network, const PathSet& path_set,
                     std::span<const CostParams> params, const SolverOptions& options,
                     SolutionState& state);

// Queues Q*_ap implied by f~: for each link in upstream-first order,
// Q_a = max(0, (x_a - Q'_a - C_max) / (1 - gamma)), split over paths in
// proportion to the flow each one delivers to the link. Sweeps start from
// `warm` when given; on networks whose paths cross links in opposite orders
// this picks the fixed point nearest the previous queues.
std::vector<double> queue_response(const Network& network, const PathSet& path_set,
                                   std::span<const CostParams> params,
                                   std::span<const double> path_flow,
                                   std::span<const double> warm = {});

// Replaces Q_ap by queue_response. Returns the largest change.
double queue_response_step(const Network& network, const PathSet& path_set,
                           std::span<const CostParams> params, SolutionState& state);

SolveResult solve(const Network& network, const PathSet& path_set,
                  const SolverOptions& options = {});

// Same as solve; the variant is taken from `variant` instead of options.
SolveResult solve_variant(const Network& network, const PathSet& path_set, Variant variant,
                          SolverOptions options = {});

}  // namespace queuelib
