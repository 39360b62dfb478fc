#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "queuelib/network.hpp"
#include "queuelib/solver.hpp"

namespace queuelib {

// Link is congested iff Q_a > 1e-6 C_max.
bool is_congested(const Link& link, double queue);

// Sum of generalized link costs along each path.
std::vector<double> path_generalized_cost(const Network& network, const PathSet& path_set,
                                          std::span<const CostParams> params,
                                          const SolutionState& state);

enum class CostKind { generalized, marginal };

struct ODReport {
  double min_cost = 0.0;            // w_rs
  double used_cost_deviation = 0.0;  // max c_p - w_rs over used paths
  double demand_residual = 0.0;      // |D_rs - sum f~_p|
};

struct LinkReport {
  double complementarity = 0.0;  // |Q_a (Gamma(v_a) - Q_a)|
  double capacity_excess = 0.0;  // max(0, v_a - C_max)
};

struct EquilibriumReport {
  std::vector<ODReport> od;
  std::vector<LinkReport> link;
  double relative_gap = 0.0;
  double max_used_cost_deviation = 0.0;
  double max_demand_residual = 0.0;
  double max_complementarity = 0.0;
  double max_capacity_excess = 0.0;
};

// Path f~_p > 1e-6 counts as used.
EquilibriumReport kkt_report(const Network& network, const PathSet& path_set,
                             std::span<const CostParams> params, const SolutionState& state,
                             CostKind kind = CostKind::generalized);
EquilibriumReport kkt_report(const Network& network, const PathSet& path_set,
                             const SolveResult& result, Variant variant);

struct ComparisonLink {
  LinkId link = 0;
  double flow = 0.0;
  double capacity = 0.0;
  double queue = 0.0;
  double delay = 0.0;
  double generalized_cost = 0.0;
};

struct ComparisonRow {
  Variant model = Variant::queue_dependent;
  bool converged = false;
  std::vector<ComparisonLink> links;
};

// One solve per variant, reporting the selected links.
std::vector<ComparisonRow> compare_models(const Network& network, const PathSet& path_set,
                                          std::span<const LinkId> links,
                                          std::span<const Variant> variants,
                                          const SolverOptions& options = {});
std::vector<ComparisonRow> compare_models(const Network& network, const PathSet& path_set,
                                          std::span<const LinkId> links,
                                          const SolverOptions& options = {});

struct UniquenessReport {
  int runs = 0;
  double max_flow_deviation = 0.0;   // max_a max_runs |v_a - v_a(run 0)|
  double max_queue_deviation = 0.0;  // same for Q_a
  double max_path_deviation = 0.0;   // same for f~_p, informative only
  bool congested_sets_match = true;
  bool all_converged = true;
};

// Draws `runs` feasible starting points (Dirichlet per OD pair, seeded) and
// compares the resulting link flows and queues.
UniquenessReport uniqueness_probe(const Network& network, const PathSet& path_set,
                                  const SolverOptions& options, int runs, std::uint64_t seed);

// Interior point for derivative checks: every OD demand split over its paths
// with shares drawn from [0.5, 1.5], and each Q_ap a fraction in [0.05, 0.3]
// of the flow still moving on path p, scaled so Q_a <= C_max / (2 gamma).
struct FeasiblePoint {
  std::vector<double> path_flow;
  std::vector<double> path_queue;
};

FeasiblePoint random_feasible_point(const Network& network, const PathSet& path_set,
                                    std::span<const CostParams> params, std::uint64_t seed);

struct GradientCheck {
  double max_relative_error = 0.0;
  std::size_t coordinates = 0;
  std::string worst;  // coordinate with the largest error, e.g. "f~[3]" or "Q[2,1]"
};

// Analytic objective gradient against Richardson-extrapolated central
// differences. Error is |g - d| / max(|g|, |d|, 1e-6); OD pairs with zero
// demand are skipped.
GradientCheck gradient_check(const Network& network, const PathSet& path_set,
                             std::span<const CostParams> params, const FeasiblePoint& point);

// Dirichlet(1, ..., 1) split of each OD demand over its paths.
std::vector<double> random_path_flows(const Network& network, const PathSet& path_set,
                                      std::uint64_t seed);

}  // namespace queuelib
