#include <gtest/gtest.h>

#include <sstream>

#include "oracles/oracles.hpp"
#include "queuelib/analysis.hpp"
#include "queuelib/cost.hpp"
#include "queuelib/error.hpp"
#include "queuelib/objective.hpp"
#include "queuelib/solver.hpp"
#include "support/fixtures.hpp"

using namespace queuelib;

namespace {

Network parallel_links(double demand, double t1, double c1, double t2, double c2) {
  std::istringstream nodes("node_id\n1\n2\n");
  std::ostringstream links;
  links << "link_id,from_node,to_node,capacity,free_flow_time\n"
        << "1,1,2," << c1 << ',' << t1 << "\n2,1,2," << c2 << ',' << t2 << '\n';
  std::istringstream l(links.str());
  return load_network(nodes, l).with_od_pairs({{1, 2, demand}});
}

oracle::PathNetwork detach(const Network& net, const PathSet& ps) {
  oracle::PathNetwork out;
  for (const auto& l : net.links()) out.links.push_back({l.free_flow_time, l.capacity});
  for (const auto& p : ps.paths()) {
    out.paths.emplace_back(p.links.begin(), p.links.end());
    out.path_od.push_back(static_cast<int>(p.od));
  }
  for (const auto& od : net.od_pairs()) out.demand.push_back(od.demand);
  return out;
}

// Published fixture state: f~ = (1775, 1225, 1775, 1225), 50 veh/hr queued
// on link 4 by each path through it.
SolutionState published_state(const Network& net, const PathSet& ps) {
  SolutionState s;
  s.path_flow = {1775, 1225, 1775, 1225};
  s.path_queue.assign(ps.incidence_count(), 0.0);
  s.path_queue[ps.queue_index(1, 1)] = 50;
  s.path_queue[ps.queue_index(3, 1)] = 50;
  refresh_state(net, ps, link_params(net), s);
  return s;
}

double link_value(const Network& net, const std::vector<double>& v, LinkId id) {
  return v[net.require_link(id)];
}

}  // namespace

TEST(AssembleLinkState, PublishedFixtureState) {
  const auto net = fixtures::six_node();
  const auto ps = fixtures::six_node_paths(net);
  const auto s = published_state(net, ps);
  EXPECT_DOUBLE_EQ(link_value(net, s.loads.total, 4), 2450);
  EXPECT_DOUBLE_EQ(link_value(net, s.loads.flow, 4), 2350);
  EXPECT_DOUBLE_EQ(link_value(net, s.loads.flow, 3), 1225);
  EXPECT_DOUBLE_EQ(link_value(net, s.loads.flow, 6), 1175);
  EXPECT_DOUBLE_EQ(link_value(net, s.loads.upstream, 6), 50);
}

TEST(AssembleLinkState, NoQueuesMeansFlowEqualsTotal) {
  const auto net = fixtures::six_node();
  const auto ps = fixtures::six_node_paths(net);
  const std::vector<double> f{1000, 2000, 1500, 1500};
  const auto loads = assemble_link_state(ps, f, std::vector<double>(ps.incidence_count(), 0.0));
  EXPECT_EQ(loads.flow, loads.total);
}

TEST(AssembleLinkState, FirstLinkQueueReachesEveryLaterLink) {
  const auto net = fixtures::six_node();
  const auto ps = fixtures::six_node_paths(net);
  const std::vector<double> f{0, 1000, 0, 0};
  std::vector<double> q(ps.incidence_count(), 0.0);
  q[ps.queue_index(1, 0)] = 30;
  const auto loads = assemble_link_state(ps, f, q);
  EXPECT_DOUBLE_EQ(link_value(net, loads.upstream, 4), 30);
  EXPECT_DOUBLE_EQ(link_value(net, loads.upstream, 6), 30);
  EXPECT_DOUBLE_EQ(link_value(net, loads.flow, 6), 970);
}

TEST(AssembleLinkState, NegativeFlowIsInfeasible) {
  const auto net = fixtures::six_node();
  const auto ps = fixtures::six_node_paths(net);
  std::vector<double> q(ps.incidence_count(), 0.0);
  q[ps.queue_index(0, 0)] = 10;
  EXPECT_THROW(assemble_link_state(ps, std::vector<double>{5, 0, 0, 0}, q), DomainError);
}

TEST(GpPathStep, SinglePathOdIsUnchanged) {
  const auto net = parallel_links(500, 0.1, 1000, 0.2, 1000);
  const PathSet ps(net, {Path{0, {0}}});
  SolutionState s;
  s.path_flow = {500};
  s.path_queue = {0};
  refresh_state(net, ps, link_params(net), s);
  gp_path_step(net, ps, link_params(net), SolverOptions{}, s);
  EXPECT_DOUBLE_EQ(s.path_flow[0], 500);
}

TEST(GpPathStep, SymmetricRoutesSplitEvenly) {
  const auto net = parallel_links(800, 0.1, 1000, 0.1, 1000);
  const auto ps = enumerate_paths(net, 2);
  SolutionState s;
  s.path_flow = {800, 0};
  s.path_queue.assign(ps.incidence_count(), 0.0);
  refresh_state(net, ps, link_params(net), s);
  for (int i = 0; i < 50; ++i) gp_path_step(net, ps, link_params(net), SolverOptions{}, s);
  EXPECT_NEAR(s.path_flow[0], 400, 1e-3);
  EXPECT_NEAR(s.path_flow[1], 400, 1e-3);
}

TEST(GpPathStep, FrozenPublishedQueuesMinimizeObjectiveOverSplits) {
  const auto net = fixtures::six_node();
  const auto ps = fixtures::six_node_paths(net);
  const auto params = link_params(net);
  auto s = published_state(net, ps);
  s.path_flow = {2000, 1000, 2000, 1000};
  refresh_state(net, ps, params, s);
  SolverOptions o;
  o.queue_mode = QueueMode::smoothed_gradient;
  for (int i = 0; i < 200; ++i) {
    const double before = objective(net, ps, params, s.path_flow, s.path_queue);
    gp_path_step(net, ps, params, o, s);
    EXPECT_LE(objective(net, ps, params, s.path_flow, s.path_queue), before + 1e-9);
  }
  double best = 1e300;
  double best_x = 0;
  for (double x = 1600; x <= 1900; x += 0.05) {
    const double j =
        objective(net, ps, params, std::vector<double>{x, 3000 - x, x, 3000 - x}, s.path_queue);
    if (j < best) {
      best = j;
      best_x = x;
    }
  }
  EXPECT_NEAR(s.path_flow[0], best_x, 5);
  EXPECT_NEAR(s.path_flow[2], best_x, 5);
}

TEST(GpQueueStep, UncongestedQueuesStayZero) {
  const auto net = parallel_links(800, 0.1, 1000, 0.1, 1000);
  const auto ps = enumerate_paths(net, 2);
  SolutionState s;
  s.path_flow = {400, 400};
  s.path_queue.assign(ps.incidence_count(), 0.0);
  refresh_state(net, ps, link_params(net), s);
  SolverOptions o;
  o.queue_mode = QueueMode::smoothed_gradient;
  gp_queue_step(net, ps, link_params(net), o, s);
  for (double q : s.path_queue) EXPECT_EQ(q, 0.0);
}

TEST(GpQueueStep, ObjectiveNeverIncreasesAndQueuesStayInRange) {
  const auto net = fixtures::six_node();
  const auto ps = fixtures::six_node_paths(net);
  const auto params = link_params(net);
  auto s = published_state(net, ps);
  SolverOptions o;
  o.queue_mode = QueueMode::smoothed_gradient;
  for (int i = 0; i < 50; ++i) {
    const double before = objective(net, ps, params, s.path_flow, s.path_queue);
    gp_queue_step(net, ps, params, o, s);
    EXPECT_LE(objective(net, ps, params, s.path_flow, s.path_queue), before + 1e-9);
    for (std::size_t a = 0; a < net.link_count(); ++a) {
      EXPECT_LE(s.loads.queue[a], queue_bound(net.link(a), params[a]));
      EXPECT_GE(s.loads.flow[a], -1e-9);
    }
  }
}

TEST(QueueResponse, BottleneckLinkFourExample) {
  const auto net = fixtures::six_node();
  const auto ps = fixtures::six_node_paths(net);
  const auto params = link_params(net);
  SolutionState s;
  s.path_flow = {1775, 1225, 1775, 1225};
  s.path_queue.assign(ps.incidence_count(), 0.0);
  refresh_state(net, ps, params, s);
  queue_response_step(net, ps, params, s);
  EXPECT_NEAR(link_value(net, s.loads.queue, 4), 100, 1e-9);
  EXPECT_NEAR(link_value(net, s.loads.flow, 4), 2350, 1e-9);
  EXPECT_NEAR(s.path_queue[ps.queue_index(1, 1)], 50, 1e-9);
  EXPECT_NEAR(s.path_queue[ps.queue_index(3, 1)], 50, 1e-9);
  EXPECT_NEAR(link_value(net, s.loads.queue, 6), 0, 1e-12);
}

TEST(QueueResponse, UncongestedGivesZero) {
  const auto net = fixtures::six_node();
  const auto ps = fixtures::six_node_paths(net);
  const auto q = queue_response(net, ps, link_params(net), std::vector<double>{1500, 1000, 1500, 1000});
  for (double x : q) EXPECT_EQ(x, 0.0);
}

TEST(QueueResponse, FixedCapacityLimit) {
  const auto net = fixtures::six_node(CostParams{.gamma = 0.0});
  const auto ps = fixtures::six_node_paths(net);
  SolutionState s;
  s.path_flow = {1775, 1225, 1775, 1225};
  s.path_queue.assign(ps.incidence_count(), 0.0);
  refresh_state(net, ps, link_params(net), s);
  queue_response_step(net, ps, link_params(net), s);
  EXPECT_NEAR(link_value(net, s.loads.queue, 4), 50, 1e-9);
  EXPECT_NEAR(link_value(net, s.loads.flow, 4), 2400, 1e-9);
}

TEST(Solve, SixNodeFixtureReproducesPublishedBottleneck) {
  const auto net = fixtures::six_node();
  const auto ps = fixtures::six_node_paths(net);
  const auto r = solve(net, ps);
  ASSERT_EQ(r.report.status, SolveStatus::converged);
  const auto& s = r.state;
  EXPECT_NEAR(link_value(net, s.loads.flow, 4), 2350, 5);
  EXPECT_NEAR(link_value(net, s.loads.queue, 4), 100, 2);
  EXPECT_NEAR(link_value(net, s.delay, 4), 0.021, 0.002);
  for (LinkId id : {3, 5}) {
    EXPECT_NEAR(link_value(net, s.loads.flow, id), 1225, 10);
    EXPECT_NEAR(link_value(net, s.link_cost, id), 0.185, 0.002);
  }
  for (LinkId id : {6, 7}) EXPECT_NEAR(link_value(net, s.loads.flow, id), 1175, 10);
}

TEST(Solve, ZeroDemand) {
  const auto net = fixtures::six_node().with_demands(std::vector<double>{0, 0});
  const auto ps = fixtures::six_node_paths(net);
  const auto r = solve(net, ps);
  EXPECT_EQ(r.report.status, SolveStatus::converged);
  EXPECT_EQ(r.report.iterations, 1);
  for (double v : r.state.loads.flow) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(objective(net, ps, r.state.path_flow, r.state.path_queue), 0.0);
}

TEST(Solve, SymmetricRoutesUnderCapacityMatchTraditionalEquilibrium) {
  const auto net = parallel_links(1200, 0.1, 1000, 0.1, 1000);
  const auto ps = enumerate_paths(net, 2);
  const auto r = solve(net, ps);
  const auto ue = solve_variant(net, ps, Variant::traditional_ue);
  ASSERT_EQ(r.report.status, SolveStatus::converged);
  EXPECT_NEAR(r.state.path_flow[0], 600, 1e-3);
  for (double q : r.state.path_queue) EXPECT_EQ(q, 0.0);
  for (std::size_t a = 0; a < 2; ++a) {
    EXPECT_NEAR(r.state.loads.flow[a], ue.state.loads.flow[a], 1e-3);
  }
}

TEST(Solve, AsymmetricRoutesUnderCapacityMatchFrankWolfe) {
  const auto net = parallel_links(1300, 0.1, 1000, 0.12, 900);
  const auto ps = enumerate_paths(net, 2);
  const auto r = solve(net, ps);
  const auto fw = oracle::frank_wolfe_ue(detach(net, ps), 0.5, 4.0);
  ASSERT_LT(fw[0], 1000);
  ASSERT_LT(fw[1], 900);
  for (std::size_t a = 0; a < 2; ++a) EXPECT_NEAR(r.state.loads.flow[a], fw[a], 0.05);
}

TEST(Solve, OptionsAreValidated) {
  const auto net = fixtures::six_node();
  const auto ps = fixtures::six_node_paths(net);
  SolverOptions o;
  o.epsilon = 0;
  EXPECT_THROW(solve(net, ps, o), InputError);
  o = {};
  o.max_outer_iterations = 0;
  EXPECT_THROW(solve(net, ps, o), InputError);
}

TEST(Solve, IterationLimitIsFlagged) {
  const auto net = fixtures::six_node();
  const auto ps = fixtures::six_node_paths(net);
  SolverOptions o;
  o.max_outer_iterations = 1;
  const auto r = solve(net, ps, o);
  EXPECT_EQ(r.report.status, SolveStatus::iteration_limit);
  EXPECT_EQ(r.report.iterations, 1);
}

TEST(SolveVariant, TraditionalEquilibriumOvershootsAndMatchesFrankWolfe) {
  const auto net = fixtures::six_node();
  const auto ps = fixtures::six_node_paths(net);
  const auto r = solve_variant(net, ps, Variant::traditional_ue);
  ASSERT_EQ(r.report.status, SolveStatus::converged);
  EXPECT_GT(link_value(net, r.state.loads.flow, 4), 2400);
  for (double q : r.state.path_queue) EXPECT_EQ(q, 0.0);
  const auto fw = oracle::frank_wolfe_ue(detach(net, ps), 0.5, 4.0);
  for (std::size_t a = 0; a < net.link_count(); ++a) {
    EXPECT_NEAR(r.state.loads.flow[a], fw[a], 0.5) << "link " << net.link(a).id;
  }
}

TEST(SolveVariant, SystemOptimumWithoutRouteChoiceEqualsEquilibrium) {
  const auto net = parallel_links(700, 0.1, 1000, 0.1, 1000);
  const PathSet ps(net, {Path{0, {0}}});
  const auto so = solve_variant(net, ps, Variant::system_optimum);
  const auto ue = solve(net, ps);
  EXPECT_EQ(so.state.loads.flow, ue.state.loads.flow);
}

TEST(SolveVariant, FixedCapacityHoldsBottleneckAtCapacity) {
  const auto net = fixtures::six_node();
  const auto ps = fixtures::six_node_paths(net);
  const auto r = solve_variant(net, ps, Variant::fixed_capacity_queue);
  ASSERT_EQ(r.report.status, SolveStatus::converged);
  EXPECT_NEAR(link_value(net, r.state.loads.flow, 4), 2400, 5);
  EXPECT_GT(link_value(net, r.state.loads.queue, 4), 0);
  for (const auto& p : r.params) {
    EXPECT_EQ(p.phi, 1.0);
    EXPECT_EQ(p.gamma, 0.0);
  }
}

TEST(SolverProperties, SmoothedModeDescendsAtEveryHalfStep) {
  const auto net = fixtures::six_node();
  const auto ps = fixtures::six_node_paths(net);
  SolverOptions o;
  o.queue_mode = QueueMode::smoothed_gradient;
  const auto r = solve(net, ps, o);
  const auto& h = r.report.history;
  ASSERT_FALSE(h.empty());
  for (std::size_t k = 0; k < h.size(); ++k) {
    if (k > 0) EXPECT_LE(h[k].objective_half, h[k - 1].objective + 1e-9);
    EXPECT_LE(h[k].objective, h[k].objective_half + 1e-9);
  }
  EXPECT_LE(r.report.max_objective_increase, 1e-9);
}

TEST(SolverProperties, SmoothedQueueGradientIsNonNegativeAtZeroQueueEquilibrium) {
  // Why the smoothed mode keeps Q = 0 on the fixture: at the traditional
  // equilibrium no queue variable has a descent direction.
  const auto net = fixtures::six_node();
  const auto ps = fixtures::six_node_paths(net);
  const auto ue = solve_variant(net, ps, Variant::traditional_ue);
  const auto g = objective_gradient(net, ps, ue.state.path_flow, ue.state.path_queue);
  for (double d : g.queue) EXPECT_GE(d, 0.0);
}

TEST(SolverProperties, DemandIsConservedExactly) {
  const auto net = fixtures::six_node();
  const auto ps = fixtures::six_node_paths(net);
  for (auto mode : {QueueMode::fixed_point, QueueMode::smoothed_gradient}) {
    SolverOptions o;
    o.queue_mode = mode;
    const auto r = solve(net, ps, o);
    for (std::size_t od = 0; od < ps.od_count(); ++od) {
      double sum = 0;
      for (auto p : ps.paths_of_od(od)) {
        EXPECT_GE(r.state.path_flow[p], 0.0);
        EXPECT_GE(r.state.completed_flow[p], -1e-9);
        sum += r.state.path_flow[p];
      }
      EXPECT_NEAR(sum, net.od_pairs()[od].demand, 1e-9);
    }
  }
}

TEST(SolverProperties, FixedPointModeRespectsPhysicalCapacity) {
  const auto net = fixtures::six_node();
  const auto ps = fixtures::six_node_paths(net);
  for (double demand : {2000.0, 3000.0, 4000.0, 5000.0}) {
    const auto r = solve(net.with_demands(std::vector<double>{demand, demand}), ps);
    ASSERT_EQ(r.report.status, SolveStatus::converged) << demand;
    for (std::size_t a = 0; a < net.link_count(); ++a) {
      EXPECT_LE(r.state.loads.flow[a], net.link(a).capacity + 1e-6);
    }
  }
}

TEST(SolverProperties, Deterministic) {
  const auto net = fixtures::six_node();
  const auto ps = fixtures::six_node_paths(net);
  const auto a = solve(net, ps);
  const auto b = solve(net, ps);
  EXPECT_EQ(a.state.path_flow, b.state.path_flow);
  EXPECT_EQ(a.state.path_queue, b.state.path_queue);
  ASSERT_EQ(a.report.history.size(), b.report.history.size());
  for (std::size_t k = 0; k < a.report.history.size(); ++k) {
    EXPECT_EQ(a.report.history[k].objective, b.report.history[k].objective);
    EXPECT_EQ(a.report.history[k].gap, b.report.history[k].gap);
  }
}

TEST(SolverProperties, InitialFlowsAreAllOrNothingOnFreeFlowPaths) {
  const auto net = fixtures::six_node();
  const auto ps = fixtures::six_node_paths(net);
  EXPECT_EQ(initial_path_flows(net, ps), (std::vector<double>{3000, 0, 3000, 0}));
}
