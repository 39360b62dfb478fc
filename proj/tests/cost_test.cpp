#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "oracles/oracles.hpp"
#include "queuelib/analysis.hpp"
#include "queuelib/cost.hpp"
#include "queuelib/error.hpp"
#include "queuelib/objective.hpp"
#include "support/fixtures.hpp"

using namespace queuelib;

namespace {

Link make_link(double t_f, double c_max, LinkId id = 1) {
  Link l;
  l.id = id;
  l.tail = 1;
  l.head = 2;
  l.free_flow_time = t_f;
  l.capacity = c_max;
  return l;
}

const Link kLink1 = make_link(0.417, 1800, 1);
const Link kLink4 = make_link(0.167, 2400, 4);
const Link kToy3 = make_link(0.15, 600, 3);
const CostParams kDefaults{};

// Generalized link cost written out from its definition.
double reference_cost(const Link& l, const CostParams& p, double v, double Q) {
  const double c = Q > 0.0 ? l.capacity - p.gamma * Q : l.capacity;
  return l.free_flow_time * (1.0 + p.beta * std::pow(v / c, p.n)) + p.alpha * std::pow(Q / c, p.m);
}

}  // namespace

TEST(CostParams, DefaultsAndRanges) {
  EXPECT_DOUBLE_EQ(kDefaults.alpha, 0.5);
  EXPECT_DOUBLE_EQ(kDefaults.beta, 0.5);
  EXPECT_DOUBLE_EQ(kDefaults.m, 1.0);
  EXPECT_DOUBLE_EQ(kDefaults.n, 4.0);
  EXPECT_DOUBLE_EQ(kDefaults.gamma, 0.5);
  EXPECT_DOUBLE_EQ(kDefaults.phi, std::exp(1.0));
  EXPECT_NO_THROW(kDefaults.validate());
  for (auto bad : {CostParams{.alpha = -1}, CostParams{.beta = -0.1}, CostParams{.m = 0},
                   CostParams{.n = 0}, CostParams{.gamma = 1.0}, CostParams{.gamma = -0.1},
                   CostParams{.phi = 0.5}}) {
    EXPECT_THROW(bad.validate(), InputError);
  }
}

TEST(CostParams, BetaIsTheRootOfTheLinkOneIdentity) {
  const double beta = oracle::bisect(
      [](double b) { return oracle::bpr(0.417, b, 4.0, 1775.0, 1800.0) - 0.614; }, 0.0, 2.0);
  EXPECT_NEAR(beta, kDefaults.beta, 0.01);
}

TEST(GammaOfFlow, Examples) {
  EXPECT_NEAR(gamma_of_flow(kLink4, kDefaults, 2350), 100.0, 1e-9);
  EXPECT_NEAR(gamma_of_flow(kToy3, kDefaults, 573), 54.0, 1e-9);
  EXPECT_DOUBLE_EQ(gamma_of_flow(kLink4, kDefaults, 2400), 0.0);
}

TEST(GammaOfFlow, Errors) {
  EXPECT_THROW(gamma_of_flow(kLink4, CostParams{.gamma = 0.0}, 100), DomainError);
  EXPECT_THROW(gamma_of_flow(kLink4, kDefaults, 2401), DomainError);
}

TEST(GammaInverse, Examples) {
  EXPECT_DOUBLE_EQ(gamma_inverse(kLink4, kDefaults, 100), 2350.0);
  EXPECT_DOUBLE_EQ(gamma_inverse(kLink4, kDefaults, 0), 2400.0);
  EXPECT_DOUBLE_EQ(gamma_inverse(kToy3, kDefaults, 54), 573.0);
  EXPECT_THROW(gamma_inverse(kLink4, kDefaults, 4801), DomainError);
  EXPECT_THROW(gamma_inverse(kLink4, kDefaults, -1), DomainError);
}

TEST(Capacity, Examples) {
  EXPECT_DOUBLE_EQ(capacity(kLink4, kDefaults, 100), 2350.0);
  EXPECT_DOUBLE_EQ(capacity(kLink1, kDefaults, 0), 1800.0);
  EXPECT_DOUBLE_EQ(capacity(kToy3, kDefaults, 54), 573.0);
  EXPECT_DOUBLE_EQ(capacity(kLink4, CostParams{.gamma = 0.0}, 500), 2400.0);
}

TEST(LinkTravelTime, Examples) {
  EXPECT_NEAR(link_travel_time(kLink4, kDefaults, 2350, 100), 0.272, 0.001);
  EXPECT_NEAR(running_time(kLink4, kDefaults, 2350, 100), 0.2505, 1e-4);
  EXPECT_NEAR(link_travel_time(kLink1, kDefaults, 1775, 0), 0.614, 0.001);
  EXPECT_DOUBLE_EQ(link_travel_time(kLink1, kDefaults, 0, 0), 0.417);
}

TEST(LinkTravelTime, CapacityFullyConsumedIsAnError) {
  try {
    link_travel_time(kLink4, kDefaults, 0, 4800);
    FAIL() << "expected DomainError";
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("capacity fully consumed by queue"), std::string::npos);
  }
}

TEST(LinkTravelTime, AgreesWithDefinitionAtRandomPoints) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const CostParams p{.alpha = u(rng), .beta = u(rng), .m = 0.5 + 3 * u(rng),
                       .n = 0.5 + 6 * u(rng), .gamma = 0.9 * u(rng)};
    const double q = u(rng) < 0.3 ? 0.0 : 0.9 * kLink4.capacity / std::max(p.gamma, 1.0) * u(rng);
    const double v = 3000 * u(rng);
    EXPECT_NEAR(link_travel_time(kLink4, p, v, q), reference_cost(kLink4, p, v, q),
                1e-12 * reference_cost(kLink4, p, v, q));
  }
}

TEST(QueuingDelay, Examples) {
  EXPECT_NEAR(queuing_delay(kToy3, kDefaults, 54), 0.047, 0.001);
  EXPECT_DOUBLE_EQ(queuing_delay(kLink4, kDefaults, 0), 0.0);
  EXPECT_NEAR(queuing_delay(kLink4, kDefaults, 100), 0.021, 0.001);
}

TEST(SmoothedLinkTime, Examples) {
  EXPECT_NEAR(smoothed_link_time(kLink1, kDefaults, 1775, 0), 0.614, 0.001);
  EXPECT_NEAR(smoothed_link_time(kLink4, kDefaults, 2350, 100), 0.2505, 1e-4);
  EXPECT_DOUBLE_EQ(smoothed_link_time(kLink1, kDefaults, 0, 0), 0.417);
}

TEST(SmoothedLinkTime, ExponentUnderflowsToZero) {
  EXPECT_EQ(smoothed_exponent(kDefaults, 1000.0), 0.0);
  EXPECT_DOUBLE_EQ(smoothed_link_time(kLink4, kDefaults, 1234, 1000),
                   kLink4.free_flow_time * (1.0 + kDefaults.beta));
}

TEST(QueueDelayMarginal, Examples) {
  EXPECT_NEAR(queue_delay_marginal(kLink4, kDefaults, 100), 0.2718, 0.001);
  EXPECT_DOUBLE_EQ(queue_delay_marginal(kLink4, kDefaults, 0), 0.167 * 1.5);
  const double pole = kLink4.capacity / kDefaults.gamma;
  EXPECT_GT(queue_delay_marginal(kLink4, kDefaults, pole * (1 - 1e-9)), 1e8);
  EXPECT_THROW(queue_delay_marginal(kLink4, kDefaults, pole), DomainError);
}

TEST(Objective, ZeroStateIsZero) {
  const auto net = fixtures::six_node();
  const auto ps = fixtures::six_node_paths(net);
  const std::vector<double> f(ps.size(), 0.0);
  const std::vector<double> q(ps.incidence_count(), 0.0);
  EXPECT_DOUBLE_EQ(objective(net, ps, f, q), 0.0);
}

TEST(Objective, SingleLinkAtCapacity) {
  const double j = flow_integral(kLink4, kDefaults, 2400, 0) + queue_integral(kLink4, kDefaults, 0);
  EXPECT_NEAR(j, 0.167 * 2400 * (1 + 0.5 / 5.0), 1e-9);
}

TEST(Objective, QuadratureMatchesClosedFormAtUnitExponent) {
  for (double q : {1.0, 54.0, 100.0, 1000.0, 4000.0}) {
    const double closed = delay_integral(kLink4, kDefaults, q, IntegralMethod::closed_form);
    const double quad = delay_integral(kLink4, kDefaults, q, IntegralMethod::quadrature);
    EXPECT_NEAR(quad, closed, 1e-8 * closed) << "Q = " << q;
  }
}

TEST(Objective, DelayIntegralMatchesSimpsonForGeneralExponent) {
  for (double m : {0.5, 2.0, 3.5}) {
    const CostParams p{.m = m};
    const double q = 800.0;
    const double ref = p.alpha * oracle::simpson(
                                     [&](double u) {
                                       const double y = q * u * u;
                                       return std::pow(y / (2400 - 0.5 * y), m) * 2 * q * u;
                                     },
                                     0.0, 1.0, 20000);
    EXPECT_NEAR(delay_integral(kLink4, p, q), ref, 1e-8 * ref) << "m = " << m;
  }
}

TEST(Objective, GammaZeroDelayIntegral) {
  const CostParams p{.gamma = 0.0};
  EXPECT_NEAR(delay_integral(kLink4, p, 300), 0.5 * 300 * 300 / (2 * 2400.0), 1e-12);
}

TEST(MarginalLinkTime, Examples) {
  EXPECT_DOUBLE_EQ(marginal_link_time(kLink4, kDefaults, 0, 0), 0.167);
  const CostParams flat{.beta = 0.0};
  EXPECT_DOUBLE_EQ(marginal_link_time(kLink4, flat, 1000, 50), link_travel_time(kLink4, flat, 1000, 50));
}

TEST(MarginalLinkTime, MatchesFiniteDifferenceOfTotalCost) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const double q = u(rng) < 0.5 ? 0.0 : 2000 * u(rng);
    const double v = 100 + 2500 * u(rng);
    auto total = [&](double x) { return (x + q) * reference_cost(kLink4, kDefaults, x, q); };
    const double h = 1e-4 * std::max(1.0, v);
    const double fd = oracle::central_difference(total, v, h);
    const double an = marginal_link_time(kLink4, kDefaults, v, q);
    EXPECT_NEAR(an, fd, 1e-5 * std::abs(fd));
  }
}

TEST(CostProperties, CongestedBranchIsFlatInFlow) {
  for (double q : {10.0, 100.0, 1000.0}) {
    const double v = gamma_inverse(kLink4, kDefaults, q);
    const double expected = 0.167 * 1.5 + 0.5 * std::pow(q / v, 1.0);
    EXPECT_NEAR(link_travel_time(kLink4, kDefaults, v, q), expected, 1e-12);
  }
}

TEST(CostProperties, ZeroQueueReducesToBpr) {
  for (double v : {0.0, 500.0, 1775.0, 2600.0}) {
    EXPECT_DOUBLE_EQ(smoothed_link_time(kLink1, kDefaults, v, 0),
                     link_travel_time(kLink1, kDefaults, v, 0));
    EXPECT_NEAR(link_travel_time(kLink1, kDefaults, v, 0), oracle::bpr(0.417, 0.5, 4, v, 1800), 1e-12);
  }
}

TEST(CostProperties, PhiOneKeepsFullExponent) {
  const CostParams p{.phi = 1.0};
  for (double q : {0.0, 10.0, 1000.0}) EXPECT_DOUBLE_EQ(smoothed_exponent(p, q), p.n);
}

TEST(CostProperties, MonotoneInFlowAndQueue) {
  double previous = link_travel_time(kLink4, kDefaults, 1, 50);
  for (double v = 50; v <= 3000; v += 50) {
    const double t = link_travel_time(kLink4, kDefaults, v, 50);
    EXPECT_GT(t, previous);
    previous = t;
  }
  previous = queuing_delay(kLink4, kDefaults, 1);
  for (double q = 50; q < 4800; q += 50) {
    const double d = queuing_delay(kLink4, kDefaults, q);
    EXPECT_GT(d, previous);
    previous = d;
  }
}

TEST(CostProperties, GammaRoundTrip) {
  for (double q = 0; q <= 4800; q += 120) {
    EXPECT_NEAR(gamma_of_flow(kLink4, kDefaults, gamma_inverse(kLink4, kDefaults, q)), q, 1e-9);
  }
}
