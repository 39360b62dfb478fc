#include "queuelib/cost.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "queuelib/error.hpp"

namespace queuelib {
namespace {

constexpr double kRangeSlack = 1e-12;

void check_queue(const Link& link, const CostParams& params, double Q) {
  if (!(Q >= -1e-9)) throw DomainError("negative queue on link " + std::to_string(link.id));
  if (params.gamma > 0.0 && Q > queue_bound(link, params) * (1.0 + kRangeSlack)) {
    throw DomainError("queue beyond C_max / gamma on link " + std::to_string(link.id));
  }
}

double positive_capacity(const Link& link, const CostParams& params, double Q) {
  const double c = capacity(link, params, Q);
  if (!(c > 0.0)) {
    throw DomainError("capacity fully consumed by queue on link " + std::to_string(link.id));
  }
  return c;
}

// d/dv of v^p at v, with the v = 0 limit.
double power_slope(double v, double p) {
  if (v > 0.0) return p * std::pow(v, p - 1.0);
  if (p > 1.0) return 0.0;
  if (p == 1.0) return 1.0;
  return std::numeric_limits<double>::infinity();
}

double power_curvature(double v, double p) {
  if (v > 0.0) return p * (p - 1.0) * std::pow(v, p - 2.0);
  if (p > 2.0 || p == 1.0) return 0.0;
  if (p == 2.0) return 2.0;
  return p > 1.0 ? std::numeric_limits<double>::infinity()
                 : -std::numeric_limits<double>::infinity();
}

}  // namespace

double queue_bound(const Link& link, const CostParams& params) {
  if (params.gamma <= 0.0) return std::numeric_limits<double>::infinity();
  return link.capacity / params.gamma;
}

double gamma_of_flow(const Link& link, const CostParams& params, double v) {
  if (params.gamma <= 0.0) {
    throw DomainError("flow-queue relation undefined for gamma = 0; use the fixed-capacity mode");
  }
  if (v < 0.0 || v > link.capacity * (1.0 + kRangeSlack)) {
    throw DomainError("flow outside [0, C_max] on link " + std::to_string(link.id));
  }
  return std::max(0.0, (link.capacity - v) / params.gamma);
}

double gamma_inverse(const Link& link, const CostParams& params, double Q) {
  check_queue(link, params, Q);
  return std::max(0.0, link.capacity - params.gamma * std::max(Q, 0.0));
}

double capacity(const Link& link, const CostParams& params, double Q) {
  check_queue(link, params, Q);
  if (Q <= 0.0) return link.capacity;
  return std::max(0.0, link.capacity - params.gamma * Q);
}

double queuing_delay(const Link& link, const CostParams& params, double Q) {
  if (Q <= 0.0) {
    check_queue(link, params, Q);
    return 0.0;
  }
  const double c = positive_capacity(link, params, Q);
  return params.alpha * std::pow(Q / c, params.m);
}

double queuing_delay_dq(const Link& link, const CostParams& params, double Q) {
  const double c = positive_capacity(link, params, std::max(Q, 0.0));
  const double ratio = std::max(Q, 0.0) / c;
  return params.alpha * power_slope(ratio, params.m) * link.capacity / (c * c);
}

double running_time(const Link& link, const CostParams& params, double v, double Q) {
  const double c = positive_capacity(link, params, Q);
  return link.free_flow_time * (1.0 + params.beta * std::pow(std::max(v, 0.0) / c, params.n));
}

double link_travel_time(const Link& link, const CostParams& params, double v, double Q) {
  return running_time(link, params, v, Q) + queuing_delay(link, params, Q);
}

double travel_time_dv(const Link& link, const CostParams& params, double v, double Q) {
  const double c = positive_capacity(link, params, Q);
  return link.free_flow_time * params.beta * power_slope(std::max(v, 0.0) / c, params.n) / c;
}

double travel_time_dv2(const Link& link, const CostParams& params, double v, double Q) {
  const double c = positive_capacity(link, params, Q);
  return link.free_flow_time * params.beta * power_curvature(std::max(v, 0.0) / c, params.n) /
         (c * c);
}

double marginal_link_time(const Link& link, const CostParams& params, double v, double Q) {
  const double t = link_travel_time(link, params, v, Q);
  const double weight = std::max(v, 0.0) + std::max(Q, 0.0);
  if (weight == 0.0 || params.beta == 0.0) return t;
  return t + weight * travel_time_dv(link, params, v, Q);
}

double marginal_link_time_dv(const Link& link, const CostParams& params, double v, double Q) {
  const double weight = std::max(v, 0.0) + std::max(Q, 0.0);
  const double slope = travel_time_dv(link, params, v, Q);
  if (weight == 0.0) return 2.0 * slope;
  return 2.0 * slope + weight * travel_time_dv2(link, params, v, Q);
}

double smoothed_exponent(const CostParams& params, double Q) {
  const double e = params.n * std::exp(-std::max(Q, 0.0) * std::log(params.phi));
  return e < 1e-300 ? 0.0 : e;
}

double smoothed_link_time(const Link& link, const CostParams& params, double v, double Q) {
  const double e = smoothed_exponent(params, Q);
  const double r = std::max(v, 0.0) / link.capacity;
  return link.free_flow_time * (1.0 + params.beta * std::pow(r, e));
}

double smoothed_link_time_dv(const Link& link, const CostParams& params, double v, double Q) {
  const double e = smoothed_exponent(params, Q);
  if (e == 0.0) return 0.0;
  const double r = std::max(v, 0.0) / link.capacity;
  return link.free_flow_time * params.beta * power_slope(r, e) / link.capacity;
}

double queue_delay_marginal(const Link& link, const CostParams& params, double Q) {
  const double base = link.free_flow_time * (1.0 + params.beta);
  if (Q <= 0.0) {
    check_queue(link, params, Q);
    return base;
  }
  const double denom = link.capacity - params.gamma * Q;
  if (!(denom > 0.0)) {
    throw DomainError("queue at or beyond the pole C_max / gamma on link " +
                      std::to_string(link.id));
  }
  return base + params.alpha * std::pow(Q / denom, params.m);
}

}  // namespace queuelib
