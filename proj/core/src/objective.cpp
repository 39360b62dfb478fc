#include "queuelib/objective.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <string>

#include "queuelib/cost.hpp"
#include "queuelib/error.hpp"
#include "queuelib/state.hpp"

namespace queuelib {

double flow_integral(const Link& link, const CostParams& params, double v, double Q) {
  const double e = smoothed_exponent(params, Q);
  const double c = link.capacity;
  const double r = std::max(v, 0.0) / c;
  return link.free_flow_time * std::max(v, 0.0) +
         link.free_flow_time * params.beta * c * std::pow(r, e + 1.0) / (e + 1.0);
}

double flow_integral_dexponent(const Link& link, const CostParams& params, double v, double Q) {
  const double r = std::max(v, 0.0) / link.capacity;
  if (r == 0.0) return 0.0;
  const double e1 = smoothed_exponent(params, Q) + 1.0;
  return link.free_flow_time * params.beta * link.capacity * std::pow(r, e1) *
         (std::log(r) / e1 - 1.0 / (e1 * e1));
}

namespace {

// -z - ln(1 - z), accurate for small z.
double log_remainder(double z) {
  if (z < 0.1) {
    double sum = 0.0;
    double power = z;
    for (int k = 2; k < 200; ++k) {
      power *= z;
      const double term = power / k;
      sum += term;
      if (term <= 1e-17 * sum) break;
    }
    return sum;
  }
  return -z - std::log1p(-z);
}

double delay_closed_form(const Link& link, const CostParams& params, double Q) {
  const double c = link.capacity;
  if (params.gamma == 0.0) {
    return params.alpha * std::pow(Q, params.m + 1.0) / ((params.m + 1.0) * std::pow(c, params.m));
  }
  const double g = params.gamma;
  return params.alpha * c / (g * g) * log_remainder(g * Q / c);
}

double delay_quadrature(const Link& link, const CostParams& params, double Q) {
  const double c = link.capacity;
  const double g = params.gamma;
  // y = Q u^2 removes the y^m singularity at 0 for m < 1.
  auto integrand = [&](double u) {
    const double y = Q * u * u;
    return std::pow(y / (c - g * y), params.m) * 2.0 * Q * u;
  };
  using Rule = boost::math::quadrature::gauss<double, 32>;
  double previous = Rule::integrate(integrand, 0.0, 1.0);
  for (int panels = 2; panels <= 4096; panels *= 2) {
    double sum = 0.0;
    const double h = 1.0 / panels;
    for (int i = 0; i < panels; ++i) sum += Rule::integrate(integrand, i * h, (i + 1) * h);
    if (std::abs(sum - previous) <= 1e-8 * std::abs(sum)) return params.alpha * sum;
    previous = sum;
  }
  return params.alpha * previous;
}

}  // namespace

double delay_integral(const Link& link, const CostParams& params, double Q,
                      IntegralMethod method) {
  if (Q <= 0.0 || params.alpha == 0.0) return 0.0;
  if (params.gamma > 0.0 && Q >= queue_bound(link, params)) {
    throw DomainError("queue at or beyond the pole C_max / gamma on link " +
                      std::to_string(link.id));
  }
  const bool closed = params.m == 1.0 || params.gamma == 0.0;
  switch (method) {
    case IntegralMethod::closed_form:
      if (!closed) throw DomainError("no closed form for this exponent");
      return delay_closed_form(link, params, Q);
    case IntegralMethod::quadrature:
      return delay_quadrature(link, params, Q);
    case IntegralMethod::automatic:
      break;
  }
  return closed ? delay_closed_form(link, params, Q) : delay_quadrature(link, params, Q);
}

double queue_integral(const Link& link, const CostParams& params, double Q) {
  if (Q <= 0.0) return 0.0;
  return link.free_flow_time * (1.0 + params.beta) * Q + delay_integral(link, params, Q);
}

double objective(const Network& network, const PathSet& path_set,
                 std::span<const CostParams> params, std::span<const double> path_flow,
                 std::span<const double> path_queue) {
  const auto loads = assemble_link_state(path_set, path_flow, path_queue);
  double j = 0.0;
  for (std::size_t a = 0; a < network.link_count(); ++a) {
    const auto& link = network.link(a);
    j += flow_integral(link, params[a], loads.flow[a], loads.queue[a]) +
         queue_integral(link, params[a], loads.queue[a]);
  }
  return j;
}

double objective(const Network& network, const PathSet& path_set,
                 std::span<const double> path_flow, std::span<const double> path_queue) {
  return objective(network, path_set, link_params(network), path_flow, path_queue);
}

ObjectiveGradient objective_gradient(const Network& network, const PathSet& path_set,
                                     std::span<const CostParams> params,
                                     std::span<const double> path_flow,
                                     std::span<const double> path_queue) {
  const auto loads = assemble_link_state(path_set, path_flow, path_queue);
  const auto n = network.link_count();
  std::vector<double> time(n);
  std::vector<double> own(n);  // d/dQ_a of F_a + G_a at fixed v_a
  for (std::size_t a = 0; a < n; ++a) {
    const auto& link = network.link(a);
    const auto& pa = params[a];
    const double v = loads.flow[a];
    const double q = loads.queue[a];
    time[a] = smoothed_link_time(link, pa, v, q);
    const double e = smoothed_exponent(pa, q);
    const double sensitivity =
        e == 0.0 ? 0.0 : flow_integral_dexponent(link, pa, v, q) * (-e * std::log(pa.phi));
    own[a] = queue_delay_marginal(link, pa, q) + sensitivity;
  }

  ObjectiveGradient g{std::vector<double>(path_set.size(), 0.0),
                      std::vector<double>(path_set.incidence_count(), 0.0)};
  for (std::size_t p = 0; p < path_set.size(); ++p) {
    const auto& links = path_set.path(p).links;
    double downstream = 0.0;
    for (std::size_t i = links.size(); i-- > 0;) {
      const auto a = links[i];
      g.queue[path_set.queue_index(p, i)] = -time[a] - downstream + own[a];
      downstream += time[a];
    }
    g.path[p] = downstream;
  }
  return g;
}

ObjectiveGradient objective_gradient(const Network& network, const PathSet& path_set,
                                     std::span<const double> path_flow,
                                     std::span<const double> path_queue) {
  return objective_gradient(network, path_set, link_params(network), path_flow, path_queue);
}

}  // namespace queuelib
