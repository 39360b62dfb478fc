#pragma once

#include <span>
#include <vector>

#include "queuelib/network.hpp"
#include "queuelib/params.hpp"

namespace queuelib {

// F_a(v, Q) = t_f v + t_f beta C_max (v / C_max)^(n~ + 1) / (n~ + 1),
// with n~ = n phi^-Q.
double flow_integral(const Link& link, const CostParams& params, double v, double Q);
// dF_a / dn~
double flow_integral_dexponent(const Link& link, const CostParams& params, double v, double Q);

enum class IntegralMethod { automatic, closed_form, quadrature };

// alpha * integral_0^Q (y / (C_max - gamma y))^m dy
double delay_integral(const Link& link, const CostParams& params, double Q,
                      IntegralMethod method = IntegralMethod::automatic);

// G_a(Q) = t_f (1 + beta) Q + delay_integral(Q)
double queue_integral(const Link& link, const CostParams& params, double Q);

// J(f~, Q) = sum_a F_a(v_a, Q_a) + G_a(Q_a). Q_ap is indexed by
// PathSet::queue_index. `params` holds effective per-link parameters.
double objective(const Network& network, const PathSet& path_set,
                 std::span<const CostParams> params, std::span<const double> path_flow,
                 std::span<const double> path_queue);
double objective(const Network& network, const PathSet& path_set,
                 std::span<const double> path_flow, std::span<const double> path_queue);

struct ObjectiveGradient {
  std::vector<double> path;   // dJ / df~_p
  std::vector<double> queue;  // dJ / dQ_ap
};

ObjectiveGradient objective_gradient(const Network& network, const PathSet& path_set,
                                     std::span<const CostParams> params,
                                     std::span<const double> path_flow,
                                     std::span<const double> path_queue);
ObjectiveGradient objective_gradient(const Network& network, const PathSet& path_set,
                                     std::span<const double> path_flow,
                                     std::span<const double> path_queue);

}  // namespace queuelib
