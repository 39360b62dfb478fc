#pragma once

#include <numbers>
#include <optional>

namespace queuelib {

// Parameters of the generalized link cost, the flow-queue relation and the
// queue-dependent capacity smoothing.
//
//   t(v, Q) = t_f (1 + beta (v / C(Q))^n) + alpha (Q / C(Q))^m
//   C(Q)    = C_max - gamma Q           (Q > 0), C_max otherwise
//
// `phi` is the base of the smoothing factor phi^-Q applied to the BPR
// exponent in the smoothed objective.
struct CostParams {
  double alpha = 0.5;  // hours
  double beta = 0.5;
  double m = 1.0;
  double n = 4.0;
  double gamma = 0.5;
  double phi = std::numbers::e;

  // Throws InputError naming the first field outside its range.
  void validate() const;

  friend bool operator==(const CostParams&, const CostParams&) = default;
};

// Per-link replacements for any subset of the network-wide parameters.
struct CostOverrides {
  std::optional<double> alpha;
  std::optional<double> beta;
  std::optional<double> m;
  std::optional<double> n;
  std::optional<double> gamma;
  std::optional<double> phi;

  CostParams apply(CostParams base) const {
    if (alpha) base.alpha = *alpha;
    if (beta) base.beta = *beta;
    if (m) base.m = *m;
    if (n) base.n = *n;
    if (gamma) base.gamma = *gamma;
    if (phi) base.phi = *phi;
    return base;
  }

  bool empty() const { return !alpha && !beta && !m && !n && !gamma && !phi; }

  friend bool operator==(const CostOverrides&, const CostOverrides&) = default;
};

}  // namespace queuelib
