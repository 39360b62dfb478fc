#pragma once

#include "queuelib/network.hpp"
#include "queuelib/params.hpp"

namespace queuelib {

// Upper end of the queue range, C_max / gamma; infinite when gamma = 0.
double queue_bound(const Link& link, const CostParams& params);

// Flow-queue relation Q = (C_max - v) / gamma. Requires gamma > 0 and
// 0 <= v <= C_max.
double gamma_of_flow(const Link& link, const CostParams& params, double v);

// Inverse relation C_max - gamma Q for Q in [0, C_max / gamma].
double gamma_inverse(const Link& link, const CostParams& params, double Q);

// Exit capacity: C_max without a queue, C_max - gamma Q with one.
double capacity(const Link& link, const CostParams& params, double Q);

// alpha (Q / C(Q))^m
double queuing_delay(const Link& link, const CostParams& params, double Q);

// d/dQ of queuing_delay.
double queuing_delay_dq(const Link& link, const CostParams& params, double Q);

// BPR part t_f (1 + beta (v / C(Q))^n).
double running_time(const Link& link, const CostParams& params, double v, double Q);

// Generalized cost: running time plus queuing delay. Throws DomainError
// "capacity fully consumed by queue" when C(Q) <= 0.
double link_travel_time(const Link& link, const CostParams& params, double v, double Q);

// d t / d v at fixed Q, and its second derivative.
double travel_time_dv(const Link& link, const CostParams& params, double v, double Q);
double travel_time_dv2(const Link& link, const CostParams& params, double v, double Q);

// System-optimal marginal cost t + (v + Q) dt/dv.
double marginal_link_time(const Link& link, const CostParams& params, double v, double Q);
double marginal_link_time_dv(const Link& link, const CostParams& params, double v, double Q);

// Smoothed BPR exponent n phi^-Q, flushed to zero below 1e-300.
double smoothed_exponent(const CostParams& params, double Q);

// t_f + t_f beta (v / C_max)^(n phi^-Q)
double smoothed_link_time(const Link& link, const CostParams& params, double v, double Q);
double smoothed_link_time_dv(const Link& link, const CostParams& params, double v, double Q);

// Integrand of the queue term, t_f (1 + beta) + alpha (Q / (C_max - gamma Q))^m.
// Throws DomainError at or beyond the pole C_max / gamma.
double queue_delay_marginal(const Link& link, const CostParams& params, double Q);

}  // namespace queuelib
