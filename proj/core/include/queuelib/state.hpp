#pragma once

#include <span>
#include <vector>

#include "queuelib/network.hpp"

namespace queuelib {

// Per-link aggregates implied by path flows f~ and queues Q_ap.
//   total     x_a  = sum_p delta_ap f~_p
//   queue     Q_a  = sum_p Q_ap
//   upstream  Q'_a = sum_p delta_ap sum_{b upstream of a on p} Q_bp
//   flow      v_a  = x_a - Q_a - Q'_a
struct LinkLoads {
  std::vector<double> total;
  std::vector<double> queue;
  std::vector<double> upstream;
  std::vector<double> flow;
};

// Throws DomainError if some v_a < -1e-9.
LinkLoads assemble_link_state(const PathSet& path_set, std::span<const double> path_flow,
                              std::span<const double> path_queue);

// f_p = f~_p - sum_{a in p} Q_ap, the flow that completes its trip.
std::vector<double> completed_path_flows(const PathSet& path_set,
                                         std::span<const double> path_flow,
                                         std::span<const double> path_queue);

}  // namespace queuelib
