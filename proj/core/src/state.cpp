#include "queuelib/state.hpp"

#include <string>

#include "queuelib/error.hpp"

namespace queuelib {

LinkLoads assemble_link_state(const PathSet& path_set, std::span<const double> path_flow,
                              std::span<const double> path_queue) {
  if (path_flow.size() != path_set.size() || path_queue.size() != path_set.incidence_count()) {
    throw DomainError("state dimensions do not match the path set");
  }
  const auto n = path_set.link_count();
  LinkLoads loads{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0),
                  std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
  for (std::size_t p = 0; p < path_set.size(); ++p) {
    const auto& links = path_set.path(p).links;
    double held = 0.0;
    for (std::size_t i = 0; i < links.size(); ++i) {
      const auto a = links[i];
      const double q = path_queue[path_set.queue_index(p, i)];
      loads.total[a] += path_flow[p];
      loads.queue[a] += q;
      loads.upstream[a] += held;
      held += q;
    }
  }
  for (std::size_t a = 0; a < n; ++a) {
    loads.flow[a] = loads.total[a] - loads.queue[a] - loads.upstream[a];
    if (loads.flow[a] < -1e-9) {
      throw DomainError("negative link flow " + std::to_string(loads.flow[a]) + " at link index " +
                        std::to_string(a));
    }
  }
  return loads;
}

std::vector<double> completed_path_flows(const PathSet& path_set,
                                         std::span<const double> path_flow,
                                         std::span<const double> path_queue) {
  std::vector<double> out(path_flow.begin(), path_flow.end());
  for (std::size_t p = 0; p < path_set.size(); ++p) {
    for (std::size_t i = 0; i < path_set.path(p).links.size(); ++i) {
      out[p] -= path_queue[path_set.queue_index(p, i)];
    }
  }
  return out;
}

}  // namespace queuelib
