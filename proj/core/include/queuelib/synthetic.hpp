#pragma once

#include <cstdint>

#include "queuelib/network.hpp"

namespace queuelib {

struct GridSpec {
  int size = 15;        // nodes per side
  int od_pairs = 50;
  double demand = 600.0;  // per OD pair, veh/hr
  std::uint64_t seed = 42;
};

// Square grid with a link in each direction between neighbours. Free-flow
// times and capacities vary per link. OD pairs join random nodes at least
// half a grid apart, with no origin or destination shared between pairs.
Network make_grid_network(const GridSpec& spec, const CostParams& params = {});

}  // namespace queuelib
