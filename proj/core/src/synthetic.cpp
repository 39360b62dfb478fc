#include "queuelib/synthetic.hpp"

#include <cstdlib>
#include <random>
#include <set>

#include "queuelib/error.hpp"

namespace queuelib {

Network make_grid_network(const GridSpec& spec, const CostParams& params) {
  if (spec.size < 2) throw InputError("grid size must be >= 2");
  if (spec.od_pairs < 0) throw InputError("OD pair count must be >= 0");
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> time(0.04, 0.08);
  std::uniform_real_distribution<double> cap(1200.0, 2400.0);

  const int s = spec.size;
  auto id = [s](int i, int j) { return static_cast<NodeId>(i * s + j + 1); };
  std::vector<Node> nodes;
  for (int i = 0; i < s; ++i) {
    for (int j = 0; j < s; ++j) nodes.push_back({id(i, j), double(j), double(i)});
  }
  std::vector<Link> links;
  auto connect = [&](NodeId a, NodeId b) {
    Link l;
    l.id = static_cast<LinkId>(links.size() + 1);
    l.tail = a;
    l.head = b;
    l.free_flow_time = time(rng);
    l.capacity = cap(rng);
    links.push_back(l);
  };
  for (int i = 0; i < s; ++i) {
    for (int j = 0; j < s; ++j) {
      if (j + 1 < s) {
        connect(id(i, j), id(i, j + 1));
        connect(id(i, j + 1), id(i, j));
      }
      if (i + 1 < s) {
        connect(id(i, j), id(i + 1, j));
        connect(id(i + 1, j), id(i, j));
      }
    }
  }

  std::uniform_int_distribution<int> pick(0, s - 1);
  std::set<NodeId> origins;
  std::set<NodeId> destinations;
  std::vector<ODPair> ods;
  for (int tries = 0; static_cast<int>(ods.size()) < spec.od_pairs && tries < 100000; ++tries) {
    const int oi = pick(rng), oj = pick(rng), di = pick(rng), dj = pick(rng);
    if (std::abs(oi - di) + std::abs(oj - dj) < s / 2) continue;
    const NodeId o = id(oi, oj), d = id(di, dj);
    if (origins.contains(o) || destinations.contains(d)) continue;
    origins.insert(o);
    destinations.insert(d);
    ods.push_back({o, d, spec.demand});
  }
  if (static_cast<int>(ods.size()) < spec.od_pairs) {
    throw InputError("grid too small for the requested OD pairs");
  }
  return Network(std::move(nodes), std::move(links), std::move(ods), params);
}

}  // namespace queuelib
