#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "queuelib/params.hpp"

namespace queuelib {

using NodeId = std::int64_t;
using LinkId = std::int64_t;

struct Node {
  NodeId id = 0;
  std::optional<double> x;
  std::optional<double> y;
};

// A directed road link. Times in hours, lengths in km, rates in veh/hr.
struct Link {
  LinkId id = 0;
  NodeId tail = 0;
  NodeId head = 0;
  double free_flow_time = 0.0;
  std::optional<double> length;
  std::optional<double> free_speed;
  double capacity = 0.0;  // physical capacity C_max
  CostOverrides overrides;
};

struct ODPair {
  NodeId origin = 0;
  NodeId destination = 0;
  double demand = 0.0;  // veh/hr
};

// Immutable road network: nodes, links, OD demands and the network-wide
// default cost parameters. Elements are addressed by dense index; ids are
// only used at the I/O boundary.
class Network {
 public:
  Network() = default;
  // Validates every invariant and throws InputError listing all violations.
  Network(std::vector<Node> nodes, std::vector<Link> links,
          std::vector<ODPair> od_pairs, CostParams defaults = {});

  std::span<const Node> nodes() const { return nodes_; }
  std::span<const Link> links() const { return links_; }
  std::span<const ODPair> od_pairs() const { return od_pairs_; }
  const Link& link(std::size_t index) const { return links_[index]; }
  std::size_t link_count() const { return links_.size(); }

  const CostParams& default_params() const { return defaults_; }
  // Effective parameters for a link: defaults with its overrides applied.
  CostParams params_for(std::size_t link_index) const {
    return links_[link_index].overrides.apply(defaults_);
  }

  std::optional<std::size_t> node_index(NodeId id) const;
  std::optional<std::size_t> link_index(LinkId id) const;
  // Throws InputError if the id is unknown.
  std::size_t require_link(LinkId id) const;

  double total_demand() const;

  // Copies with one aspect replaced. Link and OD indices are preserved, so a
  // PathSet built on the original remains valid for the copy.
  Network with_params(const CostParams& defaults) const;
  Network with_demands(std::span<const double> demands) const;
  Network with_demand(std::size_t od_index, double demand) const;
  Network with_od_pairs(std::vector<ODPair> od_pairs) const;

 private:
  std::vector<Node> nodes_;
  std::vector<Link> links_;
  std::vector<ODPair> od_pairs_;
  CostParams defaults_;
  std::unordered_map<NodeId, std::size_t> node_by_id_;
  std::unordered_map<LinkId, std::size_t> link_by_id_;
};

// GMNS-style ingestion. Node columns: node_id, optional x_coord/x, y_coord/y.
// Link columns: link_id, from_node_id/from_node, to_node_id/to_node,
// capacity, length, and free_speed and/or free_flow_time. Optional columns
// alpha, beta, m, n, gamma, phi override the defaults per link. Other
// columns are ignored.
Network load_network(std::istream& node_source, std::istream& link_source,
                     const CostParams& defaults = {});

// Reads origin,destination,demand rows (GMNS o_zone_id,d_zone_id,volume
// also accepted) and returns a copy of `network` with those OD pairs.
Network load_demands(std::istream& source, const Network& network);

void write_demands(std::ostream& out, const Network& network);

// ---------------------------------------------------------------------------
// Path sets

struct Path {
  std::size_t od = 0;
  std::vector<std::size_t> links;  // link indices, tail-to-head order

  friend bool operator==(const Path&, const Path&) = default;
};

// Where a link appears inside a path.
struct PathPosition {
  std::size_t path = 0;
  std::size_t position = 0;
};

// A fixed set of paths per OD pair with link-path incidence. For a link at
// position i of path p, the downstream set is links (i, end) of p and the
// upstream set is links [0, i).
class PathSet {
 public:
  PathSet() = default;
  // Validates chains against `network` and throws InputError on the first
  // bad path. Paths are kept in the given order.
  PathSet(const Network& network, std::vector<Path> paths);

  std::span<const Path> paths() const { return paths_; }
  const Path& path(std::size_t p) const { return paths_[p]; }
  std::size_t size() const { return paths_.size(); }
  std::size_t link_count() const { return through_.size(); }
  std::size_t od_count() const { return by_od_.size(); }

  std::span<const std::size_t> paths_of_od(std::size_t od) const { return by_od_[od]; }
  std::span<const PathPosition> through(std::size_t link) const { return through_[link]; }

  std::span<const std::size_t> downstream(std::size_t p, std::size_t position) const {
    const auto& links = paths_[p].links;
    return std::span<const std::size_t>(links).subspan(position + 1);
  }
  std::span<const std::size_t> upstream(std::size_t p, std::size_t position) const {
    const auto& links = paths_[p].links;
    return std::span<const std::size_t>(links).first(position);
  }

  // Total number of (link, path) incidences, i.e. queue variables Q_ap.
  std::size_t incidence_count() const { return incidence_count_; }
  // Flat index of Q_ap for the link at `position` of path `p`.
  std::size_t queue_index(std::size_t p, std::size_t position) const {
    return offset_[p] + position;
  }

  // Links processed so that, where the path set allows it, every link comes
  // after all links that precede it on some path.
  std::span<const std::size_t> topological_links() const { return topo_; }

  friend bool operator==(const PathSet& a, const PathSet& b);

 private:
  std::vector<Path> paths_;
  std::vector<std::vector<std::size_t>> by_od_;
  std::vector<std::vector<PathPosition>> through_;
  std::vector<std::size_t> topo_;
  std::vector<std::size_t> offset_;
  std::size_t incidence_count_ = 0;
};

// Up to k loopless shortest paths per OD pair by free-flow time, ordered by
// cost then by the lexicographic sequence of link ids. Throws InputError if
// an OD pair with positive demand is disconnected.
PathSet enumerate_paths(const Network& network, std::size_t k);

// Rows "origin,destination,id1;id2;..." (optional header, optional [ ]
// around the link list).
PathSet load_path_set(std::istream& source, const Network& network);

void write_path_set(std::ostream& out, const PathSet& path_set, const Network& network);

// Effective per-link parameters, indexed like network.links().
std::vector<CostParams> link_params(const Network& network);

// Sum of free-flow times along a path.
double free_flow_cost(const Network& network, const Path& path);

}  // namespace queuelib
