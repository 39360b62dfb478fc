#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "queuelib/network.hpp"
#include "queuelib/solver.hpp"

namespace fixtures {

inline std::filesystem::path data_dir() { return QUEUELIB_DATA_DIR; }

inline std::ifstream open(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw std::runtime_error("missing fixture " + p.string());
  return in;
}

inline queuelib::Network load(const std::string& name,
                              const std::string& demand_file = "demand.csv",
                              const queuelib::CostParams& params = {}) {
  const auto dir = data_dir() / name;
  auto nodes = open(dir / "node.csv");
  auto links = open(dir / "link.csv");
  auto net = queuelib::load_network(nodes, links, params);
  auto demand = open(dir / demand_file);
  return queuelib::load_demands(demand, net);
}

inline queuelib::Network six_node(const queuelib::CostParams& params = {}) {
  return load("six_node", "demand.csv", params);
}

inline queuelib::PathSet six_node_paths(const queuelib::Network& net) {
  auto in = open(data_dir() / "six_node" / "paths.csv");
  return queuelib::load_path_set(in, net);
}

// Link table text for the six-node network, for tests that corrupt it.
inline std::string six_node_link_text() {
  auto in = open(data_dir() / "six_node" / "link.csv");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline std::size_t index_of(const queuelib::Network& net, queuelib::LinkId id) {
  return net.require_link(id);
}

}  // namespace fixtures
