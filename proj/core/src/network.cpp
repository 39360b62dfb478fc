#include "queuelib/network.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_set>

#include "queuelib/csv.hpp"
#include "queuelib/error.hpp"

namespace queuelib {

void CostParams::validate() const {
  auto check = [](bool ok, const char* what) {
    if (!ok) throw InputError(std::string("parameter out of range: ") + what);
  };
  check(std::isfinite(alpha) && alpha >= 0.0, "alpha must be >= 0");
  check(std::isfinite(beta) && beta >= 0.0, "beta must be >= 0");
  check(std::isfinite(m) && m > 0.0, "m must be > 0");
  check(std::isfinite(n) && n > 0.0, "n must be > 0");
  check(std::isfinite(gamma) && gamma >= 0.0 && gamma < 1.0, "gamma must be in [0, 1)");
  check(std::isfinite(phi) && phi >= 1.0, "phi must be >= 1");
}

Network::Network(std::vector<Node> nodes, std::vector<Link> links, std::vector<ODPair> od_pairs,
                 CostParams defaults)
    : nodes_(std::move(nodes)),
      links_(std::move(links)),
      od_pairs_(std::move(od_pairs)),
      defaults_(defaults) {
  std::vector<std::string> issues;
  try {
    defaults_.validate();
  } catch (const InputError& e) {
    issues.emplace_back(e.what());
  }
  if (links_.empty()) issues.emplace_back("no links");
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (!node_by_id_.emplace(nodes_[i].id, i).second) {
      issues.push_back("duplicate node id " + std::to_string(nodes_[i].id));
    }
  }
  for (std::size_t i = 0; i < links_.size(); ++i) {
    const auto& l = links_[i];
    const auto id = std::to_string(l.id);
    if (!link_by_id_.emplace(l.id, i).second) issues.push_back("duplicate link id " + id);
    if (!node_by_id_.contains(l.tail)) {
      issues.push_back("link " + id + " references unknown node " + std::to_string(l.tail));
    }
    if (!node_by_id_.contains(l.head)) {
      issues.push_back("link " + id + " references unknown node " + std::to_string(l.head));
    }
    if (!(l.free_flow_time > 0.0) || !std::isfinite(l.free_flow_time)) {
      issues.push_back("link " + id + " has non-positive free-flow time");
    }
    if (!(l.capacity > 0.0) || !std::isfinite(l.capacity)) {
      issues.push_back("link " + id + " has non-positive capacity");
    }
    if (l.length && l.free_speed && *l.free_speed > 0.0 &&
        std::abs(l.free_flow_time - *l.length / *l.free_speed) > 1e-3) {
      issues.push_back("link " + id + " free-flow time disagrees with length / free speed");
    }
    if (!l.overrides.empty()) {
      try {
        l.overrides.apply(defaults_).validate();
      } catch (const InputError& e) {
        issues.push_back("link " + id + ": " + e.what());
      }
    }
  }
  for (const auto& od : od_pairs_) {
    const auto name = std::to_string(od.origin) + "->" + std::to_string(od.destination);
    if (!node_by_id_.contains(od.origin) || !node_by_id_.contains(od.destination)) {
      issues.push_back("OD pair " + name + " references an unknown node");
    }
    if (od.origin == od.destination) issues.push_back("OD pair " + name + " has origin = destination");
    if (!(od.demand >= 0.0) || !std::isfinite(od.demand)) {
      issues.push_back("OD pair " + name + " has negative demand");
    }
  }
  if (!issues.empty()) throw InputError(std::move(issues));
}

std::optional<std::size_t> Network::node_index(NodeId id) const {
  auto it = node_by_id_.find(id);
  if (it == node_by_id_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> Network::link_index(LinkId id) const {
  auto it = link_by_id_.find(id);
  if (it == link_by_id_.end()) return std::nullopt;
  return it->second;
}

std::size_t Network::require_link(LinkId id) const {
  if (auto i = link_index(id)) return *i;
  throw InputError("unknown link id " + std::to_string(id));
}

double Network::total_demand() const {
  double total = 0.0;
  for (const auto& od : od_pairs_) total += od.demand;
  return total;
}

Network Network::with_params(const CostParams& defaults) const {
  return Network(nodes_, links_, od_pairs_, defaults);
}

Network Network::with_demands(std::span<const double> demands) const {
  if (demands.size() != od_pairs_.size()) throw InputError("demand vector size mismatch");
  auto ods = od_pairs_;
  for (std::size_t i = 0; i < ods.size(); ++i) ods[i].demand = demands[i];
  return Network(nodes_, links_, std::move(ods), defaults_);
}

Network Network::with_demand(std::size_t od_index, double demand) const {
  if (od_index >= od_pairs_.size()) throw InputError("OD index out of range");
  auto ods = od_pairs_;
  ods[od_index].demand = demand;
  return Network(nodes_, links_, std::move(ods), defaults_);
}

Network Network::with_od_pairs(std::vector<ODPair> od_pairs) const {
  return Network(nodes_, links_, std::move(od_pairs), defaults_);
}

std::vector<CostParams> link_params(const Network& network) {
  std::vector<CostParams> out;
  out.reserve(network.link_count());
  for (std::size_t a = 0; a < network.link_count(); ++a) out.push_back(network.params_for(a));
  return out;
}

namespace {

std::string where(const csv::Row& row) { return "line " + std::to_string(row.line); }

const std::string& field(const csv::Row& row, std::size_t col) {
  static const std::string empty;
  return col < row.fields.size() ? row.fields[col] : empty;
}

std::optional<double> optional_number(const csv::Row& row, std::optional<std::size_t> col,
                                      const char* name, std::vector<std::string>& issues) {
  if (!col || field(row, *col).empty()) return std::nullopt;
  auto v = csv::to_double(field(row, *col));
  if (!v) issues.push_back(where(row) + ": unparseable " + name + " '" + field(row, *col) + "'");
  return v;
}

}  // namespace

Network load_network(std::istream& node_source, std::istream& link_source,
                     const CostParams& defaults) {
  std::vector<std::string> issues;

  const auto node_table = csv::read(node_source);
  std::vector<Node> nodes;
  const auto node_col = node_table.column({"node_id", "id", "node"});
  if (!node_col) issues.emplace_back("node file: missing node_id column");
  const auto x_col = node_table.column({"x_coord", "x"});
  const auto y_col = node_table.column({"y_coord", "y"});
  if (node_col) {
    for (const auto& row : node_table.rows) {
      auto id = csv::to_int(field(row, *node_col));
      if (!id) {
        issues.push_back("node file " + where(row) + ": unparseable node id '" +
                         field(row, *node_col) + "'");
        continue;
      }
      Node node{*id, optional_number(row, x_col, "x", issues),
                optional_number(row, y_col, "y", issues)};
      nodes.push_back(node);
    }
  }

  const auto link_table = csv::read(link_source);
  std::vector<Link> links;
  const auto id_col = link_table.column({"link_id", "id", "link"});
  const auto from_col = link_table.column({"from_node_id", "from_node", "tail", "from"});
  const auto to_col = link_table.column({"to_node_id", "to_node", "head", "to"});
  const auto cap_col = link_table.column({"capacity", "c_max", "physical_capacity"});
  const auto len_col = link_table.column({"length"});
  const auto speed_col = link_table.column({"free_speed", "speed"});
  const auto fft_col = link_table.column({"free_flow_time", "fftt", "free_flow_travel_time"});
  const auto alpha_col = link_table.column({"alpha"});
  const auto beta_col = link_table.column({"beta"});
  const auto m_col = link_table.column({"m"});
  const auto n_col = link_table.column({"n"});
  const auto gamma_col = link_table.column({"gamma"});
  const auto phi_col = link_table.column({"phi"});

  if (!id_col) issues.emplace_back("link file: missing link_id column");
  if (!from_col) issues.emplace_back("link file: missing from_node column");
  if (!to_col) issues.emplace_back("link file: missing to_node column");
  if (!cap_col) issues.emplace_back("link file: missing capacity column");
  if (!fft_col && !(len_col && speed_col)) {
    issues.emplace_back("link file: need free_flow_time or both length and free_speed");
  }
  if (!issues.empty()) throw InputError(std::move(issues));

  for (const auto& row : link_table.rows) {
    const auto before = issues.size();
    auto id = csv::to_int(field(row, *id_col));
    auto tail = csv::to_int(field(row, *from_col));
    auto head = csv::to_int(field(row, *to_col));
    auto cap = csv::to_double(field(row, *cap_col));
    const std::string prefix = "link file " + where(row);
    if (!id) issues.push_back(prefix + ": unparseable link id '" + field(row, *id_col) + "'");
    if (!tail) issues.push_back(prefix + ": unparseable from_node '" + field(row, *from_col) + "'");
    if (!head) issues.push_back(prefix + ": unparseable to_node '" + field(row, *to_col) + "'");
    if (!cap) issues.push_back(prefix + ": unparseable capacity '" + field(row, *cap_col) + "'");
    auto length = optional_number(row, len_col, "length", issues);
    auto speed = optional_number(row, speed_col, "free_speed", issues);
    auto fft = optional_number(row, fft_col, "free_flow_time", issues);
    CostOverrides ov{optional_number(row, alpha_col, "alpha", issues),
                     optional_number(row, beta_col, "beta", issues),
                     optional_number(row, m_col, "m", issues),
                     optional_number(row, n_col, "n", issues),
                     optional_number(row, gamma_col, "gamma", issues),
                     optional_number(row, phi_col, "phi", issues)};
    if (!fft && !(length && speed && *speed > 0.0)) {
      issues.push_back(prefix + ": no free_flow_time and no usable length / free_speed");
    }
    if (issues.size() != before) continue;

    Link link;
    link.id = *id;
    link.tail = *tail;
    link.head = *head;
    link.capacity = *cap;
    link.length = length;
    link.free_speed = speed;
    link.free_flow_time = fft ? *fft : *length / *speed;
    if (!speed && length && link.free_flow_time > 0.0) {
      link.free_speed = *length / link.free_flow_time;
    }
    link.overrides = ov;
    links.push_back(link);
  }
  if (!issues.empty()) throw InputError(std::move(issues));
  return Network(std::move(nodes), std::move(links), {}, defaults);
}

Network load_demands(std::istream& source, const Network& network) {
  const auto table = csv::read(source);
  std::vector<std::string> issues;
  const auto o_col = table.column({"origin", "o_zone_id", "o", "from"});
  const auto d_col = table.column({"destination", "d_zone_id", "d", "to"});
  const auto q_col = table.column({"demand", "volume", "flow"});
  if (!o_col || !d_col || !q_col) {
    throw InputError("demand file: need origin, destination and demand columns");
  }
  std::vector<ODPair> ods;
  for (const auto& row : table.rows) {
    auto o = csv::to_int(field(row, *o_col));
    auto d = csv::to_int(field(row, *d_col));
    auto q = csv::to_double(field(row, *q_col));
    if (!o || !d || !q) {
      issues.push_back("demand file " + where(row) + ": unparseable row");
      continue;
    }
    for (const auto& prev : ods) {
      if (prev.origin == *o && prev.destination == *d) {
        issues.push_back("demand file " + where(row) + ": duplicate OD pair " +
                         std::to_string(*o) + "->" + std::to_string(*d));
      }
    }
    ods.push_back({*o, *d, *q});
  }
  if (!issues.empty()) throw InputError(std::move(issues));
  return network.with_od_pairs(std::move(ods));
}

void write_demands(std::ostream& out, const Network& network) {
  out << "origin,destination,demand\n";
  for (const auto& od : network.od_pairs()) {
    out << od.origin << ',' << od.destination << ',' << od.demand << '\n';
  }
}

}  // namespace queuelib
