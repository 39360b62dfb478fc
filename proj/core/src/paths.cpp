#include <algorithm>
#include <cmath>
#include <functional>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <queue>
#include <set>
#include <string>

#include "queuelib/csv.hpp"
#include "queuelib/error.hpp"
#include "queuelib/network.hpp"

namespace queuelib {
namespace {

std::string od_name(const ODPair& od) {
  return std::to_string(od.origin) + "->" + std::to_string(od.destination);
}

}  // namespace

PathSet::PathSet(const Network& network, std::vector<Path> paths) : paths_(std::move(paths)) {
  const auto ods = network.od_pairs();
  const auto links = network.links();
  by_od_.assign(ods.size(), {});
  through_.assign(links.size(), {});
  offset_.reserve(paths_.size());

  for (std::size_t p = 0; p < paths_.size(); ++p) {
    const auto& path = paths_[p];
    if (path.od >= ods.size()) throw InputError("path " + std::to_string(p) + ": unknown OD pair");
    const auto& od = ods[path.od];
    const auto name = "path " + std::to_string(p) + " (" + od_name(od) + ")";
    if (path.links.empty()) throw InputError(name + ": no links");
    for (auto a : path.links) {
      if (a >= links.size()) throw InputError(name + ": link index out of range");
    }
    if (links[path.links.front()].tail != od.origin) {
      throw InputError(name + ": first link " + std::to_string(links[path.links.front()].id) +
                       " does not start at the origin");
    }
    if (links[path.links.back()].head != od.destination) {
      throw InputError(name + ": last link " + std::to_string(links[path.links.back()].id) +
                       " does not end at the destination");
    }
    std::set<NodeId> visited{od.origin};
    for (std::size_t i = 0; i < path.links.size(); ++i) {
      const auto& l = links[path.links[i]];
      if (i > 0 && links[path.links[i - 1]].head != l.tail) {
        throw InputError(name + ": path not connected between links " +
                         std::to_string(links[path.links[i - 1]].id) + " and " +
                         std::to_string(l.id));
      }
      if (!visited.insert(l.head).second) {
        throw InputError(name + ": path revisits node " + std::to_string(l.head));
      }
    }

    by_od_[path.od].push_back(p);
    offset_.push_back(incidence_count_);
    for (std::size_t i = 0; i < path.links.size(); ++i) through_[path.links[i]].push_back({p, i});
    incidence_count_ += path.links.size();
  }

  for (std::size_t r = 0; r < ods.size(); ++r) {
    if (ods[r].demand > 0.0 && by_od_[r].empty()) {
      throw InputError("OD pair " + od_name(ods[r]) + " has positive demand but no path");
    }
  }

  // Kahn's algorithm on "a directly precedes b on some path"; links caught
  // in a precedence cycle are appended in index order.
  const auto n = links.size();
  std::vector<std::set<std::size_t>> next(n);
  std::vector<std::size_t> indegree(n, 0);
  for (const auto& path : paths_) {
    for (std::size_t i = 1; i < path.links.size(); ++i) {
      if (next[path.links[i - 1]].insert(path.links[i]).second) ++indegree[path.links[i]];
    }
  }
  std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
  for (std::size_t a = 0; a < n; ++a) {
    if (indegree[a] == 0) ready.push(a);
  }
  std::vector<bool> placed(n, false);
  while (!ready.empty()) {
    const auto a = ready.top();
    ready.pop();
    topo_.push_back(a);
    placed[a] = true;
    for (auto b : next[a]) {
      if (--indegree[b] == 0) ready.push(b);
    }
  }
  for (std::size_t a = 0; a < n; ++a) {
    if (!placed[a]) topo_.push_back(a);
  }
}

bool operator==(const PathSet& a, const PathSet& b) { return a.paths_ == b.paths_; }

double free_flow_cost(const Network& network, const Path& path) {
  double cost = 0.0;
  for (auto a : path.links) cost += network.link(a).free_flow_time;
  return cost;
}

namespace {

struct Graph {
  std::vector<std::vector<std::size_t>> out;  // node index -> link indices
  std::vector<std::size_t> tail;
  std::vector<std::size_t> head;
  std::vector<double> weight;
};

Graph make_graph(const Network& network) {
  Graph g;
  g.out.resize(network.nodes().size());
  for (std::size_t a = 0; a < network.link_count(); ++a) {
    const auto& l = network.link(a);
    const auto t = *network.node_index(l.tail);
    const auto h = *network.node_index(l.head);
    g.tail.push_back(t);
    g.head.push_back(h);
    g.weight.push_back(l.free_flow_time);
    g.out[t].push_back(a);
  }
  return g;
}

std::optional<std::vector<std::size_t>> shortest(const Graph& g, std::size_t source,
                                                 std::size_t target,
                                                 const std::vector<bool>& banned_link,
                                                 const std::vector<bool>& banned_node) {
  const auto inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(g.out.size(), inf);
  std::vector<std::size_t> via(g.out.size(), std::numeric_limits<std::size_t>::max());
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  dist[source] = 0.0;
  heap.push({0.0, source});
  while (!heap.empty()) {
    auto [d, u] = heap.top();
    heap.pop();
    if (d > dist[u]) continue;
    if (u == target) break;
    for (auto a : g.out[u]) {
      if (banned_link[a]) continue;
      const auto w = g.head[a];
      if (banned_node[w]) continue;
      const double nd = d + g.weight[a];
      if (nd < dist[w]) {
        dist[w] = nd;
        via[w] = a;
        heap.push({nd, w});
      }
    }
  }
  if (dist[target] == inf) return std::nullopt;
  std::vector<std::size_t> links;
  for (auto u = target; u != source; u = g.tail[via[u]]) links.push_back(via[u]);
  std::reverse(links.begin(), links.end());
  return links;
}

// Sort key: cost rounded to 1e-9 hr so that equal sums in different order
// compare equal, then the link id sequence.
struct Candidate {
  long long cost_key;
  std::vector<LinkId> ids;
  std::vector<std::size_t> links;

  bool operator<(const Candidate& o) const {
    if (cost_key != o.cost_key) return cost_key < o.cost_key;
    return ids < o.ids;
  }
};

Candidate make_candidate(const Network& network, std::vector<std::size_t> links) {
  double cost = 0.0;
  std::vector<LinkId> ids;
  for (auto a : links) {
    cost += network.link(a).free_flow_time;
    ids.push_back(network.link(a).id);
  }
  return {std::llround(cost * 1e9), std::move(ids), std::move(links)};
}

std::vector<std::vector<std::size_t>> yen(const Network& network, const Graph& g,
                                          std::size_t source, std::size_t target, std::size_t k) {
  std::vector<bool> no_links(g.tail.size(), false);
  std::vector<bool> no_nodes(g.out.size(), false);
  auto first = shortest(g, source, target, no_links, no_nodes);
  if (!first) return {};

  std::vector<Candidate> accepted{make_candidate(network, *first)};
  std::set<Candidate> pending;
  while (accepted.size() < k) {
    const auto& last = accepted.back().links;
    for (std::size_t i = 0; i < last.size(); ++i) {
      const auto spur = g.tail[last[i]];
      std::vector<std::size_t> root(last.begin(), last.begin() + static_cast<std::ptrdiff_t>(i));
      std::vector<bool> banned_link(g.tail.size(), false);
      std::vector<bool> banned_node(g.out.size(), false);
      for (const auto& c : accepted) {
        if (c.links.size() > i && std::equal(root.begin(), root.end(), c.links.begin())) {
          banned_link[c.links[i]] = true;
        }
      }
      for (auto a : root) banned_node[g.tail[a]] = true;
      auto tail = shortest(g, spur, target, banned_link, banned_node);
      if (!tail) continue;
      root.insert(root.end(), tail->begin(), tail->end());
      pending.insert(make_candidate(network, std::move(root)));
    }
    bool added = false;
    while (!pending.empty() && !added) {
      auto best = *pending.begin();
      pending.erase(pending.begin());
      const bool duplicate = std::any_of(accepted.begin(), accepted.end(),
                                         [&](const Candidate& c) { return c.links == best.links; });
      if (!duplicate) {
        accepted.push_back(std::move(best));
        added = true;
      }
    }
    if (!added) break;
  }
  std::sort(accepted.begin(), accepted.end());
  std::vector<std::vector<std::size_t>> out;
  for (auto& c : accepted) out.push_back(std::move(c.links));
  return out;
}

}  // namespace

PathSet enumerate_paths(const Network& network, std::size_t k) {
  if (k == 0) throw InputError("k must be >= 1");
  const auto g = make_graph(network);
  std::vector<Path> paths;
  std::vector<std::string> issues;
  const auto ods = network.od_pairs();
  for (std::size_t r = 0; r < ods.size(); ++r) {
    const auto found = yen(network, g, *network.node_index(ods[r].origin),
                           *network.node_index(ods[r].destination), k);
    if (found.empty() && ods[r].demand > 0.0) {
      issues.push_back("OD pair " + od_name(ods[r]) + " is disconnected");
    }
    for (const auto& links : found) paths.push_back({r, links});
  }
  if (!issues.empty()) throw InputError(std::move(issues));
  return PathSet(network, std::move(paths));
}

PathSet load_path_set(std::istream& source, const Network& network) {
  std::map<std::pair<NodeId, NodeId>, std::size_t> od_index;
  const auto ods = network.od_pairs();
  for (std::size_t r = 0; r < ods.size(); ++r) od_index[{ods[r].origin, ods[r].destination}] = r;

  std::vector<Path> paths;
  std::string line;
  std::size_t number = 0;
  bool first_row = true;
  while (std::getline(source, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto fields = csv::split(line);
    if (fields.size() == 1 && (fields[0].empty() || fields[0].front() == '#')) continue;
    const auto where = "path file line " + std::to_string(number);
    auto o = fields.empty() ? std::nullopt : csv::to_int(fields[0]);
    if (first_row) {
      first_row = false;
      if (!o) continue;  // header
    }
    if (fields.size() < 3 || !o) throw InputError(where + ": expected origin,destination,links");
    auto d = csv::to_int(fields[1]);
    if (!d) throw InputError(where + ": unparseable destination '" + fields[1] + "'");
    auto it = od_index.find({*o, *d});
    if (it == od_index.end()) {
      throw InputError(where + ": OD pair " + std::to_string(*o) + "->" + std::to_string(*d) +
                       " has no demand entry");
    }
    // A link list written without quotes may have been split on commas.
    std::string list;
    for (std::size_t i = 2; i < fields.size(); ++i) list += (i > 2 ? ";" : "") + fields[i];
    std::erase_if(list, [](char c) { return c == '[' || c == ']'; });
    std::replace(list.begin(), list.end(), ' ', ';');
    Path path{it->second, {}};
    for (const auto& token : csv::split(list, ';')) {
      if (token.empty()) continue;
      auto id = csv::to_int(token);
      if (!id) throw InputError(where + ": unparseable link id '" + token + "'");
      auto a = network.link_index(*id);
      if (!a) throw InputError(where + ": unknown link id " + std::to_string(*id));
      path.links.push_back(*a);
    }
    if (path.links.empty()) throw InputError(where + ": empty link list");
    try {
      PathSet(network.with_od_pairs({ods[path.od]}), {Path{0, path.links}});
    } catch (const InputError& e) {
      throw InputError(where + ": " + e.what());
    }
    paths.push_back(std::move(path));
  }
  return PathSet(network, std::move(paths));
}

void write_path_set(std::ostream& out, const PathSet& path_set, const Network& network) {
  out << "origin,destination,links\n";
  for (const auto& path : path_set.paths()) {
    const auto& od = network.od_pairs()[path.od];
    out << od.origin << ',' << od.destination << ',';
    for (std::size_t i = 0; i < path.links.size(); ++i) {
      out << (i ? ";" : "") << network.link(path.links[i]).id;
    }
    out << '\n';
  }
}

}  // namespace queuelib
