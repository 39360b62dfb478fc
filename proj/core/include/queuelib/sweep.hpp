#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "queuelib/network.hpp"
#include "queuelib/solver.hpp"

namespace queuelib {

enum class SweepParameter { gamma, m, n, demand };

std::string_view to_string(SweepParameter parameter);
std::optional<SweepParameter> parse_sweep_parameter(std::string_view text);

struct SweepSpec {
  SweepParameter parameter = SweepParameter::gamma;
  std::vector<double> values;  // strictly increasing
  Network network;
  PathSet path_set;
  SolverOptions options;
  std::vector<LinkId> tracked;  // empty tracks every link
  std::size_t od = 0;           // swept OD pair for the demand parameter

  void validate() const;
};

struct SweepLink {
  LinkId link = 0;
  double flow = 0.0;
  double queue = 0.0;
  double capacity = 0.0;
  double delay = 0.0;
  double running_time = 0.0;
  double generalized_cost = 0.0;
};

struct SweepRow {
  double value = 0.0;
  bool converged = false;
  int iterations = 0;
  double gap = 0.0;
  std::vector<SweepLink> links;  // in tracked order

  const SweepLink* find(LinkId id) const;
};

// Independent fresh solves, one per value, run on up to QUEUELIB_THREADS
// threads (default: hardware concurrency). Rows come back in value order.
std::vector<SweepRow> run_sweep(const SweepSpec& spec);

// Demand on OD pair `od` from lo to hi inclusive in steps of `step`.
std::vector<SweepRow> demand_sweep(const Network& network, const PathSet& path_set,
                                   const SolverOptions& options, std::size_t od, double lo,
                                   double hi, double step, std::vector<LinkId> tracked = {});

std::vector<double> sweep_range(double lo, double hi, double step);

enum class Column { flow, queue, capacity, delay, running_time, generalized_cost };
enum class Direction { increasing, decreasing };

std::string_view to_string(Column column);

// Column is monotone across rows.
struct Monotone {
  LinkId link = 0;
  Column column = Column::flow;
  Direction direction = Direction::increasing;
  bool strict = false;
};

// Column equals `expected` within `tolerance` at the row with `value`.
struct ValueAt {
  LinkId link = 0;
  Column column = Column::flow;
  double value = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
};

// Bottleneck behaviour along a demand sweep: flow non-decreasing across the
// rows before the first queued row, never above C_max + 1e-6, and lower than
// at onset on the row after onset and on the last queued row.
struct BottleneckProfile {
  LinkId link = 0;
  double capacity = 0.0;
};

// Once `link` and one of `upstream` both carry a queue, some later row shows
// a smaller queue on `link` than the row before it.
struct QueueRelief {
  LinkId link = 0;
  std::vector<LinkId> upstream;
};

using Expectation = std::variant<Monotone, ValueAt, BottleneckProfile, QueueRelief>;

struct TrendResult {
  bool pass = true;
  std::vector<std::string> violations;
};

TrendResult trend_check(const std::vector<SweepRow>& rows,
                        const std::vector<Expectation>& expectations);

// Congestion threshold for sweep columns, matching is_congested.
bool queued(const SweepLink& link, double physical_capacity);

}  // namespace queuelib
