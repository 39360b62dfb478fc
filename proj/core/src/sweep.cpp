#include "queuelib/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "queuelib/analysis.hpp"
#include "queuelib/error.hpp"

namespace queuelib {

std::string_view to_string(SweepParameter parameter) {
  switch (parameter) {
    case SweepParameter::gamma: return "gamma";
    case SweepParameter::m: return "m";
    case SweepParameter::n: return "n";
    case SweepParameter::demand: return "demand";
  }
  return "?";
}

std::optional<SweepParameter> parse_sweep_parameter(std::string_view text) {
  for (auto p : {SweepParameter::gamma, SweepParameter::m, SweepParameter::n,
                 SweepParameter::demand}) {
    if (text == to_string(p)) return p;
  }
  return std::nullopt;
}

std::string_view to_string(Column column) {
  switch (column) {
    case Column::flow: return "flow";
    case Column::queue: return "queue";
    case Column::capacity: return "capacity";
    case Column::delay: return "delay";
    case Column::running_time: return "running_time";
    case Column::generalized_cost: return "generalized_cost";
  }
  return "?";
}

const SweepLink* SweepRow::find(LinkId id) const {
  for (const auto& l : links) {
    if (l.link == id) return &l;
  }
  return nullptr;
}

bool queued(const SweepLink& link, double physical_capacity) {
  return link.queue > 1e-6 * physical_capacity;
}

namespace {

Network network_for(const SweepSpec& spec, double value) {
  auto params = spec.network.default_params();
  switch (spec.parameter) {
    case SweepParameter::gamma: params.gamma = value; break;
    case SweepParameter::m: params.m = value; break;
    case SweepParameter::n: params.n = value; break;
    case SweepParameter::demand: return spec.network.with_demand(spec.od, value);
  }
  return spec.network.with_params(params);
}

}  // namespace

void SweepSpec::validate() const {
  if (values.empty()) throw InputError("sweep needs at least one value");
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (!(values[i] > values[i - 1])) throw InputError("sweep values must be strictly increasing");
  }
  for (auto id : tracked) network.require_link(id);
  if (parameter == SweepParameter::demand) {
    if (od >= network.od_pairs().size()) throw InputError("swept OD pair does not exist");
    if (values.front() < 0.0) throw InputError("demand values must be >= 0");
    return;
  }
  for (double v : values) network_for(*this, v).default_params().validate();
}

namespace {

SweepRow run_point(const SweepSpec& spec, const Network& network, double value,
                   const std::vector<std::size_t>& links) {
  const auto result = solve(network, spec.path_set, spec.options);
  SweepRow row;
  row.value = value;
  row.converged = result.report.status == SolveStatus::converged;
  row.iterations = result.report.iterations;
  row.gap = kkt_report(network, spec.path_set, result, spec.options.variant).relative_gap;
  const auto& s = result.state;
  for (auto a : links) {
    row.links.push_back({network.link(a).id, s.loads.flow[a], s.loads.queue[a], s.capacity[a],
                         s.delay[a], s.running_time[a], s.link_cost[a]});
  }
  return row;
}

std::size_t thread_budget() {
  if (const char* env = std::getenv("QUEUELIB_THREADS")) {
    const long n = std::strtol(env, nullptr, 10);
    if (n >= 1) return static_cast<std::size_t>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace

std::vector<SweepRow> run_sweep(const SweepSpec& spec) {
  spec.validate();
  std::vector<std::size_t> links;
  if (spec.tracked.empty()) {
    for (std::size_t a = 0; a < spec.network.link_count(); ++a) links.push_back(a);
  } else {
    for (auto id : spec.tracked) links.push_back(spec.network.require_link(id));
  }
  // Build every scenario up front so invalid values fail before any solve.
  std::vector<Network> networks;
  for (double v : spec.values) networks.push_back(network_for(spec, v));

  std::vector<SweepRow> rows(spec.values.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < rows.size(); i = next++) {
      try {
        rows[i] = run_point(spec, networks[i], spec.values[i], links);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const auto count = std::min(thread_budget(), rows.size());
  if (count <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < count; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return rows;
}

std::vector<double> sweep_range(double lo, double hi, double step) {
  if (!(step > 0.0)) throw InputError("sweep step must be > 0");
  if (!(hi >= lo)) throw InputError("sweep range must have hi >= lo");
  const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  std::vector<double> values;
  for (std::size_t i = 0; i < count; ++i) values.push_back(lo + static_cast<double>(i) * step);
  return values;
}

std::vector<SweepRow> demand_sweep(const Network& network, const PathSet& path_set,
                                   const SolverOptions& options, std::size_t od, double lo,
                                   double hi, double step, std::vector<LinkId> tracked) {
  if (lo < 0.0) throw InputError("demand range must start at >= 0");
  SweepSpec spec;
  spec.parameter = SweepParameter::demand;
  spec.values = sweep_range(lo, hi, step);
  spec.network = network;
  spec.path_set = path_set;
  spec.options = options;
  spec.tracked = std::move(tracked);
  spec.od = od;
  return run_sweep(spec);
}

namespace {

double column_value(const SweepLink& l, Column c) {
  switch (c) {
    case Column::flow: return l.flow;
    case Column::queue: return l.queue;
    case Column::capacity: return l.capacity;
    case Column::delay: return l.delay;
    case Column::running_time: return l.running_time;
    case Column::generalized_cost: return l.generalized_cost;
  }
  return 0.0;
}

std::string fmt(double x) {
  std::ostringstream s;
  s.precision(6);
  s << x;
  return s.str();
}

struct Checker {
  const std::vector<SweepRow>& rows;
  TrendResult& out;

  void fail(std::string message) {
    out.pass = false;
    out.violations.push_back(std::move(message));
  }

  const SweepLink* at(std::size_t i, LinkId id) {
    const auto* l = rows[i].find(id);
    if (!l) fail("link " + std::to_string(id) + " is not tracked");
    return l;
  }

  void operator()(const Monotone& e) {
    const bool up = e.direction == Direction::increasing;
    for (std::size_t i = 1; i < rows.size(); ++i) {
      const auto* a = at(i - 1, e.link);
      const auto* b = at(i, e.link);
      if (!a || !b) return;
      const double x = column_value(*a, e.column);
      const double y = column_value(*b, e.column);
      const double tol = 1e-9 * std::max(1.0, std::abs(x));
      const bool ok = e.strict ? (up ? y > x : y < x) : (up ? y >= x - tol : y <= x + tol);
      if (!ok) {
        fail("link " + std::to_string(e.link) + " " + std::string(to_string(e.column)) + " not " +
             (e.strict ? "strictly " : "") + (up ? "increasing" : "decreasing") + " from " +
             fmt(rows[i - 1].value) + " to " + fmt(rows[i].value) + " (" + fmt(x) + " -> " +
             fmt(y) + ")");
      }
    }
  }

  void operator()(const ValueAt& e) {
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (std::abs(rows[i].value - e.value) > 1e-12 * std::max(1.0, std::abs(e.value))) continue;
      const auto* l = at(i, e.link);
      if (!l) return;
      const double x = column_value(*l, e.column);
      if (std::abs(x - e.expected) > e.tolerance) {
        fail("link " + std::to_string(e.link) + " " + std::string(to_string(e.column)) + " at " +
             fmt(e.value) + " is " + fmt(x) + ", expected " + fmt(e.expected) + " +/- " +
             fmt(e.tolerance));
      }
      return;
    }
    fail("no row with value " + fmt(e.value));
  }

  void operator()(const BottleneckProfile& e) {
    const auto id = std::to_string(e.link);
    std::optional<std::size_t> onset;
    std::optional<std::size_t> last_queued;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto* l = at(i, e.link);
      if (!l) return;
      if (l->flow > e.capacity + 1e-6) {
        fail("link " + id + " flow " + fmt(l->flow) + " exceeds capacity at " + fmt(rows[i].value));
      }
      if (queued(*l, e.capacity)) {
        if (!onset) onset = i;
        last_queued = i;
      }
      if (i > 0 && !onset) {
        const double prev = rows[i - 1].find(e.link)->flow;
        if (l->flow < prev - 1e-6) {
          fail("link " + id + " flow decreases before its queue forms (" + fmt(rows[i - 1].value) +
               " -> " + fmt(rows[i].value) + ")");
        }
      }
    }
    if (!onset) return;
    const double first = rows[*onset].find(e.link)->flow;
    if (*onset + 1 < rows.size()) {
      const double next = rows[*onset + 1].find(e.link)->flow;
      if (!(next < first)) {
        fail("link " + id + " flow does not decrease after its queue forms at " +
             fmt(rows[*onset].value));
      }
    }
    if (*last_queued > *onset && !(rows[*last_queued].find(e.link)->flow < first)) {
      fail("link " + id + " flow on the last queued row is not below the flow at queue onset");
    }
  }

  void operator()(const QueueRelief& e) {
    const auto id = std::to_string(e.link);
    std::optional<std::size_t> start;
    for (std::size_t i = 0; i < rows.size() && !start; ++i) {
      const auto* l = at(i, e.link);
      if (!l) return;
      if (l->queue <= 1e-9) continue;
      for (auto up : e.upstream) {
        const auto* u = at(i, up);
        if (u && u->queue > 1e-9) start = i;
      }
    }
    if (!start) {
      fail("link " + id + " never carries a queue while an upstream link queues");
      return;
    }
    for (std::size_t i = *start + 1; i < rows.size(); ++i) {
      if (rows[i].find(e.link)->queue < rows[i - 1].find(e.link)->queue - 1e-9) return;
    }
    fail("link " + id + " queue never decreases after upstream queuing begins at " +
         fmt(rows[*start].value));
  }
};

}  // namespace

TrendResult trend_check(const std::vector<SweepRow>& rows,
                        const std::vector<Expectation>& expectations) {
  TrendResult out;
  Checker check{rows, out};
  for (const auto& e : expectations) std::visit(check, e);
  return out;
}

}  // namespace queuelib
