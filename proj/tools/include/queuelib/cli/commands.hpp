#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "queuelib/cli/scenario.hpp"
#include "queuelib/sweep.hpp"

namespace queuelib::cli {

enum ExitCode : int { exit_ok = 0, exit_input_error = 1, exit_not_converged = 2 };

// Each command prints a short report to `out`, errors to `err`, and writes
// its files under config.out.

// links.csv, paths.csv, convergence.csv, summary.txt
int cmd_solve(const ScenarioConfig& config, std::ostream& out, std::ostream& err);

// compare.csv: one row per variant per link. An empty variant list runs all four.
int cmd_compare(const ScenarioConfig& config, const std::vector<LinkId>& links,
                const std::vector<Variant>& variants, std::ostream& out, std::ostream& err);

struct SweepRequest {
  std::string parameter;
  std::vector<double> values;
  std::optional<std::pair<NodeId, NodeId>> od;  // required for demand sweeps
  std::vector<LinkId> tracked;
  std::vector<std::string> expectations;  // see parse_expectation
};

// Expectation syntax:
//   monotone:LINK:COLUMN:increasing|decreasing[:strict]
//   value:LINK:COLUMN:AT:EXPECTED:TOLERANCE
//   bottleneck:LINK
//   relief:LINK:UPSTREAM[,UPSTREAM...]
// COLUMN is one of flow, queue, capacity, delay, running_time, generalized_cost.
Expectation parse_expectation(std::string_view text, const Network& network);

// sweep.csv plus trends.txt; exit 0 iff every row converged and every
// expectation holds.
int cmd_sweep(const ScenarioConfig& config, const SweepRequest& request, std::ostream& out,
              std::ostream& err);

// Input validation plus an analytic-versus-finite-difference gradient check
// at a seeded random feasible point.
int cmd_validate(const ScenarioConfig& config, double gradient_tolerance, std::ostream& out,
                 std::ostream& err);

// Entry point shared by the executable and the CLI tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace queuelib::cli
