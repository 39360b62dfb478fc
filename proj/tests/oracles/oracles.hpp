#pragma once

#include <cstdint>
#include <functional>
#include <vector>

// Reference computations used only by tests. None of them calls into the
// library, so agreement with it is evidence rather than tautology.
namespace oracle {

struct Arc {
  std::int64_t id = 0;
  std::int64_t tail = 0;
  std::int64_t head = 0;
  double cost = 0.0;
};

// Every simple directed path from `origin` to `destination`, as link ids,
// sorted by total cost and then lexicographically by link ids.
std::vector<std::vector<std::int64_t>> all_simple_paths(const std::vector<Arc>& arcs,
                                                        std::int64_t origin,
                                                        std::int64_t destination);

double bpr(double t_f, double beta, double n, double v, double capacity);

// Scalar root of g on [lo, hi] by bisection; g(lo) and g(hi) must differ in sign.
double bisect(const std::function<double(double)>& g, double lo, double hi, int iterations = 200);

// Symmetric second-order central difference.
double central_difference(const std::function<double(double)>& f, double x, double h);

// Composite Simpson rule with `panels` (even) subintervals.
double simpson(const std::function<double(double)>& f, double a, double b, int panels);

// A path-based network description detached from the library types.
struct PathNetwork {
  struct LinkData {
    double t_f = 0.0;
    double capacity = 0.0;
  };
  std::vector<LinkData> links;
  std::vector<std::vector<int>> paths;  // link indices per path, tail-to-head
  std::vector<int> path_od;
  std::vector<double> demand;           // per OD
};

struct Params {
  double alpha = 0.5;
  double beta = 0.5;
  double m = 1.0;
  double n = 4.0;
  double gamma = 0.5;
  double phi = 2.718281828459045;
};

// Smoothed objective written from its definition: queues Q_ap are attributed
// per path, upstream queues on a path reduce the flow seen downstream, and
// the delay integral is evaluated by Simpson's rule.
double objective(const PathNetwork& net, const Params& p, const std::vector<double>& path_flow,
                 const std::vector<std::vector<double>>& path_queue);

// Pure BPR user equilibrium restricted to the given paths, by Frank-Wolfe
// with a bisection line search. Returns link flows.
std::vector<double> frank_wolfe_ue(const PathNetwork& net, double beta, double n,
                                   int iterations = 20000);

}  // namespace oracle
