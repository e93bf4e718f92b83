#pragma once

#include "mop/solver.hpp"

#include <iosfwd>
#include <map>

namespace mop {

struct ComparisonResult {
  double max_violation = 0;  // max over nodes and levels of u1 - u2
  double tol = 0;
  bool pass = false;
  bool completed = true;
  // int_{l < |u1| < l+1} A(grad u1) . grad u1 for l = 0, 1, ...; discrete analog
  // of the flux-decay hypothesis, reported next to the verdict
  std::vector<double> decay_profile;
  bool decay_ok = true;
};

/// Solves both problems and reports max(u1 - u2). Requires f1 <= f2 and
/// u01 <= u02 at the nodes, a shared grid and flux, and a monotone flux sample.
ComparisonResult comparison_test(const Problem& p1, const Problem& p2, const SolverOptions& opts = {});

struct UniquenessResult {
  double max_distance = 0;
  std::vector<double> distances;  // all pairs, L2(Omega_T)
  bool completed = true;
};

/// Restarts vary the Newton initial guess (seeded noise) and the unknown ordering.
UniquenessResult uniqueness_test(const Problem& problem, int n_restarts, const SolverOptions& opts = {},
                                 double guess_noise = 1e-2);

struct Rung {
  int nx = 0;
  int nt = 0;
};

struct ConvergenceRow {
  Rung rung;
  double dx = 0;
  double dt = 0;
  double l2_error = 0;     // L2(Omega_T)
  double final_error = 0;  // L2(Omega) at t = T
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> space;
  std::vector<ConvergenceRow> time;
  double space_order = 0;  // least-squares slope of log error against log dx
  double time_order = 0;   // same against log dt
  bool monotone = true;    // errors decrease along both ladders
  bool completed = true;
};

/// Source f = du/dt - div A(grad u) from fourth-order central differences of
/// the exact solution callable.
ScalarFn manufactured_source(const RegularizedFluxSpec& flux, const ScalarFn& exact);

/// Runs the exact solution through both ladders on the box [lo, hi] x (0, T).
/// f empty: manufactured_source; u0 = exact(0, .).
ConvergenceReport manufactured_convergence(const RegularizedFluxSpec& flux, const ScalarFn& exact,
                                           const SmallVec& lo, const SmallVec& hi, double T,
                                           const std::vector<Rung>& space_ladder,
                                           const std::vector<Rung>& time_ladder, ScalarFn f = {},
                                           const SolverOptions& opts = {});

/// Least-squares slope of log y against log x.
double observed_order(const std::vector<double>& steps, const std::vector<double>& errors);

struct LinfBound {
  double sup_abs = 0;
  double bound = 0;      // ||u0||_inf + T ||f||_inf
  double sup_l2_sq = 0;  // sup_t ||u(t)||^2
  bool pass = false;     // the L2 monitor is finite and the run completed
  bool within_heuristic = false;
};

LinfBound linf_bound_test(const Problem& problem, const SolverOptions& opts = {});

/// -sum (u - u0) d_t xi + sum A . grad_h xi - sum f xi over Omega_T. xi must
/// vanish on the boundary of Omega and at t = T.
double ibp_residual_test(const SolveResult& result, const ScalarFn& xi);

struct CaseResult {
  std::string name;
  bool pass = false;
  double seconds = 0;
  std::string message;
  std::map<std::string, double> metrics;
};

struct SuiteReport {
  std::string suite;
  std::vector<CaseResult> cases;
  bool pass() const;
};

const std::vector<std::string>& suite_names();

/// Throws InvalidInput for an unknown suite; "all" runs every suite in turn.
std::vector<SuiteReport> run_suite(const std::string& name, unsigned seed = 12345);

void write_junit(std::ostream& os, const std::vector<SuiteReport>& reports);
/// suite,case,metric,value
void write_metrics_csv(std::ostream& os, const std::vector<SuiteReport>& reports);

}  // namespace mop
