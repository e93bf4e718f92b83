#pragma once

#include "mop/balance.hpp"
#include "mop/solver.hpp"

#include <iosfwd>
#include <optional>
#include <string>

namespace mop {

/// Raised for malformed or incomplete configuration files.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// t,x1..xN,value; one row per node per time level, nodes with axis 0 fastest.
void write_field_csv(std::ostream& os, const Field& u);

/// Binary snapshot, little-endian:
///   char[4] "MOPF", uint32 version = 1, uint32 N, uint32 levels, uint32 n[N],
///   float64 T, float64 lo[N], float64 hi[N],
///   float64 values[levels][n_N]...[n_1] (row-major, last axis fastest).
void write_field_binary(const std::string& path, const Field& u);
Field read_field_binary(const std::string& path);

/// level,t,half_norm_sq,dissipation,source,residual,modular_M,penalty,coercive
void write_ledger_csv(std::ostream& os, const SolveResult& r);

/// delta,s_probe,theta,capped followed by a summary comment line.
void write_balance_csv(std::ostream& os, const BalanceReport& r);

/// s,M,conjugate,biconjugate,conjugate_truncated along the first axis at (t, x).
void write_conjugate_table(std::ostream& os, const NFunctionSpec& M, double t, const SmallVec& x, double s_max,
                           int nodes);

/// theta,cauchy_next,penalty,modular_M,sup_l2_sq,completed
void write_continuation_csv(std::ostream& os, const ContinuationResult& c);

/// Parsed configuration. Blocks: grid, flux, data, solver, balance, nfun.
struct Config {
  std::string source;  // raw JSON text
  std::string path;

  static Config load(const std::string& path);
  static Config parse(const std::string& text, const std::string& base_dir = ".");

  bool has(const std::string& block) const;
  /// Problem from the grid, flux, data and solver blocks (theta from solver.theta, default 0).
  Problem problem() const;
  SolverOptions solver_options() const;
  std::vector<double> theta_ladder() const;  // solver.theta_ladder or the default
  bool has_theta_ladder() const;
  /// balance block: modular key, box, T, mode, p, delta_grid, per_axis, time_points, stability_check.
  std::pair<NFunctionSpec, BoxDomain> balance_target() const;
  ScanOptions scan_options() const;
  /// nfun block: modular key, dim, s_max, nodes, t, x.
  struct NfunTable {
    NFunctionSpec M;
    double t = 0;
    SmallVec x;
    double s_max = 10;
    int nodes = 64;
  };
  NfunTable nfun_table() const;

 private:
  std::string base_dir_ = ".";
};

/// Nearest-sample lookup of a CSV with header [t,]x1..xN,value.
ScalarFn csv_function(const std::string& path, int dim);

}  // namespace mop
