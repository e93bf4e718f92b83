#pragma once

#include "mop/nfunction.hpp"

#include <optional>

namespace mop {

/// Omega_T = (0, T) x [lo, hi].
struct BoxDomain {
  SmallVec lo, hi;
  double T = 1.0;
  int dim() const { return static_cast<int>(lo.size()); }
};

/// Time interval [t_a, t_b) and a spatial cube of edge 2 delta centred at `center`.
/// The enlarged cube has the same centre and edge 4 delta.
struct Cylinder {
  double t_a = 0, t_b = 0;
  SmallVec center;
  double delta = 0;

  SmallVec cube_lo() const { return center.array() - delta; }
  SmallVec cube_hi() const { return center.array() + delta; }
  SmallVec enlarged_lo() const { return center.array() - 2 * delta; }
  SmallVec enlarged_hi() const { return center.array() + 2 * delta; }
};

struct CylinderSampling {
  int per_axis = 8;
  int time_points = 8;
};

/// min over sampled (t, x) in (I cap [0,T]) x (enlarged cube cap Omega) of M(t, x, xi).
double cylinder_infimum(const NFunctionSpec& M, const BoxDomain& omega, const Cylinder& c, const SmallVec& xi,
                        const CylinderSampling& sampling = {});

/// Convex envelope of s -> cylinder_infimum(M, c, s * direction) on the node plan.
SampledProfile<double> minorant_profile(const NFunctionSpec& M, const BoxDomain& omega, const Cylinder& c,
                                        const SmallVec& direction, const Eigen::ArrayXd& nodes,
                                        const CylinderSampling& sampling = {});

enum class ProbeMode { N, NOverP };

struct ScanOptions {
  std::vector<double> delta_grid{0.125, 0.0625, 0.03125, 0.015625, 0.0078125};
  ProbeMode mode = ProbeMode::N;
  std::optional<double> p;             // growth exponent for mode N/p; defaults to M.growth_exponent_p
  std::vector<SmallVec> directions;    // empty: axes + diagonals + 8 random (axis only for isotropic M)
  CylinderSampling sampling;
  double s_cap = 1e6;
  double xi_floor = 1.0;
  int profile_nodes = 48;
  double growth_factor = 2.0;          // allowed growth of R over the last three deltas
  double slope_limit = 0.25;           // allowed log-log slope of R against 1/delta on the same window
  double borderline_slope = 0.1;
  bool stability_check = false;        // rerun with doubled sampling resolution
  unsigned seed = 12345;
};

struct BalanceWitness {
  double delta = 0;
  double t = 0;
  SmallVec x;
  SmallVec xi;
};

struct BalanceReport {
  std::vector<double> delta_grid;
  std::vector<double> s_probe;
  std::vector<double> theta_values;
  std::vector<char> capped;
  bool pass = false;
  bool borderline = false;
  bool any_capped = false;
  std::optional<bool> stable;
  double slope = 0;
  BalanceWitness witness;
};

BalanceReport theta_scan(const NFunctionSpec& M, const BoxDomain& omega, const ScanOptions& opts = {});

/// Verdict rule applied to an R(delta) table.
void apply_verdict(BalanceReport& report, const ScanOptions& opts);

struct ProbePoint {
  double t = 0;
  SmallVec x;
};

struct IsotropicTable {
  std::vector<double> distances;  // sorted, distinct
  std::vector<double> s_ladder;
  Mat theta;                      // distances x s_ladder, nondecreasing in both
  std::size_t excluded = 0;
};

/// Smallest envelope, nondecreasing in each argument, dominating
/// M(t,x,s)/M(tau,y,s) over the probe pairs at d = |t - tau| + c_sp |x - y|.
/// c_sp defaults to sqrt(N).
IsotropicTable isotropic_theta(const NFunctionSpec& M, const std::vector<std::pair<ProbePoint, ProbePoint>>& pairs,
                               const std::vector<double>& s_ladder, std::optional<double> c_sp = std::nullopt);

struct ClosenessVerdict {
  bool pass = false;
  double threshold = 0;
  double margin = 0;
  bool trivial = false;  // q <= p
};

/// Closed-form balance verdict for |xi|^p + a |xi|^q with a of Hoelder exponent alpha:
/// pass iff alpha >= N (q - p) (mode N) or alpha >= N (q - p) / p (mode N/p).
ClosenessVerdict double_phase_closeness(double p, double q, double alpha, int N, ProbeMode mode);

}  // namespace mop
