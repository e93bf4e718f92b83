#pragma once

#include "mop/profile.hpp"
#include "mop/types.hpp"

#include <optional>
#include <random>
#include <string>

namespace mop {

using ModularEval = std::function<double(double t, const SmallVec& x, const SmallVec& xi)>;
using RadialEval = std::function<double(double t, const SmallVec& x, double s)>;
using GradientEval = std::function<SmallVec(double t, const SmallVec& x, const SmallVec& xi)>;

/// A modular function M(t, x, xi) together with the structure the numerics
/// can exploit. `radial` is set for isotropic entries (M = radial(t,x,|xi|));
/// `components` for separable ones (M = sum_i components[i](t,x,|xi_i|)).
struct NFunctionSpec {
  std::string name;
  int dim = 1;
  ModularEval eval;
  bool isotropic = false;
  bool homogeneous = false;
  bool time_invariant = true;
  std::optional<ModularEval> analytic_conjugate;
  std::optional<GradientEval> gradient;
  std::optional<double> growth_exponent_p;
  double growth_constant = 1.0;
  RadialEval radial;
  RadialEval radial_conjugate;
  std::vector<RadialEval> components;

  double operator()(double t, const SmallVec& x, const SmallVec& xi) const { return eval(t, x, xi); }
  bool separable() const { return !components.empty(); }
};

/// Where check_axioms and friends sample (t, x).
struct SamplingPlan {
  std::vector<double> times;
  std::vector<SmallVec> points;
  double s_max = 10.0;
  double s_min = 1e-6;
  int directions = 16;
  int radii = 24;
  int segment_pairs = 200;
  unsigned seed = 12345;

  bool empty() const { return times.empty() || points.empty(); }
};

/// Sampling plan on a box [lo, hi] x [0, T] with `per_axis` points per axis.
SamplingPlan box_plan(const SmallVec& lo, const SmallVec& hi, double T, int per_axis, int time_samples,
                      double s_max);

struct Witness {
  double t = 0;
  SmallVec x;
  SmallVec xi;
};

struct AxiomResult {
  std::string axiom;
  bool passed = true;
  std::optional<Witness> witness;
};

struct AxiomReport {
  std::vector<AxiomResult> results;
  bool all_passed() const;
  const AxiomResult& get(const std::string& axiom) const;
};

/// Sampled N-function axioms: zero at origin, positivity, symmetry,
/// midpoint convexity, sublinearity at 0, superlinearity at infinity.
AxiomReport check_axioms(const NFunctionSpec& M, const SamplingPlan& plan);

struct ConjugateValue {
  double value = 0;
  bool truncated = false;
  SmallVec argmax;
};

struct ConjugateSearch {
  double radius = 1e3;
  int resolution = 2000;  // 1D nodes; for N-dimensional grids per-axis count is capped
  int refine_iterations = 80;
};

/// Brute-force sup over a ball of (xi . eta - M(xi)), refined locally.
/// Separable entries are dispatched to per-coordinate 1D searches.
ConjugateValue conjugate_nd(const NFunctionSpec& M, double t, const SmallVec& x, const SmallVec& eta,
                            const ConjugateSearch& search = {});

/// sup_{s in [0, radius]} (s*tau - f(s)) for a 1D profile callable; the
/// objective is concave for convex f so a grid scan followed by golden-section
/// refinement on the bracketing cell is exact to round-off.
ConjugateValue conjugate_radial(const std::function<double(double)>& f, double tau, const ConjugateSearch& search);

using ConjugateAccessor = std::function<ConjugateValue(double t, const SmallVec& x, const SmallVec& eta)>;

/// Analytic conjugate when registered, otherwise the numeric one
/// (radial for isotropic, per-coordinate for separable, brute force else).
ConjugateAccessor make_conjugate_accessor(const NFunctionSpec& M, const ConjugateSearch& search = {},
                                          bool prefer_analytic = true);

struct ConjugatePair {
  double t;
  SmallVec x;
  SmallVec xi;
  SmallVec eta;
};

struct ResidualStats {
  double min = 0, max = 0, mean = 0;
  std::size_t count = 0;
  std::size_t excluded_truncated = 0;
};

ResidualStats fenchel_young_residual(const NFunctionSpec& M, const ConjugateAccessor& conj,
                                     const std::vector<ConjugatePair>& pairs);

/// Gradient in xi; closed form when registered, else central differences
/// with step 1e-5 (1 + |xi|). Returns zero at xi = 0.
SmallVec flux_gradient(const NFunctionSpec& m, double t, const SmallVec& x, const SmallVec& xi);

/// g . xi - m(xi) - m*(g) for g = flux_gradient(xi) (zero in exact arithmetic).
double fy_equality_residual(const NFunctionSpec& m, const ConjugateAccessor& conj, double t, const SmallVec& x,
                            const SmallVec& xi);

struct Delta2Estimate {
  double constant = 0;  // sup of M(2 xi) / M(xi) over the samples
  bool unbounded = false;
  std::vector<double> ladder;
  std::vector<double> ratios;  // sup ratio at each ladder level
};

Delta2Estimate delta2_estimate(const NFunctionSpec& M, const SamplingPlan& plan, double xi0 = 1.0,
                               int levels = 25);

/// Deterministic unit directions: coordinate axes, diagonals, then `random_extra` random ones.
std::vector<SmallVec> ray_directions(int dim, int random_extra, unsigned seed);

/// d log M / d log s at large s along coordinate directions, for auto-selecting regularisers.
double empirical_growth_exponent(const NFunctionSpec& M, double t, const SmallVec& x, double s_lo = 10.0,
                                 double s_hi = 100.0);

}  // namespace mop
