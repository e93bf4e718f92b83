#pragma once

#include "mop/balance.hpp"
#include "mop/nfunction.hpp"

#include <map>
#include <optional>

namespace mop {

using FluxEval = std::function<SmallVec(double t, const SmallVec& x, const SmallVec& xi)>;

/// A(t, x, xi) with its governing modular M and coercivity constant c_A:
/// M <= A . xi and c_A M*(A) <= M.
struct FluxSpec {
  std::string name;
  int dim = 1;
  FluxEval A;
  NFunctionSpec M;
  double c_A = 1.0;
  bool time_invariant = true;

  SmallVec operator()(double t, const SmallVec& x, const SmallVec& xi) const { return A(t, x, xi); }
};

/// Catalog parameters: numbers by name plus expression strings (a, p, q, k).
struct FluxParams {
  std::map<std::string, double> values;
  std::map<std::string, std::string> expressions;

  double get(const std::string& key, double fallback) const;
  double require(const std::string& key) const;
  bool has(const std::string& key) const { return values.count(key) || expressions.count(key); }
};

struct FluxCheck {
  bool passed = true;
  std::string failed;  // name of the first failing invariant
  std::optional<Witness> witness;
  double min_monotonicity = 0;  // min (A(xi)-A(eta)).(xi-eta) / |xi-eta|^2
  double worst_growth = 0;      // max M - A . xi (should be <= 0)
  double worst_coercivity = 0;  // max c_A M*(A) - M (should be <= 0)
};

/// Randomised sample check of the growth/coercivity and monotonicity assumptions.
FluxCheck check_flux(const FluxSpec& F, const BoxDomain& omega, int samples = 1000, unsigned seed = 12345,
                     double xi_radius = 10.0, double tol_mono = 1e-10);

/// Keys: p_laplace, weighted_p_laplace, llogl, variable_exponent, double_phase,
/// var_double_phase, orlicz_double_phase. Throws InvalidInput if the sampled
/// invariants fail.
FluxSpec flux_catalog(const std::string& key, int dim, const FluxParams& params, const BoxDomain& omega,
                      int check_samples = 1000, unsigned seed = 12345);

/// A_theta = A + theta grad m.
struct RegularizedFluxSpec {
  FluxSpec base;
  NFunctionSpec m;
  double theta = 0;
  bool stub = false;  // theta = 0: comparison stub, no regularisation

  SmallVec operator()(double t, const SmallVec& x, const SmallVec& xi) const;
  RegularizedFluxSpec with_theta(double th) const;
};

struct RegularizeOptions {
  std::optional<NFunctionSpec> m;        // explicit regulariser; auto-selected when empty
  std::vector<double> ladder;            // |xi| ladder for the domination checks; default log [2, 1e3]
  int points_per_axis = 3;
};

/// Builds A_theta. m must dominate M on the ladder and grow essentially faster
/// (M/m decreasing); theta in (0, 1], theta = 0 gives a flagged stub.
RegularizedFluxSpec regularize(const FluxSpec& base, double theta, const BoxDomain& omega,
                               const RegularizeOptions& opts = {});

/// min over random pairs of (F(xi) - F(eta)).(xi - eta) / |xi - eta|^2.
double monotonicity_margin(const FluxEval& F, const BoxDomain& omega, int dim, int samples = 1000,
                           unsigned seed = 12345, double xi_radius = 10.0);

/// Symmetric truncation T_k.
inline double truncate(double s, double k) { return std::clamp(s, -k, k); }

}  // namespace mop
