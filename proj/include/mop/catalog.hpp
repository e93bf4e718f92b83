#pragma once

#include "mop/expr.hpp"
#include "mop/nfunction.hpp"

namespace mop {

using WeightFn = std::function<double(double t, const SmallVec& x)>;

/// c |xi|^p
NFunctionSpec power_modular(int dim, double p, double c = 1.0);

/// |xi|^{p(t,x)}
NFunctionSpec variable_exponent_modular(int dim, WeightFn exponent, std::string label = "variable_exponent");

/// |xi|^p + a(t,x) |xi|^q
NFunctionSpec double_phase_modular(int dim, double p, double q, WeightFn weight,
                                   std::string label = "double_phase");

/// double phase with a(x) = a0 |x|^alpha
NFunctionSpec double_phase_modular(int dim, double p, double q, double alpha, double a0);

/// sum_i (|xi_i|^m1 + a(x) |xi_i|^m2) with a(x) = a |x| (separable, anisotropic)
NFunctionSpec orlicz_double_phase_modular(int dim, double m1, double m2, double a);

/// |xi| log^alpha(1 + |xi|)
NFunctionSpec llogl_modular(int dim, double alpha);

/// exp(|xi|) - 1 - |xi|
NFunctionSpec exp_growth_modular(int dim);

/// k(t,x) M0(|xi|) with M0 = radial power; weighted Orlicz example.
NFunctionSpec weighted_power_modular(int dim, double p, WeightFn weight);

/// Isotropic entry from a radial profile (and optional derivative / conjugate).
NFunctionSpec radial_modular(int dim, std::string name, std::function<double(double)> profile,
                             std::function<double(double)> derivative = {},
                             std::function<double(double)> conjugate = {});

/// Parse a catalog key such as "p_laplace(3)", "double_phase(2,3,1,1)",
/// "variable_exponent(2+0.5*x1)", "orlicz_double_phase(2,3,1)", "llogl(1)",
/// "exp_growth". The variable-exponent argument is an expression, or a path to
/// a file holding one.
NFunctionSpec make_modular(const std::string& key, int dim);

/// Splits "name(a,b,...)" at top-level commas.
std::pair<std::string, std::vector<std::string>> split_key(const std::string& key);

}  // namespace mop
