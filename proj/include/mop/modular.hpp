#pragma once

#include "mop/grid.hpp"
#include "mop/nfunction.hpp"

#include <optional>

namespace mop {

/// Quadrature of M(t, x, xi(t, x)) against the sample weights.
double modular(const NFunctionSpec& M, const VectorField& xi);

/// Same, with xi scaled by 1/lambda.
double modular_scaled(const NFunctionSpec& M, const VectorField& xi, double lambda);

struct LuxemburgOptions {
  double lambda_min = 1e-12;
  double lambda_max = 1e12;
  double rel_tol = 1e-8;
};

/// inf{lambda > 0 : modular(M, xi / lambda) <= 1} by bisection in log lambda.
double luxemburg_norm(const NFunctionSpec& M, const VectorField& xi, const LuxemburgOptions& opts = {});

/// Luxemburg norm for the conjugate modular evaluated through an accessor.
double luxemburg_norm_conjugate(const ConjugateAccessor& conj, const VectorField& eta,
                                const LuxemburgOptions& opts = {});

struct HolderCheck {
  double lhs = 0;
  double rhs = 0;
  bool pass = true;
};

HolderCheck holder_pairing_check(const NFunctionSpec& M, const VectorField& xi, const VectorField& eta,
                                 const ConjugateAccessor& conj, double tol = 1e-12);
HolderCheck holder_pairing_check(const NFunctionSpec& M, const VectorField& xi, const VectorField& eta);

struct ModularConvergence {
  std::optional<double> lambda;
  std::vector<double> decay;  // modular((xi_i - xi) / lambda) at the witness lambda, or at lambda = 1
};

ModularConvergence modular_convergence_test(const NFunctionSpec& M, const std::vector<VectorField>& sequence,
                                            const VectorField& limit, double tol = 1e-12);

struct PoincareCheck {
  double lhs = 0;
  double rhs = 0;
  double ratio = 0;
};

/// lhs = int B(|g|), rhs = int B(|grad g|) on the simplex quadrature.
PoincareCheck poincare_check(const NFunctionSpec& B, const Field& g);

/// sup_i int_{|xi_i| >= R} |xi_i| for each R of the ladder.
std::vector<double> tail_mass(const std::vector<VectorField>& family, const std::vector<double>& radii);

}  // namespace mop
