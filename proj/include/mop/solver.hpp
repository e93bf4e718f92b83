#pragma once

#include "mop/flux.hpp"
#include "mop/grid.hpp"

#include <optional>

namespace mop {

using ScalarFn = std::function<double(double t, const SmallVec& x)>;

/// du/dt - div A_theta(t, x, grad u) = f on Omega_T, u = 0 on the boundary, u(0) = u0.
struct Problem {
  GridDomain domain;
  RegularizedFluxSpec flux;
  ScalarFn f;      // empty: zero source
  ScalarFn u0;     // empty: zero initial datum
  ScalarFn exact;  // optional, for error reporting
};

struct SolverOptions {
  double tol_newton = 1e-10;
  int max_iter = 50;
  int picard_max = 500;
  int armijo_halvings = 30;
  double guess_noise = 0;  // amplitude of a seeded perturbation of the Newton initial guess
  bool permute_unknowns = false;
  unsigned seed = 12345;
};

struct StepStats {
  int iterations = 0;
  int picard_iterations = 0;
  double residual = 0;
  bool picard = false;
};

/// Discrete operator for one grid: interior unknowns, simplex gradients,
/// residual and finite-difference Jacobian of one backward-Euler step.
class StepOperator {
 public:
  explicit StepOperator(const GridDomain& d);

  const SimplexMesh& mesh() const { return mesh_; }
  const std::vector<int>& interior() const { return interior_; }
  int unknowns() const { return static_cast<int>(interior_.size()); }

  /// Flux A_theta(t, barycentre, grad u) on every simplex, dim x simplices.
  Mat flux_field(const RegularizedFluxSpec& A, double t, const Vec& u) const;
  /// div_h of a simplex field, at nodes.
  Vec divergence(const Mat& V) const { return mesh_.divergence(V); }

  /// Scaled residual (u - u_prev) - dt (div_h A(grad u) + f) on interior nodes.
  Vec residual(const RegularizedFluxSpec& A, double t, double dt, const Vec& u, const Vec& u_prev,
               const Vec& f) const;

  /// I + dt (vol / h^N) G^T D G on interior unknowns, D = finite-difference dA/dxi per simplex.
  Eigen::SparseMatrix<double> jacobian(const RegularizedFluxSpec& A, double t, double dt, const Vec& u) const;
  /// Same structure with D = k I, k = |A(xi)| / |xi| lagged (Picard).
  Eigen::SparseMatrix<double> picard_matrix(const RegularizedFluxSpec& A, double t, double dt, const Vec& u) const;

  Vec scatter(const Vec& interior_values) const;
  Vec gather(const Vec& nodal) const;

 private:
  Eigen::SparseMatrix<double> assemble(const std::vector<Eigen::Triplet<double>>& blocks, double dt) const;

  GridDomain domain_;
  SimplexMesh mesh_;
  std::vector<int> interior_;
  Eigen::SparseMatrix<double> G_int_;  // gradient restricted to interior columns
};

/// One backward-Euler step from u_prev (nodal) to time t. Throws NonConvergence.
Vec step_implicit(const StepOperator& op, const Vec& u_prev, const RegularizedFluxSpec& flux, const Vec& f_slice,
                  double t, double dt, const SolverOptions& opts = {}, StepStats* stats = nullptr,
                  const Vec* initial_guess = nullptr);

struct EnergyRow {
  int level = 0;
  double t = 0;
  double half_norm_sq = 0;    // 1/2 ||u(t)||^2
  double dissipation = 0;     // int_0^t int A_theta . grad u
  double source = 0;          // int_0^t int f u
  double residual = 0;        // 1/2||u(t)||^2 - 1/2||u0||^2 + dissipation - source
  double modular_M = 0;       // int_0^t int M(grad u)
  double penalty = 0;         // theta int_0^t int m*(grad m(grad u))
  bool coercive = true;       // A_theta(xi).xi >= M(xi) summed over this step
};

struct Apriori {
  double sup_l2_sq = 0;  // sup_t ||u(t)||^2
  double modular_M = 0;  // int_{Omega_T} M(grad u)
  double penalty = 0;    // theta int_{Omega_T} m*(grad m(grad u))
};

struct SolveResult {
  Field trajectory;
  Field source;
  std::vector<EnergyRow> ledger;
  Apriori apriori;
  std::vector<StepStats> newton;
  RegularizedFluxSpec flux;
  bool completed = true;
  std::string failure;
  double last_residual = 0;
};

SolveResult solve(const Problem& problem, const SolverOptions& opts = {}, const Field* warm_start = nullptr);

/// |1/2||u(tau)||^2 - 1/2||u0||^2 + int A.grad u - int f u| at time level tau.
double energy_residual(const SolveResult& result, int level);

struct ContinuationResult {
  std::vector<double> thetas;
  std::vector<SolveResult> runs;
  std::vector<double> cauchy;         // ||u^theta_k - u^theta_{k+1}||_{L2(Omega_T)}
  std::vector<double> penalty;        // theta int m*(grad m(grad u^theta))
  bool cauchy_decreasing = true;
  bool penalty_decreasing = true;
  bool non_cauchy = false;
  bool completed = true;
};

std::vector<double> default_theta_ladder();

ContinuationResult theta_continuation(const Problem& problem, const std::vector<double>& ladder,
                                      const SolverOptions& opts = {});

/// Pointwise T_k.
Field truncate(const Field& u, double k);

/// L2(Omega_T) distance, right-rectangle in time over levels 1..nt.
double l2_spacetime(const Field& a, const Field& b);
/// L2(Omega) norm of one time level.
double l2_level(const Field& a, int level);

/// A_theta(grad u) on the simplices at one level.
Mat flux_field(const SolveResult& result, int level);

}  // namespace mop
