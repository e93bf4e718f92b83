#include "mop/catalog.hpp"
#include "mop/solver.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace mop;

namespace {

BoxDomain line_box(double T) { return {SmallVec::Zero(1), SmallVec::Ones(1), T}; }
BoxDomain square_box(double T) { return {SmallVec::Zero(2), SmallVec::Ones(2), T}; }

RegularizedFluxSpec flux(const std::string& key, int dim, FluxParams prm, double theta, const BoxDomain& om) {
  return regularize(flux_catalog(key, dim, prm, om), theta, om);
}

RegularizedFluxSpec heat(double T = 0.1) { return flux("p_laplace", 1, {{{"p", 2.0}}, {}}, 0.0, line_box(T)); }

Problem line_problem(const RegularizedFluxSpec& A, int nx, int nt, double T, ScalarFn f, ScalarFn u0) {
  return {GridDomain(SpaceGrid(SmallVec::Zero(1), SmallVec::Ones(1), nx + 1), T, nt), A, std::move(f), std::move(u0),
          {}};
}

double sin_pi(double, const SmallVec& x) { return std::sin(M_PI * x(0)); }

}  // namespace

TEST(StepOperator, ScatterGatherRoundTrip) {
  const GridDomain d(SpaceGrid(SmallVec::Zero(2), SmallVec::Ones(2), 6), 1.0, 1);
  const StepOperator op(d);
  EXPECT_EQ(op.unknowns(), 16);
  const Vec v = Vec::LinSpaced(16, 1, 16);
  const Vec nodal = op.scatter(v);
  EXPECT_EQ(nodal.size(), 36);
  EXPECT_DOUBLE_EQ(nodal.sum(), v.sum());
  EXPECT_EQ(op.gather(nodal), v);
}

TEST(StepOperator, JacobianMatchesResidualDifferences) {
  const BoxDomain om = square_box(1.0);
  const RegularizedFluxSpec A = flux("p_laplace", 2, {{{"p", 3.0}}, {}}, 0.0, om);
  const GridDomain d(SpaceGrid(SmallVec::Zero(2), SmallVec::Ones(2), 7), 1.0, 1);
  const StepOperator op(d);
  Vec u = Vec::Zero(d.space.node_count());
  for (int i = 0; i < d.space.node_count(); ++i)
    if (!d.space.on_boundary(i)) u(i) = std::sin(3 * d.space.node(i)(0)) + d.space.node(i)(1);
  const Vec prev = Vec::Zero(u.size()), f = Vec::Zero(u.size());
  const double dt = 0.01;
  const Eigen::SparseMatrix<double> J = op.jacobian(A, 0, dt, u);
  const Vec r0 = op.residual(A, 0, dt, u, prev, f);
  for (int k : {0, 5, 11}) {
    const double h = 1e-6;
    Vec e = Vec::Zero(op.unknowns());
    e(k) = h;
    const Vec r1 = op.residual(A, 0, dt, u + op.scatter(e), prev, f);
    const Vec col = J * Vec::Unit(op.unknowns(), k);
    EXPECT_LT(((r1 - r0) / h - col).cwiseAbs().maxCoeff(), 1e-5);
  }
}

TEST(Solve, ZeroDataZeroSolution) {
  const SolveResult r = solve(line_problem(heat(), 32, 8, 0.1, {}, {}));
  EXPECT_TRUE(r.completed);
  EXPECT_EQ(r.trajectory.sup_norm(), 0.0);
}

TEST(Solve, HeatDecaysAtDiscreteRate) {
  const int nx = 64, nt = 20;
  const double T = 0.1, dt = T / nt, h = 1.0 / nx;
  const SolveResult r = solve(line_problem(heat(T), nx, nt, T, {}, sin_pi));
  ASSERT_TRUE(r.completed);
  // sin(pi x) is an eigenvector of the discrete Laplacian
  const double lambda = 4 / (h * h) * std::pow(std::sin(M_PI * h / 2), 2);
  const double expect = std::pow(1 / (1 + dt * lambda), nt);
  const int mid = nx / 2;
  EXPECT_NEAR(r.trajectory.values(mid, nt), expect, 1e-10);
}

TEST(Solve, DirichletEnforced) {
  const SolveResult r = solve(line_problem(heat(), 16, 4, 0.1, [](double, const SmallVec&) { return 1.0; },
                                           [](double, const SmallVec&) { return 1.0; }));
  EXPECT_TRUE(r.trajectory.dirichlet_admissible());
}

TEST(Solve, EnergyLedgerBalancesToOrderDt) {
  const double r1 = energy_residual(solve(line_problem(heat(), 64, 50, 0.1, {}, sin_pi)), 50);
  const double r2 = energy_residual(solve(line_problem(heat(), 64, 100, 0.1, {}, sin_pi)), 100);
  EXPECT_NEAR(r1 / r2, 2.0, 0.4);
}

TEST(Solve, LedgerCoerciveAndMonotone) {
  const BoxDomain om = square_box(0.05);
  const RegularizedFluxSpec A = flux("double_phase", 2, {{{"p", 2.0}, {"q", 3.0}, {"alpha", 1.0}, {"a0", 1.0}}, {}}, 0.1, om);
  Problem p{GridDomain(SpaceGrid(SmallVec::Zero(2), SmallVec::Ones(2), 13), 0.05, 10), A,
            [](double, const SmallVec&) { return 1.0; },
            [](double, const SmallVec& x) { return std::sin(M_PI * x(0)) * std::sin(M_PI * x(1)); }, {}};
  const SolveResult r = solve(p);
  ASSERT_TRUE(r.completed);
  for (std::size_t i = 1; i < r.ledger.size(); ++i) {
    EXPECT_TRUE(r.ledger[i].coercive);
    EXPECT_GE(r.ledger[i].dissipation, r.ledger[i - 1].dissipation);
    EXPECT_GE(r.ledger[i].modular_M, r.ledger[i - 1].modular_M);
    EXPECT_GE(r.ledger[i].penalty, r.ledger[i - 1].penalty);
    EXPECT_GE(r.ledger[i].dissipation + 1e-12, r.ledger[i].modular_M);
  }
  EXPECT_GT(r.apriori.penalty, 0.0);
}

TEST(Solve, NonlinearNewtonConverges) {
  const RegularizedFluxSpec A = flux("p_laplace", 1, {{{"p", 3.0}}, {}}, 0.0, line_box(0.1));
  const SolveResult r = solve(line_problem(A, 32, 10, 0.1, [](double, const SmallVec&) { return 2.0; }, sin_pi));
  ASSERT_TRUE(r.completed);
  for (std::size_t n = 1; n < r.newton.size(); ++n) {
    EXPECT_FALSE(r.newton[n].picard);
    EXPECT_LE(r.newton[n].residual, 1e-10);
  }
}

TEST(Solve, PermutationAndNoiseDoNotChangeSolution) {
  const RegularizedFluxSpec A = flux("p_laplace", 1, {{{"p", 3.0}}, {}}, 0.0, line_box(0.1));
  const Problem p = line_problem(A, 32, 10, 0.1, {}, sin_pi);
  SolverOptions o;
  const SolveResult a = solve(p, o);
  o.permute_unknowns = true;
  o.guess_noise = 1e-2;
  o.seed = 99;
  const SolveResult b = solve(p, o);
  EXPECT_LT(l2_spacetime(a.trajectory, b.trajectory), 1e-9);
}

TEST(Solve, NonConvergenceReported) {
  const RegularizedFluxSpec A = flux("p_laplace", 1, {{{"p", 3.0}}, {}}, 0.0, line_box(0.1));
  SolverOptions o;
  o.max_iter = 1;
  o.picard_max = 1;
  o.tol_newton = 1e-300;
  const SolveResult r = solve(line_problem(A, 16, 4, 0.1, {}, sin_pi), o);
  EXPECT_FALSE(r.completed);
  EXPECT_FALSE(r.failure.empty());
  EXPECT_TRUE(std::isnan(r.trajectory.values(8, 4)));
}

TEST(Continuation, LadderValidation) {
  const Problem p = line_problem(heat(), 8, 2, 0.1, {}, sin_pi);
  EXPECT_THROW(theta_continuation(p, {0.1, 0.05, 0.025}), InvalidInput);
  EXPECT_THROW(theta_continuation(p, {0.1, 0.05, 0.06, 0.01}), InvalidInput);
  const auto ladder = default_theta_ladder();
  ASSERT_GE(ladder.size(), 4u);
  for (std::size_t i = 1; i < ladder.size(); ++i) EXPECT_LT(ladder[i], ladder[i - 1]);
}

TEST(Continuation, SmallDataIsCauchy) {
  const BoxDomain om = line_box(0.1);
  const RegularizedFluxSpec A = flux("double_phase", 1, {{{"p", 2.0}, {"q", 3.0}, {"alpha", 1.0}, {"a0", 1.0}}, {}}, 0.1, om);
  const Problem p = line_problem(A, 32, 20, 0.1, [](double, const SmallVec&) { return 0.5; },
                                 [](double, const SmallVec& x) { return 0.5 * std::sin(M_PI * x(0)); });
  const ContinuationResult c = theta_continuation(p, default_theta_ladder());
  ASSERT_TRUE(c.completed);
  EXPECT_EQ(c.cauchy.size(), c.thetas.size() - 1);
  EXPECT_TRUE(c.cauchy_decreasing);
  EXPECT_TRUE(c.penalty_decreasing);
  EXPECT_FALSE(c.non_cauchy);
}

TEST(Helpers, TruncateAndNorms) {
  const GridDomain d(SpaceGrid(SmallVec::Zero(1), SmallVec::Ones(1), 5), 1.0, 2);
  const Field u = Field::from_function(d, [](double t, const SmallVec& x) { return 4 * t * x(0) - 1; });
  const Field tk = truncate(u, 0.5);
  EXPECT_LE(tk.sup_norm(), 0.5);
  Field z(d);
  Field one = Field::from_function(d, [](double, const SmallVec&) { return 1.0; });
  // node-cell quadrature h^N per node, levels 1..nt with weight dt
  EXPECT_NEAR(l2_spacetime(z, one), std::sqrt(0.5 * 0.25 * 5 * 2), 1e-14);
  EXPECT_NEAR(l2_level(one, 1), std::sqrt(0.25 * 5), 1e-14);
}
