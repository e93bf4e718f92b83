#include "mop/balance.hpp"
#include "mop/catalog.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace mop;

namespace {

SmallVec v2(double a, double b) {
  SmallVec v(2);
  v << a, b;
  return v;
}

BoxDomain unit_square() { return {SmallVec::Zero(2), SmallVec::Ones(2), 1.0}; }

NFunctionSpec anisotropic_homogeneous() {
  NFunctionSpec M;
  M.name = "aniso";
  M.dim = 2;
  M.homogeneous = true;
  M.eval = [](double, const SmallVec&, const SmallVec& xi) {
    return std::pow(std::abs(xi(0)), 3) + std::pow(std::abs(xi(1)), 1.5);
  };
  return M;
}

}  // namespace

TEST(CylinderInfimum, HomogeneousIsExact) {
  const NFunctionSpec M = power_modular(2, 3);
  const Cylinder c{0.0, 0.25, v2(0.5, 0.5), 0.125};
  EXPECT_DOUBLE_EQ(cylinder_infimum(M, unit_square(), c, v2(3, 4)), 125.0);
  EXPECT_DOUBLE_EQ(cylinder_infimum(M, unit_square(), c, SmallVec::Zero(2)), 0.0);
}

TEST(CylinderInfimum, VariableExponentTakesSmallestPower) {
  const NFunctionSpec M = make_modular("variable_exponent(2+x1)", 2);
  // enlarged cube [0, 0.1]^2
  const Cylinder c{0.0, 0.05, v2(0.05, 0.05), 0.025};
  EXPECT_NEAR(cylinder_infimum(M, unit_square(), c, v2(10, 0)), 100.0, 1e-9);
}

TEST(CylinderInfimum, Errors) {
  const NFunctionSpec M = power_modular(2, 2);
  EXPECT_THROW(cylinder_infimum(M, unit_square(), {0.0, 0.1, v2(5, 5), 0.1}, v2(1, 0)), InvalidInput);
  EXPECT_THROW(cylinder_infimum(M, unit_square(), {2.0, 3.0, v2(0.5, 0.5), 0.1}, v2(1, 0)), InvalidInput);
  EXPECT_THROW(cylinder_infimum(M, unit_square(), {0.0, 0.1, v2(0.5, 0.5), 0.1}, v2(1, 0), {4, 8}), InvalidInput);
}

TEST(CylinderInfimum, NonincreasingUnderEnlargement) {
  const NFunctionSpec M = make_modular("double_phase(2,3,1,1)", 2);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.2, 0.8), s(0.5, 20.0);
  for (int i = 0; i < 30; ++i) {
    const SmallVec c = v2(u(rng), u(rng)), xi = v2(s(rng), s(rng));
    const Cylinder small{0.2, 0.3, c, 0.05}, big{0.1, 0.4, c, 0.1};
    EXPECT_LE(cylinder_infimum(M, unit_square(), big, xi), cylinder_infimum(M, unit_square(), small, xi) + 1e-12);
  }
}

TEST(MinorantProfile, HomogeneousEqualsRadialRestriction) {
  const NFunctionSpec M = power_modular(2, 2.5);
  const auto nodes = log_nodes_with_zero<double>(1e-2, 100.0, 40);
  const auto prof = minorant_profile(M, unit_square(), {0.0, 0.1, v2(0.5, 0.5), 0.1}, v2(0.6, 0.8), nodes);
  for (Eigen::Index k = 0; k < nodes.size(); ++k) EXPECT_NEAR(prof.values(k), std::pow(nodes(k), 2.5), 1e-9 * (1 + prof.values(k)));
}

TEST(MinorantProfile, VanishingWeightKillsSecondPhase) {
  const NFunctionSpec M = double_phase_modular(2, 2, 3, 1.0, 1.0);
  const auto nodes = log_nodes_with_zero<double>(1e-2, 100.0, 40);
  // the enlarged cube contains the origin where a = 0
  const auto prof = minorant_profile(M, unit_square(), {0.0, 0.1, v2(0.05, 0.05), 0.05}, v2(1, 0), nodes);
  for (Eigen::Index k = 0; k < nodes.size(); ++k) EXPECT_NEAR(prof.values(k), nodes(k) * nodes(k), 1e-9 * (1 + nodes(k) * nodes(k)));
}

TEST(MinorantProfile, BelowInfimumAndConvex) {
  const NFunctionSpec M = make_modular("variable_exponent(2+0.5*sin(6*x1)+0.5*x2)", 2);
  const auto nodes = log_nodes_with_zero<double>(1e-2, 100.0, 60);
  const Cylinder c{0.0, 0.2, v2(0.4, 0.6), 0.15};
  const auto prof = minorant_profile(M, unit_square(), c, v2(1, 0), nodes);
  for (Eigen::Index k = 0; k < nodes.size(); ++k)
    EXPECT_LE(prof.values(k), cylinder_infimum(M, unit_square(), c, v2(nodes(k), 0)) * (1 + 1e-12) + 1e-12);
  for (Eigen::Index k = 1; k + 1 < nodes.size(); ++k) {
    const double a = (prof.values(k) - prof.values(k - 1)) / (nodes(k) - nodes(k - 1));
    const double b = (prof.values(k + 1) - prof.values(k)) / (nodes(k + 1) - nodes(k));
    EXPECT_LE(a, b * (1 + 1e-9) + 1e-12);
  }
}

TEST(ThetaScan, HomogeneousAnisotropicIsOne) {
  ScanOptions o;
  o.delta_grid = {0.25, 0.125, 0.0625};
  const BalanceReport r = theta_scan(anisotropic_homogeneous(), unit_square(), o);
  EXPECT_TRUE(r.pass);
  for (double v : r.theta_values) EXPECT_DOUBLE_EQ(v, 1.0);
}

TEST(ThetaScan, ProbeCapFlagged) {
  ScanOptions o;
  o.delta_grid = {0.25, 0.125, 0.0625};
  o.s_cap = 100;
  const BalanceReport r = theta_scan(power_modular(2, 2), unit_square(), o);
  EXPECT_TRUE(r.any_capped);
  EXPECT_TRUE(r.capped.back());
  EXPECT_DOUBLE_EQ(r.s_probe.back(), o.s_cap);
}

TEST(ThetaScan, RejectsBadGrid) {
  ScanOptions o;
  o.delta_grid = {0.1, 0.2};
  EXPECT_THROW(theta_scan(power_modular(2, 2), unit_square(), o), InvalidInput);
}

TEST(ThetaScan, VerdictRuleOnSyntheticTables) {
  ScanOptions o;
  BalanceReport flat;
  flat.delta_grid = {0.125, 0.0625, 0.03125, 0.015625};
  flat.theta_values = {2, 2, 2, 2};
  flat.capped.assign(4, 0);
  apply_verdict(flat, o);
  EXPECT_TRUE(flat.pass);
  EXPECT_FALSE(flat.borderline);

  BalanceReport sqrt_growth = flat;
  for (std::size_t i = 0; i < 4; ++i) sqrt_growth.theta_values[i] = std::pow(flat.delta_grid[i], -0.5);
  apply_verdict(sqrt_growth, o);
  EXPECT_FALSE(sqrt_growth.pass);

  BalanceReport inf = flat;
  inf.theta_values[2] = std::numeric_limits<double>::infinity();
  apply_verdict(inf, o);
  EXPECT_FALSE(inf.pass);
}

TEST(IsotropicTheta, HomogeneousIsOne) {
  const NFunctionSpec M = power_modular(1, 3);
  std::vector<std::pair<ProbePoint, ProbePoint>> pairs;
  for (int i = 0; i < 10; ++i)
    pairs.push_back({{0.0, SmallVec::Constant(1, 0.1 * i)}, {0.05 * i, SmallVec::Constant(1, 0.9 - 0.05 * i)}});
  const auto tab = isotropic_theta(M, pairs, {1, 10, 100});
  EXPECT_TRUE((tab.theta.array() == 1.0).all());
}

TEST(IsotropicTheta, LipschitzExponentPowerLaw) {
  const double L = 0.5;
  const NFunctionSpec M = make_modular("variable_exponent(2+0.5*x1)", 1);
  std::vector<std::pair<ProbePoint, ProbePoint>> pairs;
  for (int i = 0; i <= 20; ++i)
    for (int j = 0; j <= 20; ++j)
      pairs.push_back({{0.0, SmallVec::Constant(1, 0.05 * i)}, {0.0, SmallVec::Constant(1, 0.05 * j)}});
  const std::vector<double> ladder{2, 10, 100, 1000};
  const auto tab = isotropic_theta(M, pairs, ladder);
  for (std::size_t i = 0; i < tab.distances.size(); ++i)
    for (std::size_t j = 0; j < ladder.size(); ++j) {
      const double expect = std::pow(ladder[j], L * tab.distances[i]);
      EXPECT_NEAR(tab.theta(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)), expect, 1e-6 * expect);
    }
}

TEST(IsotropicTheta, WeightedOrliczIndependentOfS) {
  const NFunctionSpec M = weighted_power_modular(2, 2.5, [](double, const SmallVec& x) { return 1 + x(0); });
  std::vector<std::pair<ProbePoint, ProbePoint>> pairs;
  for (int i = 0; i < 10; ++i) pairs.push_back({{0.0, v2(0.1 * i, 0.2)}, {0.0, v2(0.05 * i, 0.3)}});
  const auto tab = isotropic_theta(M, pairs, {1, 10, 100, 1000});
  for (Eigen::Index i = 0; i < tab.theta.rows(); ++i)
    for (Eigen::Index j = 1; j < tab.theta.cols(); ++j) EXPECT_NEAR(tab.theta(i, j), tab.theta(i, 0), 1e-12);
}

TEST(IsotropicTheta, RequiresIsotropic) {
  EXPECT_THROW(isotropic_theta(anisotropic_homogeneous(), {}, {1.0}), InvalidInput);
}

TEST(DoublePhaseCloseness, Examples) {
  const auto border = double_phase_closeness(2, 3, 1, 2, ProbeMode::NOverP);
  EXPECT_TRUE(border.pass);
  EXPECT_DOUBLE_EQ(border.threshold, 1.0);
  EXPECT_DOUBLE_EQ(border.margin, 0.0);
  const auto fail = double_phase_closeness(2, 3.5, 1, 2, ProbeMode::NOverP);
  EXPECT_FALSE(fail.pass);
  EXPECT_DOUBLE_EQ(fail.threshold, 1.5);
  const auto eq = double_phase_closeness(2, 2, 0.1, 2, ProbeMode::N);
  EXPECT_TRUE(eq.pass);
  EXPECT_TRUE(eq.trivial);
  EXPECT_DOUBLE_EQ(double_phase_closeness(2, 2.5, 1, 2, ProbeMode::N).threshold, 1.0);
  EXPECT_THROW(double_phase_closeness(2, 3, 1.5, 2, ProbeMode::N), InvalidInput);
}
