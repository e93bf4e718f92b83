#include "mop/catalog.hpp"
#include "mop/flux.hpp"

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

FluxParams params(std::map<std::string, double> v, std::map<std::string, std::string> e = {}) {
  return {std::move(v), std::move(e)};
}

}  // namespace

TEST(FluxCatalog, PLaplaceClosedForm) {
  const FluxSpec F2 = flux_catalog("p_laplace", 2, params({{"p", 2}}), unit_square());
  const SmallVec xi = v2(3, 4), x = v2(0.3, 0.3);
  EXPECT_NEAR((F2(0, x, xi) - xi).norm(), 0.0, 1e-14);
  const FluxSpec F3 = flux_catalog("p_laplace", 2, params({{"p", 3}}), unit_square());
  EXPECT_NEAR((F3(0, x, xi) - 5 * xi).norm(), 0.0, 1e-12);
  EXPECT_NEAR(F3.M(0, x, xi), 125.0 / 3.0, 1e-12);
  EXPECT_EQ(F3(0, x, SmallVec::Zero(2)).norm(), 0.0);
}

TEST(FluxCatalog, EntriesSatisfyInvariants) {
  const BoxDomain om = unit_square();
  const std::vector<std::pair<std::string, FluxParams>> entries{
      {"p_laplace", params({{"p", 1.5}})},
      {"weighted_p_laplace", params({{"p", 2.5}}, {{"k", "1 + x1*x2"}})},
      {"llogl", params({{"alpha", 1}})},
      {"variable_exponent", params({}, {{"p", "2 + 0.5*sin(3*x1)"}})},
      {"double_phase", params({{"p", 2}, {"q", 3}, {"alpha", 1}, {"a0", 1}})},
      {"var_double_phase", params({}, {{"p", "2"}, {"q", "3 + 0.2*x2"}, {"a", "x1^2"}})},
      {"orlicz_double_phase", params({{"m1", 2}, {"m2", 3}, {"a", 1}})},
  };
  for (const auto& [key, prm] : entries) {
    const FluxSpec F = flux_catalog(key, 2, prm, om, 0);
    const FluxCheck chk = check_flux(F, om, 500, 7);
    EXPECT_TRUE(chk.passed) << key << " " << chk.failed;
    EXPECT_LE(chk.worst_growth, 1e-10) << key;
    EXPECT_GE(chk.min_monotonicity, 0.0) << key;
  }
}

TEST(FluxCatalog, NonMonotoneFluxRejected) {
  FluxSpec F = flux_catalog("p_laplace", 2, params({{"p", 2}}), unit_square());
  F.A = [](double, const SmallVec&, const SmallVec& xi) { return SmallVec(xi + 2 * xi.array().sin().matrix()); };
  const FluxCheck chk = check_flux(F, unit_square(), 500, 1);
  EXPECT_FALSE(chk.passed);
  EXPECT_TRUE(chk.witness.has_value());
}

TEST(FluxCatalog, GrowthViolationNamed) {
  FluxSpec F = flux_catalog("p_laplace", 2, params({{"p", 2}}), unit_square());
  F.A = [](double, const SmallVec&, const SmallVec& xi) { return SmallVec(0.25 * xi); };
  const FluxCheck chk = check_flux(F, unit_square(), 100, 1);
  EXPECT_FALSE(chk.passed);
  EXPECT_EQ(chk.failed, "growth");
}

TEST(FluxCatalog, BadParameters) {
  const BoxDomain om = unit_square();
  EXPECT_THROW(flux_catalog("p_laplace", 2, params({}), om), InvalidInput);
  EXPECT_THROW(flux_catalog("p_laplace", 2, params({{"p", 1}}), om), InvalidInput);
  EXPECT_THROW(flux_catalog("weighted_p_laplace", 2, params({{"p", 2}}, {{"k", "x1 - 0.5"}}), om), InvalidInput);
  EXPECT_THROW(flux_catalog("bogus", 2, params({}), om), InvalidInput);
  EXPECT_THROW(flux_catalog("p_laplace", 3, params({{"p", 2}}), om), InvalidInput);
}

TEST(Regularize, AddsThetaGradM) {
  const BoxDomain om = unit_square();
  const FluxSpec F = flux_catalog("p_laplace", 2, params({{"p", 2}}), om);
  RegularizeOptions o;
  o.m = power_modular(2, 4, 0.25);
  const RegularizedFluxSpec R = regularize(F, 0.1, om, o);
  const SmallVec xi = v2(1, 2);
  EXPECT_NEAR((R(0, v2(0.5, 0.5), xi) - (xi + 0.1 * 5 * xi)).norm(), 0.0, 1e-6);
  const RegularizedFluxSpec stub = R.with_theta(0);
  EXPECT_TRUE(stub.stub);
  EXPECT_NEAR((stub(0, v2(0.5, 0.5), xi) - xi).norm(), 0.0, 1e-14);
}

TEST(Regularize, AutoSelectsFasterGrowth) {
  const BoxDomain om = unit_square();
  const FluxSpec F = flux_catalog("double_phase", 2, params({{"p", 2}, {"q", 3}, {"alpha", 1}, {"a0", 1}}), om);
  const RegularizedFluxSpec R = regularize(F, 0.05, om);
  ASSERT_TRUE(R.m.growth_exponent_p.has_value());
  EXPECT_GT(*R.m.growth_exponent_p, 3.0);
}

TEST(Regularize, Rejections) {
  const BoxDomain om = unit_square();
  const FluxSpec F = flux_catalog("p_laplace", 2, params({{"p", 3}}), om);
  EXPECT_THROW(regularize(F, 1.5, om), InvalidInput);
  EXPECT_THROW(regularize(F, -0.1, om), InvalidInput);
  RegularizeOptions same;
  same.m = power_modular(2, 3, 1.0 / 3.0);
  EXPECT_THROW(regularize(F, 0.1, om, same), InvalidInput);
  RegularizeOptions slower;
  slower.m = power_modular(2, 2, 0.5);
  EXPECT_THROW(regularize(F, 0.1, om, slower), InvalidInput);
}

TEST(Regularize, MonotoneForEveryTheta) {
  const BoxDomain om = unit_square();
  const FluxSpec F = flux_catalog("variable_exponent", 2, params({}, {{"p", "1.5 + x1"}}), om);
  const RegularizedFluxSpec R = regularize(F, 1.0, om);
  for (double th : {1.0, 0.5, 0.1, 0.01}) {
    const RegularizedFluxSpec Rt = R.with_theta(th);
    EXPECT_GE(monotonicity_margin([&](double t, const SmallVec& x, const SmallVec& xi) { return Rt(t, x, xi); }, om, 2,
                                  400, 3),
              -1e-10);
  }
}

TEST(Truncate, Clamps) {
  EXPECT_DOUBLE_EQ(truncate(3.0, 2.0), 2.0);
  EXPECT_DOUBLE_EQ(truncate(-3.0, 2.0), -2.0);
  EXPECT_DOUBLE_EQ(truncate(0.5, 2.0), 0.5);
}
