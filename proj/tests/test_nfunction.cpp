#include "mop/catalog.hpp"
#include "mop/nfunction.hpp"
#include "mop/profile.hpp"

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

// brute-force sup_s (s t - f(s)) over a uniform grid on [0, s_max]
double brute_conjugate(const std::function<double(double)>& f, double t, double s_max, int n = 200001) {
  double best = -1e300;
  for (int i = 0; i < n; ++i) {
    const double s = s_max * i / (n - 1);
    best = std::max(best, s * t - f(s));
  }
  return best;
}

SampledProfile<double> profile(std::vector<double> s, std::vector<double> v) {
  SampledProfile<double> f;
  f.nodes = Eigen::Map<Eigen::ArrayXd>(s.data(), static_cast<Eigen::Index>(s.size()));
  f.values = Eigen::Map<Eigen::ArrayXd>(v.data(), static_cast<Eigen::Index>(v.size()));
  return f;
}

NFunctionSpec anisotropic_3_15() {
  NFunctionSpec M;
  M.name = "aniso";
  M.dim = 2;
  M.eval = [](double, const SmallVec&, const SmallVec& xi) {
    return std::pow(std::abs(xi(0)), 3) + std::pow(std::abs(xi(1)), 1.5);
  };
  return M;
}

SamplingPlan unit_plan(int dim, double s_max = 10.0) {
  return box_plan(SmallVec::Zero(dim), SmallVec::Ones(dim), 1.0, 3, 2, s_max);
}

}  // namespace

TEST(CheckAxioms, QuadraticPassesAll) {
  const AxiomReport r = check_axioms(power_modular(2, 2), unit_plan(2));
  EXPECT_TRUE(r.all_passed());
}

TEST(CheckAxioms, LinearFailsSuperlinearityWithWitness) {
  const NFunctionSpec M = radial_modular(2, "linear", [](double s) { return s; });
  const AxiomReport r = check_axioms(M, unit_plan(2));
  const AxiomResult& sup = r.get("superlinear_at_infinity");
  EXPECT_FALSE(sup.passed);
  ASSERT_TRUE(sup.witness.has_value());
  EXPECT_NEAR(sup.witness->xi.norm(), 10.0, 1e-9);
}

TEST(CheckAxioms, AnisotropicMixedPowersPass) {
  EXPECT_TRUE(check_axioms(anisotropic_3_15(), unit_plan(2, 10.0)).all_passed());
}

TEST(CheckAxioms, EmptyPlanRejected) {
  EXPECT_THROW(check_axioms(power_modular(1, 2), SamplingPlan{}), InvalidInput);
}

TEST(Conjugate1d, HalfSquareAtOne) {
  const auto nodes = log_nodes_with_zero<double>(1e-4, 10.0, 2047);
  const auto f = sample_profile(nodes, [](double s) { return s * s / 2; });
  Eigen::ArrayXd dual(1);
  dual << 1.0;
  const double oracle = brute_conjugate([](double s) { return s * s / 2; }, 1.0, 10.0);
  EXPECT_NEAR(oracle, 0.5, 1e-9);
  EXPECT_NEAR(conjugate_1d(f, dual).values(0), 0.5, 1e-6);
}

TEST(Conjugate1d, CubicOverThreeAtOne) {
  const auto nodes = log_nodes_with_zero<double>(1e-4, 10.0, 2047);
  auto fn = [](double s) { return s * s * s / 3; };
  const auto f = sample_profile(nodes, fn);
  Eigen::ArrayXd dual(1);
  dual << 1.0;
  const double oracle = brute_conjugate(fn, 1.0, 10.0);
  EXPECT_NEAR(oracle, 2.0 / 3.0, 1e-9);
  double discrete = -INFINITY;
  for (Eigen::Index k = 0; k < nodes.size(); ++k) discrete = std::max(discrete, nodes(k) - fn(nodes(k)));
  const double g = conjugate_1d(f, dual).values(0);
  EXPECT_DOUBLE_EQ(g, discrete);
  // node max of s - s^3/3 misses the peak by at most |phi''| h^2 / 8 with h the spacing near s = 1
  const double h = std::pow(1e5, 1.0 / 2046) - 1;
  EXPECT_LE(2.0 / 3.0 - g, 2 * h * h / 8);
  EXPECT_GE(2.0 / 3.0 - g, 0.0);
}

TEST(Conjugate1d, ZeroProfileIsTruncated) {
  const auto nodes = log_nodes_with_zero<double>(1e-3, 5.0, 64);
  const auto f = sample_profile(nodes, [](double) { return 0.0; });
  Eigen::ArrayXd dual(2);
  dual << 0.5, 2.0;
  const auto g = conjugate_1d(f, dual);
  EXPECT_TRUE(g.truncated);
  EXPECT_DOUBLE_EQ(g.values(0), 0.5 * 5.0);
  EXPECT_DOUBLE_EQ(g.values(1), 2.0 * 5.0);
}

TEST(Conjugate1d, MonotoneSweepMatchesDirect) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(1.2, 6.0);
  for (int trial = 0; trial < 20; ++trial) {
    const double p = u(rng);
    const auto nodes = log_nodes_with_zero<double>(1e-3, 50.0, 300);
    const auto f = sample_profile(nodes, [p](double s) { return std::pow(s, p) / p; });
    const auto dual = log_nodes_with_zero<double>(1e-3, 40.0, 200);
    const auto a = conjugate_1d(f, dual, false), b = conjugate_1d(f, dual, true);
    for (Eigen::Index k = 0; k < dual.size(); ++k) EXPECT_DOUBLE_EQ(a.values(k), b.values(k));
  }
}

TEST(ConjugateNd, SquareAtTwoZero) {
  const auto v = conjugate_nd(power_modular(2, 2), 0.0, SmallVec::Zero(2), v2(2, 0));
  EXPECT_NEAR(v.value, 1.0, 1e-6);
  EXPECT_FALSE(v.truncated);
  EXPECT_NEAR(v.argmax(0), 1.0, 1e-3);
}

TEST(ConjugateNd, ZeroDual) {
  EXPECT_NEAR(conjugate_nd(power_modular(2, 2), 0.0, SmallVec::Zero(2), SmallVec::Zero(2)).value, 0.0, 1e-12);
}

TEST(ConjugateNd, SeparableMatchesSumOfOneDimensional) {
  NFunctionSpec M;
  M.name = "sep";
  M.dim = 2;
  M.components = {[](double, const SmallVec&, double s) { return s * s; },
                  [](double, const SmallVec&, double s) { return std::pow(s, 4); }};
  M.eval = [](double, const SmallVec&, const SmallVec& xi) { return xi(0) * xi(0) + std::pow(xi(1), 4); };
  const double g1 = brute_conjugate([](double s) { return s * s; }, 0.0, 10.0);
  const double g2 = brute_conjugate([](double s) { return std::pow(s, 4); }, 4.0, 10.0);
  EXPECT_NEAR(g1 + g2, 3.0, 1e-8);
  EXPECT_NEAR(conjugate_nd(M, 0.0, SmallVec::Zero(2), v2(0, 4)).value, 3.0, 1e-8);
}

TEST(ConjugateNd, IsotropicAgreesWithRadialProfile) {
  const NFunctionSpec M = make_modular("double_phase(2,3,1,1)", 2);
  const SmallVec x = v2(0.3, 0.4);
  for (double tau : {0.5, 1.0, 3.0}) {
    const auto nodes = log_nodes_with_zero<double>(1e-4, 20.0, 2047);
    const auto f = sample_profile(nodes, [&](double s) { return M(0.0, x, v2(s, 0)); });
    Eigen::ArrayXd dual(1);
    dual << tau;
    const double ref = conjugate_1d(f, dual).values(0);
    EXPECT_NEAR(conjugate_nd(M, 0.0, x, v2(0.6 * tau, 0.8 * tau)).value, ref, 1e-4 * (1 + ref));
  }
}

TEST(ConvexEnvelope, ConvexInputUnchanged) {
  const auto nodes = log_nodes_with_zero<double>(1e-3, 10.0, 100);
  const auto f = sample_profile(nodes, [](double s) { return s * s; });
  const auto e = convex_envelope_1d(f);
  for (Eigen::Index k = 0; k < f.size(); ++k) EXPECT_DOUBLE_EQ(e.values(k), f.values(k));
}

TEST(ConvexEnvelope, ThreePointChord) {
  const auto e = convex_envelope_1d(profile({0, 1, 2}, {0, 2, 2}));
  EXPECT_DOUBLE_EQ(e.values(1), 1.0);
}

TEST(ConvexEnvelope, FourPointHull) {
  const auto e = convex_envelope_1d(profile({0, 1, 2, 3}, {0, 5, 1, 6}));
  EXPECT_DOUBLE_EQ(e.values(1), 0.5);
  EXPECT_DOUBLE_EQ(e.values(2), 1.0);
  EXPECT_DOUBLE_EQ(e.values(3), 6.0);
}

TEST(ConvexEnvelope, BelowInputAndConvexOnRandomProfiles) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 5.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> s{0.0}, v{0.0};
    for (int k = 1; k < 30; ++k) {
      s.push_back(s.back() + 0.1 + u(rng));
      v.push_back(u(rng) * s.back());
    }
    const auto f = profile(s, v);
    const auto e = convex_envelope_1d(f);
    for (Eigen::Index k = 0; k < f.size(); ++k) EXPECT_LE(e.values(k), f.values(k) + 1e-12);
    for (Eigen::Index k = 1; k + 1 < f.size(); ++k) {
      const double left = (e.values(k) - e.values(k - 1)) / (e.nodes(k) - e.nodes(k - 1));
      const double right = (e.values(k + 1) - e.values(k)) / (e.nodes(k + 1) - e.nodes(k));
      EXPECT_LE(left, right + 1e-9 * (1 + std::abs(right)));
    }
  }
}

TEST(Biconjugation, EqualsEnvelopeOnRandomProfiles) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<double> s{0.0}, v{0.0};
    for (int k = 1; k < 40; ++k) {
      s.push_back(s.back() + 0.05 + u(rng));
      v.push_back(v.back() + u(rng) * s.back());
    }
    const auto f = profile(s, v);
    const auto ff = conjugate_1d(conjugate_1d(f), f.nodes);
    const auto env = convex_envelope_1d(f);
    for (Eigen::Index k = 0; k < f.size(); ++k)
      EXPECT_NEAR(ff.values(k), env.values(k), 1e-6 * (1 + std::abs(f.values(k))));
  }
}

TEST(Conjugate1d, OrderReversal) {
  const auto nodes = log_nodes_with_zero<double>(1e-3, 100.0, 500);
  const auto f = sample_profile(nodes, [](double s) { return s * s / 2; });
  const auto g = sample_profile(nodes, [](double s) { return s * s / 2 + std::pow(s, 3) / 10; });
  const auto dual = log_nodes_with_zero<double>(1e-3, 50.0, 200);
  const auto cf = conjugate_1d(f, dual), cg = conjugate_1d(g, dual);
  for (Eigen::Index k = 0; k < dual.size(); ++k) EXPECT_LE(cg.values(k), cf.values(k) + 1e-12);
}

TEST(Conjugate1d, ConjugateIsConvexAndMonotone) {
  const auto nodes = log_nodes_with_zero<double>(1e-3, 100.0, 500);
  const auto f = sample_profile(nodes, [](double s) { return s * std::log1p(s); });
  const auto g = conjugate_1d(f);
  for (Eigen::Index k = 1; k < g.size(); ++k) EXPECT_GE(g.values(k), g.values(k - 1) - 1e-12);
  for (Eigen::Index k = 1; k + 1 < g.size(); ++k) {
    const double a = (g.values(k) - g.values(k - 1)) / (g.nodes(k) - g.nodes(k - 1));
    const double b = (g.values(k + 1) - g.values(k)) / (g.nodes(k + 1) - g.nodes(k));
    EXPECT_LE(a, b + 1e-7 * (1 + b));
  }
}

TEST(FenchelYoung, EqualityAndOrthogonalPair) {
  const NFunctionSpec M = power_modular(2, 2, 0.5);
  const auto conj = make_conjugate_accessor(M);
  const SmallVec x = SmallVec::Zero(2);
  const auto eq = fenchel_young_residual(M, conj, {{0.0, x, v2(1, 0), v2(1, 0)}});
  EXPECT_NEAR(eq.min, 0.0, 1e-14);
  const auto orth = fenchel_young_residual(M, conj, {{0.0, x, v2(1, 0), v2(0, 1)}});
  EXPECT_NEAR(orth.min, 1.0, 1e-14);
}

TEST(FenchelYoung, DoublePhaseBruteForce) {
  const NFunctionSpec M = make_modular("double_phase(2,3,1,1)", 2);
  const auto conj = make_conjugate_accessor(M, {}, false);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-4.0, 4.0), ux(0.0, 1.0);
  std::vector<ConjugatePair> pairs;
  for (int i = 0; i < 100; ++i) pairs.push_back({0.0, v2(ux(rng), ux(rng)), v2(u(rng), u(rng)), v2(u(rng), u(rng))});
  const auto r = fenchel_young_residual(M, conj, pairs);
  EXPECT_GE(r.min, -1e-6);
  EXPECT_EQ(r.count + r.excluded_truncated, 100u);
}

TEST(FluxGradient, ClosedAndFiniteDifference) {
  const auto g = flux_gradient(power_modular(2, 2, 0.5), 0.0, SmallVec::Zero(2), v2(3, 4));
  EXPECT_NEAR(g(0), 3.0, 1e-12);
  EXPECT_NEAR(g(1), 4.0, 1e-12);
  const NFunctionSpec quartic = radial_modular(2, "quartic", [](double s) { return std::pow(s, 4) / 4; });
  const auto h = flux_gradient(quartic, 0.0, SmallVec::Zero(2), v2(1, 0));
  EXPECT_NEAR(h(0), 1.0, 1e-8);
  EXPECT_NEAR(h(1), 0.0, 1e-8);
  EXPECT_EQ(flux_gradient(quartic, 0, SmallVec::Zero(2), SmallVec::Zero(2)).norm(), 0.0);
}

TEST(FluxGradient, FenchelYoungEqualityOnCatalog) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-3.0, 3.0), ux(0.0, 1.0);
  for (const char* key : {"p_laplace(2)", "p_laplace(3)", "double_phase(2,3,1,1)", "llogl(1)", "exp_growth"}) {
    const NFunctionSpec m = make_modular(key, 2);
    const auto conj = make_conjugate_accessor(m);
    for (int i = 0; i < 100; ++i) {
      const SmallVec x = v2(ux(rng), ux(rng)), xi = v2(u(rng), u(rng));
      EXPECT_NEAR(fy_equality_residual(m, conj, 0.0, x, xi), 0.0, 1e-5) << key;
    }
  }
}

TEST(FluxGradient, ExpProfileEqualityAtHalf) {
  const NFunctionSpec m = make_modular("exp_growth", 2);
  EXPECT_LE(std::abs(fy_equality_residual(m, make_conjugate_accessor(m), 0, SmallVec::Zero(2), v2(0.5, 0))), 1e-6);
}

TEST(Delta2, PowerRatios) {
  const auto plan = unit_plan(2, 1e3);
  EXPECT_NEAR(delta2_estimate(power_modular(2, 2), plan).constant, 4.0, 1e-9);
  const auto e3 = delta2_estimate(power_modular(2, 3), plan);
  EXPECT_NEAR(e3.constant, 8.0, 1e-9);
  EXPECT_FALSE(e3.unbounded);
}

TEST(Delta2, ExponentialUnbounded) {
  const NFunctionSpec M = radial_modular(2, "exp", [](double s) { return std::exp(s) - 1 + s; });
  EXPECT_TRUE(delta2_estimate(M, unit_plan(2, 100.0)).unbounded);
}
