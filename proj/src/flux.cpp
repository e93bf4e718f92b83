#include "mop/flux.hpp"

#include "mop/catalog.hpp"
#include "mop/expr.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace mop {

namespace {

constexpr double kEpsFlux = 1e-10;

double power_conj(double tau, double p) {
  if (tau <= 0) return 0.0;
  return std::pow(tau, p / (p - 1.0)) * (p - 1.0) / p;
}

// s^{p-1}, with the regularised |xi|_eps for p < 2
double power_slope(double s, double p) {
  if (p < 2.0) return s * std::pow(s * s + kEpsFlux * kEpsFlux, 0.5 * (p - 2.0));
  return std::pow(s, p - 1.0);
}

struct ParamFn {
  WeightFn fn;
  bool uses_time = false;
};

ParamFn param_fn(const FluxParams& params, const std::string& key, std::optional<double> fallback = std::nullopt) {
  if (auto it = params.expressions.find(key); it != params.expressions.end()) {
    Expression e(it->second);
    return {[e](double t, const SmallVec& x) { return e(t, x); }, e.uses_time()};
  }
  double v;
  if (auto it = params.values.find(key); it != params.values.end())
    v = it->second;
  else if (fallback)
    v = *fallback;
  else
    throw InvalidInput("flux_catalog: missing parameter '" + key + "'");
  return {[v](double, const SmallVec&) { return v; }, false};
}

// sup of a parameter: grid sample, then pattern search from the best node
double sampled_max(const WeightFn& fn, const BoxDomain& omega) {
  const int per_axis = 17;
  const auto plan = box_plan(omega.lo, omega.hi, omega.T, per_axis, 5, 1.0);
  double best = -std::numeric_limits<double>::infinity(), bt = 0;
  SmallVec bx = omega.lo;
  for (double t : plan.times)
    for (const auto& x : plan.points) {
      const double v = fn(t, x);
      if (v > best) {
        best = v;
        bt = t;
        bx = x;
      }
    }
  const int dim = omega.dim();
  Eigen::VectorXd step(dim + 1);
  for (int d = 0; d < dim; ++d) step(d) = (omega.hi(d) - omega.lo(d)) / (per_axis - 1);
  step(dim) = omega.T / 4;
  for (int it = 0; it < 60; ++it) {
    bool moved = false;
    for (int d = 0; d <= dim; ++d)
      for (double sg : {-1.0, 1.0}) {
        double t = bt;
        SmallVec x = bx;
        if (d < dim)
          x(d) = std::clamp(x(d) + sg * step(d), omega.lo(d), omega.hi(d));
        else
          t = std::clamp(t + sg * step(d), 0.0, omega.T);
        const double v = fn(t, x);
        if (v > best) {
          best = v;
          bt = t;
          bx = x;
          moved = true;
        }
      }
    if (!moved) step *= 0.5;
  }
  return best;
}

double sampled_min(const WeightFn& fn, const BoxDomain& omega) {
  return -sampled_max([&fn](double t, const SmallVec& x) { return -fn(t, x); }, omega);
}

using RadialFn = std::function<double(double t, const SmallVec& x, double s)>;

// Isotropic potential phi(t,x,|xi|) with derivative dphi; A = dphi(|xi|) xi / |xi|.
FluxSpec radial_flux(int dim, std::string name, RadialFn phi, RadialFn dphi, RadialFn conj, bool time_invariant,
                     double c_A) {
  FluxSpec F;
  F.name = name;
  F.dim = dim;
  F.c_A = c_A;
  F.time_invariant = time_invariant;
  NFunctionSpec& M = F.M;
  M.name = std::move(name);
  M.dim = dim;
  M.isotropic = true;
  M.time_invariant = time_invariant;
  M.eval = [phi](double t, const SmallVec& x, const SmallVec& xi) { return phi(t, x, xi.norm()); };
  M.radial = phi;
  auto A = [dphi](double t, const SmallVec& x, const SmallVec& xi) {
    const double s = xi.norm();
    if (s == 0) return SmallVec(SmallVec::Zero(xi.size()));
    return SmallVec((dphi(t, x, s) / s) * xi);
  };
  M.gradient = A;
  if (conj) {
    M.radial_conjugate = conj;
    M.analytic_conjugate = [conj](double t, const SmallVec& x, const SmallVec& eta) { return conj(t, x, eta.norm()); };
  }
  F.A = A;
  return F;
}

std::string label(const std::string& key, const FluxParams& params) {
  std::ostringstream os;
  os << key << "(";
  bool first = true;
  for (const auto& [k, v] : params.values) {
    os << (first ? "" : ",") << k << "=" << v;
    first = false;
  }
  for (const auto& [k, v] : params.expressions) {
    os << (first ? "" : ",") << k << "=" << v;
    first = false;
  }
  os << ")";
  return os.str();
}

SmallVec random_direction(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  SmallVec v(dim);
  do {
    for (int i = 0; i < dim; ++i) v(i) = g(rng);
  } while (v.norm() < 1e-12);
  return v / v.norm();
}

struct RandomState {
  double t;
  SmallVec x;
};

RandomState random_state(const BoxDomain& omega, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  RandomState s{omega.T * u(rng), SmallVec(omega.dim())};
  for (int d = 0; d < omega.dim(); ++d) s.x(d) = omega.lo(d) + (omega.hi(d) - omega.lo(d)) * u(rng);
  return s;
}

SmallVec random_xi(int dim, double radius, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double s = std::exp(std::log(1e-3) + (std::log(radius) - std::log(1e-3)) * u(rng));
  return s * random_direction(dim, rng);
}

}  // namespace

double FluxParams::get(const std::string& key, double fallback) const {
  auto it = values.find(key);
  return it == values.end() ? fallback : it->second;
}

double FluxParams::require(const std::string& key) const {
  auto it = values.find(key);
  if (it == values.end()) throw InvalidInput("flux_catalog: missing parameter '" + key + "'");
  return it->second;
}

FluxCheck check_flux(const FluxSpec& F, const BoxDomain& omega, int samples, unsigned seed, double xi_radius,
                     double tol_mono) {
  FluxCheck out;
  out.min_monotonicity = std::numeric_limits<double>::infinity();
  out.worst_growth = -std::numeric_limits<double>::infinity();
  out.worst_coercivity = -std::numeric_limits<double>::infinity();
  std::mt19937_64 rng(seed);
  const auto conj = make_conjugate_accessor(F.M);
  auto fail = [&](const std::string& what, const Witness& w) {
    if (!out.passed) return;
    out.passed = false;
    out.failed = what;
    out.witness = w;
  };
  for (int k = 0; k < samples; ++k) {
    const auto st = random_state(omega, rng);
    const SmallVec xi = random_xi(F.dim, xi_radius, rng);
    const SmallVec eta = random_xi(F.dim, xi_radius, rng);
    if (k == 0) {
      const SmallVec a0 = F(st.t, st.x, SmallVec::Zero(F.dim));
      if (a0.norm() > 1e-14) fail("A(0)=0", {st.t, st.x, SmallVec::Zero(F.dim)});
    }
    const SmallVec a = F(st.t, st.x, xi);
    const double m = F.M(st.t, st.x, xi);
    const double growth = m - a.dot(xi);
    out.worst_growth = std::max(out.worst_growth, growth);
    if (growth > 1e-10 * (1 + std::abs(m))) fail("growth", {st.t, st.x, xi});
    const auto c = conj(st.t, st.x, a);
    if (!c.truncated) {
      const double coerc = F.c_A * c.value - m;
      out.worst_coercivity = std::max(out.worst_coercivity, coerc);
      if (coerc > 1e-8 * (1 + std::abs(m))) fail("coercivity", {st.t, st.x, xi});
    }
    const SmallVec b = F(st.t, st.x, eta);
    const SmallVec d = xi - eta;
    const double mono = (a - b).dot(d);
    if (d.squaredNorm() > 0) out.min_monotonicity = std::min(out.min_monotonicity, mono / d.squaredNorm());
    if (mono < -tol_mono) fail("monotonicity", {st.t, st.x, xi});
  }
  return out;
}

FluxSpec flux_catalog(const std::string& key, int dim, const FluxParams& params, const BoxDomain& omega,
                      int check_samples, unsigned seed) {
  if (dim != omega.dim()) throw InvalidInput("flux_catalog: dimension mismatch with the domain");
  FluxSpec F;
  const std::string name = label(key, params);
  if (key == "p_laplace") {
    const double p = params.require("p");
    if (!(p > 1)) throw InvalidInput("flux_catalog: p must exceed 1");
    F = radial_flux(
        dim, name, [p](double, const SmallVec&, double s) { return std::pow(s, p) / p; },
        [p](double, const SmallVec&, double s) { return power_slope(s, p); },
        [p](double, const SmallVec&, double tau) { return power_conj(tau, p); }, true, std::min(1.0, 1.0 / (p - 1)));
    F.M.homogeneous = true;
    F.M.growth_exponent_p = p;
    F.M.growth_constant = 1.0 / p;
  } else if (key == "weighted_p_laplace") {
    const double p = params.require("p");
    if (!(p > 1)) throw InvalidInput("flux_catalog: p must exceed 1");
    const auto k = param_fn(params, "k", 1.0);
    if (!(sampled_min(k.fn, omega) > 0)) throw InvalidInput("flux_catalog: weight k must be positive");
    auto kf = k.fn;
    F = radial_flux(
        dim, name, [p, kf](double t, const SmallVec& x, double s) { return kf(t, x) * std::pow(s, p) / p; },
        [p, kf](double t, const SmallVec& x, double s) { return kf(t, x) * power_slope(s, p); },
        [p, kf](double t, const SmallVec& x, double tau) {
          const double w = kf(t, x);
          return w * power_conj(tau / w, p);
        },
        !k.uses_time, std::min(1.0, 1.0 / (p - 1)));
    F.M.growth_exponent_p = p;
    F.M.growth_constant = sampled_min(k.fn, omega) / p;
  } else if (key == "llogl") {
    const double alpha = params.get("alpha", 1.0);
    if (!(alpha > 0)) throw InvalidInput("flux_catalog: alpha must be positive");
    F = radial_flux(
        dim, name, [alpha](double, const SmallVec&, double s) { return s * std::pow(std::log1p(s), alpha); },
        [alpha](double, const SmallVec&, double s) {
          const double l = std::log1p(s);
          return std::pow(l, alpha) + alpha * s * std::pow(l, alpha - 1.0) / (1.0 + s);
        },
        {}, true, std::min(1.0, 1.0 / alpha));
    F.M.homogeneous = true;
  } else if (key == "variable_exponent") {
    const auto pf = param_fn(params, "p");
    const double p_min = sampled_min(pf.fn, omega), p_max = sampled_max(pf.fn, omega);
    if (!(p_min > 1)) throw InvalidInput("flux_catalog: exponent must exceed 1");
    auto p = pf.fn;
    F = radial_flux(
        dim, name, [p](double t, const SmallVec& x, double s) { const double e = p(t, x); return std::pow(s, e) / e; },
        [p](double t, const SmallVec& x, double s) { return power_slope(s, p(t, x)); },
        [p](double t, const SmallVec& x, double tau) { return power_conj(tau, p(t, x)); }, !pf.uses_time,
        std::min(1.0, 1.0 / (p_max - 1)));
    F.M.growth_exponent_p = p_min;
    F.M.growth_constant = 1.0 / p_max;
  } else if (key == "double_phase" || key == "var_double_phase") {
    const ParamFn pf = param_fn(params, "p"), qf = param_fn(params, "q");
    ParamFn af;
    if (params.expressions.count("a")) {
      af = param_fn(params, "a");
    } else {
      const double alpha = params.get("alpha", 1.0), a0 = params.get("a0", 1.0);
      af = {[alpha, a0](double, const SmallVec& x) { return a0 * std::pow(x.norm(), alpha); }, false};
    }
    const double p_min = sampled_min(pf.fn, omega);
    const double top = std::max(sampled_max(pf.fn, omega), sampled_max(qf.fn, omega));
    if (!(p_min > 1) || !(sampled_min(qf.fn, omega) > 1)) throw InvalidInput("flux_catalog: need p, q > 1");
    if (sampled_min(af.fn, omega) < 0) throw InvalidInput("flux_catalog: weight a must be nonnegative");
    auto p = pf.fn, q = qf.fn, a = af.fn;
    F = radial_flux(
        dim, name,
        [p, q, a](double t, const SmallVec& x, double s) {
          const double ep = p(t, x), eq = q(t, x);
          return std::pow(s, ep) / ep + a(t, x) * std::pow(s, eq) / eq;
        },
        [p, q, a](double t, const SmallVec& x, double s) {
          return power_slope(s, p(t, x)) + a(t, x) * power_slope(s, q(t, x));
        },
        {}, !(pf.uses_time || qf.uses_time || af.uses_time), std::min(1.0, 1.0 / (top - 1)));
    F.M.growth_exponent_p = p_min;
    F.M.growth_constant = 1.0 / sampled_max(pf.fn, omega);
  } else if (key == "orlicz_double_phase") {
    const double m1 = params.require("m1"), m2 = params.require("m2"), a = params.get("a", 1.0);
    if (!(m1 > 1) || !(m2 > 1) || a < 0) throw InvalidInput("flux_catalog: need m1, m2 > 1 and a >= 0");
    F.name = name;
    F.dim = dim;
    F.c_A = std::min(1.0, 1.0 / (std::max(m1, m2) - 1));
    auto comp = [m1, m2, a](double, const SmallVec& x, double s) {
      return std::pow(s, m1) / m1 + a * x.norm() * std::pow(s, m2) / m2;
    };
    NFunctionSpec& M = F.M;
    M.name = name;
    M.dim = dim;
    M.growth_exponent_p = std::min(m1, m2);
    M.components.assign(static_cast<std::size_t>(dim), comp);
    M.eval = [comp](double t, const SmallVec& x, const SmallVec& xi) {
      double v = 0;
      for (int i = 0; i < xi.size(); ++i) v += comp(t, x, std::abs(xi(i)));
      return v;
    };
    F.A = [m1, m2, a](double, const SmallVec& x, const SmallVec& xi) {
      SmallVec g(xi.size());
      for (int i = 0; i < xi.size(); ++i) {
        const double s = std::abs(xi(i));
        const double sg = xi(i) < 0 ? -1.0 : 1.0;
        g(i) = s == 0 ? 0.0 : sg * (power_slope(s, m1) + a * x.norm() * power_slope(s, m2));
      }
      return g;
    };
    M.gradient = F.A;
  } else {
    throw InvalidInput("flux_catalog: unknown flux key '" + key + "'");
  }
  if (check_samples > 0) {
    const auto chk = check_flux(F, omega, check_samples, seed);
    if (!chk.passed) {
      std::ostringstream os;
      os << "flux_catalog: invariant '" << chk.failed << "' fails for " << F.name;
      if (chk.witness) os << " at t=" << chk.witness->t << ", |xi|=" << chk.witness->xi.norm();
      throw InvalidInput(os.str());
    }
  }
  return F;
}

SmallVec RegularizedFluxSpec::operator()(double t, const SmallVec& x, const SmallVec& xi) const {
  SmallVec a = base.A(t, x, xi);
  if (theta != 0) a += theta * flux_gradient(m, t, x, xi);
  return a;
}

RegularizedFluxSpec RegularizedFluxSpec::with_theta(double th) const {
  RegularizedFluxSpec out = *this;
  out.theta = th;
  out.stub = th == 0;
  return out;
}

RegularizedFluxSpec regularize(const FluxSpec& base, double theta, const BoxDomain& omega,
                               const RegularizeOptions& opts) {
  if (!(theta >= 0) || theta > 1) throw InvalidInput("regularize: theta must lie in [0, 1]");
  const auto plan = box_plan(omega.lo, omega.hi, omega.T, opts.points_per_axis, 3, 1.0);
  RegularizedFluxSpec R;
  R.base = base;
  R.theta = theta;
  R.stub = theta == 0;
  if (opts.m) {
    R.m = *opts.m;
  } else {
    double g = 1.0;
    for (double t : plan.times)
      for (const auto& x : plan.points) g = std::max(g, empirical_growth_exponent(base.M, t, x));
    const double r = std::min(2.0 * g, 8.0);
    R.m = r > g ? power_modular(base.dim, r, 1.0 / r) : exp_growth_modular(base.dim);
  }
  if (!R.m.isotropic) throw InvalidInput("regularize: m must be isotropic");
  std::vector<double> ladder = opts.ladder;
  if (ladder.empty())
    for (int k = 0; k < 24; ++k) ladder.push_back(2.0 * std::pow(500.0, k / 23.0));
  const auto dirs = ray_directions(base.dim, 0, 1);
  double prev_ratio = std::numeric_limits<double>::infinity(), first_ratio = 0, last_ratio = 0;
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    const double s = ladder[i];
    double Mbar = 0;
    for (double t : plan.times)
      for (const auto& x : plan.points)
        for (const auto& d : dirs) Mbar = std::max(Mbar, base.M(t, x, s * d));
    const double mbar = R.m(0.0, omega.lo, s * SmallVec::Unit(base.dim, 0));
    if (!(mbar >= Mbar)) {
      std::ostringstream os;
      os << "regularize: m does not dominate M at |xi|=" << s;
      throw InvalidInput(os.str());
    }
    const double ratio = std::isfinite(mbar) ? Mbar / mbar : 0.0;
    if (ratio > prev_ratio * (1 + 1e-12)) {
      std::ostringstream os;
      os << "regularize: M/m is not decreasing at |xi|=" << s;
      throw InvalidInput(os.str());
    }
    if (i == 0) first_ratio = ratio;
    last_ratio = ratio;
    prev_ratio = ratio;
  }
  if (!(last_ratio < first_ratio)) throw InvalidInput("regularize: m does not grow essentially faster than M");
  return R;
}

double monotonicity_margin(const FluxEval& F, const BoxDomain& omega, int dim, int samples, unsigned seed,
                           double xi_radius) {
  std::mt19937_64 rng(seed);
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k < samples; ++k) {
    const auto st = random_state(omega, rng);
    const SmallVec xi = random_xi(dim, xi_radius, rng);
    const SmallVec eta = random_xi(dim, xi_radius, rng);
    const SmallVec d = xi - eta;
    const double n2 = d.squaredNorm();
    if (n2 == 0) continue;
    best = std::min(best, (F(st.t, st.x, xi) - F(st.t, st.x, eta)).dot(d) / n2);
  }
  return best;
}

}  // namespace mop
