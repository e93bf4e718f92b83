#include "mop/nfunction.hpp"

#include <cmath>
#include <limits>
#include <numeric>

namespace mop {

namespace {

SmallVec random_unit(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  SmallVec v(dim);
  do {
    for (int i = 0; i < dim; ++i) v(i) = g(rng);
  } while (v.norm() < 1e-12);
  return v / v.norm();
}

void require_finite(double v, const char* where) {
  if (!std::isfinite(v)) throw EvaluationError(std::string(where) + ": non-finite modular value");
}

// s.tau - v for the conjugate searches; an overflowed +inf value is never the maximiser
double dual_objective(double pairing, double v, const char* where) {
  if (std::isnan(v) || v == -std::numeric_limits<double>::infinity())
    throw EvaluationError(std::string(where) + ": non-finite modular value");
  if (v == std::numeric_limits<double>::infinity()) return -std::numeric_limits<double>::infinity();
  return pairing - v;
}

// Golden-section maximisation of a unimodal objective on [a, b].
template <typename Fn>
std::pair<double, double> golden_max(Fn&& obj, double a, double b, int iterations) {
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = obj(c), fd = obj(d);
  for (int i = 0; i < iterations && (b - a) > 1e-15 * (1.0 + std::abs(b)); ++i) {
    if (fc < fd) {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = obj(d);
    } else {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = obj(c);
    }
  }
  return fc > fd ? std::pair{c, fc} : std::pair{d, fd};
}

}  // namespace

SamplingPlan box_plan(const SmallVec& lo, const SmallVec& hi, double T, int per_axis, int time_samples,
                      double s_max) {
  SamplingPlan plan;
  plan.s_max = s_max;
  const int dim = static_cast<int>(lo.size());
  for (int k = 0; k < time_samples; ++k) {
    plan.times.push_back(time_samples == 1 ? 0.0 : T * k / (time_samples - 1));
  }
  int total = 1;
  for (int d = 0; d < dim; ++d) total *= per_axis;
  for (int idx = 0; idx < total; ++idx) {
    SmallVec x(dim);
    int rem = idx;
    for (int d = 0; d < dim; ++d) {
      const int i = rem % per_axis;
      rem /= per_axis;
      const double w = per_axis == 1 ? 0.5 : double(i) / (per_axis - 1);
      x(d) = lo(d) + w * (hi(d) - lo(d));
    }
    plan.points.push_back(x);
  }
  return plan;
}

bool AxiomReport::all_passed() const {
  return std::all_of(results.begin(), results.end(), [](const AxiomResult& r) { return r.passed; });
}

const AxiomResult& AxiomReport::get(const std::string& axiom) const {
  for (const auto& r : results)
    if (r.axiom == axiom) return r;
  throw InvalidInput("AxiomReport: unknown axiom " + axiom);
}

std::vector<SmallVec> ray_directions(int dim, int random_extra, unsigned seed) {
  std::vector<SmallVec> dirs;
  for (int i = 0; i < dim; ++i) {
    SmallVec e = SmallVec::Zero(dim);
    e(i) = 1.0;
    dirs.push_back(e);
  }
  if (dim >= 2) {
    // sign patterns with first component +1
    for (int mask = 0; mask < (1 << (dim - 1)); ++mask) {
      SmallVec v(dim);
      v(0) = 1.0;
      for (int i = 1; i < dim; ++i) v(i) = (mask >> (i - 1)) & 1 ? -1.0 : 1.0;
      dirs.push_back(v / v.norm());
    }
  }
  std::mt19937_64 rng(seed);
  for (int k = 0; k < random_extra; ++k) dirs.push_back(random_unit(dim, rng));
  return dirs;
}

AxiomReport check_axioms(const NFunctionSpec& M, const SamplingPlan& plan) {
  if (plan.empty()) throw InvalidInput("check_axioms: empty sampling plan");
  const int dim = M.dim;
  std::mt19937_64 rng(plan.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const auto dirs = ray_directions(dim, plan.directions, plan.seed);

  AxiomResult zero{"zero_at_origin", true, {}}, positive{"positivity", true, {}}, symmetry{"symmetry", true, {}}, convex{"convexity", true, {}},
      sublinear{"sublinear_at_zero", true, {}}, superlinear{"superlinear_at_infinity", true, {}};

  const SmallVec origin = SmallVec::Zero(dim);
  const double s_ref_small = plan.s_min * 1e3;
  const double s_ref_large = std::min(1.0, plan.s_max / 10.0);
  double small_sup = 0, small_ref_sup = 0;
  double large_inf = std::numeric_limits<double>::infinity(), ref_sup = 0;
  Witness small_w, large_w;

  for (double t : plan.times) {
    for (const auto& x : plan.points) {
      const double m0 = M(t, x, origin);
      if (zero.passed && std::abs(m0) > 1e-14) zero = {"zero_at_origin", false, Witness{t, x, origin}};

      for (const auto& d : dirs) {
        for (int r = 0; r < plan.radii; ++r) {
          const double s = plan.s_min * std::pow(plan.s_max / plan.s_min, double(r) / std::max(1, plan.radii - 1));
          const SmallVec xi = s * d;
          const double v = M(t, x, xi);
          require_finite(v, "check_axioms");
          if (positive.passed && !(v > 0)) positive = {"positivity", false, Witness{t, x, xi}};
          const double vm = M(t, x, -xi);
          if (symmetry.passed && std::abs(v - vm) > 1e-12 * (1 + std::abs(v)))
            symmetry = {"symmetry", false, Witness{t, x, xi}};
        }
        const double q_small = M(t, x, plan.s_min * d) / plan.s_min;
        if (q_small > small_sup) {
          small_sup = q_small;
          small_w = Witness{t, x, plan.s_min * d};
        }
        small_ref_sup = std::max(small_ref_sup, M(t, x, s_ref_small * d) / s_ref_small);
        const double q_large = M(t, x, plan.s_max * d) / plan.s_max;
        if (q_large < large_inf) {
          large_inf = q_large;
          large_w = Witness{t, x, plan.s_max * d};
        }
        ref_sup = std::max(ref_sup, M(t, x, s_ref_large * d) / s_ref_large);
      }

      for (int k = 0; k < plan.segment_pairs && convex.passed; ++k) {
        const SmallVec a = plan.s_max * unif(rng) * random_unit(dim, rng);
        const SmallVec b = plan.s_max * unif(rng) * random_unit(dim, rng);
        const double fa = M(t, x, a), fb = M(t, x, b);
        const SmallVec mid = 0.5 * (a + b);
        const double fm = M(t, x, mid);
        if (fm > 0.5 * (fa + fb) + 1e-12 * (1 + std::abs(fa) + std::abs(fb)))
          convex = {"convexity", false, Witness{t, x, mid}};
      }
    }
  }
  if (!(small_sup <= 0.5 * small_ref_sup || small_sup <= 1e-8)) {
    sublinear.passed = false;
    sublinear.witness = small_w;
  }
  if (!(large_inf > ref_sup)) {
    superlinear.passed = false;
    superlinear.witness = large_w;
  }
  return AxiomReport{{zero, positive, symmetry, convex, sublinear, superlinear}};
}

ConjugateValue conjugate_radial(const std::function<double(double)>& f, double tau, const ConjugateSearch& search) {
  const int K = std::max(8, search.resolution);
  const double R = search.radius;
  auto obj = [&](double s) {
    return dual_objective(s * tau, f(s), "conjugate_radial");
  };
  // {0} plus log-spaced nodes, so tiny maximisers are resolved as well as large ones
  const auto nodes = log_nodes_with_zero<double>(R * 1e-9, R, K);
  Eigen::Index best_k = 0;
  double best = obj(0.0);
  for (Eigen::Index k = 1; k < nodes.size(); ++k) {
    const double v = obj(nodes(k));
    if (v > best) {
      best = v;
      best_k = k;
    }
  }
  ConjugateValue out;
  const double a = nodes(std::max<Eigen::Index>(best_k - 1, 0));
  const double b = nodes(std::min<Eigen::Index>(best_k + 1, nodes.size() - 1));
  auto [s_star, v_star] = golden_max(obj, a, b, search.refine_iterations);
  if (v_star < best) {
    s_star = nodes(best_k);
    v_star = best;
  }
  out.value = v_star;
  out.truncated = best_k == nodes.size() - 1;
  out.argmax = SmallVec::Constant(1, s_star);
  return out;
}

ConjugateValue conjugate_nd(const NFunctionSpec& M, double t, const SmallVec& x, const SmallVec& eta,
                            const ConjugateSearch& search) {
  const int dim = M.dim;
  if (dim > kMaxDim) throw InvalidInput("conjugate_nd: brute force limited to dim <= 3");
  if (eta.size() != dim) throw InvalidInput("conjugate_nd: eta dimension mismatch");

  if (M.separable()) {
    ConjugateValue out;
    out.argmax = SmallVec::Zero(dim);
    for (int i = 0; i < dim; ++i) {
      const auto& comp = M.components[static_cast<std::size_t>(i)];
      const double sign = eta(i) < 0 ? -1.0 : 1.0;
      auto part = conjugate_radial([&](double s) { return comp(t, x, s); }, std::abs(eta(i)), search);
      out.value += part.value;
      out.truncated = out.truncated || part.truncated;
      out.argmax(i) = sign * part.argmax(0);
    }
    return out;
  }

  const double R = search.radius;
  const int per_axis = dim == 1 ? search.resolution : (dim == 2 ? std::min(search.resolution, 401)
                                                                 : std::min(search.resolution, 61));
  const double h = 2 * R / (per_axis - 1);
  auto obj = [&](const SmallVec& xi) {
    return dual_objective(xi.dot(eta), M(t, x, xi), "conjugate_nd");
  };

  SmallVec best_xi = SmallVec::Zero(dim);
  double best = obj(best_xi);
  int total = 1;
  for (int d = 0; d < dim; ++d) total *= per_axis;
  SmallVec xi(dim);
  for (int idx = 0; idx < total; ++idx) {
    int rem = idx;
    for (int d = 0; d < dim; ++d) {
      xi(d) = -R + h * (rem % per_axis);
      rem /= per_axis;
    }
    if (xi.norm() > R) continue;
    const double v = obj(xi);
    if (v > best) {
      best = v;
      best_xi = xi;
    }
  }
  // compass search: the objective is concave, so local refinement is global
  double step = h;
  const double min_step = 1e-13 * (1.0 + R);
  while (step > min_step) {
    bool moved = false;
    for (int d = 0; d < dim; ++d) {
      for (double sgn : {1.0, -1.0}) {
        SmallVec cand = best_xi;
        cand(d) += sgn * step;
        if (cand.norm() > R) continue;
        const double v = obj(cand);
        if (v > best) {
          best = v;
          best_xi = cand;
          moved = true;
        }
      }
    }
    if (!moved) step *= 0.5;
  }
  ConjugateValue out;
  out.value = best;
  out.argmax = best_xi;
  out.truncated = best_xi.norm() >= R - 1.5 * h;
  return out;
}

ConjugateAccessor make_conjugate_accessor(const NFunctionSpec& M, const ConjugateSearch& search,
                                          bool prefer_analytic) {
  if (prefer_analytic && M.analytic_conjugate) {
    auto conj = *M.analytic_conjugate;
    return [conj](double t, const SmallVec& x, const SmallVec& eta) {
      return ConjugateValue{conj(t, x, eta), false, SmallVec()};
    };
  }
  if (M.isotropic && M.radial) {
    auto radial = M.radial;
    return [radial, search](double t, const SmallVec& x, const SmallVec& eta) {
      return conjugate_radial([&](double s) { return radial(t, x, s); }, eta.norm(), search);
    };
  }
  return [M, search](double t, const SmallVec& x, const SmallVec& eta) { return conjugate_nd(M, t, x, eta, search); };
}

ResidualStats fenchel_young_residual(const NFunctionSpec& M, const ConjugateAccessor& conj,
                                     const std::vector<ConjugatePair>& pairs) {
  ResidualStats st;
  st.min = std::numeric_limits<double>::infinity();
  st.max = -std::numeric_limits<double>::infinity();
  double sum = 0;
  for (const auto& p : pairs) {
    const auto c = conj(p.t, p.x, p.eta);
    if (c.truncated) {
      ++st.excluded_truncated;
      continue;
    }
    const double r = M(p.t, p.x, p.xi) + c.value - p.xi.dot(p.eta);
    st.min = std::min(st.min, r);
    st.max = std::max(st.max, r);
    sum += r;
    ++st.count;
  }
  st.mean = st.count ? sum / double(st.count) : 0.0;
  if (!st.count) st.min = st.max = 0.0;
  return st;
}

SmallVec flux_gradient(const NFunctionSpec& m, double t, const SmallVec& x, const SmallVec& xi) {
  const int dim = static_cast<int>(xi.size());
  if (xi.norm() == 0.0) return SmallVec::Zero(dim);
  if (m.gradient) return (*m.gradient)(t, x, xi);
  const double h = 1e-5 * (1.0 + xi.norm());
  SmallVec g(dim);
  for (int i = 0; i < dim; ++i) {
    SmallVec a = xi, b = xi;
    a(i) += h;
    b(i) -= h;
    g(i) = (m(t, x, a) - m(t, x, b)) / (2 * h);
  }
  return g;
}

double fy_equality_residual(const NFunctionSpec& m, const ConjugateAccessor& conj, double t, const SmallVec& x,
                            const SmallVec& xi) {
  const SmallVec g = flux_gradient(m, t, x, xi);
  return g.dot(xi) - m(t, x, xi) - conj(t, x, g).value;
}

Delta2Estimate delta2_estimate(const NFunctionSpec& M, const SamplingPlan& plan, double xi0, int levels) {
  Delta2Estimate est;
  const auto dirs = ray_directions(M.dim, plan.directions, plan.seed);
  bool nonfinite = false;
  for (int l = 0; l < levels; ++l) {
    const double s = xi0 * std::pow(plan.s_max / xi0, double(l) / std::max(1, levels - 1));
    double sup = 0;
    for (double t : plan.times)
      for (const auto& x : plan.points)
        for (const auto& d : dirs) {
          const double a = M(t, x, s * d), b = M(t, x, 2 * s * d);
          const double r = b / a;
          if (!std::isfinite(r)) {
            nonfinite = true;
            continue;
          }
          sup = std::max(sup, r);
        }
    est.ladder.push_back(s);
    est.ratios.push_back(nonfinite ? std::numeric_limits<double>::infinity() : sup);
  }
  est.constant = est.ratios.empty() ? 0 : *std::max_element(est.ratios.begin(), est.ratios.end());
  if (nonfinite) {
    est.unbounded = true;
    return est;
  }
  // growth rule over the top two decades
  const double floor_s = plan.s_max / 100.0;
  std::size_t first = est.ladder.size();
  for (std::size_t i = 0; i < est.ladder.size(); ++i)
    if (est.ladder[i] >= floor_s * (1 - 1e-12)) {
      first = i;
      break;
    }
  if (first + 1 < est.ladder.size()) {
    bool monotone = true;
    for (std::size_t i = first + 1; i < est.ratios.size(); ++i)
      monotone = monotone && est.ratios[i] >= est.ratios[i - 1] * (1 - 1e-9);
    est.unbounded = monotone && est.ratios.back() > 4.0 * est.ratios[first];
  }
  return est;
}

double empirical_growth_exponent(const NFunctionSpec& M, double t, const SmallVec& x, double s_lo, double s_hi) {
  double worst = 0;
  for (const auto& d : ray_directions(M.dim, 0, 1)) {
    const double a = M(t, x, s_lo * d), b = M(t, x, s_hi * d);
    if (!(a > 0) || !std::isfinite(b)) return std::numeric_limits<double>::infinity();
    worst = std::max(worst, std::log(b / a) / std::log(s_hi / s_lo));
  }
  return worst;
}

}  // namespace mop
