#include "mop/balance.hpp"

#include <cmath>
#include <limits>
#include <map>

namespace mop {

namespace {

struct Sample {
  double t;
  SmallVec x;
};

bool clip_box(const BoxDomain& omega, const SmallVec& lo, const SmallVec& hi, SmallVec& a, SmallVec& b) {
  a = lo.cwiseMax(omega.lo);
  b = hi.cwiseMin(omega.hi);
  return (b.array() >= a.array()).all();
}

std::vector<Sample> box_samples(const SmallVec& a, const SmallVec& b, const std::vector<double>& times, int per_axis) {
  const int dim = static_cast<int>(a.size());
  int count = 1;
  for (int d = 0; d < dim; ++d) count *= per_axis;
  std::vector<Sample> out;
  out.reserve(static_cast<std::size_t>(count) * times.size());
  for (double t : times) {
    for (int c = 0; c < count; ++c) {
      SmallVec x(dim);
      int rem = c;
      for (int d = 0; d < dim; ++d) {
        const int k = rem % per_axis;
        rem /= per_axis;
        x(d) = per_axis == 1 ? 0.5 * (a(d) + b(d)) : a(d) + (b(d) - a(d)) * k / (per_axis - 1);
      }
      out.push_back({t, x});
    }
  }
  return out;
}

std::vector<double> interval_times(const NFunctionSpec& M, const BoxDomain& omega, const Cylinder& c, int n) {
  const double ta = std::max(0.0, c.t_a), tb = std::min(omega.T, c.t_b);
  if (tb < ta) throw InvalidInput("cylinder: time interval disjoint from (0, T)");
  if (M.time_invariant || n <= 1) return {ta};
  std::vector<double> ts;
  for (int k = 0; k < n; ++k) ts.push_back(ta + (tb - ta) * k / (n - 1));
  return ts;
}

std::vector<Sample> enlarged_samples(const NFunctionSpec& M, const BoxDomain& omega, const Cylinder& c,
                                     const CylinderSampling& sampling) {
  SmallVec a, b;
  if (!clip_box(omega, c.enlarged_lo(), c.enlarged_hi(), a, b))
    throw InvalidInput("cylinder: cube disjoint from Omega");
  return box_samples(a, b, interval_times(M, omega, c, sampling.time_points), sampling.per_axis);
}

std::vector<Sample> cube_samples(const NFunctionSpec& M, const BoxDomain& omega, const Cylinder& c,
                                 const CylinderSampling& sampling) {
  SmallVec a, b;
  if (!clip_box(omega, c.cube_lo(), c.cube_hi(), a, b)) throw InvalidInput("cylinder: cube disjoint from Omega");
  return box_samples(a, b, interval_times(M, omega, c, sampling.time_points), sampling.per_axis);
}

double min_over(const NFunctionSpec& M, const std::vector<Sample>& samples, const SmallVec& xi) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& s : samples) best = std::min(best, M(s.t, s.x, xi));
  return best;
}

Eigen::ArrayXd probe_nodes(double s, int count) {
  const int upper = std::max(2, count / 5);
  const int lower = std::max(2, count - upper);
  Eigen::ArrayXd nodes(lower + upper + 1);
  nodes(0) = 0;
  for (int k = 0; k < lower; ++k) nodes(1 + k) = s * std::exp2(-8.0 * (1.0 - double(k) / (lower - 1)));
  for (int k = 1; k <= upper; ++k) nodes(lower + k) = s * std::exp2(2.0 * k / upper);
  nodes(lower) = s;
  return nodes;
}

struct CylinderResult {
  double ratio = 0;
  BalanceWitness witness;
};

CylinderResult scan_cylinder(const NFunctionSpec& M, const BoxDomain& omega, const Cylinder& c,
                             const std::vector<SmallVec>& dirs, double s, const ScanOptions& opts,
                             const CylinderSampling& sampling) {
  const auto inner = cube_samples(M, omega, c, sampling);
  const auto outer = enlarged_samples(M, omega, c, sampling);
  const Eigen::ArrayXd nodes = probe_nodes(s, opts.profile_nodes);
  Eigen::Index at_s = 0;
  for (Eigen::Index k = 0; k < nodes.size(); ++k)
    if (nodes(k) == s) at_s = k;
  CylinderResult res;
  res.witness.delta = c.delta;
  for (const auto& d : dirs) {
    SampledProfile<double> f;
    f.nodes = nodes;
    f.values.resize(nodes.size());
    for (Eigen::Index k = 0; k < nodes.size(); ++k) f.values(k) = min_over(M, outer, nodes(k) * d);
    const double env = convex_envelope_1d(f).values(at_s);
    const SmallVec xi = s * d;
    for (const auto& smp : inner) {
      const double num = M(smp.t, smp.x, xi);
      double r;
      if (env > 0)
        r = num / env;
      else
        r = num > 0 ? std::numeric_limits<double>::infinity() : 1.0;
      if (!(r <= res.ratio)) {
        res.ratio = r;
        res.witness.t = smp.t;
        res.witness.x = smp.x;
        res.witness.xi = xi;
      }
    }
  }
  return res;
}

BalanceReport scan_once(const NFunctionSpec& M, const BoxDomain& omega, const ScanOptions& opts,
                        const CylinderSampling& sampling) {
  const int N = omega.dim();
  if (N != M.dim) throw InvalidInput("theta_scan: domain and modular dimensions differ");
  if (opts.delta_grid.empty()) throw InvalidInput("theta_scan: empty delta grid");
  for (std::size_t i = 1; i < opts.delta_grid.size(); ++i)
    if (!(opts.delta_grid[i] < opts.delta_grid[i - 1])) throw InvalidInput("theta_scan: delta grid must decrease");
  double exponent = N;
  if (opts.mode == ProbeMode::NOverP) {
    const auto p = opts.p ? opts.p : M.growth_exponent_p;
    if (!p) throw InvalidInput("theta_scan: mode N/p needs a growth exponent");
    exponent = N / *p;
  }
  std::vector<SmallVec> dirs = opts.directions;
  if (dirs.empty()) {
    if (M.isotropic) {
      dirs.push_back(SmallVec::Unit(N, 0));
    } else {
      dirs = ray_directions(N, 8, opts.seed);
    }
  }

  BalanceReport rep;
  rep.delta_grid = opts.delta_grid;
  double worst = -1;
  for (double delta : opts.delta_grid) {
    double s = std::pow(delta, -exponent);
    const bool cap = s > opts.s_cap;
    s = std::max(std::min(s, opts.s_cap), opts.xi_floor);

    std::vector<Cylinder> cyl;
    const int nt = M.time_invariant ? 1 : static_cast<int>(std::ceil(omega.T / delta - 1e-12));
    std::array<int, kMaxDim> per{1, 1, 1};
    int cubes = 1;
    for (int d = 0; d < N; ++d) {
      per[static_cast<std::size_t>(d)] = static_cast<int>(std::ceil((omega.hi(d) - omega.lo(d)) / (2 * delta) - 1e-12));
      cubes *= per[static_cast<std::size_t>(d)];
    }
    for (int i = 0; i < nt; ++i) {
      for (int c = 0; c < cubes; ++c) {
        Cylinder cy;
        cy.delta = delta;
        cy.t_a = i * delta;
        cy.t_b = M.time_invariant ? std::min(delta, omega.T) : std::min((i + 1) * delta, omega.T);
        cy.center.resize(N);
        int rem = c;
        for (int d = 0; d < N; ++d) {
          const int k = rem % per[static_cast<std::size_t>(d)];
          rem /= per[static_cast<std::size_t>(d)];
          cy.center(d) = omega.lo(d) + (2 * k + 1) * delta;
        }
        cyl.push_back(cy);
      }
    }
    std::vector<CylinderResult> results(cyl.size());
    parallel_for(cyl.size(), [&](std::size_t i) { results[i] = scan_cylinder(M, omega, cyl[i], dirs, s, opts, sampling); });
    double R = 0;
    std::size_t arg = 0;
    for (std::size_t i = 0; i < results.size(); ++i)
      if (!(results[i].ratio <= R)) {
        R = results[i].ratio;
        arg = i;
      }
    rep.s_probe.push_back(s);
    rep.theta_values.push_back(R);
    rep.capped.push_back(cap);
    rep.any_capped = rep.any_capped || cap;
    if (!(R <= worst)) {
      worst = R;
      rep.witness = results[arg].witness;
    }
  }
  apply_verdict(rep, opts);
  return rep;
}

}  // namespace

double cylinder_infimum(const NFunctionSpec& M, const BoxDomain& omega, const Cylinder& c, const SmallVec& xi,
                        const CylinderSampling& sampling) {
  if (sampling.per_axis < 8) throw InvalidInput("cylinder_infimum: need at least 8 samples per axis");
  return min_over(M, enlarged_samples(M, omega, c, sampling), xi);
}

SampledProfile<double> minorant_profile(const NFunctionSpec& M, const BoxDomain& omega, const Cylinder& c,
                                        const SmallVec& direction, const Eigen::ArrayXd& nodes,
                                        const CylinderSampling& sampling) {
  const auto samples = enlarged_samples(M, omega, c, sampling);
  SampledProfile<double> f;
  f.nodes = nodes;
  f.values.resize(nodes.size());
  for (Eigen::Index k = 0; k < nodes.size(); ++k) f.values(k) = min_over(M, samples, nodes(k) * direction);
  return convex_envelope_1d(f);
}

void apply_verdict(BalanceReport& rep, const ScanOptions& opts) {
  const auto& R = rep.theta_values;
  const std::size_t n = R.size();
  rep.pass = true;
  rep.borderline = false;
  rep.slope = 0;
  for (double r : R)
    if (!std::isfinite(r)) rep.pass = false;
  if (!rep.pass || n < 2) return;
  const std::size_t first = n >= 3 ? n - 3 : 0;
  const double growth = R[n - 1] / R[first];
  rep.slope = std::log(growth) / std::log(rep.delta_grid[first] / rep.delta_grid[n - 1]);
  if (growth > opts.growth_factor || rep.slope > opts.slope_limit) rep.pass = false;
  rep.borderline = rep.pass && rep.slope > opts.borderline_slope;
}

BalanceReport theta_scan(const NFunctionSpec& M, const BoxDomain& omega, const ScanOptions& opts) {
  BalanceReport rep = scan_once(M, omega, opts, opts.sampling);
  if (opts.stability_check) {
    CylinderSampling fine = opts.sampling;
    fine.per_axis *= 2;
    fine.time_points *= 2;
    rep.stable = scan_once(M, omega, opts, fine).pass == rep.pass;
  }
  return rep;
}

IsotropicTable isotropic_theta(const NFunctionSpec& M, const std::vector<std::pair<ProbePoint, ProbePoint>>& pairs,
                               const std::vector<double>& s_ladder, std::optional<double> c_sp) {
  if (!M.isotropic) throw InvalidInput("isotropic_theta: M must be isotropic");
  const double c = c_sp ? *c_sp : std::sqrt(double(M.dim));
  auto radial = [&](double t, const SmallVec& x, double s) {
    if (M.radial) return M.radial(t, x, s);
    return M(t, x, s * SmallVec::Unit(M.dim, 0));
  };
  IsotropicTable tab;
  tab.s_ladder = s_ladder;
  std::map<double, std::vector<double>> by_distance;
  for (const auto& [a, b] : pairs) {
    const double d = std::abs(a.t - b.t) + c * (a.x - b.x).norm();
    auto& row = by_distance[d];
    if (row.empty()) row.assign(s_ladder.size(), 0.0);
    for (std::size_t j = 0; j < s_ladder.size(); ++j) {
      const double ma = radial(a.t, a.x, s_ladder[j]);
      const double mb = radial(b.t, b.x, s_ladder[j]);
      if (!(ma > 0) || !(mb > 0)) {
        ++tab.excluded;
        continue;
      }
      row[j] = std::max(row[j], std::max(ma / mb, mb / ma));
    }
  }
  tab.theta = Mat::Zero(static_cast<Eigen::Index>(by_distance.size()), static_cast<Eigen::Index>(s_ladder.size()));
  Eigen::Index i = 0;
  for (const auto& [d, row] : by_distance) {
    tab.distances.push_back(d);
    for (std::size_t j = 0; j < row.size(); ++j) {
      double v = row[j];
      if (i > 0) v = std::max(v, tab.theta(i - 1, static_cast<Eigen::Index>(j)));
      if (j > 0) v = std::max(v, tab.theta(i, static_cast<Eigen::Index>(j - 1)));
      tab.theta(i, static_cast<Eigen::Index>(j)) = v;
    }
    ++i;
  }
  return tab;
}

ClosenessVerdict double_phase_closeness(double p, double q, double alpha, int N, ProbeMode mode) {
  if (!(p > 1) || !(q > 1)) throw InvalidInput("double_phase_closeness: need p, q > 1");
  if (!(alpha > 0) || alpha > 1) throw InvalidInput("double_phase_closeness: alpha must lie in (0, 1]");
  ClosenessVerdict v;
  v.threshold = N * (q - p);
  if (mode == ProbeMode::NOverP) v.threshold /= p;
  v.margin = alpha - v.threshold;
  v.trivial = q <= p;
  v.pass = v.trivial || v.margin >= -1e-12;
  return v;
}

}  // namespace mop
