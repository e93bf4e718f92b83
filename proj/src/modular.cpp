#include "mop/modular.hpp"

#include <cmath>

namespace mop {

namespace {

template <typename Fn>
double bisect_norm(Fn&& rho, const LuxemburgOptions& opts) {
  double lo = opts.lambda_min, hi = opts.lambda_max;
  const double at_hi = rho(hi);
  if (!std::isfinite(at_hi) || at_hi > 1.0) throw UnboundedNorm("luxemburg_norm: no bracketing lambda below lambda_max");
  if (rho(lo) <= 1.0) return lo;
  // rho is nonincreasing in lambda; bisect on log(lambda).
  while (hi / lo - 1.0 > 1e-2 * opts.rel_tol) {
    const double mid = std::sqrt(lo * hi);
    const double v = rho(mid);
    if (std::isfinite(v) && v <= 1.0)
      hi = mid;
    else
      lo = mid;
  }
  return std::sqrt(lo * hi);
}

}  // namespace

double modular(const NFunctionSpec& M, const VectorField& xi) { return modular_scaled(M, xi, 1.0); }

double modular_scaled(const NFunctionSpec& M, const VectorField& xi, double lambda) {
  const double inv = 1.0 / lambda;
  double acc = 0;
  for (Eigen::Index i = 0; i < xi.size(); ++i) {
    const double w = xi.weight(i);
    if (w == 0) continue;
    const SmallVec v = xi.value(i);
    if (v.isZero(0)) continue;
    acc += w * M(xi.t(i), xi.point(i), inv * v);
  }
  return acc;
}

double luxemburg_norm(const NFunctionSpec& M, const VectorField& xi, const LuxemburgOptions& opts) {
  if (xi.values.isZero(0)) return 0.0;
  return bisect_norm([&](double lambda) { return modular_scaled(M, xi, lambda); }, opts);
}

double luxemburg_norm_conjugate(const ConjugateAccessor& conj, const VectorField& eta, const LuxemburgOptions& opts) {
  if (eta.values.isZero(0)) return 0.0;
  auto rho = [&](double lambda) {
    double acc = 0;
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
      const SmallVec v = eta.value(i);
      if (v.isZero(0)) continue;
      acc += eta.weight(i) * conj(eta.t(i), eta.point(i), v / lambda).value;
    }
    return acc;
  };
  return bisect_norm(rho, opts);
}

HolderCheck holder_pairing_check(const NFunctionSpec& M, const VectorField& xi, const VectorField& eta,
                                 const ConjugateAccessor& conj, double tol) {
  if (xi.size() != eta.size() || xi.dim != eta.dim) throw InvalidInput("holder_pairing_check: field shape mismatch");
  HolderCheck out;
  double pairing = 0;
  for (Eigen::Index i = 0; i < xi.size(); ++i) pairing += xi.weight(i) * xi.values.col(i).dot(eta.values.col(i));
  out.lhs = std::abs(pairing);
  out.rhs = 2.0 * luxemburg_norm(M, xi) * luxemburg_norm_conjugate(conj, eta);
  out.pass = out.lhs <= out.rhs + tol;
  return out;
}

HolderCheck holder_pairing_check(const NFunctionSpec& M, const VectorField& xi, const VectorField& eta) {
  return holder_pairing_check(M, xi, eta, make_conjugate_accessor(M));
}

ModularConvergence modular_convergence_test(const NFunctionSpec& M, const std::vector<VectorField>& sequence,
                                            const VectorField& limit, double tol) {
  if (sequence.empty()) throw InvalidInput("modular_convergence_test: empty sequence");
  std::vector<VectorField> diffs;
  diffs.reserve(sequence.size());
  for (const auto& s : sequence) {
    if (s.size() != limit.size() || s.dim != limit.dim)
      throw InvalidInput("modular_convergence_test: field shape mismatch");
    diffs.push_back(limit.with_values(s.values - limit.values));
  }
  ModularConvergence out;
  for (int k = 0; k <= 20; ++k) {
    const double lambda = std::ldexp(1.0, k);
    std::vector<double> table;
    bool finite = true;
    for (const auto& d : diffs) {
      table.push_back(modular_scaled(M, d, lambda));
      finite = finite && std::isfinite(table.back());
    }
    if (k == 0) out.decay = table;
    if (!finite) continue;
    bool tail_nonincreasing = true;
    for (std::size_t i = table.size() / 2 + 1; i < table.size(); ++i)
      if (table[i] > table[i - 1] * (1 + 1e-12) + tol) tail_nonincreasing = false;
    const bool small = table.back() <= tol || table.back() <= 0.1 * table.front();
    if (tail_nonincreasing && small) {
      out.lambda = lambda;
      out.decay = std::move(table);
      break;
    }
  }
  return out;
}

PoincareCheck poincare_check(const NFunctionSpec& B, const Field& g) {
  if (!B.isotropic) throw InvalidInput("poincare_check: B must be isotropic");
  if (!g.dirichlet_admissible(1e-12)) throw InvalidInput("poincare_check: field is not zero on the boundary");
  const SimplexMesh mesh(g.domain.space);
  const VectorField vals = value_samples(g, mesh);
  const VectorField grads = gradient_samples(g, mesh);
  PoincareCheck out;
  SmallVec probe = SmallVec::Zero(B.dim);
  for (Eigen::Index i = 0; i < vals.size(); ++i) {
    probe(0) = std::abs(vals.values(0, i));
    out.lhs += vals.weight(i) * B(vals.t(i), vals.point(i), probe);
    probe(0) = grads.values.col(i).norm();
    out.rhs += grads.weight(i) * B(grads.t(i), grads.point(i), probe);
  }
  out.ratio = out.rhs > 0 ? out.lhs / out.rhs : 0.0;
  return out;
}

std::vector<double> tail_mass(const std::vector<VectorField>& family, const std::vector<double>& radii) {
  std::vector<double> out(radii.size(), 0.0);
  for (const auto& f : family) {
    for (std::size_t r = 0; r < radii.size(); ++r) {
      double acc = 0;
      for (Eigen::Index i = 0; i < f.size(); ++i) {
        const double n = f.values.col(i).norm();
        if (n >= radii[r]) acc += f.weight(i) * n;
      }
      out[r] = std::max(out[r], acc);
    }
  }
  return out;
}

}  // namespace mop
