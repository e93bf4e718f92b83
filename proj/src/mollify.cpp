#include "mop/mollify.hpp"

#include <cmath>
#include <iostream>

namespace mop {

namespace {

double interpolate(const SpaceGrid& g, const Eigen::Ref<const Vec>& v, const SmallVec& y) {
  const int dim = g.dim;
  std::array<int, kMaxDim> base{0, 0, 0};
  std::array<double, kMaxDim> frac{0, 0, 0};
  for (int d = 0; d < dim; ++d) {
    if (y(d) < g.lo(d) || y(d) > g.hi(d)) return 0.0;
    const double u = (y(d) - g.lo(d)) / g.h(d);
    int i = static_cast<int>(std::floor(u));
    i = std::clamp(i, 0, g.n - 2);
    base[static_cast<std::size_t>(d)] = i;
    frac[static_cast<std::size_t>(d)] = std::clamp(u - i, 0.0, 1.0);
  }
  double acc = 0;
  for (int corner = 0; corner < (1 << dim); ++corner) {
    auto idx = base;
    double w = 1;
    for (int d = 0; d < dim; ++d) {
      const bool up = (corner >> d) & 1;
      const auto k = static_cast<std::size_t>(d);
      idx[k] += up;
      w *= up ? frac[k] : 1.0 - frac[k];
    }
    if (w != 0) acc += w * v(g.linear_index(idx));
  }
  return acc;
}

void check_geometry(const SpaceGrid& g, double delta, double R, const SmallVec& c) {
  if (!(R > 0)) throw InvalidInput("space_mollify: R must be positive");
  if (!(delta > 0) || !(delta < R / 4)) throw InvalidInput("space_mollify: need 0 < delta < R/4");
  for (int d = 0; d < g.dim; ++d) {
    if (c(d) - R < g.lo(d) - 1e-12 || c(d) + R > g.hi(d) + 1e-12)
      throw UnsupportedDomain("space_mollify: the ball B(center, R) does not fit inside Omega");
  }
}

Vec mollify_slice(const SpaceGrid& g, const Kernel& k, const Eigen::Ref<const Vec>& v, double kappa, const SmallVec& c) {
  const int nn = g.node_count();
  Vec pulled(nn);
  for (int i = 0; i < nn; ++i) {
    const SmallVec y = c + (g.node(i) - c) / kappa;
    pulled(i) = interpolate(g, v, y);
  }
  Vec out = Vec::Zero(nn);
  for (int j = 0; j < nn; ++j) {
    const double gj = pulled(j);
    if (gj == 0) continue;
    const auto idx = g.multi_index(j);
    for (std::size_t t = 0; t < k.taps(); ++t) {
      auto target = idx;
      bool inside = true;
      for (int d = 0; d < g.dim; ++d) {
        const auto a = static_cast<std::size_t>(d);
        target[a] += k.offsets[t][a];
        if (target[a] < 0 || target[a] >= g.n) inside = false;
      }
      if (inside) out(g.linear_index(target)) += k.weights[t] * gj;
    }
  }
  return out;
}

Field average_in_time(const Field& phi, double epsilon, TimeAverageInfo* info, bool forward) {
  const auto& d = phi.domain;
  if (!(epsilon > 0)) throw InvalidInput("time average: epsilon must be positive");
  int m = static_cast<int>(std::lround(epsilon / d.dt()));
  m = std::max(m, 1);
  const double used = m * d.dt();
  const bool snapped = std::abs(used - epsilon) > 1e-9 * epsilon;
  if (snapped)
    std::cerr << "warning: time-average window " << epsilon << " snapped to " << used << "\n";
  if (info) *info = {used, m, snapped};
  Field out(d);
  const int L = d.levels();
  for (int k = 0; k < L; ++k) {
    Vec acc = Vec::Zero(phi.values.rows());
    for (int j = 0; j <= m; ++j) {
      const int level = forward ? k + j : k - j;
      if (level < 0 || level >= L) continue;
      const double w = (j == 0 || j == m) ? 0.5 : 1.0;
      acc += w * phi.values.col(level);
    }
    out.values.col(k) = acc / m;
  }
  return out;
}

}  // namespace

double Kernel::mass() const {
  double s = 0;
  for (double w : weights) s += w;
  return s;
}

Kernel make_kernel(const SpaceGrid& g, double delta) {
  if (!(delta > 0)) throw InvalidInput("make_kernel: delta must be positive");
  Kernel k;
  k.delta = delta;
  std::array<int, kMaxDim> r{0, 0, 0};
  int count = 1;
  for (int d = 0; d < g.dim; ++d) {
    r[static_cast<std::size_t>(d)] = static_cast<int>(std::ceil(delta / g.h(d)));
    count *= 2 * r[static_cast<std::size_t>(d)] + 1;
  }
  for (int c = 0; c < count; ++c) {
    std::array<int, kMaxDim> off{0, 0, 0};
    int rem = c;
    double dist2 = 0;
    for (int d = 0; d < g.dim; ++d) {
      const auto a = static_cast<std::size_t>(d);
      const int width = 2 * r[a] + 1;
      off[a] = rem % width - r[a];
      rem /= width;
      dist2 += std::pow(off[a] * g.h(d), 2);
    }
    const double rho2 = dist2 / (delta * delta);
    if (rho2 >= 1.0) continue;
    k.offsets.push_back(off);
    k.weights.push_back(std::exp(-1.0 / (1.0 - rho2)));
  }
  const double total = k.mass();
  for (double& w : k.weights) w /= total;
  return k;
}

NodalVectorField space_mollify(const NodalVectorField& xi, double delta, double R, std::optional<SmallVec> center) {
  const auto& d = xi.domain();
  const SpaceGrid& g = d.space;
  const SmallVec c = center ? *center : g.center();
  check_geometry(g, delta, R, c);
  const Kernel k = make_kernel(g, delta);
  const double kappa = 1.0 - delta / R;
  NodalVectorField out;
  for (const auto& comp : xi.components) {
    Field f(d);
    for (int level = 0; level < d.levels(); ++level) {
      if (comp.values.col(level).isZero(0)) continue;
      f.values.col(level) = mollify_slice(g, k, comp.values.col(level), kappa, c);
    }
    out.components.push_back(std::move(f));
  }
  return out;
}

Field space_mollify(const Field& phi, double delta, double R, std::optional<SmallVec> center) {
  return space_mollify(NodalVectorField{{phi}}, delta, R, center).components.front();
}

Field time_average_forward(const Field& phi, double epsilon, TimeAverageInfo* info) {
  return average_in_time(phi, epsilon, info, true);
}

Field time_average_backward(const Field& phi, double epsilon, TimeAverageInfo* info) {
  return average_in_time(phi, epsilon, info, false);
}

std::vector<std::vector<NodalVectorField>> mollify_corpus(const std::vector<NodalVectorField>& corpus,
                                                          const std::vector<double>& deltas, double R,
                                                          std::optional<SmallVec> center) {
  std::vector<std::vector<NodalVectorField>> out(deltas.size(), std::vector<NodalVectorField>(corpus.size()));
  const std::size_t jobs = deltas.size() * corpus.size();
  parallel_for(jobs, [&](std::size_t j) {
    const std::size_t di = j / corpus.size(), fi = j % corpus.size();
    out[di][fi] = space_mollify(corpus[fi], deltas[di], R, center);
  });
  return out;
}

UniformBoundTable uniform_modular_bound_space(const NFunctionSpec& M, const std::vector<NodalVectorField>& corpus,
                                              const std::vector<std::vector<NodalVectorField>>& mollified,
                                              const std::vector<double>& deltas) {
  if (mollified.size() != deltas.size()) throw InvalidInput("uniform_modular_bound_space: table shape mismatch");
  UniformBoundTable tab;
  tab.deltas = deltas;
  const auto nd = static_cast<Eigen::Index>(deltas.size());
  const auto nf = static_cast<Eigen::Index>(corpus.size());
  tab.ratio = Mat::Constant(nd, nf, std::numeric_limits<double>::quiet_NaN());
  tab.max_per_delta.assign(deltas.size(), 0.0);
  for (Eigen::Index i = 0; i < nf; ++i) {
    const double base = modular(M, nodal_samples(corpus[static_cast<std::size_t>(i)]));
    if (!(base > 0)) {
      ++tab.excluded;
      continue;
    }
    for (Eigen::Index k = 0; k < nd; ++k) {
      const double v =
          modular(M, nodal_samples(mollified[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)])) / base;
      tab.ratio(k, i) = v;
      tab.max_per_delta[static_cast<std::size_t>(k)] = std::max(tab.max_per_delta[static_cast<std::size_t>(k)], v);
    }
  }
  return tab;
}

UniformBoundTable uniform_modular_bound_space(const NFunctionSpec& M, const std::vector<NodalVectorField>& corpus,
                                              const std::vector<double>& deltas, double R,
                                              std::optional<SmallVec> center) {
  return uniform_modular_bound_space(M, corpus, mollify_corpus(corpus, deltas, R, center), deltas);
}

double l1_norm(const Field& f) {
  const VectorField s = nodal_samples(NodalVectorField{{f}});
  return s.weight.dot(s.values.row(0).cwiseAbs().transpose());
}

ApproximationReport approximation_experiment(const NFunctionSpec& M, const Field& phi,
                                             const std::vector<double>& deltas, const std::vector<double>& epsilons,
                                             double R, std::optional<SmallVec> center) {
  if (!phi.dirichlet_admissible(1e-12)) throw InvalidInput("approximation_experiment: phi must vanish on the boundary");
  const SimplexMesh mesh(phi.domain.space);
  const VectorField grad = gradient_samples(phi, mesh);
  ApproximationReport rep;
  auto monotone = [](const std::vector<ApproximationRow>& rows) {
    for (std::size_t i = 1; i < rows.size(); ++i)
      if (rows[i].l1_error > rows[i - 1].l1_error * (1 + 1e-9) + 1e-14) return false;
    return true;
  };

  std::vector<VectorField> seq;
  for (double delta : deltas) {
    Field f = space_mollify(phi, delta, R, center);
    Field diff = f;
    diff.values -= phi.values;
    rep.space.push_back({delta, l1_norm(diff)});
    seq.push_back(gradient_samples(f, mesh));
  }
  if (!seq.empty()) rep.space_gradients = modular_convergence_test(M, seq, grad);
  rep.space_monotone = monotone(rep.space);

  seq.clear();
  for (double eps : epsilons) {
    Field f = time_average_forward(phi, eps);
    Field diff = f;
    diff.values -= phi.values;
    rep.time.push_back({eps, l1_norm(diff)});
    seq.push_back(gradient_samples(f, mesh));
  }
  if (!seq.empty()) rep.time_gradients = modular_convergence_test(M, seq, grad);
  rep.time_monotone = monotone(rep.time);
  return rep;
}

}  // namespace mop
