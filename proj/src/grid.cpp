#include "mop/grid.hpp"

#include <cmath>
#include <numeric>

namespace mop {

SpaceGrid::SpaceGrid(const SmallVec& lo_, const SmallVec& hi_, int n_)
    : dim(static_cast<int>(lo_.size())), lo(lo_), hi(hi_), n(n_) {
  if (dim < 1 || dim > kMaxDim) throw InvalidInput("SpaceGrid: dimension must be 1..3");
  if (hi_.size() != lo_.size()) throw InvalidInput("SpaceGrid: lo/hi size mismatch");
  if (n < 2) throw InvalidInput("SpaceGrid: need at least 2 nodes per axis");
  for (int d = 0; d < dim; ++d)
    if (!(hi(d) > lo(d))) throw InvalidInput("SpaceGrid: empty box");
}

double SpaceGrid::node_volume() const {
  double v = 1;
  for (int d = 0; d < dim; ++d) v *= h(d);
  return v;
}

double SpaceGrid::measure() const {
  double v = 1;
  for (int d = 0; d < dim; ++d) v *= hi(d) - lo(d);
  return v;
}

int SpaceGrid::node_count() const {
  int c = 1;
  for (int d = 0; d < dim; ++d) c *= n;
  return c;
}

std::array<int, kMaxDim> SpaceGrid::multi_index(int node) const {
  std::array<int, kMaxDim> idx{0, 0, 0};
  for (int d = 0; d < dim; ++d) {
    idx[static_cast<std::size_t>(d)] = node % n;
    node /= n;
  }
  return idx;
}

int SpaceGrid::linear_index(const std::array<int, kMaxDim>& idx) const {
  int lin = 0;
  for (int d = dim - 1; d >= 0; --d) lin = lin * n + idx[static_cast<std::size_t>(d)];
  return lin;
}

SmallVec SpaceGrid::node(int node) const {
  const auto idx = multi_index(node);
  SmallVec x(dim);
  for (int d = 0; d < dim; ++d) x(d) = lo(d) + h(d) * idx[static_cast<std::size_t>(d)];
  return x;
}

bool SpaceGrid::on_boundary(int node) const {
  const auto idx = multi_index(node);
  for (int d = 0; d < dim; ++d) {
    const int i = idx[static_cast<std::size_t>(d)];
    if (i == 0 || i == n - 1) return true;
  }
  return false;
}

GridDomain::GridDomain(SpaceGrid s, double T_, int nt_) : space(std::move(s)), T(T_), nt(nt_) {
  if (!(T > 0) || nt < 1) throw InvalidInput("GridDomain: need T > 0 and nt >= 1");
}

std::vector<char> GridDomain::boundary_mask() const {
  std::vector<char> mask(static_cast<std::size_t>(space.node_count()));
  for (int i = 0; i < space.node_count(); ++i) mask[static_cast<std::size_t>(i)] = space.on_boundary(i);
  return mask;
}

Field Field::from_function(const GridDomain& d, const std::function<double(double, const SmallVec&)>& fn) {
  Field f(d);
  for (int k = 0; k < d.levels(); ++k) {
    const double t = d.time(k);
    for (int i = 0; i < d.space.node_count(); ++i) f.values(i, k) = fn(t, d.space.node(i));
  }
  return f;
}

bool Field::dirichlet_admissible(double tol) const {
  for (int i = 0; i < domain.space.node_count(); ++i) {
    if (!domain.space.on_boundary(i)) continue;
    if (values.row(i).cwiseAbs().maxCoeff() > tol) return false;
  }
  return true;
}

VectorField VectorField::with_values(Mat v) const {
  VectorField out = *this;
  out.dim = static_cast<int>(v.rows());
  out.values = std::move(v);
  return out;
}

VectorField sample_cells(const GridDomain& d, int dim, const std::function<SmallVec(double, const SmallVec&)>& fn) {
  const auto& g = d.space;
  int cells = 1;
  for (int k = 0; k < g.dim; ++k) cells *= g.n - 1;
  const Eigen::Index total = static_cast<Eigen::Index>(cells) * d.nt;
  VectorField vf;
  vf.dim = dim;
  vf.values.resize(dim, total);
  vf.t.resize(total);
  vf.x.resize(g.dim, total);
  vf.weight = Vec::Constant(total, d.cell_volume());
  Eigen::Index col = 0;
  for (int level = 0; level < d.nt; ++level) {
    const double t = (level + 0.5) * d.dt();
    for (int c = 0; c < cells; ++c) {
      int rem = c;
      SmallVec x(g.dim);
      for (int k = 0; k < g.dim; ++k) {
        x(k) = g.lo(k) + g.h(k) * ((rem % (g.n - 1)) + 0.5);
        rem /= (g.n - 1);
      }
      vf.values.col(col) = fn(t, x);
      vf.t(col) = t;
      vf.x.col(col) = x;
      ++col;
    }
  }
  return vf;
}

SimplexMesh::SimplexMesh(const SpaceGrid& g) : grid_(g) {
  const int dim = g.dim;
  std::array<int, kMaxDim> perm{0, 1, 2};
  std::vector<std::array<int, kMaxDim>> perms;
  do {
    perms.push_back(perm);
  } while (std::next_permutation(perm.begin(), perm.begin() + dim));

  double fact = 1;
  for (int k = 2; k <= dim; ++k) fact *= k;
  volume_ = g.node_volume() / fact;

  int cells = 1;
  for (int k = 0; k < dim; ++k) cells *= g.n - 1;
  vertices_.reserve(static_cast<std::size_t>(cells) * perms.size());
  for (int c = 0; c < cells; ++c) {
    std::array<int, kMaxDim> corner{0, 0, 0};
    int rem = c;
    for (int k = 0; k < dim; ++k) {
      corner[static_cast<std::size_t>(k)] = rem % (g.n - 1);
      rem /= (g.n - 1);
    }
    for (const auto& p : perms) {
      std::array<int, kMaxDim + 1> verts{};
      auto idx = corner;
      verts[0] = g.linear_index(idx);
      for (int k = 0; k < dim; ++k) {
        idx[static_cast<std::size_t>(p[static_cast<std::size_t>(k)])] += 1;
        verts[static_cast<std::size_t>(k + 1)] = g.linear_index(idx);
      }
      vertices_.push_back(verts);
      axes_.push_back(p);
    }
  }
  const int ns = simplex_count();
  centers_.resize(dim, ns);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(ns) * dim * 2);
  for (int s = 0; s < ns; ++s) {
    const auto& v = vertices_[static_cast<std::size_t>(s)];
    const auto& ax = axes_[static_cast<std::size_t>(s)];
    SmallVec c = SmallVec::Zero(dim);
    for (int k = 0; k <= dim; ++k) c += g.node(v[static_cast<std::size_t>(k)]);
    centers_.col(s) = c / (dim + 1);
    for (int k = 0; k < dim; ++k) {
      const int axis = ax[static_cast<std::size_t>(k)];
      const double inv_h = 1.0 / g.h(axis);
      trip.emplace_back(s * dim + axis, v[static_cast<std::size_t>(k + 1)], inv_h);
      trip.emplace_back(s * dim + axis, v[static_cast<std::size_t>(k)], -inv_h);
    }
  }
  G_.resize(static_cast<Eigen::Index>(ns) * dim, g.node_count());
  G_.setFromTriplets(trip.begin(), trip.end());
}

Mat SimplexMesh::gradient(const Vec& u) const {
  Vec flat = G_ * u;
  return Eigen::Map<const Mat>(flat.data(), grid_.dim, simplex_count());
}

Vec SimplexMesh::divergence(const Mat& V) const {
  Eigen::Map<const Vec> flat(V.data(), V.size());
  return -(volume_ / grid_.node_volume()) * (G_.transpose() * flat);
}

Vec SimplexMesh::average(const Vec& u) const {
  Vec out(simplex_count());
  const int dim = grid_.dim;
  for (int s = 0; s < simplex_count(); ++s) {
    double acc = 0;
    for (int k = 0; k <= dim; ++k) acc += u(vertices_[static_cast<std::size_t>(s)][static_cast<std::size_t>(k)]);
    out(s) = acc / (dim + 1);
  }
  return out;
}

namespace {

VectorField simplex_layout(const Field& u, const SimplexMesh& mesh, int value_dim) {
  const auto& d = u.domain;
  const int ns = mesh.simplex_count();
  const Eigen::Index total = static_cast<Eigen::Index>(ns) * d.nt;
  VectorField vf;
  vf.dim = value_dim;
  vf.values.resize(value_dim, total);
  vf.t.resize(total);
  vf.x.resize(d.space.dim, total);
  vf.weight = Vec::Constant(total, d.dt() * mesh.simplex_volume());
  for (int level = 1; level <= d.nt; ++level) {
    const Eigen::Index off = static_cast<Eigen::Index>(level - 1) * ns;
    for (int s = 0; s < ns; ++s) {
      vf.t(off + s) = d.time(level);
      vf.x.col(off + s) = mesh.barycenter(s);
    }
  }
  return vf;
}

}  // namespace

VectorField gradient_samples(const Field& u, const SimplexMesh& mesh) {
  VectorField vf = simplex_layout(u, mesh, u.domain.space.dim);
  const int ns = mesh.simplex_count();
  for (int level = 1; level <= u.domain.nt; ++level) {
    vf.values.middleCols(static_cast<Eigen::Index>(level - 1) * ns, ns) = mesh.gradient(u.values.col(level));
  }
  return vf;
}

VectorField value_samples(const Field& u, const SimplexMesh& mesh) {
  VectorField vf = simplex_layout(u, mesh, 1);
  const int ns = mesh.simplex_count();
  for (int level = 1; level <= u.domain.nt; ++level) {
    vf.values.middleCols(static_cast<Eigen::Index>(level - 1) * ns, ns) =
        mesh.average(u.values.col(level)).transpose();
  }
  return vf;
}

SmallVec NodalVectorField::at(int node, int level) const {
  SmallVec v(dim());
  for (int c = 0; c < dim(); ++c) v(c) = components[static_cast<std::size_t>(c)].values(node, level);
  return v;
}

namespace {

double trapezoid_factor(int i, int n) { return (i == 0 || i == n - 1) ? 0.5 : 1.0; }

double nodal_weight(const SpaceGrid& g, int node) {
  const auto idx = g.multi_index(node);
  double w = g.node_volume();
  for (int d = 0; d < g.dim; ++d) w *= trapezoid_factor(idx[static_cast<std::size_t>(d)], g.n);
  return w;
}

}  // namespace

VectorField nodal_samples(const NodalVectorField& f) {
  const auto& d = f.domain();
  const int nn = d.space.node_count();
  const int levels = d.levels();
  const Eigen::Index total = static_cast<Eigen::Index>(nn) * levels;
  VectorField vf;
  vf.dim = f.dim();
  vf.values.resize(f.dim(), total);
  vf.t.resize(total);
  vf.x.resize(d.space.dim, total);
  vf.weight.resize(total);
  // a single time level is treated as a unit-length static slice
  for (int k = 0; k < levels; ++k) {
    const double wt = levels == 1 ? 1.0 : d.dt() * trapezoid_factor(k, levels);
    for (int i = 0; i < nn; ++i) {
      const Eigen::Index col = static_cast<Eigen::Index>(k) * nn + i;
      vf.values.col(col) = f.at(i, k);
      vf.t(col) = d.time(k);
      vf.x.col(col) = d.space.node(i);
      vf.weight(col) = wt * nodal_weight(d.space, i);
    }
  }
  return vf;
}

double linf_l1_norm(const NodalVectorField& f) {
  const auto& d = f.domain();
  double best = 0;
  for (int k = 0; k < d.levels(); ++k) {
    double acc = 0;
    for (int i = 0; i < d.space.node_count(); ++i) acc += nodal_weight(d.space, i) * f.at(i, k).norm();
    best = std::max(best, acc);
  }
  return best;
}

}  // namespace mop
