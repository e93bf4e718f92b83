#pragma once

#include "mop/types.hpp"

#include <Eigen/SparseCore>

#include <array>

namespace mop {

/// Uniform tensor grid of nodes on an axis-aligned box.
struct SpaceGrid {
  int dim = 1;
  SmallVec lo, hi;
  int n = 2;  // nodes per axis, boundary included

  SpaceGrid() = default;
  SpaceGrid(const SmallVec& lo_, const SmallVec& hi_, int n_);

  double h(int axis) const { return (hi(axis) - lo(axis)) / (n - 1); }
  double node_volume() const;
  int node_count() const;
  std::array<int, kMaxDim> multi_index(int node) const;
  int linear_index(const std::array<int, kMaxDim>& idx) const;
  SmallVec node(int node) const;
  bool on_boundary(int node) const;
  SmallVec center() const { return 0.5 * (lo + hi); }
  double measure() const;
};

/// Omega_T = (0, T) x Omega with nt backward-Euler steps.
struct GridDomain {
  SpaceGrid space;
  double T = 1.0;
  int nt = 1;

  GridDomain() = default;
  GridDomain(SpaceGrid s, double T_, int nt_);

  double dt() const { return T / nt; }
  int levels() const { return nt + 1; }
  double time(int level) const { return T * level / nt; }
  double cell_volume() const { return dt() * space.node_volume(); }
  std::vector<char> boundary_mask() const;
};

/// Scalar function on space-time nodes; column k holds time level k.
struct Field {
  GridDomain domain;
  Mat values;

  Field() = default;
  explicit Field(const GridDomain& d) : domain(d), values(Mat::Zero(d.space.node_count(), d.levels())) {}

  static Field from_function(const GridDomain& d, const std::function<double(double, const SmallVec&)>& fn);

  bool finite() const { return values.allFinite(); }
  bool dirichlet_admissible(double tol = 0.0) const;
  double sup_norm() const { return values.cwiseAbs().maxCoeff(); }
};

/// Quadrature samples of an R^dim-valued field: value, location and weight.
struct VectorField {
  int dim = 1;
  Mat values;   // dim x n
  Vec t;        // n
  Mat x;        // space_dim x n
  Vec weight;   // n

  Eigen::Index size() const { return values.cols(); }
  SmallVec value(Eigen::Index i) const { return values.col(i); }
  SmallVec point(Eigen::Index i) const { return x.col(i); }
  double measure() const { return weight.sum(); }
  VectorField with_values(Mat v) const;
};

/// Midpoint-rule sampling of fn over space-time cells of the domain.
VectorField sample_cells(const GridDomain& d, int dim,
                         const std::function<SmallVec(double, const SmallVec&)>& fn);

/// Kuhn (Freudenthal) simplex decomposition of every grid cell: for each
/// permutation pi of the axes, vertices v_0 = cell corner, v_k = v_{k-1} + e_{pi(k)}.
/// The P1 gradient on a simplex is exact and the discrete divergence is its
/// negative adjoint, so summation by parts holds to round-off.
class SimplexMesh {
 public:
  explicit SimplexMesh(const SpaceGrid& g);

  const SpaceGrid& grid() const { return grid_; }
  int simplex_count() const { return static_cast<int>(vertices_.size()); }
  double simplex_volume() const { return volume_; }
  const std::array<int, kMaxDim + 1>& vertices(int s) const { return vertices_[static_cast<std::size_t>(s)]; }
  const std::array<int, kMaxDim>& axes(int s) const { return axes_[static_cast<std::size_t>(s)]; }
  SmallVec barycenter(int s) const { return centers_.col(s); }

  /// Gradient operator G: (dim * simplices) x nodes; rows grouped per simplex.
  const Eigen::SparseMatrix<double>& gradient_matrix() const { return G_; }

  /// Gradient of a nodal vector on every simplex, dim x simplices.
  Mat gradient(const Vec& u) const;
  /// div_h V at nodes: -(1/node_volume) G^T W V, W = simplex volume.
  Vec divergence(const Mat& V) const;
  /// Nodal average on each simplex (P1 value at the barycentre).
  Vec average(const Vec& u) const;

 private:
  SpaceGrid grid_;
  double volume_ = 0;
  std::vector<std::array<int, kMaxDim + 1>> vertices_;
  std::vector<std::array<int, kMaxDim>> axes_;
  Mat centers_;
  Eigen::SparseMatrix<double> G_;
};

/// Simplex gradients of time levels 1..nt, time weight dt (right rectangle).
VectorField gradient_samples(const Field& u, const SimplexMesh& mesh);
/// Same quadrature as gradient_samples but holding the P1 values of u.
VectorField value_samples(const Field& u, const SimplexMesh& mesh);

/// Nodal vector field: one Field per component.
struct NodalVectorField {
  std::vector<Field> components;
  int dim() const { return static_cast<int>(components.size()); }
  const GridDomain& domain() const { return components.front().domain; }
  SmallVec at(int node, int level) const;
};

/// Trapezoid-in-space-and-time samples of a nodal vector field.
VectorField nodal_samples(const NodalVectorField& f);
/// sup over time levels of the spatial L1 norm of |xi|.
double linf_l1_norm(const NodalVectorField& f);

}  // namespace mop
