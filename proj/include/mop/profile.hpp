#pragma once

#include "mop/types.hpp"

#include <cmath>
#include <limits>

namespace mop {

/// Function sampled on a strictly increasing node set s_0 = 0 < s_1 < ... < s_K.
template <typename Scalar = double>
struct SampledProfile {
  using Array = Eigen::Array<Scalar, Eigen::Dynamic, 1>;

  Array nodes;
  Array values;
  // Set by conjugate_1d when some dual node exceeds the largest slope of the
  // primal samples; values past `reliable_up_to` are then boundary-driven.
  bool truncated = false;
  Scalar reliable_up_to = std::numeric_limits<Scalar>::infinity();

  Eigen::Index size() const { return nodes.size(); }

  /// Piecewise-linear interpolation; constant extrapolation is not used,
  /// queries outside [nodes(0), nodes(K)] throw.
  Scalar operator()(Scalar s) const {
    if (s < nodes(0) || s > nodes(size() - 1)) {
      throw InvalidInput("SampledProfile: query outside node range");
    }
    const Scalar* begin = nodes.data();
    const Scalar* end = begin + size();
    auto it = std::upper_bound(begin, end, s);
    Eigen::Index k = std::min<Eigen::Index>(std::max<Eigen::Index>(it - begin, 1), size() - 1);
    const Scalar s0 = nodes(k - 1), s1 = nodes(k);
    const Scalar w = (s - s0) / (s1 - s0);
    return (1 - w) * values(k - 1) + w * values(k);
  }
};

template <typename Scalar>
void validate_profile(const SampledProfile<Scalar>& f, Eigen::Index min_nodes = 1) {
  if (f.nodes.size() != f.values.size()) throw InvalidInput("profile: nodes/values size mismatch");
  if (f.nodes.size() < min_nodes) throw InvalidInput("profile: too few nodes");
  for (Eigen::Index k = 1; k < f.nodes.size(); ++k) {
    if (!(f.nodes(k) > f.nodes(k - 1))) throw InvalidInput("profile: nodes not strictly increasing");
  }
}

/// {0} followed by `count` log-spaced nodes in [lo, hi].
template <typename Scalar = double>
Eigen::Array<Scalar, Eigen::Dynamic, 1> log_nodes_with_zero(Scalar lo, Scalar hi, Eigen::Index count) {
  Eigen::Array<Scalar, Eigen::Dynamic, 1> s(count + 1);
  s(0) = 0;
  const Scalar a = std::log(lo), b = std::log(hi);
  for (Eigen::Index k = 0; k < count; ++k) {
    const Scalar w = count == 1 ? Scalar(1) : Scalar(k) / Scalar(count - 1);
    s(k + 1) = std::exp(a + w * (b - a));
  }
  return s;
}

template <typename Scalar = double, typename Fn>
SampledProfile<Scalar> sample_profile(const Eigen::Array<Scalar, Eigen::Dynamic, 1>& nodes, Fn&& f) {
  SampledProfile<Scalar> out;
  out.nodes = nodes;
  out.values.resize(nodes.size());
  for (Eigen::Index k = 0; k < nodes.size(); ++k) out.values(k) = f(nodes(k));
  return out;
}

/// Largest finite-difference slope of the samples.
template <typename Scalar>
Scalar max_slope(const SampledProfile<Scalar>& f) {
  Scalar best = -std::numeric_limits<Scalar>::infinity();
  for (Eigen::Index k = 1; k < f.size(); ++k) {
    best = std::max(best, (f.values(k) - f.values(k - 1)) / (f.nodes(k) - f.nodes(k - 1)));
  }
  return best;
}

/// Discrete Legendre transform g(t) = max_k (s_k t - f_k) evaluated at the
/// given dual nodes. Direct O(K K') maximisation; `assume_convex` switches to
/// the monotone-argmax sweep, valid when the maximiser index is
/// nondecreasing in t (convex samples, sorted dual nodes).
template <typename Scalar>
SampledProfile<Scalar> conjugate_1d(const SampledProfile<Scalar>& f,
                                    const Eigen::Array<Scalar, Eigen::Dynamic, 1>& dual_nodes,
                                    bool assume_convex = false) {
  validate_profile(f, 2);
  SampledProfile<Scalar> g;
  g.nodes = dual_nodes;
  g.values.resize(dual_nodes.size());
  const Scalar slope_limit = max_slope(f);
  g.reliable_up_to = slope_limit;
  const Eigen::Index K = f.size();
  Eigen::Index cursor = 0;
  for (Eigen::Index j = 0; j < dual_nodes.size(); ++j) {
    const Scalar t = dual_nodes(j);
    if (t > slope_limit * (1 + 1e-12) + 1e-300) g.truncated = true;
    Scalar best = -std::numeric_limits<Scalar>::infinity();
    if (assume_convex) {
      // objective is concave in k for convex f: walk forward while it improves
      Eigen::Index k = cursor;
      best = f.nodes(k) * t - f.values(k);
      while (k + 1 < K) {
        const Scalar next = f.nodes(k + 1) * t - f.values(k + 1);
        if (next < best) break;
        best = next;
        ++k;
      }
      cursor = k;
    } else {
      for (Eigen::Index k = 0; k < K; ++k) best = std::max(best, f.nodes(k) * t - f.values(k));
    }
    g.values(j) = best;
  }
  return g;
}

/// Greatest convex minorant of the piecewise-linear interpolant of f,
/// evaluated back at the nodes of f (lower convex hull of the graph).
template <typename Scalar>
SampledProfile<Scalar> convex_envelope_1d(const SampledProfile<Scalar>& f) {
  validate_profile(f, 2);
  const Eigen::Index K = f.size();
  std::vector<Eigen::Index> hull;
  hull.reserve(static_cast<std::size_t>(K));
  auto cross = [&](Eigen::Index o, Eigen::Index a, Eigen::Index b) {
    return (f.nodes(a) - f.nodes(o)) * (f.values(b) - f.values(o)) -
           (f.values(a) - f.values(o)) * (f.nodes(b) - f.nodes(o));
  };
  for (Eigen::Index k = 0; k < K; ++k) {
    while (hull.size() >= 2 && cross(hull[hull.size() - 2], hull.back(), k) <= 0) hull.pop_back();
    hull.push_back(k);
  }
  SampledProfile<Scalar> out;
  out.nodes = f.nodes;
  out.values.resize(K);
  std::size_t seg = 0;
  for (Eigen::Index k = 0; k < K; ++k) {
    while (seg + 2 < hull.size() && hull[seg + 1] < k) ++seg;
    if (seg + 1 >= hull.size()) {
      out.values(k) = f.values(hull.back());
      continue;
    }
    const Eigen::Index a = hull[seg], b = hull[seg + 1];
    if (k == a) {
      out.values(k) = f.values(a);
    } else if (k == b) {
      out.values(k) = f.values(b);
    } else {
      const Scalar w = (f.nodes(k) - f.nodes(a)) / (f.nodes(b) - f.nodes(a));
      out.values(k) = std::min(f.values(k), (1 - w) * f.values(a) + w * f.values(b));
    }
  }
  return out;
}

/// Default dual grid: {0} and the slopes of the convex envelope of f, which
/// makes conjugate_1d the exact transform of the piecewise-linear interpolant.
template <typename Scalar>
SampledProfile<Scalar> conjugate_1d(const SampledProfile<Scalar>& f) {
  const SampledProfile<Scalar> env = convex_envelope_1d(f);
  std::vector<Scalar> slopes{Scalar(0)};
  for (Eigen::Index k = 1; k < env.size(); ++k) {
    const Scalar c = (env.values(k) - env.values(k - 1)) / (env.nodes(k) - env.nodes(k - 1));
    if (c > 0) slopes.push_back(c);
  }
  std::sort(slopes.begin(), slopes.end());
  slopes.erase(std::unique(slopes.begin(), slopes.end(),
                           [](Scalar a, Scalar b) { return std::abs(a - b) <= 1e-15 * std::max(Scalar(1), std::abs(b)); }),
               slopes.end());
  Eigen::Array<Scalar, Eigen::Dynamic, 1> dual(static_cast<Eigen::Index>(slopes.size()));
  for (std::size_t i = 0; i < slopes.size(); ++i) dual(static_cast<Eigen::Index>(i)) = slopes[i];
  return conjugate_1d(f, dual);
}

}  // namespace mop
