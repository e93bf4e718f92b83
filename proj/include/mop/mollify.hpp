#pragma once

#include "mop/grid.hpp"
#include "mop/modular.hpp"

#include <optional>

namespace mop {

/// Discrete radial bump rho_delta(z) ~ exp(-1 / (1 - |z/delta|^2)) sampled at the
/// grid offsets with |z| < delta and normalised to unit discrete mass.
struct Kernel {
  double delta = 0;
  std::vector<std::array<int, kMaxDim>> offsets;
  std::vector<double> weights;

  double mass() const;
  std::size_t taps() const { return weights.size(); }
};

Kernel make_kernel(const SpaceGrid& g, double delta);

/// S_delta xi(t, x) = sum_z rho_delta(z) xi(t, c + (x - z - c) / kappa), kappa = 1 - delta / R,
/// with xi extended by zero outside Omega and evaluated by multilinear interpolation.
/// Omega is a box, star-shaped with respect to the ball B(center, R).
NodalVectorField space_mollify(const NodalVectorField& xi, double delta, double R,
                               std::optional<SmallVec> center = std::nullopt);
Field space_mollify(const Field& phi, double delta, double R, std::optional<SmallVec> center = std::nullopt);

struct TimeAverageInfo {
  double epsilon = 0;  // window actually used
  int steps = 0;       // window length in time steps
  bool snapped = false;
};

/// (1/eps) int_t^{t+eps} phi, phi extended by zero outside [0, T]; trapezoid in time.
Field time_average_forward(const Field& phi, double epsilon, TimeAverageInfo* info = nullptr);
/// (1/eps) int_{t-eps}^t phi, same extension.
Field time_average_backward(const Field& phi, double epsilon, TimeAverageInfo* info = nullptr);

struct UniformBoundTable {
  std::vector<double> deltas;
  Mat ratio;                        // deltas x corpus; NaN where modular(xi) = 0
  std::vector<double> max_per_delta;
  std::size_t excluded = 0;
};

/// mollified[d][i] = S_{deltas[d]} corpus[i].
std::vector<std::vector<NodalVectorField>> mollify_corpus(const std::vector<NodalVectorField>& corpus,
                                                          const std::vector<double>& deltas, double R,
                                                          std::optional<SmallVec> center = std::nullopt);

/// C(delta) = modular(M, S_delta xi) / modular(M, xi) per corpus field.
UniformBoundTable uniform_modular_bound_space(const NFunctionSpec& M, const std::vector<NodalVectorField>& corpus,
                                              const std::vector<std::vector<NodalVectorField>>& mollified,
                                              const std::vector<double>& deltas);
UniformBoundTable uniform_modular_bound_space(const NFunctionSpec& M, const std::vector<NodalVectorField>& corpus,
                                              const std::vector<double>& deltas, double R,
                                              std::optional<SmallVec> center = std::nullopt);

struct ApproximationRow {
  double parameter = 0;
  double l1_error = 0;
};

struct ApproximationReport {
  std::vector<ApproximationRow> space;
  std::vector<ApproximationRow> time;
  ModularConvergence space_gradients;
  ModularConvergence time_gradients;
  bool space_monotone = true;
  bool time_monotone = true;
};

/// Space (S_delta) and time (forward average) approximations of phi: L1 errors
/// and modular convergence of the simplex gradients.
ApproximationReport approximation_experiment(const NFunctionSpec& M, const Field& phi,
                                             const std::vector<double>& deltas, const std::vector<double>& epsilons,
                                             double R, std::optional<SmallVec> center = std::nullopt);

/// Space-time L1 norm of a nodal field (trapezoid weights).
double l1_norm(const Field& f);

}  // namespace mop
