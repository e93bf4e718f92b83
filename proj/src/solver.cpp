#include "mop/solver.hpp"

#include <Eigen/SparseLU>

#include <cmath>
#include <random>

namespace mop {

namespace {

Eigen::SparseMatrix<double> identity(int n) {
  Eigen::SparseMatrix<double> I(n, n);
  I.setIdentity();
  return I;
}

Vec nodal_values(const GridDomain& d, const ScalarFn& fn, double t) {
  const int nn = d.space.node_count();
  Vec v = Vec::Zero(nn);
  if (!fn) return v;
  for (int i = 0; i < nn; ++i)
    if (!d.space.on_boundary(i)) v(i) = fn(t, d.space.node(i));
  return v;
}

Vec solve_linear(const Eigen::SparseMatrix<double>& J, const Vec& rhs, bool permute, unsigned seed) {
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  if (!permute) {
    lu.compute(J);
    if (lu.info() != Eigen::Success) throw NonConvergence("linear solve: factorisation failed", rhs.lpNorm<Eigen::Infinity>());
    return lu.solve(rhs);
  }
  const auto n = J.rows();
  Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic> P(n);
  P.setIdentity();
  std::mt19937_64 rng(seed);
  std::shuffle(P.indices().data(), P.indices().data() + n, rng);
  Eigen::SparseMatrix<double> Jp = (P * J * P.transpose()).eval();
  lu.compute(Jp);
  if (lu.info() != Eigen::Success) throw NonConvergence("linear solve: factorisation failed", rhs.lpNorm<Eigen::Infinity>());
  Vec y = lu.solve(P * rhs);
  return P.transpose() * y;
}

}  // namespace

StepOperator::StepOperator(const GridDomain& d) : domain_(d), mesh_(d.space) {
  const auto& g = d.space;
  std::vector<int> col_of(static_cast<std::size_t>(g.node_count()), -1);
  for (int i = 0; i < g.node_count(); ++i) {
    if (g.on_boundary(i)) continue;
    col_of[static_cast<std::size_t>(i)] = static_cast<int>(interior_.size());
    interior_.push_back(i);
  }
  const auto& G = mesh_.gradient_matrix();
  std::vector<Eigen::Triplet<double>> trip;
  for (int k = 0; k < G.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(G, k); it; ++it) {
      const int c = col_of[static_cast<std::size_t>(it.col())];
      if (c >= 0) trip.emplace_back(static_cast<int>(it.row()), c, it.value());
    }
  G_int_.resize(G.rows(), unknowns());
  G_int_.setFromTriplets(trip.begin(), trip.end());
}

Vec StepOperator::scatter(const Vec& v) const {
  Vec out = Vec::Zero(domain_.space.node_count());
  for (int k = 0; k < unknowns(); ++k) out(interior_[static_cast<std::size_t>(k)]) = v(k);
  return out;
}

Vec StepOperator::gather(const Vec& nodal) const {
  Vec out(unknowns());
  for (int k = 0; k < unknowns(); ++k) out(k) = nodal(interior_[static_cast<std::size_t>(k)]);
  return out;
}

Mat StepOperator::flux_field(const RegularizedFluxSpec& A, double t, const Vec& u) const {
  const Mat grad = mesh_.gradient(u);
  Mat out(grad.rows(), grad.cols());
  parallel_for(static_cast<std::size_t>(grad.cols()), [&](std::size_t s) {
    const auto i = static_cast<Eigen::Index>(s);
    out.col(i) = A(t, mesh_.barycenter(static_cast<int>(i)), grad.col(i));
  });
  return out;
}

Vec StepOperator::residual(const RegularizedFluxSpec& A, double t, double dt, const Vec& u, const Vec& u_prev,
                           const Vec& f) const {
  const Vec div = divergence(flux_field(A, t, u));
  return gather(u - u_prev - dt * (div + f));
}

Eigen::SparseMatrix<double> StepOperator::assemble(const std::vector<Eigen::Triplet<double>>& blocks, double dt) const {
  const auto n = G_int_.rows();
  Eigen::SparseMatrix<double> D(n, n);
  D.setFromTriplets(blocks.begin(), blocks.end());
  const double c = dt * mesh_.simplex_volume() / domain_.space.node_volume();
  Eigen::SparseMatrix<double> K = (G_int_.transpose() * D * G_int_).pruned();
  return identity(unknowns()) + c * K;
}

Eigen::SparseMatrix<double> StepOperator::jacobian(const RegularizedFluxSpec& A, double t, double dt,
                                                   const Vec& u) const {
  const Mat grad = mesh_.gradient(u);
  const int dim = static_cast<int>(grad.rows());
  const auto ns = static_cast<std::size_t>(grad.cols());
  std::vector<std::vector<Eigen::Triplet<double>>> local(ns);
  parallel_for(ns, [&](std::size_t s) {
    const auto i = static_cast<Eigen::Index>(s);
    const SmallVec xi = grad.col(i);
    const SmallVec x = mesh_.barycenter(static_cast<int>(i));
    const double h = 1e-6 * (1 + xi.norm());
    for (int b = 0; b < dim; ++b) {
      SmallVec e = SmallVec::Zero(dim);
      e(b) = h;
      const SmallVec col = (A(t, x, xi + e) - A(t, x, xi - e)) / (2 * h);
      for (int a = 0; a < dim; ++a)
        local[s].emplace_back(static_cast<int>(s) * dim + a, static_cast<int>(s) * dim + b, col(a));
    }
  });
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(ns * static_cast<std::size_t>(dim * dim));
  for (auto& l : local) trip.insert(trip.end(), l.begin(), l.end());
  return assemble(trip, dt);
}

Eigen::SparseMatrix<double> StepOperator::picard_matrix(const RegularizedFluxSpec& A, double t, double dt,
                                                        const Vec& u) const {
  const Mat grad = mesh_.gradient(u);
  const int dim = static_cast<int>(grad.rows());
  std::vector<Eigen::Triplet<double>> trip;
  for (Eigen::Index s = 0; s < grad.cols(); ++s) {
    const SmallVec xi = grad.col(s);
    const double n = xi.norm();
    double k;
    if (n > 1e-12) {
      k = A(t, mesh_.barycenter(static_cast<int>(s)), xi).norm() / n;
    } else {
      // slope at a small probe keeps the lagged coefficient finite
      SmallVec probe = SmallVec::Zero(dim);
      probe(0) = 1e-8;
      k = A(t, mesh_.barycenter(static_cast<int>(s)), probe).norm() / 1e-8;
    }
    for (int a = 0; a < dim; ++a) trip.emplace_back(static_cast<int>(s) * dim + a, static_cast<int>(s) * dim + a, k);
  }
  return assemble(trip, dt);
}

Vec step_implicit(const StepOperator& op, const Vec& u_prev, const RegularizedFluxSpec& flux, const Vec& f_slice,
                  double t, double dt, const SolverOptions& opts, StepStats* stats, const Vec* initial_guess) {
  StepStats st;
  Vec u = initial_guess ? *initial_guess : u_prev;
  for (int i = 0; i < u.size(); ++i)
    if (op.mesh().grid().on_boundary(i)) u(i) = 0;
  if (opts.guess_noise > 0) {
    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    for (int k : op.interior()) u(k) += opts.guess_noise * unif(rng);
  }

  Vec r = op.residual(flux, t, dt, u, u_prev, f_slice);
  double rn = r.lpNorm<Eigen::Infinity>();
  bool converged = rn <= opts.tol_newton;
  unsigned perm_seed = opts.seed;
  while (!converged && st.iterations < opts.max_iter) {
    ++st.iterations;
    const auto J = op.jacobian(flux, t, dt, u);
    Vec delta;
    try {
      delta = solve_linear(J, -r, opts.permute_unknowns, perm_seed++);
    } catch (const NonConvergence&) {
      break;
    }
    const double r2 = r.norm();
    double lambda = 1.0;
    bool accepted = false;
    for (int h = 0; h <= opts.armijo_halvings; ++h, lambda *= 0.5) {
      const Vec trial = u + lambda * op.scatter(delta);
      const Vec rt = op.residual(flux, t, dt, trial, u_prev, f_slice);
      if (rt.allFinite() && rt.norm() <= (1 - 1e-4 * lambda) * r2) {
        u = trial;
        r = rt;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    rn = r.lpNorm<Eigen::Infinity>();
    converged = rn <= opts.tol_newton;
  }

  if (!converged) {
    st.picard = true;
    const Vec rhs = op.gather(u_prev + dt * f_slice);
    while (!converged && st.picard_iterations < opts.picard_max) {
      ++st.picard_iterations;
      const auto P = op.picard_matrix(flux, t, dt, u);
      Vec v;
      try {
        v = solve_linear(P, rhs, false, 0);
      } catch (const NonConvergence&) {
        break;
      }
      u = op.scatter(v);
      r = op.residual(flux, t, dt, u, u_prev, f_slice);
      if (!r.allFinite()) break;
      rn = r.lpNorm<Eigen::Infinity>();
      converged = rn <= opts.tol_newton;
    }
  }
  st.residual = rn;
  if (stats) *stats = st;
  if (!converged) throw NonConvergence("step_implicit: Newton and Picard both stagnated", rn);
  return u;
}

SolveResult solve(const Problem& problem, const SolverOptions& opts, const Field* warm_start) {
  const GridDomain& d = problem.domain;
  if (problem.flux.base.dim != d.space.dim) throw InvalidInput("solve: flux and grid dimensions differ");
  const StepOperator op(d);
  const SimplexMesh& mesh = op.mesh();
  const double hN = d.space.node_volume();
  const double vol = mesh.simplex_volume();
  const double dt = d.dt();
  const auto mconj = make_conjugate_accessor(problem.flux.m);
  const auto& Mgov = problem.flux.base.M;

  SolveResult res;
  res.flux = problem.flux;
  res.trajectory = Field(d);
  res.source = Field(d);
  for (int n = 0; n <= d.nt; ++n) res.source.values.col(n) = nodal_values(d, problem.f, d.time(n));
  const Vec u0 = nodal_values(d, problem.u0, 0.0);
  res.trajectory.values.col(0) = u0;

  EnergyRow row;
  row.half_norm_sq = 0.5 * hN * u0.squaredNorm();
  const double initial = row.half_norm_sq;
  res.ledger.push_back(row);
  res.apriori.sup_l2_sq = 2 * row.half_norm_sq;

  Vec u_prev = u0;
  for (int n = 1; n <= d.nt; ++n) {
    const double t = d.time(n);
    const Vec f = res.source.values.col(n);
    StepStats st;
    Vec u;
    try {
      Vec guess = warm_start ? Vec(warm_start->values.col(n)) : u_prev;
      SolverOptions o = opts;
      o.seed = opts.seed + static_cast<unsigned>(n);
      u = step_implicit(op, u_prev, problem.flux, f, t, dt, o, &st, &guess);
    } catch (const NonConvergence& e) {
      res.completed = false;
      res.failure = e.what();
      res.last_residual = e.last_residual();
      res.trajectory.values.rightCols(d.nt - n + 1).setConstant(std::numeric_limits<double>::quiet_NaN());
      break;
    }
    res.newton.push_back(st);
    res.trajectory.values.col(n) = u;

    const Mat grad = mesh.gradient(u);
    const Mat F = op.flux_field(problem.flux, t, u);
    double diss = 0, mod = 0, pen = 0;
    for (Eigen::Index s = 0; s < grad.cols(); ++s) {
      const SmallVec xi = grad.col(s);
      const SmallVec x = mesh.barycenter(static_cast<int>(s));
      diss += F.col(s).dot(grad.col(s));
      mod += Mgov(t, x, xi);
      if (problem.flux.theta != 0) pen += mconj(t, x, flux_gradient(problem.flux.m, t, x, xi)).value;
    }
    EnergyRow next;
    next.level = n;
    next.t = t;
    next.half_norm_sq = 0.5 * hN * u.squaredNorm();
    next.dissipation = row.dissipation + dt * vol * diss;
    next.source = row.source + dt * hN * f.dot(u);
    next.modular_M = row.modular_M + dt * vol * mod;
    next.penalty = row.penalty + problem.flux.theta * dt * vol * pen;
    next.residual = next.half_norm_sq - initial + next.dissipation - next.source;
    next.coercive = diss >= mod - 1e-12 * (1 + std::abs(mod));
    res.ledger.push_back(next);
    res.apriori.sup_l2_sq = std::max(res.apriori.sup_l2_sq, 2 * next.half_norm_sq);
    row = next;
    u_prev = u;
  }
  res.apriori.modular_M = row.modular_M;
  res.apriori.penalty = row.penalty;
  return res;
}

double energy_residual(const SolveResult& result, int level) {
  if (level < 0 || level >= static_cast<int>(result.ledger.size()))
    throw InvalidInput("energy_residual: level outside the ledger");
  return std::abs(result.ledger[static_cast<std::size_t>(level)].residual);
}

std::vector<double> default_theta_ladder() { return {1e-1, 5e-2, 2.5e-2, 1.25e-2}; }

ContinuationResult theta_continuation(const Problem& problem, const std::vector<double>& ladder,
                                      const SolverOptions& opts) {
  if (ladder.size() < 4) throw InvalidInput("theta_continuation: need at least 4 rungs");
  for (std::size_t i = 1; i < ladder.size(); ++i)
    if (!(ladder[i] < ladder[i - 1])) throw InvalidInput("theta_continuation: ladder must decrease");
  ContinuationResult out;
  out.thetas = ladder;
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    Problem p = problem;
    p.flux = problem.flux.with_theta(ladder[i]);
    const Field* warm = i > 0 && out.runs.back().completed ? &out.runs.back().trajectory : nullptr;
    out.runs.push_back(solve(p, opts, warm));
    out.penalty.push_back(out.runs.back().apriori.penalty);
    if (!out.runs.back().completed) {
      out.completed = false;
      break;
    }
  }
  for (std::size_t i = 1; i < out.runs.size(); ++i)
    out.cauchy.push_back(l2_spacetime(out.runs[i - 1].trajectory, out.runs[i].trajectory));
  for (std::size_t i = 1; i < out.cauchy.size(); ++i)
    if (!(out.cauchy[i] < out.cauchy[i - 1])) out.cauchy_decreasing = false;
  for (std::size_t i = 1; i < out.penalty.size(); ++i)
    if (!(out.penalty[i] < out.penalty[i - 1]) && out.penalty[i - 1] > 0) out.penalty_decreasing = false;
  const std::size_t c = out.cauchy.size();
  out.non_cauchy = c >= 2 && !(out.cauchy[c - 1] < out.cauchy[c - 2]);
  return out;
}

Field truncate(const Field& u, double k) {
  if (k < 0) throw InvalidInput("truncate: k must be nonnegative");
  Field out = u;
  out.values = u.values.cwiseMax(-k).cwiseMin(k);
  return out;
}

double l2_spacetime(const Field& a, const Field& b) {
  const auto& d = a.domain;
  if (a.values.rows() != b.values.rows() || a.values.cols() != b.values.cols())
    throw InvalidInput("l2_spacetime: field shapes differ");
  const double w = d.dt() * d.space.node_volume();
  return std::sqrt(w * (a.values.rightCols(d.nt) - b.values.rightCols(d.nt)).squaredNorm());
}

double l2_level(const Field& a, int level) {
  return std::sqrt(a.domain.space.node_volume() * a.values.col(level).squaredNorm());
}

Mat flux_field(const SolveResult& result, int level) {
  const StepOperator op(result.trajectory.domain);
  return op.flux_field(result.flux, result.trajectory.domain.time(level), result.trajectory.values.col(level));
}

}  // namespace mop
