#include "mop/verify.hpp"

#include "mop/balance.hpp"
#include "mop/catalog.hpp"
#include "mop/modular.hpp"
#include "mop/mollify.hpp"
#include "mop/profile.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>

namespace mop {

namespace {

BoxDomain box_of(const GridDomain& d) { return {d.space.lo, d.space.hi, d.T}; }

bool same_grid(const GridDomain& a, const GridDomain& b) {
  return a.space.dim == b.space.dim && a.space.n == b.space.n && a.nt == b.nt && a.T == b.T &&
         a.space.lo == b.space.lo && a.space.hi == b.space.hi;
}

Field sample(const GridDomain& d, const ScalarFn& fn) {
  if (!fn) return Field(d);
  return Field::from_function(d, fn);
}

template <typename G>
double d4(G&& g, double h) {
  return (-g(2 * h) + 8 * g(h) - 8 * g(-h) + g(-2 * h)) / (12 * h);
}

}  // namespace

ComparisonResult comparison_test(const Problem& p1, const Problem& p2, const SolverOptions& opts) {
  if (!same_grid(p1.domain, p2.domain)) throw InvalidInput("comparison_test: problems must share the grid");
  const GridDomain& d = p1.domain;
  const Field f1 = sample(d, p1.f), f2 = sample(d, p2.f);
  if ((f1.values.array() > f2.values.array()).any()) throw InvalidInput("comparison_test: need f1 <= f2");
  const Field a = sample(d, p1.u0), b = sample(d, p2.u0);
  if ((a.values.col(0).array() > b.values.col(0).array()).any()) throw InvalidInput("comparison_test: need u01 <= u02");
  const double mono = monotonicity_margin(p1.flux, box_of(d), d.space.dim, 200, opts.seed);
  if (mono < -1e-10) throw InvalidInput("comparison_test: flux fails the sampled monotonicity check");

  ComparisonResult out;
  out.tol = 1e-8 + 10 * opts.tol_newton;
  const SolveResult r1 = solve(p1, opts), r2 = solve(p2, opts);
  out.completed = r1.completed && r2.completed;
  if (!out.completed) return out;
  out.max_violation = (r1.trajectory.values - r2.trajectory.values).maxCoeff();
  out.pass = out.max_violation <= out.tol;

  const SimplexMesh mesh(d.space);
  const double w = d.dt() * mesh.simplex_volume();
  for (int n = 1; n <= d.nt; ++n) {
    const Vec u = r1.trajectory.values.col(n);
    const Mat g = mesh.gradient(u);
    const Mat F = flux_field(r1, n);
    const Vec avg = mesh.average(u);
    for (Eigen::Index s = 0; s < g.cols(); ++s) {
      const auto l = static_cast<std::size_t>(std::floor(std::abs(avg(s))));
      if (out.decay_profile.size() <= l) out.decay_profile.resize(l + 1, 0.0);
      out.decay_profile[l] += w * F.col(s).dot(g.col(s));
    }
  }
  for (std::size_t l = 2; l < out.decay_profile.size(); ++l)
    if (out.decay_profile[l] > out.decay_profile[l - 1] * (1 + 1e-12)) out.decay_ok = false;
  return out;
}

UniquenessResult uniqueness_test(const Problem& problem, int n_restarts, const SolverOptions& opts,
                                 double guess_noise) {
  if (n_restarts < 1) throw InvalidInput("uniqueness_test: need at least one restart");
  UniquenessResult out;
  std::vector<Field> runs;
  for (int k = 0; k < n_restarts; ++k) {
    SolverOptions o = opts;
    if (k > 0) {
      o.guess_noise = guess_noise;
      o.permute_unknowns = true;
      o.seed = opts.seed + 1000u * static_cast<unsigned>(k);
    }
    const SolveResult r = solve(problem, o);
    if (!r.completed) {
      out.completed = false;
      return out;
    }
    runs.push_back(r.trajectory);
  }
  for (std::size_t i = 0; i < runs.size(); ++i)
    for (std::size_t j = i + 1; j < runs.size(); ++j) {
      out.distances.push_back(l2_spacetime(runs[i], runs[j]));
      out.max_distance = std::max(out.max_distance, out.distances.back());
    }
  return out;
}

ScalarFn manufactured_source(const RegularizedFluxSpec& flux, const ScalarFn& exact) {
  return [flux, exact](double t, const SmallVec& x) {
    const int dim = static_cast<int>(x.size());
    const double ht = 1e-3, hi = 1e-3, ho = 5e-3;
    auto grad = [&](const SmallVec& y) {
      SmallVec g(dim);
      for (int a = 0; a < dim; ++a)
        g(a) = d4([&](double s) { SmallVec z = y; z(a) += s; return exact(t, z); }, hi);
      return g;
    };
    double div = 0;
    for (int a = 0; a < dim; ++a)
      div += d4([&](double s) { SmallVec z = x; z(a) += s; return flux(t, z, grad(z))(a); }, ho);
    const double dudt = d4([&](double s) { return exact(t + s, x); }, ht);
    return dudt - div;
  };
}

double observed_order(const std::vector<double>& steps, const std::vector<double>& errors) {
  if (steps.size() != errors.size() || steps.size() < 2) throw InvalidInput("observed_order: need two or more rungs");
  const auto n = static_cast<double>(steps.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const double x = std::log(steps[i]), y = std::log(errors[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

ConvergenceReport manufactured_convergence(const RegularizedFluxSpec& flux, const ScalarFn& exact,
                                           const SmallVec& lo, const SmallVec& hi, double T,
                                           const std::vector<Rung>& space_ladder,
                                           const std::vector<Rung>& time_ladder, ScalarFn f,
                                           const SolverOptions& opts) {
  const ScalarFn source = f ? f : manufactured_source(flux, exact);
  ConvergenceReport rep;
  auto run = [&](const Rung& r) {
    GridDomain d(SpaceGrid(lo, hi, r.nx + 1), T, r.nt);
    Problem p{d, flux, source, [exact](double, const SmallVec& x) { return exact(0.0, x); }, exact};
    const SolveResult res = solve(p, opts);
    ConvergenceRow row{r, d.space.h(0), d.dt(), 0, 0};
    if (!res.completed) {
      rep.completed = false;
      row.l2_error = row.final_error = std::numeric_limits<double>::quiet_NaN();
      return row;
    }
    const Field ex = Field::from_function(d, exact);
    Field e = res.trajectory;
    e.values -= ex.values;
    row.l2_error = l2_spacetime(res.trajectory, ex);
    row.final_error = l2_level(e, d.nt);
    return row;
  };
  auto fill = [&](const std::vector<Rung>& ladder, std::vector<ConvergenceRow>& rows, bool space) {
    std::vector<double> steps, errs;
    for (const Rung& r : ladder) {
      rows.push_back(run(r));
      steps.push_back(space ? rows.back().dx : rows.back().dt);
      errs.push_back(rows.back().l2_error);
    }
    for (std::size_t i = 1; i < rows.size(); ++i)
      if (!(rows[i].l2_error < rows[i - 1].l2_error)) rep.monotone = false;
    const bool positive = std::all_of(errs.begin(), errs.end(), [](double e) { return e > 0; });
    if (rows.size() >= 2 && positive) return observed_order(steps, errs);
    return 0.0;
  };
  rep.space_order = fill(space_ladder, rep.space, true);
  rep.time_order = fill(time_ladder, rep.time, false);
  return rep;
}

LinfBound linf_bound_test(const Problem& problem, const SolverOptions& opts) {
  const GridDomain& d = problem.domain;
  const Field f = sample(d, problem.f), u0 = sample(d, problem.u0);
  LinfBound out;
  out.bound = u0.values.col(0).cwiseAbs().maxCoeff() + d.T * f.values.cwiseAbs().maxCoeff();
  const SolveResult r = solve(problem, opts);
  out.sup_l2_sq = r.apriori.sup_l2_sq;
  out.pass = r.completed && std::isfinite(out.sup_l2_sq);
  if (r.completed) out.sup_abs = r.trajectory.sup_norm();
  out.within_heuristic = out.sup_abs <= out.bound + 1e-12;
  return out;
}

double ibp_residual_test(const SolveResult& result, const ScalarFn& xi) {
  const GridDomain& d = result.trajectory.domain;
  const Field phi = Field::from_function(d, xi);
  const double scale = std::max(1.0, phi.sup_norm());
  for (int i = 0; i < d.space.node_count(); ++i) {
    const bool boundary = d.space.on_boundary(i);
    for (int n = 0; n <= d.nt; ++n)
      if ((boundary || n == d.nt) && std::abs(phi.values(i, n)) > 1e-12 * scale)
        throw InvalidInput("ibp_residual_test: test field must vanish on the boundary and at t = T");
  }
  if (!result.completed) throw InvalidInput("ibp_residual_test: the run did not complete");
  const SimplexMesh mesh(d.space);
  const double hN = d.space.node_volume(), vol = mesh.simplex_volume(), dt = d.dt();
  const double ht = 1e-3 * d.T;
  const Vec u0 = result.trajectory.values.col(0);
  double acc = 0;
  for (int n = 1; n <= d.nt; ++n) {
    const double t = d.time(n);
    Vec dxi(d.space.node_count());
    for (int i = 0; i < d.space.node_count(); ++i) {
      const SmallVec x = d.space.node(i);
      dxi(i) = d4([&](double s) { return xi(t + s, x); }, ht);
    }
    const Vec u = result.trajectory.values.col(n);
    const Mat F = flux_field(result, n);
    const Mat g = mesh.gradient(phi.values.col(n));
    double flux_term = 0;
    for (Eigen::Index s = 0; s < g.cols(); ++s) flux_term += F.col(s).dot(g.col(s));
    acc += dt * (-hN * (u - u0).dot(dxi) + vol * flux_term - hN * result.source.values.col(n).dot(phi.values.col(n)));
  }
  return std::abs(acc);
}

// ---------------------------------------------------------------------------
// suites

bool SuiteReport::pass() const {
  return std::all_of(cases.begin(), cases.end(), [](const CaseResult& c) { return c.pass; });
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"nfun", "modular", "balance", "mollify", "solver", "comparison"};
  return names;
}

namespace {

using CaseFn = std::function<void(CaseResult&)>;

CaseResult run_case(const std::string& name, const CaseFn& fn) {
  CaseResult c;
  c.name = name;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    fn(c);
  } catch (const std::exception& e) {
    c.pass = false;
    c.message = e.what();
  }
  c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return c;
}

BoxDomain unit_box(int dim, double T) {
  return {SmallVec::Zero(dim), SmallVec::Ones(dim), T};
}

RegularizedFluxSpec catalog_flux(const std::string& key, int dim, const FluxParams& params, double T = 0.1) {
  const BoxDomain om = unit_box(dim, T);
  return regularize(flux_catalog(key, dim, params, om), 0.0, om);
}

FluxParams values(std::initializer_list<std::pair<const std::string, double>> v) {
  FluxParams p;
  p.values = v;
  return p;
}

Problem line_problem(const RegularizedFluxSpec& flux, int nx, int nt, double T, ScalarFn f, ScalarFn u0) {
  return {GridDomain(SpaceGrid(SmallVec::Zero(1), SmallVec::Ones(1), nx + 1), T, nt), flux, std::move(f),
          std::move(u0), {}};
}

double sin_pi(double, const SmallVec& x) { return std::sin(M_PI * x(0)); }

std::vector<CaseResult> nfun_suite(unsigned seed) {
  std::vector<CaseResult> out;
  out.push_back(run_case("biconjugate_power", [](CaseResult& c) {
    double worst = 0;
    for (double p : {1.5, 2.0, 3.0, 5.0}) {
      const auto nodes = log_nodes_with_zero<double>(1e-3, 1e3, 2047);
      const auto f = sample_profile(nodes, [p](double s) { return std::pow(s, p) / p; });
      const auto g = conjugate_1d(f);
      const auto ff = conjugate_1d(g, nodes);
      for (Eigen::Index k = 0; k < nodes.size(); ++k)
        worst = std::max(worst, std::abs(ff.values(k) - f.values(k)) / (1 + std::abs(f.values(k))));
    }
    c.metrics["max_rel_error"] = worst;
    c.pass = worst <= 1e-6;
  }));
  out.push_back(run_case("axioms_catalog", [](CaseResult& c) {
    const auto plan = box_plan(SmallVec::Zero(2), SmallVec::Ones(2), 1.0, 3, 2, 10.0);
    int failed = 0;
    for (const char* key : {"p_laplace(2)", "p_laplace(1.5)", "double_phase(2,3,1,1)", "llogl(1)", "exp_growth",
                            "orlicz_double_phase(2,3,1)", "variable_exponent(2+0.5*x1)"})
      if (!check_axioms(make_modular(key, 2), plan).all_passed()) ++failed;
    c.metrics["failed"] = failed;
    c.pass = failed == 0;
  }));
  out.push_back(run_case("fenchel_young", [seed](CaseResult& c) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    double worst = std::numeric_limits<double>::infinity();
    for (const char* key : {"p_laplace(3)", "double_phase(2,3,1,1)"}) {
      const NFunctionSpec M = make_modular(key, 2);
      const auto conj = make_conjugate_accessor(M, {}, false);
      std::vector<ConjugatePair> pairs;
      for (int i = 0; i < 100; ++i) {
        SmallVec x(2), xi(2), eta(2);
        x << 0.5 * (u(rng) + 3) / 3, 0.5 * (u(rng) + 3) / 3;
        xi << u(rng), u(rng);
        eta << u(rng), u(rng);
        pairs.push_back({0.0, x, xi, eta});
      }
      worst = std::min(worst, fenchel_young_residual(M, conj, pairs).min);
    }
    c.metrics["min_residual"] = worst;
    c.pass = worst >= -1e-6;
  }));
  return out;
}

std::vector<CaseResult> modular_suite(unsigned) {
  std::vector<CaseResult> out;
  out.push_back(run_case("luxemburg_constant_field", [](CaseResult& c) {
    const GridDomain d(SpaceGrid(SmallVec::Zero(1), SmallVec::Ones(1), 33), 1.0, 4);
    double worst = 0;
    for (double p : {1.5, 2.0, 3.0}) {
      const NFunctionSpec M = power_modular(1, p);
      const VectorField xi = sample_cells(d, 1, [](double, const SmallVec&) { return SmallVec::Constant(1, 2.0); });
      const double expect = 2.0 * std::pow(xi.measure(), 1.0 / p);
      worst = std::max(worst, std::abs(luxemburg_norm(M, xi) - expect) / expect);
    }
    c.metrics["max_rel_error"] = worst;
    c.pass = worst <= 1e-8;
  }));
  out.push_back(run_case("holder_pairing", [](CaseResult& c) {
    const GridDomain d(SpaceGrid(SmallVec::Zero(1), SmallVec::Ones(1), 33), 1.0, 4);
    const NFunctionSpec M = power_modular(1, 3);
    const VectorField xi =
        sample_cells(d, 1, [](double t, const SmallVec& x) { return SmallVec::Constant(1, std::sin(3 * x(0) + t)); });
    const VectorField eta = sample_cells(d, 1, [](double t, const SmallVec& x) {
      return SmallVec::Constant(1, 1 + x(0) * t);
    });
    const HolderCheck h = holder_pairing_check(M, xi, eta);
    c.metrics["lhs"] = h.lhs;
    c.metrics["rhs"] = h.rhs;
    c.pass = h.pass;
  }));
  return out;
}

std::vector<CaseResult> balance_suite(unsigned seed) {
  std::vector<CaseResult> out;
  for (double q : {2.5, 3.5}) {
    std::ostringstream name;
    name << "double_phase_q" << q;
    out.push_back(run_case(name.str(), [q, seed](CaseResult& c) {
      const NFunctionSpec M = double_phase_modular(2, 2.0, q, 1.0, 1.0);
      ScanOptions o;
      o.mode = ProbeMode::NOverP;
      o.p = 2.0;
      o.seed = seed;
      const BalanceReport r = theta_scan(M, unit_box(2, 1.0), o);
      const ClosenessVerdict v = double_phase_closeness(2.0, q, 1.0, 2, ProbeMode::NOverP);
      c.metrics["slope"] = r.slope;
      c.metrics["expected_pass"] = v.pass;
      c.pass = r.pass == v.pass;
    }));
  }
  return out;
}

std::vector<CaseResult> mollify_suite(unsigned) {
  std::vector<CaseResult> out;
  out.push_back(run_case("kernel_mass", [](CaseResult& c) {
    const SpaceGrid g(SmallVec::Zero(2), SmallVec::Ones(2), 65);
    double worst = 0;
    for (double delta : {0.05, 0.1, 0.2}) worst = std::max(worst, std::abs(make_kernel(g, delta).mass() - 1));
    c.metrics["mass_error"] = worst;
    c.pass = worst <= 1e-14;
  }));
  out.push_back(run_case("space_l1_convergence", [](CaseResult& c) {
    const GridDomain d(SpaceGrid(SmallVec::Constant(1, -1.0), SmallVec::Constant(1, 1.0), 1025), 1.0, 1);
    const Field phi = Field::from_function(d, [](double, const SmallVec& x) { return std::pow(1 - x(0) * x(0), 3); });
    double prev = std::numeric_limits<double>::infinity();
    bool monotone = true;
    for (double delta : {0.125, 0.0625, 0.03125}) {
      Field diff = space_mollify(phi, delta, 1.0);
      diff.values -= phi.values;
      const double e = l1_norm(diff);
      monotone = monotone && e < prev;
      prev = e;
    }
    c.metrics["finest_error"] = prev;
    c.pass = monotone;
  }));
  return out;
}

std::vector<CaseResult> solver_suite(unsigned) {
  std::vector<CaseResult> out;
  const auto heat = catalog_flux("p_laplace", 1, values({{"p", 2.0}}));
  out.push_back(run_case("zero_data", [heat](CaseResult& c) {
    const SolveResult r = solve(line_problem(heat, 32, 8, 0.1, {}, {}));
    c.metrics["sup"] = r.trajectory.sup_norm();
    c.pass = r.completed && r.trajectory.sup_norm() == 0 && energy_residual(r, 8) == 0;
  }));
  out.push_back(run_case("heat_final_error", [heat](CaseResult& c) {
    const SolveResult r = solve(line_problem(heat, 128, 1024, 0.1, {}, sin_pi));
    const GridDomain& d = r.trajectory.domain;
    Field e = r.trajectory;
    e.values -= Field::from_function(d, [](double t, const SmallVec& x) {
      return std::exp(-M_PI * M_PI * t) * std::sin(M_PI * x(0));
    }).values;
    c.metrics["final_l2_error"] = l2_level(e, d.nt);
    c.metrics["initial_half_norm_sq"] = r.ledger.front().half_norm_sq;
    c.pass = r.completed && l2_level(e, d.nt) <= 1e-3 && std::abs(r.ledger.front().half_norm_sq - 0.25) <= 1e-12;
  }));
  out.push_back(run_case("energy_residual_order", [heat](CaseResult& c) {
    const double r1 = energy_residual(solve(line_problem(heat, 64, 50, 0.1, {}, sin_pi)), 50);
    const double r2 = energy_residual(solve(line_problem(heat, 64, 100, 0.1, {}, sin_pi)), 100);
    c.metrics["ratio"] = r1 / r2;
    c.pass = r1 / r2 >= 1.6 && r1 / r2 <= 2.4;
  }));
  out.push_back(run_case("coercivity_ledger", [](CaseResult& c) {
    const auto F = catalog_flux("double_phase", 1, values({{"p", 2.0}, {"q", 3.0}, {"alpha", 1.0}}));
    const SolveResult r = solve(line_problem(F, 32, 16, 0.1, [](double, const SmallVec&) { return 1.0; }, sin_pi));
    bool ok = r.completed;
    for (const auto& row : r.ledger) ok = ok && row.coercive;
    c.pass = ok;
  }));
  return out;
}

std::vector<CaseResult> comparison_suite(unsigned seed) {
  std::vector<CaseResult> out;
  SolverOptions opts;
  opts.seed = seed;
  auto one = [](double, const SmallVec&) { return 1.0; };
  const auto p3 = catalog_flux("p_laplace", 1, values({{"p", 3.0}}));
  const auto dp = catalog_flux("double_phase", 1, values({{"p", 2.0}, {"q", 3.0}, {"alpha", 1.0}}));
  auto record = [](CaseResult& c, const ComparisonResult& r) {
    c.metrics["max_violation"] = r.max_violation;
    c.metrics["tol"] = r.tol;
    c.metrics["decay_ok"] = r.decay_ok;
    c.pass = r.completed && r.pass;
  };
  out.push_back(run_case("zero_below_sin", [&](CaseResult& c) {
    record(c, comparison_test(line_problem(p3, 32, 16, 0.1, {}, {}), line_problem(p3, 32, 16, 0.1, {}, sin_pi), opts));
  }));
  out.push_back(run_case("p3_source_order", [&](CaseResult& c) {
    record(c, comparison_test(line_problem(p3, 32, 16, 0.1, {}, {}), line_problem(p3, 32, 16, 0.1, one, {}), opts));
  }));
  out.push_back(run_case("double_phase_shifted_datum", [&](CaseResult& c) {
    auto low = [](double, const SmallVec& x) { return std::sin(M_PI * x(0)) - 0.1; };
    record(c, comparison_test(line_problem(dp, 32, 16, 0.1, {}, low), line_problem(dp, 32, 16, 0.1, {}, sin_pi), opts));
  }));
  out.push_back(run_case("uniqueness_heat", [&](CaseResult& c) {
    const auto heat = catalog_flux("p_laplace", 1, values({{"p", 2.0}}));
    const UniquenessResult u = uniqueness_test(line_problem(heat, 32, 16, 0.1, {}, sin_pi), 5, opts);
    c.metrics["max_distance"] = u.max_distance;
    c.pass = u.completed && u.max_distance <= 10 * opts.tol_newton;
  }));
  return out;
}

}  // namespace

std::vector<SuiteReport> run_suite(const std::string& name, unsigned seed) {
  using Runner = std::vector<CaseResult> (*)(unsigned);
  static const std::map<std::string, Runner> runners{{"nfun", nfun_suite},       {"modular", modular_suite},
                                                     {"balance", balance_suite}, {"mollify", mollify_suite},
                                                     {"solver", solver_suite},   {"comparison", comparison_suite}};
  std::vector<SuiteReport> out;
  if (name == "all") {
    for (const auto& s : suite_names()) out.push_back({s, runners.at(s)(seed)});
    return out;
  }
  const auto it = runners.find(name);
  if (it == runners.end()) throw InvalidInput("unknown suite '" + name + "'");
  out.push_back({name, it->second(seed)});
  return out;
}

void write_junit(std::ostream& os, const std::vector<SuiteReport>& reports) {
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<testsuites>\n";
  for (const auto& r : reports) {
    const auto failures = std::count_if(r.cases.begin(), r.cases.end(), [](const CaseResult& c) { return !c.pass; });
    double total = 0;
    for (const auto& c : r.cases) total += c.seconds;
    os << "  <testsuite name=\"" << r.suite << "\" tests=\"" << r.cases.size() << "\" failures=\"" << failures
       << "\" time=\"" << std::setprecision(6) << total << "\">\n";
    for (const auto& c : r.cases) {
      os << "    <testcase name=\"" << c.name << "\" time=\"" << c.seconds << "\"";
      if (c.pass) {
        os << "/>\n";
      } else {
        std::string msg = c.message.empty() ? "assertion failed" : c.message;
        for (char& ch : msg)
          if (ch == '"' || ch == '<' || ch == '>' || ch == '&') ch = '\'';
        os << ">\n      <failure message=\"" << msg << "\"/>\n    </testcase>\n";
      }
    }
    os << "  </testsuite>\n";
  }
  os << "</testsuites>\n";
}

void write_metrics_csv(std::ostream& os, const std::vector<SuiteReport>& reports) {
  os << "suite,case,metric,value\n" << std::setprecision(17);
  for (const auto& r : reports)
    for (const auto& c : r.cases) {
      os << r.suite << ',' << c.name << ",pass," << (c.pass ? 1 : 0) << '\n';
      for (const auto& [k, v] : c.metrics) os << r.suite << ',' << c.name << ',' << k << ',' << v << '\n';
    }
}

}  // namespace mop
