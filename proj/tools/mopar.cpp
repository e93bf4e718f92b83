#include "mop/expr.hpp"
#include "mop/io.hpp"
#include "mop/verify.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace mop;

namespace {

constexpr int kFail = 2;
constexpr int kBorderline = 3;
constexpr int kNonConvergence = 4;
constexpr int kUsage = 64;

struct Flags {
  std::string config;
  std::string out;
  unsigned seed = 12345;
  std::vector<double> theta_ladder;
  std::vector<double> delta_grid;
  std::optional<double> tol_newton;
  std::string suite;
};

std::ofstream open_out(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream os(p);
  if (!os) throw ConfigError("cannot write " + p.string());
  return os;
}

int check_balance(const Flags& f) {
  const Config c = Config::load(f.config);
  auto [M, omega] = c.balance_target();
  ScanOptions o = c.scan_options();
  o.seed = f.seed;
  if (!f.delta_grid.empty()) o.delta_grid = f.delta_grid;
  const BalanceReport r = theta_scan(M, omega, o);
  if (f.out.empty()) {
    write_balance_csv(std::cout, r);
  } else {
    auto os = open_out(f.out);
    write_balance_csv(os, r);
  }
  std::printf("balance %s: %s (slope %.17g)\n", M.name.c_str(),
              !r.pass ? "fail" : (r.borderline || r.any_capped ? "borderline" : "pass"), r.slope);
  if (!r.pass) return kFail;
  if (r.borderline || r.any_capped) return kBorderline;
  return 0;
}

int nfun_table(const Flags& f) {
  const Config c = Config::load(f.config);
  const auto tab = c.nfun_table();
  if (f.out.empty()) {
    write_conjugate_table(std::cout, tab.M, tab.t, tab.x, tab.s_max, tab.nodes);
  } else {
    auto os = open_out(f.out);
    write_conjugate_table(os, tab.M, tab.t, tab.x, tab.s_max, tab.nodes);
  }
  return 0;
}

void dump_run(const fs::path& dir, const std::string& stem, const SolveResult& r) {
  auto t = open_out(dir / (stem + "_trajectory.csv"));
  write_field_csv(t, r.trajectory);
  auto l = open_out(dir / (stem + "_ledger.csv"));
  write_ledger_csv(l, r);
  write_field_binary((dir / (stem + "_trajectory.bin")).string(), r.trajectory);
}

void print_error(const Problem& p, const SolveResult& r) {
  if (!p.exact || !r.completed) return;
  const Field ex = Field::from_function(p.domain, p.exact);
  Field e = r.trajectory;
  e.values -= ex.values;
  std::printf("final L2 error %.17g\n", l2_level(e, p.domain.nt));
}

int solve_cmd(const Flags& f) {
  const Config c = Config::load(f.config);
  const Problem p = c.problem();
  SolverOptions o = c.solver_options();
  o.seed = f.seed;
  if (f.tol_newton) o.tol_newton = *f.tol_newton;
  const fs::path dir = f.out.empty() ? fs::path(".") : fs::path(f.out);
  std::vector<double> ladder = f.theta_ladder;
  if (ladder.empty() && c.has_theta_ladder()) ladder = c.theta_ladder();

  if (ladder.empty()) {
    const SolveResult r = solve(p, o);
    dump_run(dir, "run", r);
    std::printf("solve %s: %s, energy residual %.17g\n", p.flux.base.name.c_str(),
                r.completed ? "completed" : "aborted", r.ledger.empty() ? 0.0 : std::abs(r.ledger.back().residual));
    print_error(p, r);
    if (!r.completed) {
      std::fprintf(stderr, "nonconvergence: %s (last residual %.17g)\n", r.failure.c_str(), r.last_residual);
      return kNonConvergence;
    }
    return 0;
  }

  const ContinuationResult cr = theta_continuation(p, ladder, o);
  for (std::size_t i = 0; i < cr.runs.size(); ++i) dump_run(dir, "theta" + std::to_string(i), cr.runs[i]);
  auto os = open_out(dir / "continuation.csv");
  write_continuation_csv(os, cr);
  std::printf("continuation %s: %zu rungs, cauchy %s, penalty %s%s\n", p.flux.base.name.c_str(), cr.runs.size(),
              cr.cauchy_decreasing ? "decreasing" : "not decreasing",
              cr.penalty_decreasing ? "decreasing" : "not decreasing", cr.non_cauchy ? ", non-Cauchy" : "");
  if (!cr.runs.empty()) print_error(p, cr.runs.back());
  if (!cr.completed) {
    const SolveResult& last = cr.runs.back();
    std::fprintf(stderr, "nonconvergence: %s (last residual %.17g)\n", last.failure.c_str(), last.last_residual);
    return kNonConvergence;
  }
  return 0;
}

int verify_cmd(const Flags& f) {
  const auto& names = suite_names();
  if (f.suite != "all" && std::find(names.begin(), names.end(), f.suite) == names.end()) {
    std::fprintf(stderr, "unknown suite '%s'\n", f.suite.c_str());
    return kUsage;
  }
  const auto reports = run_suite(f.suite, f.seed);
  if (f.out.empty()) {
    write_junit(std::cout, reports);
  } else {
    const fs::path dir(f.out);
    auto r = open_out(dir / "report.xml");
    write_junit(r, reports);
    auto m = open_out(dir / "metrics.csv");
    write_metrics_csv(m, reports);
  }
  bool ok = true;
  for (const auto& r : reports) {
    std::printf("suite %s: %s\n", r.suite.c_str(), r.pass() ? "pass" : "fail");
    ok = ok && r.pass();
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Musielak-Orlicz parabolic toolkit"};
  app.require_subcommand(1);
  Flags f;

  auto* bal = app.add_subcommand("check-balance", "scan the balance ratio of a modular");
  bal->add_option("--config", f.config, "config file")->required();
  bal->add_option("--out", f.out, "CSV output path");
  bal->add_option("--delta-grid", f.delta_grid, "cylinder sizes")->delimiter(',');

  auto* nf = app.add_subcommand("nfun-table", "tabulate M, M* and M** along the first axis");
  nf->add_option("--config", f.config, "config file")->required();
  nf->add_option("--out", f.out, "CSV output path");

  auto* sol = app.add_subcommand("solve", "solve the parabolic problem");
  sol->add_option("--config", f.config, "config file")->required();
  sol->add_option("--out", f.out, "output directory");
  sol->add_option("--theta-ladder", f.theta_ladder, "regularisation ladder")->delimiter(',');
  sol->add_option("--tol-newton", f.tol_newton, "Newton tolerance");

  auto* ver = app.add_subcommand("verify", "run a verification suite");
  ver->add_option("suite", f.suite, "nfun, modular, balance, mollify, solver, comparison or all")->required();
  ver->add_option("--out", f.out, "directory for report.xml and metrics.csv");

  for (auto* s : {bal, nf, sol, ver}) s->add_option("--seed", f.seed, "seed for randomised checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*bal) return check_balance(f);
    if (*nf) return nfun_table(f);
    if (*sol) return solve_cmd(f);
    if (*ver) return verify_cmd(f);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return kUsage;
  } catch (const ParseError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return kUsage;
  } catch (const InvalidInput& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return kUsage;
  } catch (const NonConvergence& e) {
    std::fprintf(stderr, "nonconvergence: %s\n", e.what());
    return kNonConvergence;
  }
  return kUsage;
}
