#include "mop/catalog.hpp"
#include "mop/io.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

using namespace mop;

namespace {

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  for (std::string l; std::getline(is, l);) out.push_back(l);
  return out;
}

const char* kHeat = R"j({
  // comments are allowed
  "grid": {"T": 0.1, "nt": 4, "box": [[0, 1]], "nx": 8},
  "flux": {"key": "p_laplace", "params": {"p": 2}},
  "data": {"f": 1, "u0": "sin(pi*x1)", "exact": "exp(-pi^2*t)*sin(pi*x1)"},
  "solver": {"tol_newton": 1e-9, "max_iter": 20, "theta_ladder": [0.2, 0.1, 0.05, 0.01]}
})j";

}  // namespace

TEST(FieldCsv, HeaderAndRows) {
  const GridDomain d(SpaceGrid(SmallVec::Zero(2), SmallVec::Ones(2), 3), 1.0, 2);
  const Field u = Field::from_function(d, [](double t, const SmallVec& x) { return t + x(0) + 10 * x(1); });
  std::ostringstream os;
  write_field_csv(os, u);
  const auto ls = lines(os.str());
  ASSERT_EQ(ls.size(), 1u + 9 * 3);
  EXPECT_EQ(ls[0], "t,x1,x2,value");
  EXPECT_EQ(ls[2].substr(0, 6), "0,0.5,");
}

TEST(FieldBinary, RoundTrip) {
  const GridDomain d(SpaceGrid(SmallVec::Constant(2, -1.0), SmallVec::Ones(2), 5), 0.3, 3);
  const Field u = Field::from_function(d, [](double t, const SmallVec& x) { return std::sin(t + 3 * x(0)) * x(1); });
  const std::string path = testing::TempDir() + "field.bin";
  write_field_binary(path, u);
  const Field v = read_field_binary(path);
  EXPECT_EQ(v.domain.space.n, 5);
  EXPECT_EQ(v.domain.nt, 3);
  EXPECT_DOUBLE_EQ(v.domain.T, 0.3);
  EXPECT_EQ(v.domain.space.lo, d.space.lo);
  EXPECT_EQ(v.values, u.values);
  std::ifstream is(path, std::ios::binary);
  char magic[4];
  is.read(magic, 4);
  EXPECT_EQ(std::string(magic, 4), "MOPF");
  is.seekg(0, std::ios::end);
  EXPECT_EQ(static_cast<long>(is.tellg()), 4 + 4 * 3 + 4 * 2 + 8 * (1 + 2 + 2) + 8 * 25 * 4);
  std::remove(path.c_str());
}

TEST(FieldBinary, RejectsGarbage) {
  const std::string path = testing::TempDir() + "garbage.bin";
  {
    std::ofstream os(path, std::ios::binary);
    os << "XXXX123";
  }
  EXPECT_ANY_THROW(read_field_binary(path));
  std::remove(path.c_str());
}

TEST(Config, ParsesProblem) {
  const Config c = Config::parse(kHeat);
  EXPECT_TRUE(c.has("grid"));
  EXPECT_FALSE(c.has("balance"));
  const Problem p = c.problem();
  EXPECT_EQ(p.domain.space.n, 9);
  EXPECT_EQ(p.domain.nt, 4);
  EXPECT_DOUBLE_EQ(p.f(0, SmallVec::Constant(1, 0.3)), 1.0);
  EXPECT_NEAR(p.u0(0, SmallVec::Constant(1, 0.5)), 1.0, 1e-15);
  EXPECT_TRUE(static_cast<bool>(p.exact));
  const SolverOptions o = c.solver_options();
  EXPECT_DOUBLE_EQ(o.tol_newton, 1e-9);
  EXPECT_EQ(o.max_iter, 20);
  EXPECT_TRUE(c.has_theta_ladder());
  EXPECT_EQ(c.theta_ladder(), (std::vector<double>{0.2, 0.1, 0.05, 0.01}));
}

TEST(Config, Errors) {
  EXPECT_THROW(Config::parse("{"), ConfigError);
  EXPECT_THROW(Config::parse("[1]"), ConfigError);
  EXPECT_THROW(Config::parse(R"j({"grid": {"T": 1, "nt": 2, "box": [[0, 1]], "nx": 4}})j").problem(), ConfigError);
  EXPECT_THROW(Config::parse(R"j({"grid": {"T": 1, "nt": 2, "box": [[1, 0]], "nx": 4},
                                 "flux": {"key": "p_laplace", "params": {"p": 2}}})j")
                   .problem(),
               ConfigError);
  EXPECT_THROW(Config::parse(R"j({"balance": {"modular": "p_laplace(2)", "box": [[0, 1]], "mode": "x"}})j").scan_options(),
               ConfigError);
}

TEST(Config, BalanceBlock) {
  const Config c = Config::parse(
      R"j({"balance": {"modular": "double_phase(2,2.5,1,1)", "box": [[0, 1], [0, 1]], "T": 2, "mode": "N/p", "p": 2,
          "delta_grid": [0.2, 0.1, 0.05]}})j");
  const auto [M, om] = c.balance_target();
  EXPECT_EQ(M.dim, 2);
  EXPECT_DOUBLE_EQ(om.T, 2.0);
  const ScanOptions o = c.scan_options();
  EXPECT_EQ(o.mode, ProbeMode::NOverP);
  EXPECT_EQ(o.delta_grid.size(), 3u);
  ASSERT_TRUE(o.p.has_value());
  EXPECT_DOUBLE_EQ(*o.p, 2.0);
}

TEST(Config, CsvData) {
  const std::string path = testing::TempDir() + "u0.csv";
  {
    std::ofstream os(path);
    os << "x1,value\n0,0\n0.5,2\n1,0\n";
  }
  const ScalarFn f = csv_function(path, 1);
  EXPECT_DOUBLE_EQ(f(0, SmallVec::Constant(1, 0.45)), 2.0);
  EXPECT_DOUBLE_EQ(f(0, SmallVec::Constant(1, 0.9)), 0.0);
  EXPECT_THROW(csv_function(path, 2), ConfigError);
  std::remove(path.c_str());
}

TEST(LedgerCsv, Columns) {
  const Config c = Config::parse(kHeat);
  const SolveResult r = solve(c.problem(), c.solver_options());
  std::ostringstream os;
  write_ledger_csv(os, r);
  const auto ls = lines(os.str());
  EXPECT_EQ(ls[0], "level,t,half_norm_sq,dissipation,source,residual,modular_M,penalty,coercive");
  EXPECT_EQ(ls.size(), 1u + 5);
}

TEST(ConjugateTable, PowerThree) {
  std::ostringstream os;
  write_conjugate_table(os, make_modular("p_laplace(3)", 1), 0, SmallVec::Zero(1), 10, 11);
  const auto ls = lines(os.str());
  ASSERT_EQ(ls.size(), 12u);
  EXPECT_EQ(ls[0], "s,M,conjugate,biconjugate,conjugate_truncated");
  // s = 1: M = 1, M*(1) = sup (s - s^3) = 2 / (3 sqrt 3)
  std::istringstream row(ls[2]);
  std::vector<double> v;
  for (std::string cell; std::getline(row, cell, ',');) v.push_back(std::stod(cell));
  EXPECT_DOUBLE_EQ(v[0], 1.0);
  EXPECT_NEAR(v[1], 1.0, 1e-12);
  EXPECT_NEAR(v[2], 2 / (3 * std::sqrt(3.0)), 1e-9);
  EXPECT_NEAR(v[3], 1.0, 1e-6);
}

TEST(BalanceCsv, SummaryLine) {
  ScanOptions o;
  o.delta_grid = {0.25, 0.125, 0.0625};
  const BalanceReport r = theta_scan(make_modular("p_laplace(2)", 2), {SmallVec::Zero(2), SmallVec::Ones(2), 1}, o);
  std::ostringstream os;
  write_balance_csv(os, r);
  const auto ls = lines(os.str());
  EXPECT_EQ(ls[0], "delta,s_probe,theta,capped");
  EXPECT_EQ(ls.size(), 5u);
  EXPECT_EQ(ls.back().rfind("# pass=1", 0), 0u);
}
