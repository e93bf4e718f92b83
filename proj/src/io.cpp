#include "mop/io.hpp"

#include "mop/catalog.hpp"
#include "mop/expr.hpp"
#include "mop/profile.hpp"

#include <json.hpp>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace mop {

using nlohmann::json;

namespace {

std::ostream& precise(std::ostream& os) { return os << std::setprecision(17); }

template <typename T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T take(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw InvalidInput("read_field_binary: truncated file");
  return v;
}

// node index for (i_1..i_N) with axis 0 fastest, visited with the last axis fastest
std::vector<int> row_major_order(const SpaceGrid& g) {
  std::vector<int> order;
  order.reserve(static_cast<std::size_t>(g.node_count()));
  std::array<int, kMaxDim> idx{0, 0, 0};
  for (int k = 0; k < g.node_count(); ++k) {
    int rem = k;
    for (int d = g.dim - 1; d >= 0; --d) {
      idx[static_cast<std::size_t>(d)] = rem % g.n;
      rem /= g.n;
    }
    order.push_back(g.linear_index(idx));
  }
  return order;
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

const json& block(const json& j, const std::string& name) {
  if (!j.contains(name) || !j.at(name).is_object()) throw ConfigError("config: missing block '" + name + "'");
  return j.at(name);
}

const json& key(const json& b, const std::string& block_name, const std::string& k) {
  if (!b.contains(k)) throw ConfigError("config: missing key '" + block_name + "." + k + "'");
  return b.at(k);
}

template <typename T>
T value_or(const json& b, const std::string& k, T fallback) {
  if (!b.contains(k)) return fallback;
  try {
    return b.at(k).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError("config: bad value for '" + k + "': " + e.what());
  }
}

std::pair<SmallVec, SmallVec> parse_box(const json& b, const std::string& name) {
  const json& box = key(b, name, "box");
  if (!box.is_array() || box.empty() || box.size() > static_cast<std::size_t>(kMaxDim))
    throw ConfigError("config: " + name + ".box must list 1 to 3 [lo, hi] pairs");
  const int dim = static_cast<int>(box.size());
  SmallVec lo(dim), hi(dim);
  for (int d = 0; d < dim; ++d) {
    const json& pr = box.at(static_cast<std::size_t>(d));
    if (!pr.is_array() || pr.size() != 2) throw ConfigError("config: " + name + ".box entries must be [lo, hi]");
    lo(d) = pr.at(0).get<double>();
    hi(d) = pr.at(1).get<double>();
    if (!(hi(d) > lo(d))) throw ConfigError("config: " + name + ".box needs lo < hi");
  }
  return {lo, hi};
}

std::vector<double> number_list(const json& v, const std::string& what) {
  if (!v.is_array()) throw ConfigError("config: " + what + " must be a list of numbers");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) throw ConfigError("config: " + what + " must be a list of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

ScalarFn data_function(const json& d, const std::string& k, int dim, const std::string& base_dir) {
  if (!d.contains(k) || d.at(k).is_null()) return {};
  const json& v = d.at(k);
  if (v.is_number()) {
    const double c = v.get<double>();
    return [c](double, const SmallVec&) { return c; };
  }
  if (v.is_string()) {
    try {
      const Expression e(v.get<std::string>());
      return [e](double t, const SmallVec& x) { return e(t, x); };
    } catch (const std::exception& ex) {
      throw ConfigError("config: data." + k + ": " + ex.what());
    }
  }
  if (v.is_object() && v.contains("csv")) {
    std::filesystem::path p = v.at("csv").get<std::string>();
    if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
    return csv_function(p.string(), dim);
  }
  throw ConfigError("config: data." + k + " must be a number, an expression or {\"csv\": path}");
}

}  // namespace

void write_field_csv(std::ostream& os, const Field& u) {
  const auto& d = u.domain;
  os << "t";
  for (int a = 0; a < d.space.dim; ++a) os << ",x" << a + 1;
  os << ",value\n";
  precise(os);
  for (int n = 0; n < d.levels(); ++n)
    for (int i = 0; i < d.space.node_count(); ++i) {
      os << d.time(n);
      const SmallVec x = d.space.node(i);
      for (int a = 0; a < d.space.dim; ++a) os << ',' << x(a);
      os << ',' << u.values(i, n) << '\n';
    }
}

void write_field_binary(const std::string& path, const Field& u) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InvalidInput("write_field_binary: cannot open " + path);
  const auto& d = u.domain;
  os.write("MOPF", 4);
  put<std::uint32_t>(os, 1);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(d.space.dim));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(d.levels()));
  for (int a = 0; a < d.space.dim; ++a) put<std::uint32_t>(os, static_cast<std::uint32_t>(d.space.n));
  put<double>(os, d.T);
  for (int a = 0; a < d.space.dim; ++a) put<double>(os, d.space.lo(a));
  for (int a = 0; a < d.space.dim; ++a) put<double>(os, d.space.hi(a));
  const auto order = row_major_order(d.space);
  for (int n = 0; n < d.levels(); ++n)
    for (int i : order) put<double>(os, u.values(i, n));
}

Field read_field_binary(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw InvalidInput("read_field_binary: cannot open " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::string(magic, 4) != "MOPF") throw InvalidInput("read_field_binary: bad magic");
  if (take<std::uint32_t>(is) != 1) throw InvalidInput("read_field_binary: unsupported version");
  const int dim = static_cast<int>(take<std::uint32_t>(is));
  if (dim < 1 || dim > kMaxDim) throw InvalidInput("read_field_binary: bad dimension");
  const int levels = static_cast<int>(take<std::uint32_t>(is));
  std::vector<int> n(static_cast<std::size_t>(dim));
  for (int& v : n) v = static_cast<int>(take<std::uint32_t>(is));
  for (int v : n)
    if (v != n.front()) throw InvalidInput("read_field_binary: only equal node counts per axis are supported");
  const double T = take<double>(is);
  SmallVec lo(dim), hi(dim);
  for (int a = 0; a < dim; ++a) lo(a) = take<double>(is);
  for (int a = 0; a < dim; ++a) hi(a) = take<double>(is);
  Field u(GridDomain(SpaceGrid(lo, hi, n.front()), T, levels - 1));
  const auto order = row_major_order(u.domain.space);
  for (int l = 0; l < levels; ++l)
    for (int i : order) u.values(i, l) = take<double>(is);
  return u;
}

void write_ledger_csv(std::ostream& os, const SolveResult& r) {
  os << "level,t,half_norm_sq,dissipation,source,residual,modular_M,penalty,coercive\n";
  precise(os);
  for (const auto& e : r.ledger)
    os << e.level << ',' << e.t << ',' << e.half_norm_sq << ',' << e.dissipation << ',' << e.source << ','
       << e.residual << ',' << e.modular_M << ',' << e.penalty << ',' << (e.coercive ? 1 : 0) << '\n';
}

void write_balance_csv(std::ostream& os, const BalanceReport& r) {
  os << "delta,s_probe,theta,capped\n";
  precise(os);
  for (std::size_t i = 0; i < r.delta_grid.size(); ++i)
    os << r.delta_grid[i] << ',' << r.s_probe[i] << ',' << r.theta_values[i] << ',' << (r.capped[i] ? 1 : 0) << '\n';
  os << "# pass=" << r.pass << " borderline=" << r.borderline << " any_capped=" << r.any_capped
     << " slope=" << r.slope;
  if (r.stable) os << " stable=" << *r.stable;
  os << '\n';
}

void write_conjugate_table(std::ostream& os, const NFunctionSpec& M, double t, const SmallVec& x, double s_max,
                           int nodes) {
  if (nodes < 2 || !(s_max > 0)) throw InvalidInput("write_conjugate_table: need nodes >= 2 and s_max > 0");
  const int dim = M.dim;
  auto along = [&](double s) {
    SmallVec xi = SmallVec::Zero(dim);
    xi(0) = s;
    return xi;
  };
  Eigen::ArrayXd s(nodes);
  for (int k = 0; k < nodes; ++k) s(k) = s_max * k / (nodes - 1);
  const auto conj = make_conjugate_accessor(M);
  // biconjugate of the sampled profile on a fine auxiliary grid
  const auto logs = log_nodes_with_zero<double>(s_max * 1e-6, s_max * 4, 2047);
  std::vector<double> merged(logs.begin(), logs.end());
  merged.insert(merged.end(), s.begin(), s.end());
  std::sort(merged.begin(), merged.end());
  merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
  const Eigen::ArrayXd fine = Eigen::Map<const Eigen::ArrayXd>(merged.data(), static_cast<Eigen::Index>(merged.size()));
  const auto f = sample_profile(fine, [&](double v) { return M(t, x, along(v)); });
  const auto g = conjugate_1d(f);
  const auto ff = conjugate_1d(g, s);
  os << "s,M,conjugate,biconjugate,conjugate_truncated\n";
  precise(os);
  for (int k = 0; k < nodes; ++k) {
    const ConjugateValue c = conj(t, x, along(s(k)));
    os << s(k) << ',' << M(t, x, along(s(k))) << ',' << c.value << ',' << ff.values(k) << ','
       << (c.truncated ? 1 : 0) << '\n';
  }
}

void write_continuation_csv(std::ostream& os, const ContinuationResult& c) {
  os << "theta,cauchy_next,penalty,modular_M,sup_l2_sq,completed\n";
  precise(os);
  for (std::size_t i = 0; i < c.runs.size(); ++i) {
    os << c.thetas[i] << ',';
    if (i < c.cauchy.size()) os << c.cauchy[i];
    os << ',' << c.penalty[i] << ',' << c.runs[i].apriori.modular_M << ',' << c.runs[i].apriori.sup_l2_sq << ','
       << (c.runs[i].completed ? 1 : 0) << '\n';
  }
}

ScalarFn csv_function(const std::string& path, int dim) {
  std::ifstream is(path);
  if (!is) throw ConfigError("config: cannot open CSV " + path);
  std::string line;
  std::getline(is, line);
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  const bool has_t = !header.empty() && header.front() == "t";
  const std::size_t want = static_cast<std::size_t>(dim) + 1 + (has_t ? 1 : 0);
  if (header.size() != want || header.back() != "value")
    throw ConfigError("config: CSV " + path + " needs header [t,]x1..xN,value");
  std::vector<double> ts;
  std::vector<SmallVec> xs;
  std::vector<double> vs;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (row.size() != want) throw ConfigError("config: CSV " + path + " has a malformed row");
    std::size_t k = 0;
    ts.push_back(has_t ? row[k++] : 0.0);
    SmallVec x(dim);
    for (int a = 0; a < dim; ++a) x(a) = row[k++];
    xs.push_back(x);
    vs.push_back(row[k]);
  }
  if (vs.empty()) throw ConfigError("config: CSV " + path + " has no rows");
  return [ts, xs, vs, has_t](double t, const SmallVec& x) {
    std::size_t best = 0;
    double bd = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < vs.size(); ++i) {
      const double dd = (xs[i] - x).squaredNorm() + (has_t ? (ts[i] - t) * (ts[i] - t) : 0.0);
      if (dd < bd) {
        bd = dd;
        best = i;
      }
    }
    return vs[best];
  };
}

Config Config::load(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("config: cannot open " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  const auto dir = std::filesystem::path(path).parent_path();
  Config c = parse(ss.str(), dir.empty() ? "." : dir.string());
  c.path = path;
  return c;
}

Config Config::parse(const std::string& text, const std::string& base_dir) {
  Config c;
  const json j = parse_json(text);
  if (!j.is_object()) throw ConfigError("config: top level must be an object");
  c.source = text;
  c.base_dir_ = base_dir;
  return c;
}

bool Config::has(const std::string& b) const { return parse_json(source).contains(b); }

Problem Config::problem() const {
  const json j = parse_json(source);
  const json& g = block(j, "grid");
  const auto [lo, hi] = parse_box(g, "grid");
  const int dim = static_cast<int>(lo.size());
  const double T = key(g, "grid", "T").get<double>();
  const int nt = key(g, "grid", "nt").get<int>();
  const int nx = key(g, "grid", "nx").get<int>();
  if (!(T > 0) || nt < 1 || nx < 2) throw ConfigError("config: grid needs T > 0, nt >= 1, nx >= 2");
  const GridDomain domain(SpaceGrid(lo, hi, nx + 1), T, nt);
  const BoxDomain omega{lo, hi, T};

  const json& fb = block(j, "flux");
  const std::string fk = key(fb, "flux", "key").get<std::string>();
  FluxParams params;
  if (fb.contains("params")) {
    for (const auto& [k, v] : fb.at("params").items()) {
      if (v.is_number()) {
        params.values[k] = v.get<double>();
      } else if (v.is_string()) {
        params.expressions[k] = v.get<std::string>();
      } else {
        throw ConfigError("config: flux.params." + k + " must be a number or an expression");
      }
    }
  }
  FluxSpec base;
  try {
    base = flux_catalog(fk, dim, params, omega);
  } catch (const InvalidInput& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }

  const json empty = json::object();
  const json& sb = j.contains("solver") ? j.at("solver") : empty;
  RegularizeOptions ro;
  if (sb.contains("regularizer")) ro.m = make_modular(sb.at("regularizer").get<std::string>(), dim);
  const double theta = value_or<double>(sb, "theta", 0.0);
  RegularizedFluxSpec flux;
  try {
    flux = regularize(base, theta, omega, ro);
  } catch (const InvalidInput& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }

  const json& db = j.contains("data") ? j.at("data") : empty;
  Problem p{domain, flux, data_function(db, "f", dim, base_dir_), data_function(db, "u0", dim, base_dir_),
            data_function(db, "exact", dim, base_dir_)};
  return p;
}

SolverOptions Config::solver_options() const {
  const json j = parse_json(source);
  SolverOptions o;
  if (!j.contains("solver")) return o;
  const json& sb = j.at("solver");
  o.tol_newton = value_or<double>(sb, "tol_newton", o.tol_newton);
  o.max_iter = value_or<int>(sb, "max_iter", o.max_iter);
  o.picard_max = value_or<int>(sb, "picard_max", o.picard_max);
  return o;
}

std::vector<double> Config::theta_ladder() const {
  const json j = parse_json(source);
  if (j.contains("solver") && j.at("solver").contains("theta_ladder"))
    return number_list(j.at("solver").at("theta_ladder"), "solver.theta_ladder");
  return default_theta_ladder();
}

bool Config::has_theta_ladder() const {
  const json j = parse_json(source);
  return j.contains("solver") && j.at("solver").contains("theta_ladder");
}

std::pair<NFunctionSpec, BoxDomain> Config::balance_target() const {
  const json j = parse_json(source);
  const json& b = block(j, "balance");
  const auto [lo, hi] = parse_box(b, "balance");
  const std::string mk = key(b, "balance", "modular").get<std::string>();
  try {
    return {make_modular(mk, static_cast<int>(lo.size())), BoxDomain{lo, hi, value_or<double>(b, "T", 1.0)}};
  } catch (const InvalidInput& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

ScanOptions Config::scan_options() const {
  const json j = parse_json(source);
  const json& b = block(j, "balance");
  ScanOptions o;
  const std::string mode = value_or<std::string>(b, "mode", "N");
  if (mode == "N") {
    o.mode = ProbeMode::N;
  } else if (mode == "N/p") {
    o.mode = ProbeMode::NOverP;
  } else {
    throw ConfigError("config: balance.mode must be \"N\" or \"N/p\"");
  }
  if (b.contains("p")) o.p = b.at("p").get<double>();
  if (b.contains("delta_grid")) o.delta_grid = number_list(b.at("delta_grid"), "balance.delta_grid");
  o.sampling.per_axis = value_or<int>(b, "per_axis", o.sampling.per_axis);
  o.sampling.time_points = value_or<int>(b, "time_points", o.sampling.time_points);
  o.stability_check = value_or<bool>(b, "stability_check", false);
  return o;
}

Config::NfunTable Config::nfun_table() const {
  const json j = parse_json(source);
  const json& b = block(j, "nfun");
  NfunTable tab;
  const int dim = value_or<int>(b, "dim", 1);
  try {
    tab.M = make_modular(key(b, "nfun", "modular").get<std::string>(), dim);
  } catch (const InvalidInput& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  tab.t = value_or<double>(b, "t", 0.0);
  tab.x = SmallVec::Zero(dim);
  if (b.contains("x")) {
    const auto xs = number_list(b.at("x"), "nfun.x");
    if (static_cast<int>(xs.size()) != dim) throw ConfigError("config: nfun.x must have dim entries");
    for (int a = 0; a < dim; ++a) tab.x(a) = xs[static_cast<std::size_t>(a)];
  }
  tab.s_max = value_or<double>(b, "s_max", 10.0);
  tab.nodes = value_or<int>(b, "nodes", 64);
  return tab;
}

}  // namespace mop
