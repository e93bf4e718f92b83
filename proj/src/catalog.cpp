#include "mop/catalog.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace mop {

namespace {

double power_conjugate(double tau, double p, double c) {
  if (tau <= 0) return 0.0;
  const double pp = p / (p - 1.0);
  return (p - 1.0) * c * std::pow(tau / (p * c), pp);
}

SmallVec power_gradient(const SmallVec& xi, double p, double c) {
  const double n = xi.norm();
  if (n == 0.0) return SmallVec::Zero(xi.size());
  return (c * p * std::pow(n, p - 2.0)) * xi;
}

double to_double(const std::string& s) {
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw InvalidInput("catalog: bad number '" + s + "'");
  return v;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\n\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\n\r");
  return s.substr(a, b - a + 1);
}

}  // namespace

std::pair<std::string, std::vector<std::string>> split_key(const std::string& key) {
  const std::string k = trim(key);
  const auto open = k.find('(');
  if (open == std::string::npos) return {k, {}};
  if (k.back() != ')') throw InvalidInput("catalog: unbalanced parentheses in '" + key + "'");
  std::vector<std::string> args;
  int depth = 0;
  std::string cur;
  for (std::size_t i = open + 1; i + 1 < k.size(); ++i) {
    const char c = k[i];
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == ',' && depth == 0) {
      args.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!trim(cur).empty() || !args.empty()) args.push_back(trim(cur));
  return {trim(k.substr(0, open)), args};
}

NFunctionSpec power_modular(int dim, double p, double c) {
  if (!(p > 1.0)) throw InvalidInput("power_modular: p must exceed 1");
  NFunctionSpec M;
  std::ostringstream nm;
  nm << "p_laplace(" << p << ")";
  M.name = nm.str();
  M.dim = dim;
  M.isotropic = true;
  M.homogeneous = true;
  M.growth_exponent_p = p;
  M.growth_constant = c;
  M.eval = [p, c](double, const SmallVec&, const SmallVec& xi) { return c * std::pow(xi.norm(), p); };
  M.radial = [p, c](double, const SmallVec&, double s) { return c * std::pow(s, p); };
  M.radial_conjugate = [p, c](double, const SmallVec&, double tau) { return power_conjugate(tau, p, c); };
  M.analytic_conjugate = [p, c](double, const SmallVec&, const SmallVec& eta) {
    return power_conjugate(eta.norm(), p, c);
  };
  M.gradient = [p, c](double, const SmallVec&, const SmallVec& xi) { return power_gradient(xi, p, c); };
  return M;
}

NFunctionSpec variable_exponent_modular(int dim, WeightFn exponent, std::string label) {
  NFunctionSpec M;
  M.name = std::move(label);
  M.dim = dim;
  M.isotropic = true;
  M.time_invariant = false;
  M.eval = [exponent](double t, const SmallVec& x, const SmallVec& xi) {
    return std::pow(xi.norm(), exponent(t, x));
  };
  M.radial = [exponent](double t, const SmallVec& x, double s) { return std::pow(s, exponent(t, x)); };
  M.radial_conjugate = [exponent](double t, const SmallVec& x, double tau) {
    return power_conjugate(tau, exponent(t, x), 1.0);
  };
  M.analytic_conjugate = [exponent](double t, const SmallVec& x, const SmallVec& eta) {
    return power_conjugate(eta.norm(), exponent(t, x), 1.0);
  };
  M.gradient = [exponent](double t, const SmallVec& x, const SmallVec& xi) {
    return power_gradient(xi, exponent(t, x), 1.0);
  };
  return M;
}

NFunctionSpec double_phase_modular(int dim, double p, double q, WeightFn weight, std::string label) {
  NFunctionSpec M;
  M.name = std::move(label);
  M.dim = dim;
  M.isotropic = true;
  M.time_invariant = false;
  M.growth_exponent_p = p;
  M.eval = [p, q, weight](double t, const SmallVec& x, const SmallVec& xi) {
    const double s = xi.norm();
    return std::pow(s, p) + weight(t, x) * std::pow(s, q);
  };
  M.radial = [p, q, weight](double t, const SmallVec& x, double s) {
    return std::pow(s, p) + weight(t, x) * std::pow(s, q);
  };
  M.gradient = [p, q, weight](double t, const SmallVec& x, const SmallVec& xi) {
    return SmallVec(power_gradient(xi, p, 1.0) + weight(t, x) * power_gradient(xi, q, 1.0));
  };
  return M;
}

NFunctionSpec double_phase_modular(int dim, double p, double q, double alpha, double a0) {
  std::ostringstream nm;
  nm << "double_phase(" << p << "," << q << "," << alpha << "," << a0 << ")";
  auto M = double_phase_modular(
      dim, p, q, [alpha, a0](double, const SmallVec& x) { return a0 * std::pow(x.norm(), alpha); }, nm.str());
  M.time_invariant = true;
  return M;
}

NFunctionSpec orlicz_double_phase_modular(int dim, double m1, double m2, double a) {
  NFunctionSpec M;
  std::ostringstream nm;
  nm << "orlicz_double_phase(" << m1 << "," << m2 << "," << a << ")";
  M.name = nm.str();
  M.dim = dim;
  M.growth_exponent_p = std::min(m1, m2);
  auto comp = [m1, m2, a](double, const SmallVec& x, double s) {
    return std::pow(s, m1) + a * x.norm() * std::pow(s, m2);
  };
  M.components.assign(static_cast<std::size_t>(dim), comp);
  M.eval = [comp](double t, const SmallVec& x, const SmallVec& xi) {
    double v = 0;
    for (int i = 0; i < xi.size(); ++i) v += comp(t, x, std::abs(xi(i)));
    return v;
  };
  M.gradient = [m1, m2, a](double, const SmallVec& x, const SmallVec& xi) {
    SmallVec g(xi.size());
    for (int i = 0; i < xi.size(); ++i) {
      const double s = std::abs(xi(i));
      const double sg = xi(i) < 0 ? -1.0 : 1.0;
      g(i) = s == 0 ? 0.0 : sg * (m1 * std::pow(s, m1 - 1) + a * x.norm() * m2 * std::pow(s, m2 - 1));
    }
    return g;
  };
  return M;
}

NFunctionSpec radial_modular(int dim, std::string name, std::function<double(double)> profile,
                             std::function<double(double)> derivative, std::function<double(double)> conjugate) {
  NFunctionSpec M;
  M.name = std::move(name);
  M.dim = dim;
  M.isotropic = true;
  M.homogeneous = true;
  M.eval = [profile](double, const SmallVec&, const SmallVec& xi) { return profile(xi.norm()); };
  M.radial = [profile](double, const SmallVec&, double s) { return profile(s); };
  if (derivative) {
    M.gradient = [derivative](double, const SmallVec&, const SmallVec& xi) {
      const double s = xi.norm();
      if (s == 0) return SmallVec(SmallVec::Zero(xi.size()));
      return SmallVec((derivative(s) / s) * xi);
    };
  }
  if (conjugate) {
    M.radial_conjugate = [conjugate](double, const SmallVec&, double tau) { return conjugate(tau); };
    M.analytic_conjugate = [conjugate](double, const SmallVec&, const SmallVec& eta) { return conjugate(eta.norm()); };
  }
  return M;
}

NFunctionSpec llogl_modular(int dim, double alpha) {
  std::ostringstream nm;
  nm << "llogl(" << alpha << ")";
  return radial_modular(
      dim, nm.str(), [alpha](double s) { return s * std::pow(std::log1p(s), alpha); },
      [alpha](double s) {
        const double l = std::log1p(s);
        return std::pow(l, alpha) + alpha * s * std::pow(l, alpha - 1.0) / (1.0 + s);
      });
}

NFunctionSpec exp_growth_modular(int dim) {
  return radial_modular(
      dim, "exp_growth", [](double s) { return std::expm1(s) - s; }, [](double s) { return std::expm1(s); },
      [](double tau) { return tau <= 0 ? 0.0 : (1.0 + tau) * std::log1p(tau) - tau; });
}

NFunctionSpec weighted_power_modular(int dim, double p, WeightFn weight) {
  NFunctionSpec M;
  std::ostringstream nm;
  nm << "weighted_power(" << p << ")";
  M.name = nm.str();
  M.dim = dim;
  M.isotropic = true;
  M.time_invariant = false;
  M.growth_exponent_p = p;
  M.eval = [p, weight](double t, const SmallVec& x, const SmallVec& xi) {
    return weight(t, x) * std::pow(xi.norm(), p);
  };
  M.radial = [p, weight](double t, const SmallVec& x, double s) { return weight(t, x) * std::pow(s, p); };
  M.analytic_conjugate = [p, weight](double t, const SmallVec& x, const SmallVec& eta) {
    return power_conjugate(eta.norm(), p, weight(t, x));
  };
  return M;
}

NFunctionSpec make_modular(const std::string& key, int dim) {
  const auto [name, args] = split_key(key);
  auto need = [&](std::size_t n) {
    if (args.size() != n)
      throw InvalidInput("catalog: '" + name + "' expects " + std::to_string(n) + " arguments");
  };
  if (name == "p_laplace") {
    need(1);
    return power_modular(dim, to_double(args[0]));
  }
  if (name == "variable_exponent") {
    need(1);
    std::string src = args[0];
    if (std::ifstream in{src}; in) {
      std::stringstream ss;
      ss << in.rdbuf();
      src = trim(ss.str());
    }
    Expression p(src);
    auto M = variable_exponent_modular(dim, [p](double t, const SmallVec& x) { return p(t, x); },
                                       "variable_exponent(" + args[0] + ")");
    M.time_invariant = !p.uses_time();
    return M;
  }
  if (name == "double_phase") {
    need(4);
    return double_phase_modular(dim, to_double(args[0]), to_double(args[1]), to_double(args[2]), to_double(args[3]));
  }
  if (name == "orlicz_double_phase") {
    need(3);
    return orlicz_double_phase_modular(dim, to_double(args[0]), to_double(args[1]), to_double(args[2]));
  }
  if (name == "llogl") {
    need(1);
    return llogl_modular(dim, to_double(args[0]));
  }
  if (name == "exp_growth") {
    need(0);
    return exp_growth_modular(dim);
  }
  throw InvalidInput("catalog: unknown modular key '" + key + "'");
}

}  // namespace mop
