#include "fraclab/catalog.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace fraclab {
namespace {

double get(const ParamMap& p, const std::string& k) { return p.at(k); }

SourceSpec make_constant(const ParamMap& p) {
  const double c = get(p, "c");
  return SourceSpec{[c](double, double) { return c; }, std::fabs(c)};
}

SourceSpec make_sine_time(const ParamMap& p) {
  const double c = get(p, "c"), omega = get(p, "omega");
  return SourceSpec{[c, omega](double t, double) { return c * std::sin(omega * t); },
                    std::fabs(c)};
}

SourceSpec make_bump_x(const ParamMap& p) {
  const double c = get(p, "c"), x0 = get(p, "x0"), w = get(p, "width");
  return SourceSpec{[c, x0, w](double, double x) {
                      const double z = (x - x0) / w;
                      return c * std::exp(-z * z);
                    },
                    std::fabs(c)};
}

SourceSpec make_sine_both(const ParamMap& p) {
  const double c = get(p, "c"), omega = get(p, "omega"), kx = get(p, "k");
  return SourceSpec{[c, omega, kx](double t, double x) {
                      return c * (1.0 + 0.5 * std::sin(omega * t)) *
                             std::cos(kx * x);
                    },
                    1.5 * std::fabs(c)};
}

// f(x,y) = mu_frac*lambda1 * y/(1+y) + c: bounded, Lipschitz with constant mu,
// decreasing quotient.
NonlinearitySpec make_saturating(const ParamMap& p, double lambda1) {
  const double mu = get(p, "mu_frac") * lambda1;
  const double c = get(p, "c");
  NonlinearitySpec nl;
  nl.f = [mu, c](double, double y) { return mu * y / (1.0 + y) + c; };
  nl.lipschitz_on = [mu](double) { return mu; };
  nl.growth_mu = mu;
  nl.lower_bound_l = mu + c;  // f <= mu + c <= mu*y + l and f >= 0 >= -l
  nl.antiderivative_F = [mu, c](double, double z) {
    return mu * (z - std::log(1.0 + z)) + c * z;
  };
  nl.monotone_quotient = (c >= 0.0);
  return nl;
}

// f(x,y) = c*exp(-y): decaying, decreasing quotient.
NonlinearitySpec make_decay(const ParamMap& p, double lambda1) {
  const double c = get(p, "c");
  const double mu = 0.25 * lambda1;
  NonlinearitySpec nl;
  nl.f = [c](double, double y) { return c * std::exp(-y); };
  nl.lipschitz_on = [c](double) { return c; };
  nl.growth_mu = mu;
  nl.lower_bound_l = c;
  nl.antiderivative_F = [c](double, double z) { return c * (1.0 - std::exp(-z)); };
  nl.monotone_quotient = (c > 0.0);
  return nl;
}

// f(x,y) = c*(1 + a*sin(pi x)): y-independent positive profile.
NonlinearitySpec make_profile(const ParamMap& p, double lambda1) {
  const double c = get(p, "c"), a = get(p, "a");
  if (std::fabs(a) > 1.0)
    throw std::invalid_argument("nonlinearity profile: requires |a| <= 1");
  const double mu = 0.25 * lambda1;
  NonlinearitySpec nl;
  nl.f = [c, a](double x, double) { return c * (1.0 + a * std::sin(M_PI * x)); };
  nl.lipschitz_on = [](double) { return 0.0; };
  nl.growth_mu = mu;
  nl.lower_bound_l = c * (1.0 + std::fabs(a));
  nl.antiderivative_F = [c, a](double x, double z) {
    return c * (1.0 + a * std::sin(M_PI * x)) * z;
  };
  nl.monotone_quotient = (c > 0.0);
  return nl;
}

// f(x,y) = mu_frac*lambda1 * y/(1+y^2) + c: bounded with decreasing quotient.
NonlinearitySpec make_logistic(const ParamMap& p, double lambda1) {
  const double mu = get(p, "mu_frac") * lambda1;
  const double c = get(p, "c");
  NonlinearitySpec nl;
  nl.f = [mu, c](double, double y) { return mu * y / (1.0 + y * y) + c; };
  nl.lipschitz_on = [mu](double) { return mu; };
  nl.growth_mu = mu;
  nl.lower_bound_l = mu + c;
  nl.antiderivative_F = [mu, c](double, double z) {
    return 0.5 * mu * std::log(1.0 + z * z) + c * z;
  };
  nl.monotone_quotient = (c >= 0.0);
  return nl;
}

}  // namespace

const std::vector<SourceEntry>& source_catalog() {
  static const std::vector<SourceEntry> entries = {
      {"constant", "h(t,x) = c", {{"c", 1.0}}, make_constant},
      {"sine_time", "h(t,x) = c sin(omega t)", {{"c", 1.0}, {"omega", 2.0}},
       make_sine_time},
      {"bump_x", "h(t,x) = c exp(-((x-x0)/width)^2)",
       {{"c", 1.0}, {"x0", 0.0}, {"width", 0.35}}, make_bump_x},
      {"sine_both", "h(t,x) = c (1 + sin(omega t)/2) cos(k x)",
       {{"c", 1.0}, {"omega", 3.0}, {"k", 1.0}}, make_sine_both},
  };
  return entries;
}

const std::vector<NonlinearityEntry>& nonlinearity_catalog() {
  static const std::vector<NonlinearityEntry> entries = {
      {"saturating", "f(x,y) = mu y/(1+y) + c with mu = mu_frac*lambda1",
       {{"mu_frac", 0.5}, {"c", 0.5}}, true,
       "sublinear growth below lambda1; decreasing quotient; Lipschitz",
       make_saturating},
      {"decay", "f(x,y) = c exp(-y)", {{"c", 1.0}}, true,
       "bounded; decreasing quotient; Lipschitz", make_decay},
      {"profile", "f(x,y) = c (1 + a sin(pi x))", {{"c", 1.0}, {"a", 0.5}}, true,
       "y-independent positive source; decreasing quotient", make_profile},
      {"logistic", "f(x,y) = mu y/(1+y^2) + c with mu = mu_frac*lambda1",
       {{"mu_frac", 0.5}, {"c", 0.25}}, true,
       "bounded; decreasing quotient; Lipschitz", make_logistic},
  };
  return entries;
}

const SourceEntry& find_source(const std::string& name) {
  for (const auto& e : source_catalog())
    if (e.name == name) return e;
  throw std::invalid_argument("unknown source: " + name);
}

const NonlinearityEntry& find_nonlinearity(const std::string& name) {
  for (const auto& e : nonlinearity_catalog())
    if (e.name == name) return e;
  throw std::invalid_argument("unknown nonlinearity: " + name);
}

ParamMap resolve_params(const ParamMap& defaults, const ParamMap& given,
                        const std::string& what) {
  ParamMap out = defaults;
  for (const auto& [k, v] : given) {
    if (!defaults.count(k))
      throw std::invalid_argument(what + ": unknown parameter '" + k + "'");
    out[k] = v;
  }
  return out;
}

bool verify_monotone_quotient(const NonlinearitySpec& nl, double x, double y_max) {
  double prev = std::numeric_limits<double>::infinity();
  const int ny = 200;
  for (int i = 1; i <= ny; ++i) {
    const double y = y_max * i / ny;
    const double quot = nl.f(x, y) / y;
    if (quot > prev + 1e-12) return false;
    prev = quot;
  }
  return true;
}

}  // namespace fraclab
