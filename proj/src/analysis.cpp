#include "fraclab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fraclab {
namespace {

ExponentFit fit_points(const std::vector<double>& ds, const std::vector<double>& us,
                       bool with_log, double s, double r) {
  if (ds.size() < 8) throw std::invalid_argument("exponent fit: fewer than 8 window nodes");
  ExponentFit fit;
  fit.with_log = with_log;
  fit.points = static_cast<int>(ds.size());
  fit.window_lo = *std::min_element(ds.begin(), ds.end());
  fit.window_hi = *std::max_element(ds.begin(), ds.end());

  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  const int n = fit.points;
  for (int i = 0; i < n; ++i) {
    double u = us[i];
    if (u <= 0.0) throw std::invalid_argument("exponent fit: nonpositive value in window");
    if (with_log) u /= std::sqrt(std::log(r / std::pow(ds[i], s)));
    const double X = std::log(ds[i]);
    const double Y = std::log(u);
    sx += X; sy += Y; sxx += X * X; sxy += X * Y; syy += Y * Y;
  }
  const double den = n * sxx - sx * sx;
  fit.alpha_hat = (n * sxy - sx * sy) / den;
  const double ss_tot = syy - sy * sy / n;
  const double ss_res = ss_tot - fit.alpha_hat * (sxy - sx * sy / n);
  fit.r_squared = ss_tot > 0 ? std::max(0.0, 1.0 - ss_res / ss_tot) : 1.0;
  return fit;
}

}  // namespace

ExponentFit boundary_exponent_fit_window(const Field& u, const Grid& grid, double lo,
                                         double hi, bool with_log, double s, double r) {
  std::vector<double> ds, us;
  for (int i = 0; i < grid.n; ++i) {
    if (grid.delta[i] >= lo && grid.delta[i] < hi) {
      ds.push_back(grid.delta[i]);
      us.push_back(u.values[i]);
    }
  }
  return fit_points(ds, us, with_log, s, r);
}

ExponentFit boundary_exponent_fit(const Field& u, const Grid& grid, double rho,
                                  bool with_log, double s, double r) {
  // excludes the 2 nodes nearest each endpoint: they carry the largest
  // quadrature error
  std::vector<double> ds, us;
  for (int i = 2; i < grid.n - 2; ++i) {
    if (grid.delta[i] < rho) {
      ds.push_back(grid.delta[i]);
      us.push_back(u.values[i]);
    }
  }
  return fit_points(ds, us, with_log, s, r);
}

ConeCertification cone_check(const Field& u, const ConeEnvelope& env, const Grid& grid) {
  ConeCertification cert;
  cert.k1_hat = std::numeric_limits<double>::infinity();
  cert.k2_hat = 0.0;
  for (int i = 0; i < grid.n; ++i) {
    if (u.values[i] <= 0.0) throw std::invalid_argument("cone_check: nonpositive value");
    const double ratio = u.values[i] / cone_profile(env, grid.delta[i]);
    cert.k1_hat = std::min(cert.k1_hat, ratio);
    cert.k2_hat = std::max(cert.k2_hat, ratio);
  }
  cert.pass = std::isfinite(cert.k1_hat) && std::isfinite(cert.k2_hat) &&
              cert.k1_hat > 0.0 && cert.k2_hat > 0.0;
  return cert;
}

double comparison_check(const Field& u, const Field& v) {
  require_same_grid(u, v, "comparison_check");
  return std::max(0.0, (u.values - v.values).maxCoeff());
}

ContractionReport contraction_check(const EvolutionTrace& tu, const EvolutionTrace& tv,
                                    const std::vector<Field>& h_u,
                                    const std::vector<Field>& h_v, double alpha,
                                    ContractionKind kind) {
  if (tu.n_steps != tv.n_steps || tu.dt != tv.dt)
    throw std::invalid_argument("contraction_check: mismatched traces");
  ContractionReport rep;
  const double d0 = max_abs_diff(tu.snapshots[0], tv.snapshots[0]);
  double source_integral = 0.0;
  rep.min_slack = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= tu.n_steps; ++k) {
    const double dk = max_abs_diff(tu.snapshots[k], tv.snapshots[k]);
    double rhs;
    if (kind == ContractionKind::source_integral) {
      source_integral += tu.dt * max_abs_diff(h_u[k - 1], h_v[k - 1]);
      rhs = d0 + source_integral;
    } else {
      rhs = std::exp(alpha * tu.times[k]) * d0;
    }
    rep.slack.push_back(rhs - dk);
    rep.min_slack = std::min(rep.min_slack, rhs - dk);
  }
  return rep;
}

double picone_min(const Field& u, const Field& v) {
  require_same_grid(u, v, "picone_min");
  const int n = u.size();
  if (v.values.minCoeff() <= 0.0)
    throw std::invalid_argument("picone_min: requires v > 0");
  if (u.values.minCoeff() < 0.0)
    throw std::invalid_argument("picone_min: requires u >= 0");
  double mn = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    const double ui = u.values[i], vi = v.values[i];
    for (int j = i + 1; j < n; ++j) {
      const double uj = u.values[j], vj = v.values[j];
      const double du = ui - uj;
      const double m = du * du - (vi - vj) * (ui * ui / vi - uj * uj / vj);
      mn = std::min(mn, m);
    }
  }
  return mn;
}

GapScalingResult gap_scaling_study(const std::vector<EvolutionTrace>& runs) {
  if (runs.size() < 4)
    throw std::invalid_argument("gap_scaling_study: requires at least 4 runs");
  GapScalingResult res;
  for (const EvolutionTrace& tr : runs) {
    double gap = 0.0;
    for (int k = 1; k <= tr.n_steps; ++k)
      gap = std::max(gap, l2_norm(Field(tr.snapshots[k].grid,
                                        tr.snapshots[k].values - tr.snapshots[k - 1].values)));
    res.dts.push_back(tr.dt);
    res.gaps.push_back(gap);
  }
  const double scale = *std::max_element(res.gaps.begin(), res.gaps.end());
  if (scale < 1e-12) {
    res.degenerate = true;
    return res;
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const int n = static_cast<int>(runs.size());
  for (int i = 0; i < n; ++i) {
    const double X = std::log(res.dts[i]);
    const double Y = std::log(res.gaps[i]);
    sx += X; sy += Y; sxx += X * X; sxy += X * Y;
  }
  res.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  res.pass = res.slope >= 0.4;
  return res;
}

SeminormStudy seminorm_refinement_study(double q, double s, double beta,
                                        const std::vector<int>& ns, double lambda,
                                        double g_const, double a, double b) {
  if (validate_params(q, s) != Regime::very_singular)
    throw std::invalid_argument("seminorm study: parameters must be in the very-singular regime");
  const double threshold = std::max(1.0, (1.0 - 1.0 / (2.0 * s)) * (q + 1.0) / 2.0);
  if (!(beta > threshold))
    throw std::invalid_argument("seminorm study: beta below the membership threshold");

  SeminormStudy study;
  study.beta = beta;
  study.beta_threshold = threshold;
  study.ns = ns;
  const double eps_fixed = 1e-6;
  for (int n : ns) {
    GridPtr grid = build_grid(a, b, n);
    FracOperator op = assemble(grid, s);
    EigenPair eig = principal_eigenpair(op);
    StationaryProblem p;
    p.lambda = lambda;
    p.q = q;
    p.s = s;
    p.g = constant_field(grid, g_const);
    // continuation from 1 down to the fixed floor; the limit problem leaves
    // the energy space, so the comparison object is the regularized solution
    Field u = zero_field(grid);
    bool have = false;
    double eps = 1.0;
    while (true) {
      p.epsilon = eps;
      if (!have) {
        u = solve_regularized(p, op, eig);
        have = true;
      } else {
        Field floor(grid, Eigen::VectorXd::Zero(grid->n));
        u = newton_singular_solve(op, 1.0, lambda, q, eps, p.g, floor, u);
      }
      if (eps <= eps_fixed) break;
      eps = std::max(eps / 2.0, eps_fixed);
    }
    study.u_seminorm.push_back(gagliardo_seminorm(*grid, s, u));
    Field ubeta(grid, u.values.array().pow(beta).matrix());
    study.ubeta_seminorm.push_back(gagliardo_seminorm(*grid, s, ubeta));
  }
  for (size_t i = 1; i < study.u_seminorm.size(); ++i) {
    study.u_ratio.push_back(study.u_seminorm[i] / study.u_seminorm[i - 1]);
    study.ubeta_ratio.push_back(study.ubeta_seminorm[i] / study.ubeta_seminorm[i - 1]);
  }
  const bool u_grows = std::all_of(study.u_ratio.begin(), study.u_ratio.end(),
                                   [](double r) { return r > 1.05; });
  const bool ub_plateau = !study.ubeta_ratio.empty() && study.ubeta_ratio.back() < 1.02;
  if (u_grows && ub_plateau)
    study.classification = "u grows without saturation; u^beta plateaus";
  else if (u_grows)
    study.classification = "u grows without saturation; u^beta still growing at the last level";
  else
    study.classification = "both sequences plateau";
  return study;
}

}  // namespace fraclab
