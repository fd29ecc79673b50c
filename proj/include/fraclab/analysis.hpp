#pragma once

#include <vector>

#include "fraclab/evolution.hpp"

namespace fraclab {

struct ExponentFit {
  double alpha_hat = 0.0;
  double r_squared = 0.0;
  double window_lo = 0.0;  // delta range actually used
  double window_hi = 0.0;
  bool with_log = false;
  int points = 0;
};

/// Least-squares slope of ln u against ln delta over the window delta < rho,
/// excluding the 2 nodes nearest each endpoint. When with_log is set, u is
/// divided by ln^{1/2}(r/delta^s) first (q = 1 profile).
ExponentFit boundary_exponent_fit(const Field& u, const Grid& grid, double rho,
                                  bool with_log = false, double s = 0.0,
                                  double r = 0.0);

/// Same fit on the explicit window delta in [lo, hi]; the boundary-layer
/// exponent is a small-delta limit, so measurements use the innermost nodes.
ExponentFit boundary_exponent_fit_window(const Field& u, const Grid& grid, double lo,
                                         double hi, bool with_log = false,
                                         double s = 0.0, double r = 0.0);

struct ConeCertification {
  double k1_hat = 0.0;
  double k2_hat = 0.0;
  bool pass = false;
};

/// k1_hat = min u/profile, k2_hat = max u/profile; pass iff finite positive.
ConeCertification cone_check(const Field& u, const ConeEnvelope& env, const Grid& grid);

/// max(0, max_i(u_i - v_i)).
double comparison_check(const Field& u, const Field& v);

enum class ContractionKind {
  source_integral,  // ||u-v||(t) <= ||u0-v0|| + int ||h-b||
  exponential       // ||u-v||(t) <= exp(alpha t) ||u0-v0||
};

struct ContractionReport {
  std::vector<double> slack;  // right side minus left side, per time
  double min_slack = 0.0;
};

/// Per-step slack of the applicable sup-norm contraction estimate.
/// The discretized sources are those the traces were run with; they are
/// ignored for the exponential variant.
ContractionReport contraction_check(const EvolutionTrace& tu, const EvolutionTrace& tv,
                                    const std::vector<Field>& h_u,
                                    const std::vector<Field>& h_v, double alpha,
                                    ContractionKind kind);

/// Minimum over node pairs (i != j) of the discrete identity integrand
///   |u(x)-u(y)|^2 - (v(x)-v(y)) (u(x)^2/v(x) - u(y)^2/v(y));
/// nonnegative for u >= 0, v > 0, zero exactly on proportional pairs.
double picone_min(const Field& u, const Field& v);

struct GapScalingResult {
  bool degenerate = false;  // all gaps at rounding level
  double slope = 0.0;
  std::vector<double> dts;
  std::vector<double> gaps;  // max_k ||u^k - u^{k-1}||_L2 per run
  bool pass = false;         // slope >= 0.4
};

/// Regression of ln(max step increment) against ln dt over a dt-halving family.
GapScalingResult gap_scaling_study(const std::vector<EvolutionTrace>& runs);

struct SeminormStudy {
  double beta = 0.0;
  double beta_threshold = 0.0;
  std::vector<int> ns;
  std::vector<double> u_seminorm;
  std::vector<double> ubeta_seminorm;
  std::vector<double> u_ratio;      // successive ratios
  std::vector<double> ubeta_ratio;
  std::string classification;
};

/// Refinement trend of the double-sum seminorm of u and u^beta for the
/// very-singular regime, at a fixed small regularization (the limit problem
/// leaves the energy space). Trend evidence only, not a membership proof.
SeminormStudy seminorm_refinement_study(double q, double s, double beta,
                                        const std::vector<int>& ns, double lambda,
                                        double g_const, double a, double b);

}  // namespace fraclab
