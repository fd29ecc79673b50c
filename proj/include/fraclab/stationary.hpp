#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fraclab/operator.hpp"

namespace fraclab {

enum class Regime { standard, very_singular };

/// standard iff q(2s-1) < 2s+1.
Regime validate_params(double q, double s);

enum class ConeRegime { q_below_1, q_equal_1, q_above_1 };

/// Boundary-profile envelope: profile(delta) is delta^s, delta^s ln^{1/2}(r/delta^s)
/// or delta^{2s/(q+1)} depending on the regime.
struct ConeEnvelope {
  ConeRegime regime;
  double k1 = 0.0;
  double k2 = 0.0;
  double exponent = 0.0;
  bool log_factor = false;
  double r = 0.0;  // log-scale constant, > diam of the domain
};

ConeEnvelope make_cone_envelope(double q, double s, double domain_length);

/// Value of the cone profile at boundary distance delta.
double cone_profile(const ConeEnvelope& env, double delta);

/// Parameter bundle for u + lambda((-Delta)^s u - (u+eps)^{-q}) = g.
/// epsilon == 0 denotes the limit problem.
struct StationaryProblem {
  double lambda = 1.0;
  double q = 1.0;
  double s = 0.5;
  Field g;
  double epsilon = 0.0;
};

struct SolveReport {
  int newton_iterations = 0;
  double residual = 0.0;
  int continuation_levels = 0;
  double final_epsilon = 0.0;
  double barrier_m = 0.0;
};

/// Regularized problem (epsilon > 0), damped Newton with a positive floor.
Field solve_regularized(const StationaryProblem& p, const FracOperator& op,
                        const EigenPair& eig, SolveReport* report = nullptr);

/// Limit problem (epsilon == 0): epsilon-continuation from 1 with warm starts,
/// then a final Newton polish on the limit equation. A positive warm start
/// skips straight to the polish.
Field solve_stationary(const StationaryProblem& p, const FracOperator& op,
                       const EigenPair& eig, SolveReport* report = nullptr,
                       const Field* warm = nullptr);

/// w > 0 with (-Delta)^s w = w^{-q}.
Field solve_pure_singular(double q, double s, const FracOperator& op,
                          SolveReport* report = nullptr);

struct Subsolution {
  double m = 0.0;
  Field field;
};

/// Largest dyadic m with A(m phi1) - (m phi1)^{-q} <= -bound at every node.
Subsolution build_subsolution(double q, double s, const FracOperator& op,
                              const EigenPair& eig, double bound);

struct Supersolution {
  double M = 0.0;
  double Mprime = 0.0;
  Field field;
};

/// Field M w + M' phi1 with A(ubar) - ubar^{-q} >= mu ubar + l at every node.
/// Requires mu < lambda1 strictly and l >= 0; w from solve_pure_singular.
Supersolution build_supersolution(double q, double s, const FracOperator& op,
                                  const EigenPair& eig, double mu, double l,
                                  const Field& w);

/// Reaction term f(x,y) with the growth/regularity data the schemes need.
struct NonlinearitySpec {
  std::function<double(double, double)> f;               // f(x, y), y >= 0
  std::function<double(double)> lipschitz_on;            // Lipschitz const of f(x,.) on [0, M]
  double lower_bound_l = 0.0;                            // f >= -l and f <= mu y + l
  double growth_mu = 0.0;                                // mu < lambda1 required downstream
  std::function<double(double, double)> antiderivative_F;  // F(x, z), dF/dz = f
  bool monotone_quotient = false;                        // y -> f(x,y)/y decreasing
};

/// Sampled verification of the declared bounds; throws on violation.
void validate_nonlinearity(const NonlinearitySpec& nl, const Grid& grid, double y_max);

struct SemilinearReport {
  int iterations = 0;
  double residual = 0.0;
  double max_monotonicity_violation = 0.0;
  double K0 = 0.0;
  double m = 0.0;       // subsolution constant
  double M = 0.0;       // supersolution constants
  double Mprime = 0.0;
};

/// Monotone iteration for (-Delta)^s u - u^{-q} = f(x,u), ascending from the
/// subsolution (default) or descending from the supersolution.
Field solve_semilinear(const NonlinearitySpec& nl, double q, double s,
                       const FracOperator& op, const EigenPair& eig,
                       SemilinearReport* report = nullptr, bool from_above = false);

/// Internal building block shared with the evolution module: damped Newton for
///   a*u + lambda*(A u - (u+eps)^{-q}) = rhs,  u >= floor.
Field newton_singular_solve(const FracOperator& op, double a_coef, double lambda,
                            double q, double eps, const Field& rhs, const Field& floor,
                            const Field& start, SolveReport* report = nullptr);

}  // namespace fraclab
