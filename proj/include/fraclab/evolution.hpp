#pragma once

#include <functional>
#include <string>
#include <vector>

#include "fraclab/stationary.hpp"

namespace fraclab {

/// Bounded source term h(t,x) for the source-driven flow.
struct SourceSpec {
  std::function<double(double, double)> h;  // h(t, x)
  double bound = 0.0;                       // ess-sup |h|
};

struct LedgerRow {
  double t = 0.0;
  double kinetic_increment = 0.0;  // h*dt*sum((u^k-u^{k-1})/dt)^2
  double energy = 0.0;             // 0.5*h*u'Au
  double potential = 0.0;          // (1/(1-q))*h*sum u^{1-q}; log form at q = 1
  double work_increment = 0.0;     // h*sum h_k (u^k - u^{k-1})
  double f_term = 0.0;             // h*sum F(x, u^k), reaction runs only
};

struct EvolutionTrace {
  double T = 0.0;
  int n_steps = 0;
  double dt = 0.0;
  double q = 0.0;
  std::vector<double> times;      // t_0..t_n
  std::vector<Field> snapshots;   // u^0..u^n
  std::vector<LedgerRow> ledger;  // one row per time, row 0 holds the initial state
  Field lower_envelope, upper_envelope;
  bool has_f_term = false;
  bool completed = true;
  int failed_step = -1;
  std::string failure_reason;
  double envelope_violation = 0.0;  // max over steps of nodal excursion
};

/// Step averages h_k(x) = (1/dt) int_{t_{k-1}}^{t_k} h(t,x) dt by 4-point Gauss.
std::vector<Field> discretize_source(const SourceSpec& src, const GridPtr& grid,
                                     double T, int n_steps);

/// One implicit Euler step: solves the stationary problem with lambda = dt and
/// g = dt*h_k + u_prev, warm-started at u_prev.
Field step_implicit(const Field& u_prev, const Field& h_k, double dt, double q,
                    const FracOperator& op, const EigenPair& eig);

/// Source-driven implicit Euler run with per-step energy ledger. The initial
/// datum must lie between the envelopes built for the source bound.
EvolutionTrace evolve_source(const Field& u0, const SourceSpec& src, double T,
                             int n_steps, double q, const FracOperator& op,
                             const EigenPair& eig);

/// Variant taking prediscretized step sources (used by manufactured-solution
/// consistency checks).
EvolutionTrace evolve_source_steps(const Field& u0, const std::vector<Field>& h_k,
                                   double bound, double T, double q,
                                   const FracOperator& op, const EigenPair& eig);

/// Piecewise-constant and piecewise-linear interpolants at time t in [0,T].
std::pair<Field, Field> interpolants(const EvolutionTrace& trace, double t);

/// Per-time absolute residual of the discrete energy identity.
std::vector<double> energy_identity_residual(const EvolutionTrace& trace);

/// Minimum over times of the slack in the one-sided second energy estimate:
/// (|domain| T / 2) bound^2 - [kinetic/2 + energy increment - potential increment].
double energy_inequality_min_slack(const EvolutionTrace& trace, double bound);

/// Reaction-driven run with the lagged nonlinearity; requires dt*K0 < 1 and
/// growth_mu < lambda1.
EvolutionTrace evolve_reaction(const Field& u0, const NonlinearitySpec& nl, double T,
                               int n_steps, double q, const FracOperator& op,
                               const EigenPair& eig);

struct StabilizationReport {
  EvolutionTrace trace;        // from u0
  EvolutionTrace trace_lower;  // from the subsolution
  EvolutionTrace trace_upper;  // from the supersolution
  Field u_hat;
  std::vector<double> distance;  // ||u^k - u_hat||_inf
  bool stabilized = false;
  double t_stabilized = -1.0;
  double final_distance = 0.0;
  double final_squeeze = 0.0;           // ||v2 - v1||_inf at the end
  double bracket_violation = 0.0;       // max nodal violation of v1 <= u <= v2
  double lower_monotonicity_violation = 0.0;
  double upper_monotonicity_violation = 0.0;
};

/// Long-time run bracketed by the monotone envelope trajectories; the
/// bracketing fields converge to the stationary solution from both sides.
StabilizationReport stabilization_run(const Field& u0, const NonlinearitySpec& nl,
                                      double T, int n_steps, double q,
                                      const FracOperator& op, const EigenPair& eig);

/// CSV export: snapshots (t,x,u rows) and the ledger.
void export_trace_csv(const EvolutionTrace& trace, const std::string& snapshots_path,
                      const std::string& ledger_path);

}  // namespace fraclab
