#include "fraclab/evolution.hpp"

#include <cmath>
#include <stdexcept>

#include "fraclab/io.hpp"

namespace fraclab {
namespace {

// 4-point Gauss-Legendre on [-1,1]
const double kG4X[4] = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                        0.8611363115940526};
const double kG4W[4] = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                        0.3478548451374538};

double potential_term(const Eigen::VectorXd& u, double q, double h) {
  if (q == 1.0) return h * u.array().log().sum();
  return h / (1.0 - q) * u.array().pow(1.0 - q).sum();
}

LedgerRow make_row(double t, const Field& u_prev, const Field& u, const Field* h_k,
                   double dt, double q, const FracOperator& op,
                   const std::function<double(double, double)>* F) {
  const double h = u.grid->h;
  LedgerRow row;
  row.t = t;
  const Eigen::VectorXd diff = u.values - u_prev.values;
  row.kinetic_increment = (h / dt) * diff.squaredNorm();
  row.energy = 0.5 * h * u.values.dot(op.matrix * u.values);
  row.potential = potential_term(u.values, q, h);
  if (h_k) row.work_increment = h * h_k->values.dot(diff);
  if (F) {
    double acc = 0.0;
    for (int i = 0; i < u.size(); ++i) acc += (*F)(u.grid->nodes[i], u.values[i]);
    row.f_term = h * acc;
  }
  return row;
}

LedgerRow initial_row(const Field& u0, double q, const FracOperator& op,
                      const std::function<double(double, double)>* F) {
  const double h = u0.grid->h;
  LedgerRow row;
  row.t = 0.0;
  row.energy = 0.5 * h * u0.values.dot(op.matrix * u0.values);
  row.potential = potential_term(u0.values, q, h);
  if (F) {
    double acc = 0.0;
    for (int i = 0; i < u0.size(); ++i) acc += (*F)(u0.grid->nodes[i], u0.values[i]);
    row.f_term = h * acc;
  }
  return row;
}

struct Envelopes {
  Subsolution sub;
  Supersolution sup;
};

Envelopes build_envelopes(double q, double mu, double l, const FracOperator& op,
                          const EigenPair& eig) {
  Field w = solve_pure_singular(q, op.s, op);
  Envelopes env{build_subsolution(q, op.s, op, eig, l),
                build_supersolution(q, op.s, op, eig, mu, l, w)};
  return env;
}

void certify_initial(const Field& u0, const Envelopes& env) {
  const double lo = (env.sub.field.values - u0.values).maxCoeff();
  const double hi = (u0.values - env.sup.field.values).maxCoeff();
  if (lo > 1e-9 || hi > 1e-9)
    throw std::invalid_argument("initial datum is not within the built envelopes");
}

double envelope_excursion(const Field& u, const Envelopes& env) {
  const double lo = (env.sub.field.values - u.values).maxCoeff();
  const double hi = (u.values - env.sup.field.values).maxCoeff();
  return std::max(0.0, std::max(lo, hi));
}

}  // namespace

std::vector<Field> discretize_source(const SourceSpec& src, const GridPtr& grid,
                                     double T, int n_steps) {
  if (!(T > 0.0) || n_steps < 1)
    throw std::invalid_argument("discretize_source: requires T > 0 and n_steps >= 1");
  const double dt = T / n_steps;
  std::vector<Field> out;
  out.reserve(n_steps);
  for (int k = 1; k <= n_steps; ++k) {
    const double t0 = (k - 1) * dt, t1 = k * dt;
    Eigen::VectorXd v = Eigen::VectorXd::Zero(grid->n);
    for (int g = 0; g < 4; ++g) {
      const double t = 0.5 * (t0 + t1) + 0.5 * dt * kG4X[g];
      const double w = 0.5 * kG4W[g];  // times dt, divided by dt for the average
      for (int i = 0; i < grid->n; ++i) v[i] += w * src.h(t, grid->nodes[i]);
    }
    out.emplace_back(grid, std::move(v));
  }
  return out;
}

Field step_implicit(const Field& u_prev, const Field& h_k, double dt, double q,
                    const FracOperator& op, const EigenPair& eig) {
  if (!(dt > 0.0)) throw std::invalid_argument("step_implicit: requires dt > 0");
  require_same_grid(u_prev, h_k, "step_implicit");
  StationaryProblem p;
  p.lambda = dt;
  p.q = q;
  p.s = op.s;
  p.g = Field(u_prev.grid, dt * h_k.values + u_prev.values);
  p.epsilon = 0.0;
  return solve_stationary(p, op, eig, nullptr, &u_prev);
}

namespace {

EvolutionTrace run_trace(const Field& u0, const std::vector<Field>& h_k, double T,
                         double q, const FracOperator& op, const EigenPair& eig,
                         const Envelopes& env,
                         const std::function<double(double, double)>* F,
                         const std::function<Field(const Field&, int)>* custom_step) {
  const int n_steps = static_cast<int>(h_k.size());
  EvolutionTrace trace;
  trace.T = T;
  trace.n_steps = n_steps;
  trace.dt = T / n_steps;
  trace.q = q;
  trace.lower_envelope = env.sub.field;
  trace.upper_envelope = env.sup.field;
  trace.has_f_term = (F != nullptr);
  trace.times.push_back(0.0);
  trace.snapshots.push_back(u0);
  trace.ledger.push_back(initial_row(u0, q, op, F));

  Field u = u0;
  for (int k = 1; k <= n_steps; ++k) {
    Field next = u;
    try {
      if (custom_step)
        next = (*custom_step)(u, k);
      else
        next = step_implicit(u, h_k[k - 1], trace.dt, q, op, eig);
    } catch (const std::exception& e) {
      trace.completed = false;
      trace.failed_step = k;
      trace.failure_reason = e.what();
      return trace;
    }
    trace.envelope_violation = std::max(trace.envelope_violation,
                                        envelope_excursion(next, env));
    trace.times.push_back(k * trace.dt);
    trace.ledger.push_back(make_row(k * trace.dt, u, next,
                                    custom_step ? nullptr : &h_k[k - 1], trace.dt, q,
                                    op, F));
    trace.snapshots.push_back(next);
    u = next;
  }
  return trace;
}

}  // namespace

EvolutionTrace evolve_source_steps(const Field& u0, const std::vector<Field>& h_k,
                                   double bound, double T, double q,
                                   const FracOperator& op, const EigenPair& eig) {
  Envelopes env = build_envelopes(q, 0.0, bound, op, eig);
  certify_initial(u0, env);
  return run_trace(u0, h_k, T, q, op, eig, env, nullptr, nullptr);
}

EvolutionTrace evolve_source(const Field& u0, const SourceSpec& src, double T,
                             int n_steps, double q, const FracOperator& op,
                             const EigenPair& eig) {
  auto h_k = discretize_source(src, u0.grid, T, n_steps);
  return evolve_source_steps(u0, h_k, src.bound, T, q, op, eig);
}

std::pair<Field, Field> interpolants(const EvolutionTrace& trace, double t) {
  if (t < 0.0 || t > trace.T + 1e-12 * trace.T)
    throw std::invalid_argument("interpolants: t outside [0,T]");
  if (t <= 0.0) return {trace.snapshots[0], trace.snapshots[0]};
  int k = static_cast<int>(std::ceil(t / trace.dt - 1e-12));
  k = std::min(std::max(k, 1), trace.n_steps);
  const Field& prev = trace.snapshots[k - 1];
  const Field& cur = trace.snapshots[k];
  const double theta = (t - (k - 1) * trace.dt) / trace.dt;
  Field lin(cur.grid, prev.values + theta * (cur.values - prev.values));
  return {cur, std::move(lin)};
}

std::vector<double> energy_identity_residual(const EvolutionTrace& trace) {
  std::vector<double> out;
  out.reserve(trace.ledger.size() - 1);
  const LedgerRow& r0 = trace.ledger[0];
  double kinetic = 0.0, work = 0.0;
  for (size_t k = 1; k < trace.ledger.size(); ++k) {
    const LedgerRow& r = trace.ledger[k];
    kinetic += r.kinetic_increment;
    double rhs;
    if (trace.has_f_term) {
      rhs = (r.f_term - r0.f_term) + r0.energy - r0.potential;
    } else {
      work += r.work_increment;
      rhs = work + r0.energy - r0.potential;
    }
    const double lhs = kinetic + r.energy - r.potential;
    out.push_back(std::fabs(lhs - rhs));
  }
  return out;
}

double energy_inequality_min_slack(const EvolutionTrace& trace, double bound) {
  const Grid& g = *trace.snapshots[0].grid;
  const double budget = (g.b - g.a) * trace.T / 2.0 * bound * bound;
  const LedgerRow& r0 = trace.ledger[0];
  double kinetic = 0.0;
  double min_slack = budget;
  for (size_t k = 1; k < trace.ledger.size(); ++k) {
    const LedgerRow& r = trace.ledger[k];
    kinetic += r.kinetic_increment;
    const double lhs = 0.5 * kinetic + (r.energy - r0.energy) + (r0.potential - r.potential);
    min_slack = std::min(min_slack, budget - lhs);
  }
  return min_slack;
}

namespace {

EvolutionTrace evolve_reaction_impl(const Field& u0, const NonlinearitySpec& nl,
                                    double T, int n_steps, double q,
                                    const FracOperator& op, const EigenPair& eig,
                                    const Envelopes& env) {
  const double dt = T / n_steps;
  const double K0 = nl.lipschitz_on(env.sup.field.values.maxCoeff());
  if (!(dt * K0 < 1.0))
    throw std::invalid_argument("evolve_reaction: requires dt * K0 < 1");
  certify_initial(u0, env);

  const GridPtr grid = u0.grid;
  auto lagged_step = std::function<Field(const Field&, int)>(
      [&, dt, q](const Field& u_prev, int) {
        Eigen::VectorXd gv(grid->n);
        for (int i = 0; i < grid->n; ++i)
          gv[i] = dt * nl.f(grid->nodes[i], u_prev.values[i]) + u_prev.values[i];
        StationaryProblem p;
        p.lambda = dt;
        p.q = q;
        p.s = op.s;
        p.g = Field(grid, std::move(gv));
        return solve_stationary(p, op, eig, nullptr, &u_prev);
      });
  std::vector<Field> dummy(n_steps, zero_field(grid));
  return run_trace(u0, dummy, T, q, op, eig, env, &nl.antiderivative_F, &lagged_step);
}

}  // namespace

EvolutionTrace evolve_reaction(const Field& u0, const NonlinearitySpec& nl, double T,
                               int n_steps, double q, const FracOperator& op,
                               const EigenPair& eig) {
  if (!(nl.growth_mu < eig.lambda1))
    throw std::invalid_argument("evolve_reaction: growth bound must stay below lambda1");
  Envelopes env = build_envelopes(q, nl.growth_mu, nl.lower_bound_l, op, eig);
  return evolve_reaction_impl(u0, nl, T, n_steps, q, op, eig, env);
}

StabilizationReport stabilization_run(const Field& u0, const NonlinearitySpec& nl,
                                      double T, int n_steps, double q,
                                      const FracOperator& op, const EigenPair& eig) {
  if (!nl.monotone_quotient)
    throw std::invalid_argument("stabilization_run: requires a decreasing quotient");
  if (!(nl.growth_mu < eig.lambda1))
    throw std::invalid_argument("stabilization_run: growth bound must stay below lambda1");

  Envelopes env = build_envelopes(q, nl.growth_mu, nl.lower_bound_l, op, eig);
  StabilizationReport rep;
  rep.u_hat = solve_semilinear(nl, q, op.s, op, eig);
  rep.trace = evolve_reaction_impl(u0, nl, T, n_steps, q, op, eig, env);
  rep.trace_lower = evolve_reaction_impl(env.sub.field, nl, T, n_steps, q, op, eig, env);
  rep.trace_upper = evolve_reaction_impl(env.sup.field, nl, T, n_steps, q, op, eig, env);
  if (!rep.trace.completed || !rep.trace_lower.completed || !rep.trace_upper.completed)
    throw std::runtime_error("stabilization_run: a trace failed before completion");

  int consecutive = 0;
  for (int k = 0; k <= n_steps; ++k) {
    const Field& u = rep.trace.snapshots[k];
    const Field& v1 = rep.trace_lower.snapshots[k];
    const Field& v2 = rep.trace_upper.snapshots[k];
    rep.bracket_violation = std::max(
        rep.bracket_violation,
        std::max((v1.values - u.values).maxCoeff(), (u.values - v2.values).maxCoeff()));
    if (k > 0) {
      rep.lower_monotonicity_violation = std::max(
          rep.lower_monotonicity_violation,
          (rep.trace_lower.snapshots[k - 1].values - v1.values).maxCoeff());
      rep.upper_monotonicity_violation = std::max(
          rep.upper_monotonicity_violation,
          (v2.values - rep.trace_upper.snapshots[k - 1].values).maxCoeff());
    }
    const double d = max_abs_diff(u, rep.u_hat);
    rep.distance.push_back(d);
    if (d < 1e-4) {
      if (++consecutive >= 10 && !rep.stabilized) {
        rep.stabilized = true;
        rep.t_stabilized = rep.trace.times[k];
      }
    } else {
      consecutive = 0;
    }
  }
  rep.bracket_violation = std::max(0.0, rep.bracket_violation);
  if (rep.bracket_violation > 1e-8)
    throw std::runtime_error("stabilization_run: bracketing violated beyond tolerance");
  rep.final_distance = rep.distance.back();
  rep.final_squeeze = max_abs_diff(rep.trace_upper.snapshots.back(),
                                   rep.trace_lower.snapshots.back());
  return rep;
}

void export_trace_csv(const EvolutionTrace& trace, const std::string& snapshots_path,
                      const std::string& ledger_path) {
  {
    CsvWriter csv(snapshots_path);
    csv.header({"t", "x", "u"});
    for (size_t k = 0; k < trace.snapshots.size(); ++k) {
      const Field& u = trace.snapshots[k];
      for (int i = 0; i < u.size(); ++i)
        csv.row({trace.times[k], u.grid->nodes[i], u.values[i]});
    }
  }
  {
    CsvWriter csv(ledger_path);
    csv.header({"t", "kinetic_increment", "energy", "potential", "work_increment",
                "f_term"});
    for (const LedgerRow& r : trace.ledger)
      csv.row({r.t, r.kinetic_increment, r.energy, r.potential, r.work_increment,
               r.f_term});
  }
}

}  // namespace fraclab
