#include "fraclab/scenarios.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>

#include "fraclab/acceptance.hpp"
#include "fraclab/analysis.hpp"
#include "fraclab/io.hpp"
#include "json.hpp"

namespace fraclab {
namespace {

using nlohmann::json;

struct ScenarioContext {
  RunConfig cfg;
  GridPtr grid;
  FracOperator op;
  EigenPair eig;
  json manifest;
  std::ofstream summary;
  std::chrono::steady_clock::time_point start;

  explicit ScenarioContext(const RunConfig& c) : cfg(c) {
    ensure_directory(cfg.out_dir);
    summary.open(cfg.out_dir + "/summary.txt");
    start = std::chrono::steady_clock::now();
    manifest["config"] = json::parse(config_to_json(cfg));
    manifest["version"] = "fraclab 0.1.0";
  }

  std::string path(const std::string& name) const { return cfg.out_dir + "/" + name; }

  void prepare_operator(bool need_eigen = true) {
    grid = build_grid(cfg.a, cfg.b, cfg.n);
    op = assemble(grid, cfg.s);
    manifest["operator"] = {{"c_norm", op.c_norm},
                            {"outside_hypothesis", op.outside_hypothesis}};
    if (need_eigen) {
      eig = principal_eigenpair(op);
      manifest["lambda1"] = eig.lambda1;
    }
  }

  void finish() {
    manifest["elapsed_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::ofstream mf(path("manifest.json"));
    mf << manifest.dump(2) << "\n";
  }
};

void write_field_csv(const std::string& path, const Grid& grid, const Field& u) {
  CsvWriter csv(path);
  csv.header({"x", "delta", "u"});
  for (int i = 0; i < grid.n; ++i) csv.row({grid.nodes[i], grid.delta[i], u.values[i]});
}

NonlinearitySpec resolve_nonlinearity(const ScenarioContext& ctx) {
  const auto& entry = find_nonlinearity(ctx.cfg.nonlinearity_name);
  ParamMap params = resolve_params(entry.defaults, ctx.cfg.nonlinearity_params,
                                   "nonlinearity " + entry.name);
  NonlinearitySpec nl = entry.make(params, ctx.eig.lambda1);
  if (!(nl.growth_mu < ctx.eig.lambda1))
    throw ConfigError("nonlinearity growth bound " + full_precision(nl.growth_mu) +
                      " is not below lambda1 = " + full_precision(ctx.eig.lambda1));
  return nl;
}

SourceSpec resolve_source(const ScenarioContext& ctx) {
  const auto& entry = find_source(ctx.cfg.source_name);
  ParamMap params =
      resolve_params(entry.defaults, ctx.cfg.source_params, "source " + entry.name);
  return entry.make(params);
}

Field resolve_initial(ScenarioContext& ctx, double q, const Subsolution& sub,
                      const Supersolution& sup) {
  const std::string& name = ctx.cfg.initial_name;
  if (name == "subsolution") return sub.field;
  if (name == "supersolution") return sup.field;
  if (name == "pure_singular") return solve_pure_singular(q, ctx.cfg.s, ctx.op);
  const double t = std::clamp(ctx.cfg.initial_mix, 0.0, 1.0);
  return Field(ctx.grid, sub.field.values + t * (sup.field.values - sub.field.values));
}

int scenario_eigen(ScenarioContext& ctx) {
  ctx.prepare_operator();
  export_eigenpair_csv(ctx.op, ctx.eig, ctx.path("eigenpair.csv"));
  if (ctx.cfg.export_matrix) export_matrix_csv(ctx.op, ctx.path("matrix.csv"));
  const double resid =
      (ctx.op.matrix * ctx.eig.phi1.values - ctx.eig.lambda1 * ctx.eig.phi1.values)
          .cwiseAbs()
          .maxCoeff();
  ctx.manifest["residual"] = resid;
  const double l2 = std::sqrt(ctx.grid->h) * ctx.eig.phi1.values.norm();
  ctx.summary << "lambda1 = " << full_precision(ctx.eig.lambda1) << "\n"
              << "residual = " << full_precision(resid) << "\n";
  const bool ok = resid <= 1e-8 * ctx.eig.lambda1 &&
                  ctx.eig.phi1.values.minCoeff() > 0.0 && std::fabs(l2 - 1.0) <= 1e-10;
  if (!ok) throw InvariantError("eigenpair invariants violated");
  return 0;
}

int scenario_stationary(ScenarioContext& ctx) {
  ctx.prepare_operator();
  StationaryProblem p{ctx.cfg.lambda, ctx.cfg.q, ctx.cfg.s,
                      constant_field(ctx.grid, ctx.cfg.g_const), ctx.cfg.epsilon};
  SolveReport rep;
  Field u = (ctx.cfg.epsilon > 0.0) ? solve_regularized(p, ctx.op, ctx.eig, &rep)
                                    : solve_stationary(p, ctx.op, ctx.eig, &rep);
  write_field_csv(ctx.path("solution.csv"), *ctx.grid, u);
  ctx.manifest["solve"] = {{"newton_iterations", rep.newton_iterations},
                           {"residual", rep.residual},
                           {"continuation_levels", rep.continuation_levels},
                           {"final_epsilon", rep.final_epsilon},
                           {"epsilon_schedule",
                            ctx.cfg.epsilon > 0.0
                                ? "fixed"
                                : "halving from 1, then exact limit polish"},
                           {"barrier_m", rep.barrier_m},
                           {"regime", validate_params(ctx.cfg.q, ctx.cfg.s) ==
                                              Regime::standard
                                          ? "standard"
                                          : "very_singular"}};
  ConeEnvelope env = make_cone_envelope(ctx.cfg.q, ctx.cfg.s, ctx.cfg.b - ctx.cfg.a);
  ConeCertification cert = cone_check(u, env, *ctx.grid);
  ctx.manifest["cone"] = {{"k1_hat", cert.k1_hat}, {"k2_hat", cert.k2_hat},
                          {"pass", cert.pass}};
  ctx.summary << "residual = " << full_precision(rep.residual) << "\n"
              << "cone k1 = " << full_precision(cert.k1_hat)
              << ", k2 = " << full_precision(cert.k2_hat) << "\n";
  if (u.values.minCoeff() <= 0.0) throw InvariantError("solution not positive");
  return 0;
}

int scenario_pure_singular(ScenarioContext& ctx) {
  ctx.prepare_operator(false);
  SolveReport rep;
  Field w = solve_pure_singular(ctx.cfg.q, ctx.cfg.s, ctx.op, &rep);
  write_field_csv(ctx.path("solution.csv"), *ctx.grid, w);
  const double rhs_scale = w.values.array().pow(-ctx.cfg.q).maxCoeff();
  ctx.manifest["solve"] = {{"residual", rep.residual},
                           {"continuation_levels", rep.continuation_levels}};
  ctx.summary << "residual = " << full_precision(rep.residual) << "\n";
  if (rep.residual > 1e-7 * rhs_scale)
    throw InvariantError("pure singular residual above tolerance");
  return 0;
}

int scenario_semilinear(ScenarioContext& ctx) {
  ctx.prepare_operator();
  NonlinearitySpec nl = resolve_nonlinearity(ctx);
  SemilinearReport rep;
  Field u = solve_semilinear(nl, ctx.cfg.q, ctx.cfg.s, ctx.op, ctx.eig, &rep, false);
  write_field_csv(ctx.path("solution.csv"), *ctx.grid, u);
  ctx.manifest["solve"] = {{"iterations", rep.iterations},
                           {"residual", rep.residual},
                           {"K0", rep.K0},
                           {"m", rep.m},
                           {"M", rep.M},
                           {"Mprime", rep.Mprime},
                           {"monotonicity_violation", rep.max_monotonicity_violation}};
  ctx.summary << "iterations = " << rep.iterations
              << ", residual = " << full_precision(rep.residual) << "\n";
  if (ctx.cfg.check_uniqueness) {
    SemilinearReport down;
    Field u2 = solve_semilinear(nl, ctx.cfg.q, ctx.cfg.s, ctx.op, ctx.eig, &down, true);
    const double gap = max_abs_diff(u, u2);
    ctx.manifest["two_sided_gap"] = gap;
    ctx.summary << "two-sided gap = " << full_precision(gap) << "\n";
    if (gap > 1e-6) throw InvariantError("ascending/descending limits disagree");
  }
  return 0;
}

int scenario_evolve_g(ScenarioContext& ctx) {
  ctx.prepare_operator();
  SourceSpec src = resolve_source(ctx);
  Field w = solve_pure_singular(ctx.cfg.q, ctx.cfg.s, ctx.op);
  Subsolution sub = build_subsolution(ctx.cfg.q, ctx.cfg.s, ctx.op, ctx.eig, src.bound);
  Supersolution sup =
      build_supersolution(ctx.cfg.q, ctx.cfg.s, ctx.op, ctx.eig, 0.0, src.bound, w);
  Field u0 = resolve_initial(ctx, ctx.cfg.q, sub, sup);
  EvolutionTrace tr =
      evolve_source(u0, src, ctx.cfg.T, ctx.cfg.n_steps, ctx.cfg.q, ctx.op, ctx.eig);
  export_trace_csv(tr, ctx.path("snapshots.csv"), ctx.path("ledger.csv"));
  ctx.manifest["envelopes"] = {{"m", sub.m}, {"M", sup.M}, {"Mprime", sup.Mprime}};
  ctx.manifest["trace"] = {{"completed", tr.completed},
                           {"failed_step", tr.failed_step},
                           {"envelope_violation", tr.envelope_violation}};
  ctx.summary << "steps = " << tr.n_steps
              << ", envelope violation = " << full_precision(tr.envelope_violation)
              << "\n";
  if (!tr.completed)
    throw SolverError("step " + std::to_string(tr.failed_step) + " failed: " +
                      tr.failure_reason);
  if (tr.envelope_violation > 1e-10) throw InvariantError("envelope invariance violated");
  return 0;
}

int scenario_evolve_p(ScenarioContext& ctx) {
  ctx.prepare_operator();
  NonlinearitySpec nl = resolve_nonlinearity(ctx);
  Field w = solve_pure_singular(ctx.cfg.q, ctx.cfg.s, ctx.op);
  Subsolution sub =
      build_subsolution(ctx.cfg.q, ctx.cfg.s, ctx.op, ctx.eig, nl.lower_bound_l);
  Supersolution sup = build_supersolution(ctx.cfg.q, ctx.cfg.s, ctx.op, ctx.eig,
                                          nl.growth_mu, nl.lower_bound_l, w);
  Field u0 = resolve_initial(ctx, ctx.cfg.q, sub, sup);
  EvolutionTrace tr =
      evolve_reaction(u0, nl, ctx.cfg.T, ctx.cfg.n_steps, ctx.cfg.q, ctx.op, ctx.eig);
  export_trace_csv(tr, ctx.path("snapshots.csv"), ctx.path("ledger.csv"));
  ctx.manifest["envelopes"] = {{"m", sub.m}, {"M", sup.M}, {"Mprime", sup.Mprime}};
  ctx.manifest["trace"] = {{"completed", tr.completed},
                           {"envelope_violation", tr.envelope_violation}};
  ctx.summary << "steps = " << tr.n_steps
              << ", envelope violation = " << full_precision(tr.envelope_violation)
              << "\n";
  if (!tr.completed)
    throw SolverError("step " + std::to_string(tr.failed_step) + " failed: " +
                      tr.failure_reason);
  if (tr.envelope_violation > 1e-10) throw InvariantError("envelope invariance violated");
  return 0;
}

int scenario_stabilize(ScenarioContext& ctx) {
  ctx.prepare_operator();
  NonlinearitySpec nl = resolve_nonlinearity(ctx);
  Field w = solve_pure_singular(ctx.cfg.q, ctx.cfg.s, ctx.op);
  Subsolution sub =
      build_subsolution(ctx.cfg.q, ctx.cfg.s, ctx.op, ctx.eig, nl.lower_bound_l);
  Supersolution sup = build_supersolution(ctx.cfg.q, ctx.cfg.s, ctx.op, ctx.eig,
                                          nl.growth_mu, nl.lower_bound_l, w);
  Field u0 = resolve_initial(ctx, ctx.cfg.q, sub, sup);
  StabilizationReport rep = stabilization_run(u0, nl, ctx.cfg.T, ctx.cfg.n_steps,
                                              ctx.cfg.q, ctx.op, ctx.eig);
  {
    CsvWriter csv(ctx.path("distance.csv"));
    csv.header({"t", "distance", "squeeze"});
    for (size_t k = 0; k < rep.distance.size(); ++k)
      csv.row({rep.trace.times[k], rep.distance[k],
               max_abs_diff(rep.trace_upper.snapshots[k], rep.trace_lower.snapshots[k])});
  }
  write_field_csv(ctx.path("u_hat.csv"), *ctx.grid, rep.u_hat);
  ctx.manifest["stabilization"] = {
      {"stabilized", rep.stabilized},
      {"t_stabilized", rep.t_stabilized},
      {"final_distance", rep.final_distance},
      {"final_squeeze", rep.final_squeeze},
      {"bracket_violation", rep.bracket_violation},
      {"lower_monotonicity_violation", rep.lower_monotonicity_violation},
      {"upper_monotonicity_violation", rep.upper_monotonicity_violation}};
  ctx.summary << (rep.stabilized ? "stabilized at t = " + full_precision(rep.t_stabilized)
                                 : "did not stabilize")
              << ", final distance = " << full_precision(rep.final_distance) << "\n";
  if (rep.bracket_violation > 1e-8 || rep.lower_monotonicity_violation > 1e-10 ||
      rep.upper_monotonicity_violation > 1e-10)
    throw InvariantError("bracketing/monotonicity invariants violated");
  return 0;
}

int scenario_study_gap(ScenarioContext& ctx) {
  ctx.prepare_operator();
  SourceSpec src = resolve_source(ctx);
  Field u0 = solve_pure_singular(ctx.cfg.q, ctx.cfg.s, ctx.op);
  std::vector<EvolutionTrace> runs;
  int n_steps = ctx.cfg.n_steps;
  for (int level = 0; level < ctx.cfg.dt_levels; ++level, n_steps *= 2)
    runs.push_back(
        evolve_source(u0, src, ctx.cfg.T, n_steps, ctx.cfg.q, ctx.op, ctx.eig));
  GapScalingResult res = gap_scaling_study(runs);
  CsvWriter csv(ctx.path("gaps.csv"));
  csv.header({"dt", "max_step_increment_l2"});
  for (size_t i = 0; i < res.dts.size(); ++i) csv.row({res.dts[i], res.gaps[i]});
  ctx.manifest["gap_study"] = {{"slope", res.slope},
                               {"degenerate", res.degenerate},
                               {"pass", res.pass}};
  ctx.summary << (res.degenerate ? "degenerate (constant-in-time) family"
                                 : "fitted slope = " + full_precision(res.slope))
              << "\n";
  if (!res.degenerate && !res.pass) throw InvariantError("gap scaling below 0.4");
  return 0;
}

int scenario_study_seminorm(ScenarioContext& ctx) {
  const double threshold =
      std::max(1.0, (1.0 - 1.0 / (2.0 * ctx.cfg.s)) * (ctx.cfg.q + 1.0) / 2.0);
  const double beta = ctx.cfg.beta_factor * threshold;
  SeminormStudy study =
      seminorm_refinement_study(ctx.cfg.q, ctx.cfg.s, beta, ctx.cfg.ns, ctx.cfg.lambda,
                                ctx.cfg.g_const, ctx.cfg.a, ctx.cfg.b);
  CsvWriter csv(ctx.path("seminorms.csv"));
  csv.header({"n", "u_seminorm", "ubeta_seminorm"});
  for (size_t i = 0; i < study.ns.size(); ++i)
    csv.row({static_cast<double>(study.ns[i]), study.u_seminorm[i],
             study.ubeta_seminorm[i]});
  ctx.manifest["seminorm_study"] = {{"beta", study.beta},
                                    {"beta_threshold", study.beta_threshold},
                                    {"u_ratios", study.u_ratio},
                                    {"ubeta_ratios", study.ubeta_ratio},
                                    {"classification", study.classification}};
  ctx.summary << "trend evidence, not a membership proof\n"
              << "classification: " << study.classification << "\n";
  return 0;
}

int scenario_verify_all(ScenarioContext& ctx) {
  std::vector<CriterionResult> results =
      acceptance_run_all(ctx.cfg.seed, ctx.cfg.out_dir);
  json jr = json::array();
  bool all_pass = true;
  for (const CriterionResult& r : results) {
    jr.push_back({{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"detail", r.detail}});
    all_pass = all_pass && r.pass;
    ctx.summary << (r.pass ? "[PASS] " : "[FAIL] ") << "C" << r.id << ": " << r.name
                << " (" << r.detail << ")\n";
  }
  ctx.manifest["criteria"] = jr;
  if (!all_pass) throw InvariantError("acceptance criteria failed");
  return 0;
}

}  // namespace

int run_scenario(const RunConfig& cfg) {
  try {
    validate_config(cfg);
  } catch (const ConfigError& e) {
    std::cerr << "error: config: " << e.what() << "\n";
    return 2;
  }
  try {
    ScenarioContext ctx(cfg);
    int rc = 0;
    try {
      if (cfg.scenario == "eigen") rc = scenario_eigen(ctx);
      else if (cfg.scenario == "stationary") rc = scenario_stationary(ctx);
      else if (cfg.scenario == "pure_singular") rc = scenario_pure_singular(ctx);
      else if (cfg.scenario == "semilinear") rc = scenario_semilinear(ctx);
      else if (cfg.scenario == "evolve_g") rc = scenario_evolve_g(ctx);
      else if (cfg.scenario == "evolve_p") rc = scenario_evolve_p(ctx);
      else if (cfg.scenario == "stabilize") rc = scenario_stabilize(ctx);
      else if (cfg.scenario == "study_gap") rc = scenario_study_gap(ctx);
      else if (cfg.scenario == "study_seminorm") rc = scenario_study_seminorm(ctx);
      else if (cfg.scenario == "verify_all") rc = scenario_verify_all(ctx);
      ctx.finish();
      return rc;
    } catch (...) {
      ctx.finish();
      throw;
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: config: " << e.what() << "\n";
    return 2;
  } catch (const InvariantError& e) {
    std::cerr << "error: invariant: " << e.what() << "\n";
    return 4;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: config: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: solver: " << e.what() << "\n";
    return 3;
  }
}

void print_catalog(std::ostream& os) {
  GridPtr grid = build_grid(-1.0, 1.0, 33);
  os << "sources:\n";
  for (const auto& e : source_catalog()) {
    os << "  " << e.name << ": " << e.description << " (defaults:";
    for (const auto& [k, v] : e.defaults) os << " " << k << "=" << v;
    os << ")\n";
  }
  os << "nonlinearities:\n";
  for (const auto& e : nonlinearity_catalog()) {
    NonlinearitySpec nl = e.make(e.defaults, 1.0);
    const bool verified = verify_monotone_quotient(nl, 0.1, 10.0);
    os << "  " << e.name << ": " << e.description << " (defaults:";
    for (const auto& [k, v] : e.defaults) os << " " << k << "=" << v;
    os << "); " << e.hypotheses << "; monotone quotient declared "
       << (e.monotone_quotient ? "true" : "false") << ", sampled "
       << (verified ? "true" : "false") << "\n";
  }
}

}  // namespace fraclab
