#include "fraclab/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "fraclab/analysis.hpp"
#include "fraclab/catalog.hpp"
#include "fraclab/io.hpp"

namespace fraclab {
namespace {

namespace fs = std::filesystem;

struct Rng {
  std::mt19937_64 eng;
  explicit Rng(std::uint64_t seed) : eng(seed) {}
  double uniform() { return (eng() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

// smooth bounded field: a low-order sine series on the domain
Field smooth_random(Rng& rng, const GridPtr& grid, double amplitude) {
  double c[4];
  for (double& v : c) v = rng.uniform(-1.0, 1.0);
  const double L = grid->b - grid->a;
  Eigen::VectorXd vals(grid->n);
  for (int i = 0; i < grid->n; ++i) {
    const double xh = (grid->nodes[i] - grid->a) / L;
    double v = 0.0;
    for (int k = 0; k < 4; ++k) v += c[k] * std::sin((k + 1) * M_PI * xh);
    vals[i] = amplitude * v / 4.0;
  }
  return Field(grid, std::move(vals));
}

// smooth field with values in [lo, hi] strictly
Field smooth_random_in(Rng& rng, const GridPtr& grid, double lo, double hi) {
  Field raw = smooth_random(rng, grid, 1.0);
  const double mn = raw.values.minCoeff(), mx = raw.values.maxCoeff();
  Eigen::VectorXd vals(grid->n);
  for (int i = 0; i < grid->n; ++i) {
    double t = (mx > mn) ? (raw.values[i] - mn) / (mx - mn) : 0.5;
    t = 0.05 + 0.9 * t;
    vals[i] = lo + t * (hi - lo);
  }
  return Field(grid, std::move(vals));
}

struct OperatorBundle {
  GridPtr grid;
  FracOperator op;
  EigenPair eig;
};

OperatorBundle make_bundle(double a, double b, int n, double s, bool need_eigen = true) {
  OperatorBundle bundle;
  bundle.grid = build_grid(a, b, n);
  bundle.op = assemble(bundle.grid, s);
  if (need_eigen) bundle.eig = principal_eigenpair(bundle.op);
  return bundle;
}

struct EnvelopeSet {
  Subsolution sub;
  Supersolution sup;
};

EnvelopeSet envelopes_for(const OperatorBundle& bl, double q, double mu, double l) {
  Field w = solve_pure_singular(q, bl.op.s, bl.op);
  return EnvelopeSet{build_subsolution(q, bl.op.s, bl.op, bl.eig, l),
                     build_supersolution(q, bl.op.s, bl.op, bl.eig, mu, l, w)};
}

struct BatteryContext {
  std::string dir;
  Rng rng;
  double envelope_violation = 0.0;
  int trace_count = 0;
  explicit BatteryContext(std::uint64_t seed, std::string d)
      : dir(std::move(d)), rng(seed) {}
  void note_trace(const EvolutionTrace& tr) {
    envelope_violation = std::max(envelope_violation, tr.envelope_violation);
    ++trace_count;
  }
};

// --- criterion 1: operator correctness against the closed-form profile ----

CriterionResult criterion_operator(BatteryContext& ctx) {
  const auto t0 = std::chrono::steady_clock::now();
  CsvWriter csv(ctx.dir + "/c01_operator.csv");
  csv.header({"s", "n", "linf_error"});
  bool pass = true;
  std::ostringstream detail;
  for (double s : {0.25, 0.4, 0.75}) {
    const double gamma = 1.0 / interval_profile_constant(s);
    std::vector<double> errs;
    for (int n : {128, 256, 512, 1024}) {
      OperatorBundle bl = make_bundle(-1.0, 1.0, n, s, false);
      Field u = solve_linear(bl.op, constant_field(bl.grid, 1.0), 0.0);
      double err = 0.0;
      for (int i = 0; i < n; ++i) {
        const double x = bl.grid->nodes[i];
        err = std::max(err, std::fabs(u.values[i] - gamma * std::pow(1.0 - x * x, s)));
      }
      errs.push_back(err);
      csv.row({s, static_cast<double>(n), err});
    }
    const bool level_ok = errs[2] < 1e-2;
    const bool decreasing = errs[0] > errs[1] && errs[1] > errs[2] && errs[2] > errs[3];
    pass = pass && level_ok && decreasing;
    detail << "s=" << s << " err512=" << fmt(errs[2]) << (level_ok && decreasing ? " ok; " : " FAIL; ");
  }
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  pass = pass && elapsed < 30.0;
  detail << "runtime " << fmt(elapsed) << "s";
  return {1, "operator matches closed-form interval profile", pass, detail.str()};
}

// --- criterion 2: principal eigenpair --------------------------------------

CriterionResult criterion_eigenpair(BatteryContext& ctx) {
  CsvWriter csv(ctx.dir + "/c02_eigen.csv");
  csv.header({"s", "lambda1", "residual", "boundary_fit"});
  bool pass = true;
  std::ostringstream detail;
  for (double s : {0.25, 0.4, 0.75}) {
    OperatorBundle bl = make_bundle(-1.0, 1.0, 1024, s);
    const double resid =
        (bl.op.matrix * bl.eig.phi1.values - bl.eig.lambda1 * bl.eig.phi1.values)
            .cwiseAbs()
            .maxCoeff();
    const bool positive = bl.eig.phi1.values.minCoeff() > 0.0;
    const double h = bl.grid->h;
    ExponentFit fit =
        boundary_exponent_fit_window(bl.eig.phi1, *bl.grid, 1.5 * h, 12.5 * h);
    csv.row({s, bl.eig.lambda1, resid, fit.alpha_hat});
    const bool ok = resid <= 1e-8 * bl.eig.lambda1 && positive &&
                    std::fabs(fit.alpha_hat - s) <= 0.1;
    pass = pass && ok;
    detail << "s=" << s << " fit=" << fmt(fit.alpha_hat) << (ok ? " ok; " : " FAIL; ");
  }
  return {2, "eigenpair residual, positivity, boundary exponent", pass, detail.str()};
}

// --- criterion 3: comparison principle over random ordered pairs -----------

CriterionResult criterion_comparison(BatteryContext& ctx) {
  CsvWriter csv(ctx.dir + "/c03_comparison.csv");
  csv.header({"pair", "lambda", "q", "s", "violation"});
  const int n = 64;
  double worst = 0.0;
  for (int pair = 0; pair < 200; ++pair) {
    double q, s;
    do {
      q = ctx.rng.uniform(0.3, 2.5);
      s = ctx.rng.uniform(0.15, 0.85);
    } while (validate_params(q, s) != Regime::standard);
    const double lambda = std::exp(ctx.rng.uniform(std::log(0.25), std::log(4.0)));
    OperatorBundle bl = make_bundle(-1.0, 1.0, n, s);
    Field g1 = smooth_random(ctx.rng, bl.grid, 1.0);
    Field bump = smooth_random(ctx.rng, bl.grid, 0.8);
    Field g2(bl.grid, g1.values.array() + bump.values.array().square());
    StationaryProblem p1{lambda, q, s, g1, 0.0};
    StationaryProblem p2{lambda, q, s, g2, 0.0};
    Field u1 = solve_stationary(p1, bl.op, bl.eig);
    Field u2 = solve_stationary(p2, bl.op, bl.eig);
    const double viol = comparison_check(u1, u2);
    worst = std::max(worst, viol);
    csv.row({static_cast<double>(pair), lambda, q, s, viol});
  }
  const bool pass = worst <= 1e-8;
  return {3, "comparison principle on 200 random ordered pairs", pass,
          "max violation " + fmt(worst)};
}

// --- criterion 4: monotone in the regularization ---------------------------

CriterionResult criterion_eps_monotone(BatteryContext& ctx) {
  CsvWriter csv(ctx.dir + "/c04_eps_monotone.csv");
  csv.header({"config", "lambda", "q", "s", "violation"});
  const int n = 64;
  double worst = 0.0;
  for (int c = 0; c < 20; ++c) {
    double q, s;
    do {
      q = ctx.rng.uniform(0.3, 2.5);
      s = ctx.rng.uniform(0.15, 0.85);
    } while (validate_params(q, s) != Regime::standard);
    const double lambda = std::exp(ctx.rng.uniform(std::log(0.25), std::log(4.0)));
    OperatorBundle bl = make_bundle(-1.0, 1.0, n, s);
    Field base = smooth_random(ctx.rng, bl.grid, 0.9);
    Field g(bl.grid, base.values.array().square() + 0.2);
    double viol = 0.0;
    Field prev = zero_field(bl.grid);
    Field zero = zero_field(bl.grid);
    bool have = false;
    for (int j = 0; j <= 20; ++j) {
      StationaryProblem p{lambda, q, s, g, std::ldexp(1.0, -j)};
      Field u = have ? newton_singular_solve(bl.op, 1.0, lambda, q, p.epsilon, g, zero, prev)
                     : solve_regularized(p, bl.op, bl.eig);
      if (have) viol = std::max(viol, (prev.values - u.values).maxCoeff());
      prev = u;
      have = true;
    }
    viol = std::max(0.0, viol);
    worst = std::max(worst, viol);
    csv.row({static_cast<double>(c), lambda, q, s, viol});
  }
  const bool pass = worst <= 1e-10;
  return {4, "solutions nondecreasing as regularization decreases", pass,
          "max violation " + fmt(worst)};
}

// --- criterion 5: cone certification and boundary exponents ----------------

CriterionResult criterion_cone(BatteryContext& ctx) {
  CsvWriter csv(ctx.dir + "/c05_cone.csv");
  csv.header({"q", "k1_hat", "k2_hat", "fit", "target", "rel_err"});
  const double s = 0.45;
  const int n = 1024;
  OperatorBundle bl = make_bundle(-1.0, 1.0, n, s);
  Field g = constant_field(bl.grid, 1.0);
  bool pass = true;
  std::ostringstream detail;
  for (double q : {0.5, 1.0, 3.0}) {
    StationaryProblem p{1.0, q, s, g, 0.0};
    Field u = solve_stationary(p, bl.op, bl.eig);
    ConeEnvelope env = make_cone_envelope(q, s, bl.grid->b - bl.grid->a);
    ConeCertification cert = cone_check(u, env, *bl.grid);
    const double h = bl.grid->h;
    ExponentFit fit = boundary_exponent_fit_window(u, *bl.grid, 1.5 * h, 8.5 * h,
                                                   env.log_factor, s, env.r);
    const double target = env.exponent;
    const double rel = std::fabs(fit.alpha_hat - target) / target;
    csv.row({q, cert.k1_hat, cert.k2_hat, fit.alpha_hat, target, rel});
    const bool ok = cert.pass && rel <= 0.10;
    pass = pass && ok;
    detail << "q=" << q << " fit=" << fmt(fit.alpha_hat) << "/" << fmt(target)
           << (ok ? " ok; " : " FAIL; ");
  }
  return {5, "cone certification and boundary exponents", pass, detail.str()};
}

// --- criteria 7 + 8: energy identity decay and interpolant gap scaling -----

struct EvolutionStudies {
  CriterionResult energy;
  CriterionResult gaps;
};

EvolutionStudies criterion_energy_and_gaps(BatteryContext& ctx) {
  const double s = 0.4, q = 0.5;
  const int n = 128;
  OperatorBundle bl = make_bundle(-1.0, 1.0, n, s);
  auto src_entry = find_source("sine_both");
  SourceSpec src = src_entry.make(src_entry.defaults);
  Field u0 = solve_pure_singular(q, s, bl.op);

  CsvWriter csv(ctx.dir + "/c07_energy.csv");
  csv.header({"n_steps", "residual_at_T", "min_slack"});
  std::vector<double> residuals;
  std::vector<EvolutionTrace> runs;
  bool slack_ok = true;
  for (int n_steps : {8, 16, 32, 64}) {
    EvolutionTrace tr = evolve_source(u0, src, 1.0, n_steps, q, bl.op, bl.eig);
    ctx.note_trace(tr);
    const double r = energy_identity_residual(tr).back();
    const double slack = energy_inequality_min_slack(tr, src.bound);
    residuals.push_back(r);
    slack_ok = slack_ok && slack >= -1e-8;
    csv.row({static_cast<double>(n_steps), r, slack});
    runs.push_back(std::move(tr));
  }
  bool decay_ok = true;
  for (size_t i = 0; i + 1 < residuals.size(); ++i)
    decay_ok = decay_ok && residuals[i + 1] <= residuals[i] / 1.5;
  std::ostringstream d7;
  d7 << "residuals";
  for (double r : residuals) d7 << " " << fmt(r);
  d7 << (slack_ok ? "; slack ok" : "; slack FAIL");
  CriterionResult c7{7, "energy identity residual decays; inequality form holds",
                     decay_ok && slack_ok, d7.str()};

  // gap scaling on its own dt family
  std::vector<EvolutionTrace> gap_runs;
  CsvWriter gcsv(ctx.dir + "/c08_gaps.csv");
  gcsv.header({"dt", "max_step_increment_l2"});
  for (int n_steps : {10, 20, 40, 80}) {
    EvolutionTrace tr = evolve_source(u0, src, 1.0, n_steps, q, bl.op, bl.eig);
    ctx.note_trace(tr);
    gap_runs.push_back(std::move(tr));
  }
  GapScalingResult res = gap_scaling_study(gap_runs);
  for (size_t i = 0; i < res.dts.size(); ++i) gcsv.row({res.dts[i], res.gaps[i]});
  CriterionResult c8{8, "interpolant gap scales at least like dt^0.4", res.pass,
                     "fitted slope " + fmt(res.slope)};
  return {c7, c8};
}

// --- criterion 9: monotone semilinear scheme and two-sided uniqueness ------

CriterionResult criterion_semilinear(BatteryContext& ctx) {
  CsvWriter csv(ctx.dir + "/c09_semilinear.csv");
  csv.header({"q", "iterations_up", "iterations_down", "monotonicity_violation",
              "two_sided_gap"});
  const double s = 0.4;
  const int n = 256;
  OperatorBundle bl = make_bundle(-1.0, 1.0, n, s);
  auto entry = find_nonlinearity("saturating");
  NonlinearitySpec nl = entry.make(entry.defaults, bl.eig.lambda1);
  bool pass = true;
  std::ostringstream detail;
  for (double q : {0.5, 3.0}) {
    SemilinearReport up, down;
    Field u_hat = solve_semilinear(nl, q, s, bl.op, bl.eig, &up, false);
    Field u_hat2 = solve_semilinear(nl, q, s, bl.op, bl.eig, &down, true);
    const double gap = max_abs_diff(u_hat, u_hat2);
    const double viol = std::max(up.max_monotonicity_violation,
                                 down.max_monotonicity_violation);
    csv.row({q, static_cast<double>(up.iterations), static_cast<double>(down.iterations),
             viol, gap});
    const bool ok = viol <= 1e-10 && gap <= 1e-6;
    pass = pass && ok;
    detail << "q=" << q << " gap=" << fmt(gap) << (ok ? " ok; " : " FAIL; ");
  }
  return {9, "monotone iterates; ascending/descending limits agree", pass,
          detail.str()};
}

// --- criterion 10: stabilization -------------------------------------------

CriterionResult criterion_stabilization(BatteryContext& ctx) {
  const double s = 0.4, q = 0.5;
  const int n = 256;
  const double T = 50.0, dt = 0.05;
  OperatorBundle bl = make_bundle(-1.0, 1.0, n, s);
  auto entry = find_nonlinearity("saturating");
  NonlinearitySpec nl = entry.make(entry.defaults, bl.eig.lambda1);

  EnvelopeSet env = envelopes_for(bl, q, nl.growth_mu, nl.lower_bound_l);
  Field u0(bl.grid,
           env.sub.field.values + 0.25 * (env.sup.field.values - env.sub.field.values));
  StabilizationReport rep =
      stabilization_run(u0, nl, T, static_cast<int>(T / dt), q, bl.op, bl.eig);
  ctx.note_trace(rep.trace);
  ctx.note_trace(rep.trace_lower);
  ctx.note_trace(rep.trace_upper);

  CsvWriter csv(ctx.dir + "/c10_stabilization.csv");
  csv.header({"t", "distance_to_uhat"});
  for (size_t k = 0; k < rep.distance.size(); ++k)
    csv.row({rep.trace.times[k], rep.distance[k]});

  const bool pass = rep.stabilized && rep.t_stabilized < T &&
                    rep.bracket_violation <= 1e-8 &&
                    rep.lower_monotonicity_violation <= 1e-10 &&
                    rep.upper_monotonicity_violation <= 1e-10;
  std::ostringstream detail;
  detail << "stabilized at t=" << fmt(rep.t_stabilized)
         << ", final distance " << fmt(rep.final_distance) << ", squeeze "
         << fmt(rep.final_squeeze) << ", bracket violation "
         << fmt(rep.bracket_violation);
  return {10, "long-time convergence to the stationary solution", pass, detail.str()};
}

// --- criterion 11: contraction estimates ------------------------------------

CriterionResult criterion_contraction(BatteryContext& ctx) {
  CsvWriter csv(ctx.dir + "/c11_contraction.csv");
  csv.header({"kind", "pair", "min_slack"});
  const double s = 0.4, q = 0.5;
  const int n = 64;
  const double T = 0.5;
  const int n_steps = 10;
  OperatorBundle bl = make_bundle(-1.0, 1.0, n, s);

  double worst = 0.0;
  // source-driven pairs with distinct sources and initial data
  for (int pair = 0; pair < 20; ++pair) {
    const double c1 = ctx.rng.uniform(0.2, 1.0), w1 = ctx.rng.uniform(1.0, 4.0);
    const double c2 = ctx.rng.uniform(0.2, 1.0), w2 = ctx.rng.uniform(1.0, 4.0);
    SourceSpec h1{[c1, w1](double t, double) { return c1 * std::sin(w1 * t); },
                  std::max(c1, c2)};
    SourceSpec h2{[c2, w2](double t, double) { return c2 * std::cos(w2 * t); },
                  std::max(c1, c2)};
    EnvelopeSet env = envelopes_for(bl, q, 0.0, h1.bound);
    Field r1 = smooth_random_in(ctx.rng, bl.grid, 0.0, 1.0);
    Field r2 = smooth_random_in(ctx.rng, bl.grid, 0.0, 1.0);
    Field u0(bl.grid, env.sub.field.values.array() +
                          r1.values.array() * (env.sup.field.values.array() -
                                               env.sub.field.values.array()));
    Field v0(bl.grid, env.sub.field.values.array() +
                          r2.values.array() * (env.sup.field.values.array() -
                                               env.sub.field.values.array()));
    auto hk1 = discretize_source(h1, bl.grid, T, n_steps);
    auto hk2 = discretize_source(h2, bl.grid, T, n_steps);
    EvolutionTrace tu = evolve_source_steps(u0, hk1, h1.bound, T, q, bl.op, bl.eig);
    EvolutionTrace tv = evolve_source_steps(v0, hk2, h2.bound, T, q, bl.op, bl.eig);
    ctx.note_trace(tu);
    ctx.note_trace(tv);
    ContractionReport rep = contraction_check(tu, tv, hk1, hk2, 0.0,
                                              ContractionKind::source_integral);
    worst = std::min(worst, rep.min_slack);
    csv.row({0.0, static_cast<double>(pair), rep.min_slack});
  }
  // reaction-driven pairs under the exponential estimate
  auto entry = find_nonlinearity("saturating");
  NonlinearitySpec nl = entry.make(entry.defaults, bl.eig.lambda1);
  EnvelopeSet env = envelopes_for(bl, q, nl.growth_mu, nl.lower_bound_l);
  const double alpha = nl.lipschitz_on(env.sup.field.values.maxCoeff());
  for (int pair = 0; pair < 20; ++pair) {
    Field r1 = smooth_random_in(ctx.rng, bl.grid, 0.0, 1.0);
    Field r2 = smooth_random_in(ctx.rng, bl.grid, 0.0, 1.0);
    Field u0(bl.grid, env.sub.field.values.array() +
                          r1.values.array() * (env.sup.field.values.array() -
                                               env.sub.field.values.array()));
    Field v0(bl.grid, env.sub.field.values.array() +
                          r2.values.array() * (env.sup.field.values.array() -
                                               env.sub.field.values.array()));
    EvolutionTrace tu = evolve_reaction(u0, nl, T, n_steps, q, bl.op, bl.eig);
    EvolutionTrace tv = evolve_reaction(v0, nl, T, n_steps, q, bl.op, bl.eig);
    ctx.note_trace(tu);
    ctx.note_trace(tv);
    ContractionReport rep =
        contraction_check(tu, tv, {}, {}, alpha, ContractionKind::exponential);
    worst = std::min(worst, rep.min_slack);
    csv.row({1.0, static_cast<double>(pair), rep.min_slack});
  }
  const bool pass = worst >= -1e-8;
  return {11, "sup-norm contraction estimates", pass, "min slack " + fmt(worst)};
}

// --- criterion 12: discrete Picone inequality -------------------------------

CriterionResult criterion_picone(BatteryContext& ctx) {
  CsvWriter csv(ctx.dir + "/c12_picone.csv");
  csv.header({"case", "min_value"});
  const int n = 64;
  GridPtr grid = build_grid(-1.0, 1.0, n);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    Field u = smooth_random_in(ctx.rng, grid, 0.05, 1.05);
    Field v = smooth_random_in(ctx.rng, grid, 0.05, 1.05);
    const double mn = picone_min(u, v);
    worst = std::min(worst, mn);
    csv.row({static_cast<double>(k), mn});
  }
  double prop_worst = 0.0;
  for (double c : {0.5, 2.0}) {
    Field v = smooth_random_in(ctx.rng, grid, 0.1, 1.0);
    Field u(grid, c * v.values);
    const double mn = picone_min(u, v);
    prop_worst = std::max(prop_worst, std::fabs(mn));
    csv.row({-1.0, mn});
  }
  const bool pass = worst >= -1e-12 && prop_worst <= 1e-12;
  return {12, "discrete Picone inequality", pass,
          "min " + fmt(worst) + ", proportional |min| " + fmt(prop_worst)};
}

// --- criterion 13: very-singular seminorm trend ------------------------------

CriterionResult criterion_seminorm(BatteryContext& ctx) {
  const double q = 10.0, s = 0.9;
  const double threshold = std::max(1.0, (1.0 - 1.0 / (2.0 * s)) * (q + 1.0) / 2.0);
  const double beta = 1.1 * threshold;
  SeminormStudy study = seminorm_refinement_study(q, s, beta, {128, 256, 512, 1024},
                                                  1.0, 1.0, -1.0, 1.0);
  CsvWriter csv(ctx.dir + "/c13_seminorm.csv");
  csv.header({"n", "u_seminorm", "ubeta_seminorm"});
  for (size_t i = 0; i < study.ns.size(); ++i)
    csv.row({static_cast<double>(study.ns[i]), study.u_seminorm[i],
             study.ubeta_seminorm[i]});
  bool u_grows = true;
  for (double r : study.u_ratio) u_grows = u_grows && r > 1.05;
  const bool ub_plateau = study.ubeta_ratio.back() < 1.02;
  std::ostringstream detail;
  detail << "trend evidence, not a membership proof; u ratios";
  for (double r : study.u_ratio) detail << " " << fmt(r);
  detail << "; u^beta ratios";
  for (double r : study.ubeta_ratio) detail << " " << fmt(r);
  return {13, "very-singular seminorm growth vs power-transform saturation",
          u_grows && ub_plateau, detail.str()};
}

std::map<std::string, std::string> read_csvs(const std::string& dir) {
  std::map<std::string, std::string> out;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".csv") continue;
    std::ifstream in(entry.path(), std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    out[fs::relative(entry.path(), dir).string()] = ss.str();
  }
  return out;
}

}  // namespace

std::vector<CriterionResult> acceptance_run_battery(std::uint64_t seed,
                                                    const std::string& out_dir) {
  ensure_directory(out_dir);
  BatteryContext ctx(seed, out_dir);
  std::vector<CriterionResult> results;
  results.push_back(criterion_operator(ctx));
  results.push_back(criterion_eigenpair(ctx));
  results.push_back(criterion_comparison(ctx));
  results.push_back(criterion_eps_monotone(ctx));
  results.push_back(criterion_cone(ctx));
  EvolutionStudies ev = criterion_energy_and_gaps(ctx);
  results.push_back(ev.energy);
  results.push_back(ev.gaps);
  results.push_back(criterion_semilinear(ctx));
  results.push_back(criterion_stabilization(ctx));
  results.push_back(criterion_contraction(ctx));
  results.push_back(criterion_picone(ctx));
  results.push_back(criterion_seminorm(ctx));
  // envelope invariance, gathered from every evolution run above
  CriterionResult c6{6, "envelope invariance across all evolution runs",
                     ctx.envelope_violation <= 1e-10,
                     "max violation " + fmt(ctx.envelope_violation) + " over " +
                         std::to_string(ctx.trace_count) + " traces"};
  results.push_back(c6);
  std::sort(results.begin(), results.end(),
            [](const CriterionResult& a, const CriterionResult& b) { return a.id < b.id; });
  return results;
}

std::vector<CriterionResult> acceptance_run_all(std::uint64_t seed,
                                                const std::string& out_dir) {
  ensure_directory(out_dir);
  std::vector<CriterionResult> results =
      acceptance_run_battery(seed, out_dir + "/run1");
  acceptance_run_battery(seed, out_dir + "/run2");
  auto files1 = read_csvs(out_dir + "/run1");
  auto files2 = read_csvs(out_dir + "/run2");
  bool identical = files1.size() == files2.size() && !files1.empty();
  std::string mismatch;
  if (identical) {
    for (const auto& [name, bytes] : files1) {
      auto it = files2.find(name);
      if (it == files2.end() || it->second != bytes) {
        identical = false;
        mismatch = name;
        break;
      }
    }
  }
  results.push_back({14, "repeated run produces byte-identical CSV outputs", identical,
                     identical ? std::to_string(files1.size()) + " files match"
                               : "mismatch at " + mismatch});

  std::ofstream summary(out_dir + "/summary.txt");
  for (const CriterionResult& r : results)
    summary << (r.pass ? "[PASS] " : "[FAIL] ") << "C" << r.id << ": " << r.name
            << " (" << r.detail << ")\n";
  return results;
}

}  // namespace fraclab
