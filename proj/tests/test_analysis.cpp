#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "fraclab/analysis.hpp"
#include "fraclab/catalog.hpp"

using namespace fraclab;

TEST_CASE("exponent fit recovers exact power laws") {
  auto g = build_grid(-1.0, 1.0, 256);
  for (double alpha : {1.0, 0.62, 0.17}) {
    Field u = field_from(g, [&](double x) {
      return std::pow(std::min(x + 1.0, 1.0 - x), alpha);
    });
    ExponentFit fit = boundary_exponent_fit(u, *g, 0.1 * 2.0);
    CHECK(std::fabs(fit.alpha_hat - alpha) <= 1e-10);
    CHECK(fit.r_squared >= 1.0 - 1e-12);
    ExponentFit inner = boundary_exponent_fit_window(u, *g, 1.5 * g->h, 12.5 * g->h);
    CHECK(std::fabs(inner.alpha_hat - alpha) <= 1e-10);
  }
}

TEST_CASE("exponent fit with the logarithmic factor divided out") {
  auto g = build_grid(-1.0, 1.0, 256);
  const double s = 0.45, r = 4.0;
  Field u = field_from(g, [&](double x) {
    const double d = std::min(x + 1.0, 1.0 - x);
    return std::pow(d, s) * std::sqrt(std::log(r / std::pow(d, s)));
  });
  ExponentFit fit = boundary_exponent_fit(u, *g, 0.2, true, s, r);
  CHECK(std::fabs(fit.alpha_hat - s) <= 1e-10);
}

TEST_CASE("exponent fit error paths") {
  auto g = build_grid(-1.0, 1.0, 64);
  Field u = constant_field(g, 1.0);
  CHECK_THROWS_AS(boundary_exponent_fit(u, *g, 1e-6), std::invalid_argument);
  Field bad = constant_field(g, 1.0);
  bad.values[10] = -1.0;
  CHECK_THROWS_AS(boundary_exponent_fit(bad, *g, 2.0), std::invalid_argument);
}

TEST_CASE("cone certification on exact profiles") {
  auto g = build_grid(-1.0, 1.0, 128);
  ConeEnvelope env = make_cone_envelope(3.0, 0.4, 2.0);
  Field u = field_from(g, [&](double x) {
    return 2.0 * std::pow(std::min(x + 1.0, 1.0 - x), env.exponent);
  });
  ConeCertification cert = cone_check(u, env, *g);
  CHECK(cert.pass);
  CHECK(cert.k1_hat == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(cert.k2_hat == doctest::Approx(2.0).epsilon(1e-12));

  // scale equivariance
  Field u3(g, 3.0 * u.values);
  ConeCertification c3 = cone_check(u3, env, *g);
  CHECK(c3.k1_hat == doctest::Approx(3.0 * cert.k1_hat).epsilon(1e-13));
  CHECK(c3.k2_hat == doctest::Approx(3.0 * cert.k2_hat).epsilon(1e-13));

  Field zeroed = u;
  zeroed.values[5] = 0.0;
  CHECK_THROWS_AS(cone_check(zeroed, env, *g), std::invalid_argument);
}

TEST_CASE("comparison check arithmetic") {
  auto g = build_grid(-1.0, 1.0, 16);
  Field v = constant_field(g, 1.0);
  CHECK(comparison_check(v, v) == 0.0);
  Field lower(g, v.values.array() - 1.0);
  CHECK(comparison_check(lower, v) == 0.0);
  Field bumped = v;
  bumped.values[7] += 0.5;
  CHECK(comparison_check(bumped, v) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("picone identity: trivial cases and random positivity") {
  std::mt19937_64 rng(23);
  auto g = build_grid(-1.0, 1.0, 48);
  auto positive_random = [&]() {
    Eigen::VectorXd v(g->n);
    for (int i = 0; i < g->n; ++i) v[i] = 0.05 + (rng() >> 11) * 0x1.0p-53;
    return Field(g, std::move(v));
  };
  for (int k = 0; k < 50; ++k) {
    Field u = positive_random(), v = positive_random();
    CHECK(picone_min(u, v) >= -1e-12);
  }
  Field v = positive_random();
  Field u(g, 1.7 * v.values);
  CHECK(std::fabs(picone_min(u, v)) <= 1e-12);
  Field zero = zero_field(g);
  CHECK(std::fabs(picone_min(zero, v)) <= 1e-15);
  Field nonpos = v;
  nonpos.values[3] = 0.0;
  CHECK_THROWS_AS(picone_min(v, nonpos), std::invalid_argument);
}

namespace {
struct Setup {
  GridPtr grid;
  FracOperator op;
  EigenPair eig;
  Setup(double s, int n = 48) {
    grid = build_grid(-1.0, 1.0, n);
    op = assemble(grid, s);
    eig = principal_eigenpair(op);
  }
};
}  // namespace

TEST_CASE("contraction slack telescopes under whole-step time shifts") {
  Setup st(0.4);
  const double q = 0.6;
  auto entry = find_source("sine_time");
  SourceSpec src = entry.make(entry.defaults);
  Field u0 = solve_pure_singular(q, 0.4, st.op);
  Field v0(st.grid, 1.3 * u0.values);

  SourceSpec src_b{[](double t, double) { return 0.8 * std::cos(1.7 * t); }, 1.0};
  src.bound = src_b.bound = 1.0;
  const int n_steps = 12;
  const double T = 1.2;
  auto hu = discretize_source(src, st.grid, T, n_steps);
  auto hv = discretize_source(src_b, st.grid, T, n_steps);
  EvolutionTrace tu = evolve_source_steps(u0, hu, 1.0, T, q, st.op, st.eig);
  EvolutionTrace tv = evolve_source_steps(v0, hv, 1.0, T, q, st.op, st.eig);
  ContractionReport full = contraction_check(tu, tv, hu, hv, 0.0,
                                             ContractionKind::source_integral);
  CHECK(full.min_slack >= -1e-8);

  // identical traces: the left side vanishes, slack equals the right side
  ContractionReport same = contraction_check(tu, tu, hu, hu, 0.0,
                                             ContractionKind::source_integral);
  CHECK(same.min_slack >= 0.0);
  ContractionReport same_exp =
      contraction_check(tu, tu, {}, {}, 1.0, ContractionKind::exponential);
  CHECK(same_exp.min_slack >= 0.0);

  // drop K whole steps from the front of both traces and both sources; the
  // slack of the shifted pair telescopes against the original one
  const int K = 4;
  auto chop = [&](const EvolutionTrace& tr) {
    EvolutionTrace out;
    out.T = tr.T - K * tr.dt;
    out.n_steps = tr.n_steps - K;
    out.dt = tr.dt;
    out.q = tr.q;
    for (int k = K; k <= tr.n_steps; ++k) {
      out.times.push_back(tr.times[k] - tr.times[K]);
      out.snapshots.push_back(tr.snapshots[k]);
    }
    return out;
  };
  std::vector<Field> hu2(hu.begin() + K, hu.end());
  std::vector<Field> hv2(hv.begin() + K, hv.end());
  ContractionReport shifted = contraction_check(chop(tu), chop(tv), hu2, hv2, 0.0,
                                                ContractionKind::source_integral);
  for (size_t j = 0; j < shifted.slack.size(); ++j)
    CHECK(std::fabs(shifted.slack[j] - (full.slack[K + j - 1 + 1] - full.slack[K - 1])) <=
          1e-12);
}

TEST_CASE("gap study flags the degenerate constant family") {
  Setup st(0.4, 32);
  const double q = 0.5;
  Field w = solve_pure_singular(q, 0.4, st.op);
  SourceSpec zero{[](double, double) { return 0.0; }, 0.0};
  std::vector<EvolutionTrace> runs;
  for (int n_steps : {4, 8, 16, 32})
    runs.push_back(evolve_source(w, zero, 0.4, n_steps, q, st.op, st.eig));
  GapScalingResult res = gap_scaling_study(runs);
  CHECK(res.degenerate);
  CHECK_THROWS_AS(gap_scaling_study({runs[0], runs[1]}), std::invalid_argument);
}

TEST_CASE("gap study measures first order on a generic run") {
  Setup st(0.4, 32);
  const double q = 0.5;
  auto entry = find_source("sine_both");
  SourceSpec src = entry.make(entry.defaults);
  Field u0 = solve_pure_singular(q, 0.4, st.op);
  std::vector<EvolutionTrace> runs;
  for (int n_steps : {6, 12, 24, 48})
    runs.push_back(evolve_source(u0, src, 1.0, n_steps, q, st.op, st.eig));
  GapScalingResult res = gap_scaling_study(runs);
  CHECK_FALSE(res.degenerate);
  CHECK(res.slope >= 0.4);
}

TEST_CASE("seminorm study rejects bad parameters") {
  CHECK_THROWS_AS(seminorm_refinement_study(10.0, 0.9, 1.0, {16, 32}, 1.0, 1.0, -1.0, 1.0),
                  std::invalid_argument);  // beta at/below threshold
  CHECK_THROWS_AS(seminorm_refinement_study(0.5, 0.4, 2.0, {16, 32}, 1.0, 1.0, -1.0, 1.0),
                  std::invalid_argument);  // standard regime rejected
}

TEST_CASE("seminorm study shows growth in the very singular regime at small scale") {
  SeminormStudy study =
      seminorm_refinement_study(10.0, 0.9, 2.7, {24, 48, 96}, 1.0, 1.0, -1.0, 1.0);
  REQUIRE(study.u_ratio.size() == 2);
  for (double r : study.u_ratio) CHECK(r > 1.05);
  // the transformed field saturates much more slowly than the field itself
  for (size_t i = 0; i < study.u_ratio.size(); ++i)
    CHECK(study.ubeta_ratio[i] < study.u_ratio[i]);
}

TEST_CASE("control experiment: standard-regime seminorms plateau") {
  // the same double-sum instrument applied to a standard-regime family shows
  // saturation for the field and its power alike
  const double q = 2.0, s = 0.3, beta = 2.7;
  std::vector<double> su, sb;
  for (int n : {64, 128, 256}) {
    Setup st(s, n);
    StationaryProblem p{1.0, q, s, constant_field(st.grid, 1.0), 0.0};
    Field u = solve_stationary(p, st.op, st.eig);
    su.push_back(gagliardo_seminorm(*st.grid, s, u));
    sb.push_back(gagliardo_seminorm(*st.grid, s,
                                    Field(st.grid, u.values.array().pow(beta).matrix())));
  }
  CHECK(su.back() / su[su.size() - 2] < 1.05);
  CHECK(sb.back() / sb[sb.size() - 2] < 1.05);
}
