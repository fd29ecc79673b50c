#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "fraclab/stationary.hpp"

using namespace fraclab;

namespace {

struct Setup {
  GridPtr grid;
  FracOperator op;
  EigenPair eig;
  Setup(double s, int n = 96) {
    grid = build_grid(-1.0, 1.0, n);
    op = assemble(grid, s);
    eig = principal_eigenpair(op);
  }
};

Field smooth(const GridPtr& g, double c0, double c1, double c2) {
  return field_from(g, [=](double x) {
    return c0 + c1 * std::sin(M_PI * x) + c2 * std::cos(2.0 * M_PI * x);
  });
}

double residual_S(const FracOperator& op, const StationaryProblem& p, const Field& u) {
  Eigen::VectorXd F = u.values + p.lambda * (op.matrix * u.values -
                                             (u.values.array() + p.epsilon)
                                                 .pow(-p.q)
                                                 .matrix()) -
                      p.g.values;
  return F.cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("regime classification") {
  CHECK(validate_params(1.0, 0.5) == Regime::standard);
  CHECK(validate_params(10.0, 0.9) == Regime::very_singular);
  CHECK(validate_params(0.5, 0.25) == Regime::standard);
  CHECK_THROWS_AS(validate_params(-1.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(validate_params(1.0, 1.5), std::invalid_argument);
}

TEST_CASE("cone envelope construction") {
  ConeEnvelope below = make_cone_envelope(0.5, 0.4, 2.0);
  CHECK(below.regime == ConeRegime::q_below_1);
  CHECK(below.exponent == doctest::Approx(0.4));
  CHECK_FALSE(below.log_factor);
  ConeEnvelope at = make_cone_envelope(1.0, 0.4, 2.0);
  CHECK(at.log_factor);
  CHECK(at.r == doctest::Approx(4.0));
  ConeEnvelope above = make_cone_envelope(3.0, 0.4, 2.0);
  CHECK(above.exponent == doctest::Approx(0.2));
}

TEST_CASE("regularized solve agrees with the resolvent fixed-point iteration") {
  Setup st(0.35);
  StationaryProblem p{0.1, 1.3, 0.35, smooth(st.grid, 1.0, 0.3, 0.2), 1.0};
  SolveReport rep;
  Field u = solve_regularized(p, st.op, st.eig, &rep);
  CHECK(rep.residual <= 1e-10);
  CHECK(u.values.minCoeff() > 0.0);

  // independent route: u <- (I + lambda A)^{-1} (g + lambda (u+eps)^{-q}),
  // a contraction for small lambda
  Field v = constant_field(st.grid, 0.5);
  for (int k = 0; k < 400; ++k) {
    Eigen::VectorXd rhs =
        p.g.values + p.lambda * (v.values.array() + p.epsilon).pow(-p.q).matrix();
    Field next = solve_linear(st.op, Field(st.grid, rhs / p.lambda), 1.0 / p.lambda);
    const double move = max_abs_diff(next, v);
    v = next;
    if (move < 1e-13) break;
  }
  CHECK(max_abs_diff(u, v) <= 1e-9);
}

TEST_CASE("small lambda with zero data stays small and positive") {
  Setup st(0.45);
  StationaryProblem p{0.01, 2.0, 0.45, zero_field(st.grid), 1.0};
  SolveReport rep;
  Field u = solve_regularized(p, st.op, st.eig, &rep);
  CHECK(rep.residual <= 1e-10);
  CHECK(u.values.minCoeff() > 0.0);
  CHECK(u.values.maxCoeff() < 0.05);
}

TEST_CASE("monotone in the data") {
  Setup st(0.4);
  Field g1 = smooth(st.grid, 0.5, 0.4, 0.0);
  Field bump = smooth(st.grid, 0.0, 0.0, 0.6);
  Field g2(st.grid, g1.values.array() + bump.values.array().square());
  for (double eps : {0.5, 0.0}) {
    StationaryProblem p1{0.8, 0.9, 0.4, g1, eps};
    StationaryProblem p2{0.8, 0.9, 0.4, g2, eps};
    Field u1 = eps > 0 ? solve_regularized(p1, st.op, st.eig)
                       : solve_stationary(p1, st.op, st.eig);
    Field u2 = eps > 0 ? solve_regularized(p2, st.op, st.eig)
                       : solve_stationary(p2, st.op, st.eig);
    CHECK((u1.values - u2.values).maxCoeff() <= 1e-10);
  }
}

TEST_CASE("monotone in the regularization") {
  Setup st(0.4);
  StationaryProblem p{1.0, 1.5, 0.4, smooth(st.grid, 0.8, 0.2, 0.1), 0.5};
  Field u_half = solve_regularized(p, st.op, st.eig);
  p.epsilon = 0.25;
  Field u_quarter = solve_regularized(p, st.op, st.eig);
  CHECK((u_half.values - u_quarter.values).maxCoeff() <= 1e-10);
}

TEST_CASE("regularized solution dominates the barrier") {
  Setup st(0.4);
  StationaryProblem p{1.0, 0.7, 0.4, smooth(st.grid, 1.0, 0.0, 0.3), 0.125};
  SolveReport rep;
  Field u = solve_regularized(p, st.op, st.eig, &rep);
  CHECK(rep.barrier_m > 0.0);
  CHECK((rep.barrier_m * st.eig.phi1.values - u.values).maxCoeff() <= 1e-9);
}

TEST_CASE("limit problem: residual, barriers, warm-start equivalence") {
  Setup st(0.45);
  StationaryProblem p{1.0, 3.0, 0.45, constant_field(st.grid, 1.0), 0.0};
  SolveReport rep;
  Field u = solve_stationary(p, st.op, st.eig, &rep);
  CHECK(residual_S(st.op, p, u) <= 1e-10);

  // barrier from the subsolution construction (lambda = 1 makes the l-based
  // supersolution admissible for the lambda-problem as well)
  Subsolution sub = build_subsolution(p.q, p.s, st.op, st.eig, 1.0);
  CHECK((sub.field.values - u.values).maxCoeff() <= 1e-9);
  Field w = solve_pure_singular(p.q, p.s, st.op);
  Supersolution sup = build_supersolution(p.q, p.s, st.op, st.eig, 0.0, 1.0, w);
  CHECK((u.values - sup.field.values).maxCoeff() <= 1e-9);

  // warm start lands on the same solution
  Field w2 = solve_stationary(p, st.op, st.eig, nullptr, &u);
  CHECK(max_abs_diff(w2, u) <= 1e-10);
}

TEST_CASE("continuation limit is schedule independent") {
  Setup st(0.35);
  StationaryProblem p{0.7, 1.2, 0.35, smooth(st.grid, 0.9, 0.3, 0.0), 0.0};
  Field u_halving = solve_stationary(p, st.op, st.eig);
  // quartering schedule, same floor, then the same final polish
  Field v = zero_field(st.grid);
  {
    StationaryProblem pr = p;
    pr.epsilon = 1.0;
    v = solve_regularized(pr, st.op, st.eig);
    Field zero = zero_field(st.grid);
    for (double eps = 0.25; eps > std::ldexp(1.0, -41); eps *= 0.25)
      v = newton_singular_solve(st.op, 1.0, p.lambda, p.q, eps, p.g, zero, v);
    Field floor(st.grid,
                0.25 * v.values.minCoeff() * Eigen::VectorXd::Ones(st.grid->n));
    v = newton_singular_solve(st.op, 1.0, p.lambda, p.q, 0.0, p.g, floor, v);
  }
  CHECK(max_abs_diff(u_halving, v) <= 2e-7);
}

TEST_CASE("pure singular problem") {
  Setup st(0.45);
  for (double q : {0.5, 1.0, 3.0}) {
    SolveReport rep;
    Field w = solve_pure_singular(q, 0.45, st.op, &rep);
    CHECK(w.values.minCoeff() > 0.0);
    Eigen::VectorXd resid = st.op.matrix * w.values - w.values.array().pow(-q).matrix();
    const double scale = w.values.array().pow(-q).maxCoeff();
    CHECK(resid.cwiseAbs().maxCoeff() <= 1e-7 * scale);
  }
}

TEST_CASE("pure singular boundary envelopes against the eigenfunction") {
  Setup st(0.45, 256);
  // q = 1: w between multiples of phi1 ln^{1/2}(2/phi1)
  {
    Field w = solve_pure_singular(1.0, 0.45, st.op);
    double k1 = 1e300, k2 = 0.0;
    for (int i = 0; i < st.grid->n; ++i) {
      const double phi = st.eig.phi1.values[i];
      const double prof = phi * std::sqrt(std::log(2.0 / std::min(phi, 1.9)));
      const double r = w.values[i] / prof;
      k1 = std::min(k1, r);
      k2 = std::max(k2, r);
    }
    CHECK(k1 > 0.0);
    CHECK(k2 / k1 < 5.0);
  }
  // q = 3: w between multiples of phi1^{2/(q+1)}
  {
    Field w = solve_pure_singular(3.0, 0.45, st.op);
    double k1 = 1e300, k2 = 0.0;
    for (int i = 0; i < st.grid->n; ++i) {
      const double r = w.values[i] / std::pow(st.eig.phi1.values[i], 0.5);
      k1 = std::min(k1, r);
      k2 = std::max(k2, r);
    }
    CHECK(k1 > 0.0);
    CHECK(k2 / k1 < 5.0);
  }
}

TEST_CASE("subsolution construction") {
  Setup st(0.4);
  const double q = 0.8;
  Subsolution s1 = build_subsolution(q, 0.4, st.op, st.eig, 0.0);
  Subsolution s2 = build_subsolution(q, 0.4, st.op, st.eig, 0.5);
  Subsolution s3 = build_subsolution(q, 0.4, st.op, st.eig, 2.0);
  CHECK(s1.m > 0.0);
  CHECK(s2.m <= s1.m);
  CHECK(s3.m <= s2.m);
  // independent nodal re-evaluation of the defining inequality
  for (const auto& [m, bound] : {std::pair{s2.m, 0.5}, std::pair{s3.m, 2.0}}) {
    Eigen::VectorXd lhs = m * (st.op.matrix * st.eig.phi1.values) -
                          (m * st.eig.phi1.values.array()).pow(-q).matrix();
    CHECK((lhs.array() <= -bound + 1e-12).all());
  }
}

TEST_CASE("supersolution construction") {
  Setup st(0.4);
  const double q = 1.5;
  Field w = solve_pure_singular(q, 0.4, st.op);
  CHECK_THROWS_AS(
      build_supersolution(q, 0.4, st.op, st.eig, st.eig.lambda1 * 1.01, 0.0, w),
      std::invalid_argument);

  Supersolution plain = build_supersolution(q, 0.4, st.op, st.eig, 0.0, 0.0, w);
  CHECK(plain.M >= 1.0);

  const double mu = 0.4 * st.eig.lambda1, l = 0.7;
  Supersolution sup = build_supersolution(q, 0.4, st.op, st.eig, mu, l, w);
  Eigen::VectorXd lhs = st.op.matrix * sup.field.values -
                        sup.field.values.array().pow(-q).matrix();
  Eigen::VectorXd need = mu * sup.field.values.array() + l;
  CHECK((lhs - need).minCoeff() >= -1e-8);

  Subsolution sub = build_subsolution(q, 0.4, st.op, st.eig, l);
  CHECK((sub.field.values - sup.field.values).maxCoeff() <= 0.0);
}

TEST_CASE("operator of the stationary problem is strictly monotone") {
  std::mt19937_64 rng(3);
  Setup st(0.5);
  const double lambda = 0.9, q = 1.1;
  for (int k = 0; k < 50; ++k) {
    Eigen::VectorXd base(st.grid->n), extra(st.grid->n);
    for (int i = 0; i < st.grid->n; ++i) {
      base[i] = 0.1 + (rng() >> 11) * 0x1.0p-53;
      extra[i] = 1e-4 + (rng() >> 11) * 0x1.0p-53;
    }
    Eigen::VectorXd v = base + extra;
    auto Al = [&](const Eigen::VectorXd& z) {
      return (z + lambda * (st.op.matrix * z - z.array().pow(-q).matrix())).eval();
    };
    const double pairing = (Al(v) - Al(base)).dot(v - base);
    CHECK(pairing > 0.0);
  }
}

TEST_CASE("semilinear monotone iteration") {
  Setup st(0.4, 128);
  NonlinearitySpec nl;
  const double mu = 0.5 * st.eig.lambda1, c = 0.5;
  nl.f = [mu, c](double, double y) { return mu * y / (1.0 + y) + c; };
  nl.lipschitz_on = [mu](double) { return mu; };
  nl.growth_mu = mu;
  nl.lower_bound_l = mu + c;
  nl.antiderivative_F = [mu, c](double, double z) {
    return mu * (z - std::log(1.0 + z)) + c * z;
  };
  nl.monotone_quotient = true;

  const double q = 0.5;
  SemilinearReport up;
  Field u = solve_semilinear(nl, q, 0.4, st.op, st.eig, &up, false);
  CHECK(up.max_monotonicity_violation <= 1e-10);
  CHECK(up.residual <= 1e-6);

  // re-running one iteration step from the limit barely moves it
  Eigen::VectorXd rhs(st.grid->n);
  for (int i = 0; i < st.grid->n; ++i)
    rhs[i] = nl.f(st.grid->nodes[i], u.values[i]) + up.K0 * u.values[i];
  Field floor(st.grid, Eigen::VectorXd::Zero(st.grid->n));
  Field step = newton_singular_solve(st.op, up.K0, 1.0, q, 0.0,
                                     Field(st.grid, rhs), floor, u);
  CHECK(max_abs_diff(step, u) <= 1e-8);

  SemilinearReport down;
  Field v = solve_semilinear(nl, q, 0.4, st.op, st.eig, &down, true);
  CHECK(down.max_monotonicity_violation <= 1e-10);
  CHECK(max_abs_diff(u, v) <= 2e-8 + 2e-6);
}

TEST_CASE("nonlinearity validation catches bad declarations") {
  auto g = build_grid(-1.0, 1.0, 16);
  NonlinearitySpec nl;
  nl.f = [](double, double y) { return 2.0 * y; };
  nl.lipschitz_on = [](double) { return 2.0; };
  nl.growth_mu = 1.0;  // f = 2y exceeds mu*y + l eventually
  nl.lower_bound_l = 0.5;
  nl.antiderivative_F = [](double, double z) { return z * z; };
  CHECK_THROWS_AS(validate_nonlinearity(nl, *g, 10.0), std::invalid_argument);
}
