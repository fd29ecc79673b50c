#include "fraclab/stationary.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace fraclab {

Regime validate_params(double q, double s) {
  if (!(q > 0.0)) throw std::invalid_argument("validate_params: requires q > 0");
  if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("validate_params: requires s in (0,1)");
  return q * (2.0 * s - 1.0) < 2.0 * s + 1.0 ? Regime::standard : Regime::very_singular;
}

ConeEnvelope make_cone_envelope(double q, double s, double domain_length) {
  ConeEnvelope env;
  env.r = 2.0 * domain_length;
  if (q < 1.0) {
    env.regime = ConeRegime::q_below_1;
    env.exponent = s;
  } else if (q == 1.0) {
    env.regime = ConeRegime::q_equal_1;
    env.exponent = s;
    env.log_factor = true;
  } else {
    env.regime = ConeRegime::q_above_1;
    env.exponent = 2.0 * s / (q + 1.0);
  }
  return env;
}

double cone_profile(const ConeEnvelope& env, double delta) {
  const double p = std::pow(delta, env.exponent);
  if (!env.log_factor) return p;
  return p * std::sqrt(std::log(env.r / p));
}

namespace {

Eigen::VectorXd singular_term(const Eigen::VectorXd& u, double eps, double q) {
  return (u.array() + eps).pow(-q).matrix();
}

}  // namespace

Field newton_singular_solve(const FracOperator& op, double a_coef, double lambda,
                            double q, double eps, const Field& rhs, const Field& floor,
                            const Field& start, SolveReport* report) {
  const int n = op.grid->n;
  Eigen::VectorXd u = start.values;
  // keep the starting point strictly above the floor and the singularity
  for (int i = 0; i < n; ++i) {
    const double lo = std::max(floor.values[i], eps > 0.0 ? -0.95 * eps : 1e-300);
    if (u[i] <= lo) u[i] = lo + 0.1 * std::fabs(lo) + 1e-12;
  }

  double res = 0.0;
  double res_prev = std::numeric_limits<double>::infinity();
  const int cap = 200;
  for (int it = 0; it <= cap; ++it) {
    const Eigen::VectorXd Au = op.matrix * u;
    const Eigen::VectorXd sing = singular_term(u, eps, q);
    Eigen::VectorXd F = a_coef * u + lambda * (Au - sing) - rhs.values;
    res = F.cwiseAbs().maxCoeff();
    if (report) {
      report->newton_iterations = it;
      report->residual = res;
    }
    // stop at the rounding floor of the residual evaluation, not below it
    const double fscale = a_coef * u.cwiseAbs().maxCoeff() +
                          lambda * (Au.cwiseAbs().maxCoeff() + sing.cwiseAbs().maxCoeff()) +
                          rhs.values.cwiseAbs().maxCoeff();
    const double tol = std::max(1e-12, 64.0 * 2.22e-16 * fscale);
    if (res < tol) return Field(rhs.grid, std::move(u));
    if (res <= 1e-10 && res >= 0.9 * res_prev) return Field(rhs.grid, std::move(u));
    res_prev = res;
    if (it == cap) break;

    Eigen::MatrixXd J = lambda * op.matrix;
    J.diagonal().array() += a_coef;
    J.diagonal() += lambda * q * (u.array() + eps).pow(-q - 1.0).matrix();
    Eigen::LLT<Eigen::MatrixXd> llt(J);
    if (llt.info() != Eigen::Success)
      throw std::runtime_error("newton_singular_solve: factorization failed");
    Eigen::VectorXd step = llt.solve(-F);

    // damping: stay above the caller's floor and take at most a 95% step
    // towards the singularity (fraction-to-the-boundary on u + eps)
    double theta = 1.0;
    auto admissible = [&](double th) {
      for (int i = 0; i < n; ++i) {
        const double v = u[i] + th * step[i];
        if (v < floor.values[i]) return false;
        if (v + eps < 0.05 * (u[i] + eps)) return false;
      }
      return true;
    };
    while (!admissible(theta) && theta > 1e-14) theta *= 0.5;
    if (theta <= 1e-14)
      throw std::runtime_error("newton_singular_solve: step collapsed at the positivity floor");
    u += theta * step;
  }
  if (res <= 1e-10) return Field(rhs.grid, std::move(u));

  std::ostringstream msg;
  msg << "newton_singular_solve: no convergence after cap, residual " << res;
  throw std::runtime_error(msg.str());
}

namespace {

// Discrete analogue of the paper's lower barrier for the regularized problem:
// largest dyadic m with m*phi1 + lambda*(A(m phi1) - (m phi1 + eps)^{-q}) <= g.
double barrier_for_problem(const StationaryProblem& p, const FracOperator& op,
                           const EigenPair& eig) {
  const Eigen::VectorXd& phi = eig.phi1.values;
  const Eigen::VectorXd Aphi = op.matrix * phi;
  for (int j = -1; j <= 60; ++j) {
    const double m = std::ldexp(1.0, -j);
    Eigen::VectorXd lhs =
        m * phi + p.lambda * (m * Aphi - singular_term(m * phi, p.epsilon, p.q));
    if ((lhs.array() <= p.g.values.array()).all()) return m;
  }
  return 0.0;
}

Field regularized_start(const StationaryProblem& p, const FracOperator& op) {
  // resolvent warm start: (I + lambda A; u) = g + lambda*(eps-regularized source at 1)
  Eigen::MatrixXd M = p.lambda * op.matrix;
  M.diagonal().array() += 1.0;
  Eigen::VectorXd rhs =
      p.g.values.array() + p.lambda * std::pow(1.0 + p.epsilon, -p.q);
  Eigen::VectorXd u = M.llt().solve(rhs.matrix());
  u = u.cwiseMax(1e-8);
  return Field(p.g.grid, std::move(u));
}

}  // namespace

Field solve_regularized(const StationaryProblem& p, const FracOperator& op,
                        const EigenPair& eig, SolveReport* report) {
  if (!(p.epsilon > 0.0))
    throw std::invalid_argument("solve_regularized: requires epsilon > 0");
  if (!(p.lambda > 0.0) || !(p.q > 0.0))
    throw std::invalid_argument("solve_regularized: requires lambda > 0 and q > 0");
  require_same_grid(p.g, Field(op.grid, Eigen::VectorXd::Zero(op.grid->n)), "solve_regularized");

  const double m = barrier_for_problem(p, op, eig);
  // with an admissible barrier the iterates stay above half of it; without
  // one the regularized solution may genuinely dip negative while u+eps > 0
  Field floor = (m > 0.0)
                    ? Field(op.grid, (0.5 * m * eig.phi1.values).eval())
                    : constant_field(op.grid, -std::numeric_limits<double>::infinity());
  Field start = regularized_start(p, op);
  start.values = start.values.cwiseMax(floor.values);
  SolveReport local;
  Field u = newton_singular_solve(op, 1.0, p.lambda, p.q, p.epsilon, p.g, floor, start, &local);
  local.barrier_m = m;
  local.final_epsilon = p.epsilon;
  if (report) *report = local;
  if (m > 0.0 && u.values.minCoeff() < 0.0)
    throw std::runtime_error("solve_regularized: positivity lost despite damping");
  return u;
}

Field solve_stationary(const StationaryProblem& p, const FracOperator& op,
                       const EigenPair& eig, SolveReport* report, const Field* warm) {
  if (p.epsilon != 0.0)
    throw std::invalid_argument("solve_stationary: requires epsilon == 0");
  if (validate_params(p.q, p.s) != Regime::standard)
    throw std::invalid_argument("solve_stationary: parameters outside the standard regime");

  SolveReport local;
  StationaryProblem q0 = p;

  if (warm && warm->values.minCoeff() > 0.0) {
    // warm path: a strictly positive start lets Newton work on the limit
    // equation directly
    Field floor(op.grid, 0.25 * warm->values.minCoeff() * Eigen::VectorXd::Ones(op.grid->n));
    try {
      Field u = newton_singular_solve(op, 1.0, p.lambda, p.q, 0.0, p.g, floor, *warm, &local);
      if (report) {
        *report = local;
        report->continuation_levels = 0;
      }
      return u;
    } catch (const std::runtime_error&) {
      // fall through to continuation
    }
  }

  // epsilon-continuation: eps_j = 2^{-j}, warm-started
  const double tol_cont = 1e-7;
  int stagnation = 0;
  double last_gap = std::numeric_limits<double>::infinity();
  Field u = zero_field(op.grid);
  bool have_u = false;
  int levels = 0;
  for (int j = 0; j <= 40; ++j) {
    q0.epsilon = std::ldexp(1.0, -j);
    Field next = zero_field(op.grid);
    if (!have_u) {
      next = solve_regularized(q0, op, eig, &local);
    } else {
      Field floor = constant_field(op.grid, -std::numeric_limits<double>::infinity());
      next = newton_singular_solve(op, 1.0, p.lambda, p.q, q0.epsilon, p.g, floor, u, &local);
    }
    ++levels;
    if (have_u) {
      const double gap = max_abs_diff(next, u);
      if (gap >= last_gap && gap > tol_cont) {
        if (++stagnation >= 5)
          throw std::runtime_error("solve_stationary: continuation stagnation");
      } else {
        stagnation = 0;
      }
      last_gap = gap;
    }
    u = next;
    have_u = true;
  }

  // final polish on the limit equation
  Field floor(op.grid, 0.25 * u.values.minCoeff() * Eigen::VectorXd::Ones(op.grid->n));
  u = newton_singular_solve(op, 1.0, p.lambda, p.q, 0.0, p.g, floor, u, &local);
  local.continuation_levels = levels;
  local.final_epsilon = 0.0;
  if (report) *report = local;
  return u;
}

Field solve_pure_singular(double q, double /*s*/, const FracOperator& op, SolveReport* report) {
  if (!(q > 0.0)) throw std::invalid_argument("solve_pure_singular: requires q > 0");
  const GridPtr& grid = op.grid;
  SolveReport local;
  Field rhs = zero_field(grid);

  // start from the resolvent of the eps = 1 source
  Eigen::VectorXd u0 = op.matrix.llt().solve(Eigen::VectorXd::Ones(grid->n));
  Field u(grid, u0.cwiseMax(1e-8));

  int levels = 0;
  for (int j = 0; j <= 40; ++j) {
    const double eps = std::ldexp(1.0, -j);
    Field floor = constant_field(grid, -std::numeric_limits<double>::infinity());
    u = newton_singular_solve(op, 0.0, 1.0, q, eps, rhs, floor, u, &local);
    ++levels;
  }
  Field floor(grid, 0.25 * u.values.minCoeff() * Eigen::VectorXd::Ones(grid->n));
  u = newton_singular_solve(op, 0.0, 1.0, q, 0.0, rhs, floor, u, &local);
  local.continuation_levels = levels;
  if (report) *report = local;
  return u;
}

Subsolution build_subsolution(double q, double /*s*/, const FracOperator& op,
                              const EigenPair& eig, double bound) {
  const Eigen::VectorXd& phi = eig.phi1.values;
  const Eigen::VectorXd Aphi = op.matrix * phi;
  for (int j = -60; j <= 60; ++j) {
    const double m = std::ldexp(1.0, -j);  // descending from 2^60
    Eigen::VectorXd lhs = m * Aphi - (m * phi.array()).pow(-q).matrix();
    if ((lhs.array() <= -bound).all())
      return Subsolution{m, Field(op.grid, m * phi)};
  }
  throw std::runtime_error("build_subsolution: no admissible constant above 2^-60");
}

Supersolution build_supersolution(double q, double /*s*/, const FracOperator& op,
                                  const EigenPair& eig, double mu, double l,
                                  const Field& w) {
  if (!(mu < eig.lambda1))
    throw std::invalid_argument("build_supersolution: requires mu < lambda1");
  if (l < 0.0) throw std::invalid_argument("build_supersolution: requires l >= 0");
  require_same_grid(w, eig.phi1, "build_supersolution");

  const Eigen::VectorXd& phi = eig.phi1.values;
  const Eigen::VectorXd Aw = op.matrix * w.values;
  const Eigen::VectorXd Aphi = op.matrix * phi;
  const double wmax = w.values.maxCoeff();

  for (int jM = 1; jM <= 60; ++jM) {
    const double M = std::ldexp(1.0, jM);
    const double head = M - std::pow(M, -q);
    // boundary-layer constant: largest dyadic c with (M - M^-q) c^-q >= mu M c + l
    double c = 0.0;
    for (int jc = 0; jc <= 200; ++jc) {
      const double cand = std::ldexp(1.0, -jc);
      if (head * std::pow(cand, -q) >= mu * M * cand + l) {
        c = cand;
        break;
      }
    }
    if (c == 0.0) continue;

    // interior floor of phi1 away from the w <= c layer
    double c1 = std::numeric_limits<double>::infinity();
    for (int i = 0; i < op.grid->n; ++i)
      if (w.values[i] > c) c1 = std::min(c1, phi[i]);
    if (!std::isfinite(c1)) continue;

    const double target = (mu * M * wmax + l) / (c1 * (eig.lambda1 - mu));
    double Mp = 0.0;
    if (target > 0.0) {
      Mp = std::ldexp(1.0, static_cast<int>(std::ceil(std::log2(target))));
      while (Mp < target) Mp *= 2.0;
    }

    Eigen::VectorXd ubar = M * w.values + Mp * phi;
    Eigen::VectorXd lhs = M * Aw + Mp * Aphi - ubar.array().pow(-q).matrix();
    Eigen::VectorXd need = mu * ubar.array() + l;
    if ((lhs.array() >= need.array() - 1e-9).all())
      return Supersolution{M, Mp, Field(op.grid, std::move(ubar))};
  }
  throw std::runtime_error("build_supersolution: search failed");
}

void validate_nonlinearity(const NonlinearitySpec& nl, const Grid& grid, double y_max) {
  const int ny = 40;
  double prev_quot = std::numeric_limits<double>::infinity();
  for (int ix = 0; ix < grid.n; ix += std::max(1, grid.n / 16)) {
    const double x = grid.nodes[ix];
    prev_quot = std::numeric_limits<double>::infinity();
    for (int iy = 1; iy <= ny; ++iy) {
      const double y = y_max * iy / ny;
      const double v = nl.f(x, y);
      if (v < -nl.lower_bound_l - 1e-12)
        throw std::invalid_argument("nonlinearity: lower bound l violated");
      if (v > nl.growth_mu * y + nl.lower_bound_l + 1e-12)
        throw std::invalid_argument("nonlinearity: growth bound mu*y + l violated");
      if (nl.monotone_quotient) {
        const double quot = v / y;
        if (quot > prev_quot + 1e-10)
          throw std::invalid_argument("nonlinearity: quotient f(x,y)/y not decreasing");
        prev_quot = quot;
      }
    }
  }
  // sampled Lipschitz bound on [0, y_max]
  const double K = nl.lipschitz_on(y_max);
  const double x0 = grid.nodes[grid.n / 2];
  for (int iy = 0; iy + 1 <= ny; ++iy) {
    const double y1 = y_max * iy / ny, y2 = y_max * (iy + 1) / ny;
    if (std::fabs(nl.f(x0, y2) - nl.f(x0, y1)) > K * (y2 - y1) + 1e-10)
      throw std::invalid_argument("nonlinearity: declared Lipschitz constant too small");
  }
}

Field solve_semilinear(const NonlinearitySpec& nl, double q, double s,
                       const FracOperator& op, const EigenPair& eig,
                       SemilinearReport* report, bool from_above) {
  if (validate_params(q, s) != Regime::standard)
    throw std::invalid_argument("solve_semilinear: parameters outside the standard regime");
  if (!(nl.growth_mu < eig.lambda1))
    throw std::invalid_argument("solve_semilinear: growth bound must stay below lambda1");

  const GridPtr& grid = op.grid;
  Field w = solve_pure_singular(q, s, op);
  Subsolution sub = build_subsolution(q, s, op, eig, nl.lower_bound_l);
  Supersolution sup = build_supersolution(q, s, op, eig, nl.growth_mu, nl.lower_bound_l, w);
  const double K0 = nl.lipschitz_on(sup.field.values.maxCoeff());
  validate_nonlinearity(nl, *grid, sup.field.values.maxCoeff());

  SemilinearReport rep;
  rep.K0 = K0;
  rep.m = sub.m;
  rep.M = sup.M;
  rep.Mprime = sup.Mprime;

  Field u = from_above ? sup.field : sub.field;
  Field floor(grid, 0.5 * sub.field.values);
  const double tol_iter = 1e-8;
  const int cap = 10000;
  SolveReport nrep;
  for (int k = 1; k <= cap; ++k) {
    Eigen::VectorXd rhs_v(grid->n);
    for (int i = 0; i < grid->n; ++i)
      rhs_v[i] = nl.f(grid->nodes[i], u.values[i]) + K0 * u.values[i];
    Field rhs(grid, std::move(rhs_v));
    Field next = newton_singular_solve(op, K0, 1.0, q, 0.0, rhs, floor, u, &nrep);

    const double move = max_abs_diff(next, u);
    const double viol = from_above ? (next.values - u.values).maxCoeff()
                                   : (u.values - next.values).maxCoeff();
    rep.max_monotonicity_violation = std::max(rep.max_monotonicity_violation,
                                              std::max(0.0, viol));
    if (rep.max_monotonicity_violation > 1e-10)
      throw std::runtime_error("solve_semilinear: monotonicity violated; K0 too small");
    u = next;
    rep.iterations = k;
    if (move < tol_iter) {
      Eigen::VectorXd resid = op.matrix * u.values - u.values.array().pow(-q).matrix();
      for (int i = 0; i < grid->n; ++i) resid[i] -= nl.f(grid->nodes[i], u.values[i]);
      rep.residual = resid.cwiseAbs().maxCoeff();
      if (report) *report = rep;
      return u;
    }
  }
  throw std::runtime_error("solve_semilinear: iteration cap exceeded");
}

}  // namespace fraclab
