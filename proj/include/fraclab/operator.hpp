#pragma once

#include <Eigen/Dense>
#include <string>

#include "fraclab/field.hpp"
#include "fraclab/grid.hpp"

namespace fraclab {

/// Dense discrete fractional Laplacian of order s on a grid, with the
/// homogeneous exterior condition built in. Symmetric positive definite
/// with nonpositive off-diagonal entries and strictly positive row sums.
struct FracOperator {
  GridPtr grid;
  double s = 0.0;
  double c_norm = 0.0;  // kernel normalization constant for n = 1
  bool outside_hypothesis = false;  // s >= 1/2 (flagged, not rejected)
  Eigen::MatrixXd matrix;
};

struct EigenPair {
  double lambda1 = 0.0;
  Field phi1;  // positive, unit discrete L2 norm
};

/// Kernel normalization constant: pi^{-1/2} 2^{2s-1} s Gamma((1+2s)/2)/Gamma(1-s).
double fraclap_constant(double s);

/// Operator image of the profile (1-x^2)^s on (-1,1), constant in the
/// interval: 4^s Gamma(1+s) Gamma(s+1/2) / Gamma(1/2). General intervals
/// scale it by ((b-a)/2)^{-2s}.
double interval_profile_constant(double s);

/// Assembles the dense operator. Requires s in (0,1). Warns on stderr when
/// s >= 1/2 (outside the 1-D theoretical hypothesis n > 2s).
FracOperator assemble(const GridPtr& grid, double s);

/// Matrix-vector product; grids must match.
Field apply(const FracOperator& op, const Field& u);

/// Smallest eigenvalue and positive normalized eigenvector, by inverse
/// power iteration on a factorized matrix.
EigenPair principal_eigenpair(const FracOperator& op);

/// Discrete energy norm sqrt(h * u'Au).
double x0_norm(const FracOperator& op, const Field& u);

/// Independent estimator of the same norm: direct double-sum discretization
/// of the Gagliardo integral plus the closed-form exterior part.
double gagliardo_seminorm(const Grid& grid, double s, const Field& u);

/// Solves (shift*I + A) u = rhs with a dense Cholesky factorization,
/// refined to relative residual <= 1e-10. Requires shift >= 0.
Field solve_linear(const FracOperator& op, const Field& rhs, double shift);

/// CSV export of the matrix (row-major, full precision) and of an eigenpair.
void export_matrix_csv(const FracOperator& op, const std::string& path);
void export_eigenpair_csv(const FracOperator& op, const EigenPair& eig, const std::string& path);

}  // namespace fraclab
