#pragma once

#include <Eigen/Dense>
#include <functional>

#include "fraclab/grid.hpp"

namespace fraclab {

/// Nodal values on the interior nodes of a grid; implicitly zero outside.
struct Field {
  GridPtr grid;
  Eigen::VectorXd values;

  Field() = default;
  Field(GridPtr g, Eigen::VectorXd v);

  int size() const { return static_cast<int>(values.size()); }
  double operator[](int i) const { return values[i]; }
  double& operator[](int i) { return values[i]; }
  double max() const { return values.maxCoeff(); }
  double min() const { return values.minCoeff(); }
  double max_abs() const { return values.cwiseAbs().maxCoeff(); }
};

Field zero_field(const GridPtr& g);
Field constant_field(const GridPtr& g, double c);
Field field_from(const GridPtr& g, const std::function<double(double)>& f);

/// max_i |u_i - v_i|; grids must match.
double max_abs_diff(const Field& u, const Field& v);

/// Discrete L2 norm: sqrt(h * sum u_i^2).
double l2_norm(const Field& u);

void require_same_grid(const Field& u, const Field& v, const char* where);

}  // namespace fraclab
