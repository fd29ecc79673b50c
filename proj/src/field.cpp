#include "fraclab/field.hpp"

#include <cmath>
#include <stdexcept>

namespace fraclab {

Field::Field(GridPtr g, Eigen::VectorXd v) : grid(std::move(g)), values(std::move(v)) {
  if (!grid) throw std::invalid_argument("Field: null grid");
  if (values.size() != grid->n) throw std::invalid_argument("Field: size mismatch with grid");
}

Field zero_field(const GridPtr& g) {
  return Field(g, Eigen::VectorXd::Zero(g->n));
}

Field constant_field(const GridPtr& g, double c) {
  return Field(g, Eigen::VectorXd::Constant(g->n, c));
}

Field field_from(const GridPtr& g, const std::function<double(double)>& f) {
  Eigen::VectorXd v(g->n);
  for (int i = 0; i < g->n; ++i) v[i] = f(g->nodes[i]);
  return Field(g, std::move(v));
}

void require_same_grid(const Field& u, const Field& v, const char* where) {
  if (!u.grid || !v.grid || !same_grid(*u.grid, *v.grid))
    throw std::invalid_argument(std::string(where) + ": grid mismatch");
}

double max_abs_diff(const Field& u, const Field& v) {
  require_same_grid(u, v, "max_abs_diff");
  return (u.values - v.values).cwiseAbs().maxCoeff();
}

double l2_norm(const Field& u) {
  return std::sqrt(u.grid->h * u.values.squaredNorm());
}

}  // namespace fraclab
