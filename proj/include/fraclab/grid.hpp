#pragma once

#include <memory>
#include <vector>

namespace fraclab {

/// Uniform 1-D mesh on (a,b). The n interior nodes x_i = a + i*h,
/// h = (b-a)/(n+1), are the unknowns; the endpoints and the whole
/// exterior carry the homogeneous condition and are never stored.
struct Grid {
  double a = 0.0;
  double b = 0.0;
  int n = 0;
  double h = 0.0;
  std::vector<double> nodes;  // x_1..x_n
  std::vector<double> delta;  // dist(x_i, {a,b})
};

using GridPtr = std::shared_ptr<const Grid>;

/// Builds the mesh. Requires b > a and n >= 3.
GridPtr build_grid(double a, double b, int n);

/// True when the two grids describe the same mesh.
bool same_grid(const Grid& g1, const Grid& g2);

}  // namespace fraclab
