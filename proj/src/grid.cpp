#include "fraclab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fraclab {

GridPtr build_grid(double a, double b, int n) {
  if (!(b > a)) throw std::invalid_argument("build_grid: requires b > a");
  if (n < 3) throw std::invalid_argument("build_grid: requires n >= 3");
  auto g = std::make_shared<Grid>();
  g->a = a;
  g->b = b;
  g->n = n;
  g->h = (b - a) / (n + 1);
  g->nodes.resize(n);
  g->delta.resize(n);
  for (int i = 0; i < n; ++i) {
    const double x = a + (i + 1) * g->h;
    g->nodes[i] = x;
    g->delta[i] = std::min(x - a, b - x);
  }
  return g;
}

bool same_grid(const Grid& g1, const Grid& g2) {
  return g1.a == g2.a && g1.b == g2.b && g1.n == g2.n;
}

}  // namespace fraclab
