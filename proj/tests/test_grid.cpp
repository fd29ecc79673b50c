#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "fraclab/grid.hpp"

using namespace fraclab;

TEST_CASE("three-node grid on (-1,1)") {
  auto g = build_grid(-1.0, 1.0, 3);
  CHECK(g->h == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(g->nodes[0] == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(g->nodes[1] == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(g->nodes[2] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(g->delta[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(g->delta[1] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(g->delta[2] == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("grid on (0,2) with 7 nodes") {
  auto g = build_grid(0.0, 2.0, 7);
  CHECK(g->h == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(g->nodes[3] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(g->delta[3] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(build_grid(-1.0, 1.0, 2), std::invalid_argument);
  CHECK_THROWS_AS(build_grid(1.0, 1.0, 5), std::invalid_argument);
  CHECK_THROWS_AS(build_grid(1.0, -1.0, 5), std::invalid_argument);
}

TEST_CASE("node and distance invariants") {
  for (int n : {3, 17, 64, 211}) {
    auto g = build_grid(-2.5, 0.75, n);
    CHECK(std::fabs(g->h * (n + 1) - (g->b - g->a)) <= 1e-14 * (g->b - g->a));
    for (int i = 0; i < n; ++i) {
      CHECK(g->nodes[i] > g->a);
      CHECK(g->nodes[i] < g->b);
      if (i) CHECK(g->nodes[i] > g->nodes[i - 1]);
      CHECK(g->delta[i] ==
            doctest::Approx(std::min(g->nodes[i] - g->a, g->b - g->nodes[i]))
                .epsilon(1e-15));
      CHECK(g->delta[i] > 0.0);
    }
    // symmetry under i <-> n+1-i on a symmetric grid
    for (int i = 0; i < n; ++i)
      CHECK(g->delta[i] == doctest::Approx(g->delta[n - 1 - i]).epsilon(1e-13));
  }
}

TEST_CASE("dyadic refinement nests the coarse nodes") {
  auto coarse = build_grid(-1.0, 3.0, 15);
  auto fine = build_grid(-1.0, 3.0, 31);
  for (int i = 0; i < coarse->n; ++i)
    CHECK(std::fabs(fine->nodes[2 * i + 1] - coarse->nodes[i]) <= 1e-13);
}
