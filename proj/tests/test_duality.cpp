#include <cmath>
#include <vector>

#include "doctest.h"
#include "todakp/duality.hpp"

using namespace todakp;

namespace {

SolitonData worked() {
  return make_soliton_data({0.0, 1.0, 2.0}, {0.5, 0.25, 0.25});
}

SolitonData four_phase() {
  return make_soliton_data({-1.2, -0.1, 0.8, 1.9}, {0.3, 0.2, 0.35, 0.15});
}

std::vector<GridPoint> small_grid() {
  std::vector<GridPoint> pts;
  for (double t3 : {-0.5, 0.5})
    for (double y : {-1.0, 0.0, 1.0})
      for (double x : {-1.0, -0.3, 0.4, 1.0}) pts.push_back({x, y, t3});
  return pts;
}

}  // namespace

TEST_CASE("dual weights match the closed form") {
  SolitonData dual = dual_data(worked());
  CHECK(dual.a[0] == doctest::Approx(1.0 / 11.0).epsilon(1e-12));
  CHECK(dual.a[1] == doctest::Approx(8.0 / 11.0).epsilon(1e-12));
  CHECK(dual.a[2] == doctest::Approx(2.0 / 11.0).epsilon(1e-12));
}

TEST_CASE("the dual map is an involution") {
  for (const SolitonData &d : {worked(), four_phase()}) {
    SolitonData back = dual_data(dual_data(d));
    for (int j = 0; j < d.n(); ++j)
      CHECK(back.a[j] == doctest::Approx(d.a[j]).epsilon(1e-12));
  }
}

TEST_CASE("alpha coordinates of dual pairs are reciprocal") {
  SolitonData d = four_phase();
  std::vector<double> al = alpha_coordinates(d).alpha;
  std::vector<double> ald = alpha_coordinates(dual_data(d)).alpha;
  double c0 = al[0] * ald[0];
  for (int j = 1; j < d.n(); ++j)
    CHECK(al[j] * ald[j] == doctest::Approx(c0).epsilon(1e-12));
}

TEST_CASE("field, tau, and Toda residuals vanish for dual pairs") {
  for (const SolitonData &d : {worked(), four_phase()}) {
    for (int k = 1; k < d.n(); ++k) {
      DualityResiduals r =
          duality_residuals(d, k, TimeVector({0.4, -0.3, 0.2}), small_grid());
      CHECK(r.field < 1e-9);
      CHECK(r.tau < 1e-9);
      CHECK(r.toda_a < 1e-9);
      CHECK(r.toda_b < 1e-9);
    }
  }
}

TEST_CASE("the corrected product law is constant in j") {
  std::vector<double> p = dual_product_law(worked());
  REQUIRE(p.size() == 3);
  for (double v : p) CHECK(v == doctest::Approx(2.0 / 11.0).epsilon(1e-12));
  std::vector<double> q = dual_product_law(four_phase());
  for (size_t j = 1; j < q.size(); ++j)
    CHECK(q[j] == doctest::Approx(q[0]).epsilon(1e-12));
}

TEST_CASE("the uncorrected product law fails beyond two phases") {
  // Kept as a regression: the j-independent form needs the full squared
  // Vandermonde factor, not just the pairs avoiding j.
  std::vector<double> p = dual_product_law_printed(worked());
  double spread = 0.0;
  for (double v : p) spread = std::max(spread, rel_diff(v, p[0]));
  CHECK(spread > 1e-6);
  // With a single pair the two forms coincide.
  SolitonData two = make_soliton_data({-0.5, 1.5}, {0.4, 0.6});
  std::vector<double> q = dual_product_law_printed(two);
  CHECK(rel_diff(q[0], q[1]) < 1e-12);
}

TEST_CASE("the dual divisor is the sheet swap of the lower-order one") {
  SolitonData d = four_phase();
  int n = d.n();
  for (int k = 2; k < n; ++k) {
    Divisor dd = dual_divisor(d, k);
    REQUIRE((int)dd.gammas.size() == n - k);
    REQUIRE((int)dd.deltas.size() == k - 1);
    Divisor primal = compatible_divisor(d, k - 1, TimeVector::zero());
    for (size_t i = 0; i < dd.gammas.size(); ++i)
      CHECK(dd.gammas[i] == doctest::Approx(primal.deltas[i]).epsilon(1e-9));
    for (size_t i = 0; i < dd.deltas.size(); ++i)
      CHECK(dd.deltas[i] == doctest::Approx(primal.gammas[i]).epsilon(1e-9));
    Divisor direct = compatible_divisor(dual_data(d), n - k, TimeVector::zero());
    for (size_t i = 0; i < dd.gammas.size(); ++i)
      CHECK(dd.gammas[i] == doctest::Approx(direct.gammas[i]).epsilon(1e-9));
  }
}

TEST_CASE("the divisor cross ratio reproduces the Jacobi entry") {
  SolitonData d = worked();
  ConstRatio c1 = dual_const_ratio(d, 1);
  CHECK(c1.expected == doctest::Approx(11.0 / 16.0).epsilon(1e-12));
  for (size_t j = 0; j < c1.per_j.size(); ++j) {
    CHECK_FALSE(c1.collided[j]);
    CHECK(c1.per_j[j] == doctest::Approx(c1.expected).epsilon(1e-10));
  }
  ConstRatio c2 = dual_const_ratio(d, 2);
  CHECK(c2.expected == doctest::Approx(32.0 / 121.0).epsilon(1e-12));
  for (size_t j = 0; j < c2.per_j.size(); ++j)
    CHECK(c2.per_j[j] == doctest::Approx(c2.expected).epsilon(1e-10));
}

TEST_CASE("the cross ratio survives a collision at the canonical point") {
  SolitonData d = make_soliton_data({0.0, 1.0, 2.0}, {0.25, 0.5, 0.25});
  ConstRatio c = dual_const_ratio(d, 1);
  CHECK(c.expected == doctest::Approx(0.5).epsilon(1e-12));
  REQUIRE(c.per_j.size() == 3);
  CHECK(c.collided[1]);
  for (size_t j = 0; j < c.per_j.size(); ++j)
    CHECK(c.per_j[j] == doctest::Approx(c.expected).epsilon(1e-10));
}
