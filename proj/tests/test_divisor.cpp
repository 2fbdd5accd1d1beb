#include <cmath>
#include <vector>

#include "doctest.h"
#include "todakp/divisor.hpp"

using namespace todakp;

namespace {

SolitonData worked() {
  return make_soliton_data({0.0, 1.0, 2.0}, {0.5, 0.25, 0.25});
}

SolitonData five_phase() {
  return make_soliton_data({-1.5, -0.4, 0.3, 1.1, 2.0},
                           {0.2, 0.25, 0.15, 0.3, 0.1});
}

// Uniform-looking weights whose order-1 divisor collides on the middle knot.
SolitonData collision_instance() {
  return make_soliton_data({0.0, 1.0, 2.0}, {0.25, 0.5, 0.25});
}

double max_rel_gap(const std::vector<double> &x, const std::vector<double> &y) {
  double m = 0.0;
  for (size_t i = 0; i < x.size(); ++i) m = std::max(m, rel_diff(x[i], y[i]));
  return m;
}

}  // namespace

TEST_CASE("order-one divisor of the worked instance at time zero") {
  Divisor d = compatible_divisor(worked(), 1, TimeVector::zero());
  REQUIRE(d.gammas.size() == 1);
  REQUIRE(d.deltas.size() == 1);
  CHECK(d.gammas[0] == doctest::Approx(3.0 / 4.0).epsilon(1e-12));
  CHECK(d.deltas[0] == doctest::Approx(12.0 / 11.0).epsilon(1e-12));
  CHECK(d.gamma_oval[0] == 1);
  CHECK(d.delta_oval[0] == 2);
  CHECK(d.generic);
  CHECK(d.collisions.empty());
}

TEST_CASE("vacuum divisor of the worked instance at time zero") {
  std::vector<double> b = vacuum_divisor(worked(), TimeVector::zero());
  REQUIRE(b.size() == 2);
  double s = std::sqrt(17.0);
  CHECK(b[0] == doctest::Approx((9.0 - s) / 8.0).epsilon(1e-12));
  CHECK(b[1] == doctest::Approx((9.0 + s) / 8.0).epsilon(1e-12));
}

TEST_CASE("the vacuum divisor interlaces the phases at every time") {
  SolitonData d = five_phase();
  for (const std::vector<double> &tv :
       {std::vector<double>{}, {0.7, -0.4}, {1.5, 0.8, 0.4}}) {
    std::vector<double> b = vacuum_divisor(d, TimeVector(tv));
    REQUIRE((int)b.size() == d.n() - 1);
    for (int i = 0; i + 1 < d.n(); ++i) {
      CHECK(b[i] > d.kappa[i]);
      CHECK(b[i] < d.kappa[i + 1]);
    }
  }
}

TEST_CASE("every finite oval holds exactly one divisor point") {
  SolitonData d = five_phase();
  TimeVector t({0.5, -0.3, 0.2});
  for (int k = 1; k < d.n(); ++k) {
    Divisor dv = compatible_divisor(d, k, t);
    REQUIRE((int)dv.gammas.size() == k);
    REQUIRE((int)dv.deltas.size() == d.n() - k - 1);
    OvalAssignment occ = oval_assignment(d.kappa, dv);
    REQUIRE((int)occ.after.size() == d.n() - 1);
    for (int c : occ.after) CHECK(c == 1);
  }
}

TEST_CASE("inverting the divisor recovers the weights") {
  for (const SolitonData &d : {worked(), five_phase()}) {
    for (int k = 1; k < d.n(); ++k) {
      Divisor dv = compatible_divisor(d, k, TimeVector::zero());
      SolitonData back = invert_divisor(d.kappa, dv);
      CHECK(max_rel_gap(back.a, d.a) < 1e-10);
    }
  }
}

TEST_CASE("a colliding pair splits across the knot") {
  Divisor d = compatible_divisor(collision_instance(), 1, TimeVector::zero());
  CHECK_FALSE(d.generic);
  REQUIRE(d.collisions.size() == 1);
  CHECK(d.collisions[0].kappa_index == 1);
  CHECK(d.gammas[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(d.deltas[0] == doctest::Approx(1.0).epsilon(1e-12));
  // The pair resolves delta to the left oval and gamma to the right one.
  CHECK(d.gamma_oval[0] == 2);
  CHECK(d.delta_oval[0] == 1);
  OvalAssignment occ = oval_assignment(collision_instance().kappa, d);
  for (int c : occ.after) CHECK(c == 1);
}

TEST_CASE("inverting a collided divisor yields the canonical fiber point") {
  Divisor d;
  d.k = 1;
  d.gammas = {1.0};
  d.deltas = {1.0};
  d.gamma_oval = {2};
  d.delta_oval = {1};
  d.generic = false;
  d.collisions = {DivisorCollision{1, 0, 0}};
  SolitonData back = invert_divisor({0.0, 1.0, 2.0}, d);
  CHECK(back.a[0] == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(back.a[1] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(back.a[2] == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("divisors demanding a non-positive weight are rejected") {
  // Two points crowded into the first oval force a sign change in the
  // product formula at the middle phase.
  Divisor d;
  d.k = 1;
  d.gammas = {0.3};
  d.deltas = {0.6};
  d.gamma_oval = {1};
  d.delta_oval = {1};
  CHECK_THROWS_AS(invert_divisor({0.0, 1.0, 2.0}, d), input_error);
}

TEST_CASE("divisor identities hold along the flow") {
  SolitonData d = worked();
  TimeVector t({0.3, -0.1, 0.2});
  for (int k = 1; k < d.n(); ++k) {
    DivisorIdentityResiduals r = divisor_identity_residuals(d, k, t);
    CHECK(r.k_recursion < 1e-9);
    CHECK(r.gluing_form < 1e-9);
    CHECK(r.tau1 < 1e-9);
    CHECK(r.has_rref_pairing == (k == d.n() - 1));
    if (r.has_rref_pairing) CHECK(r.rref_pairing < 1e-9);
  }
}

TEST_CASE("divisor trajectories alone rebuild the Jacobi state") {
  SolitonData d = worked();
  TimeVector t({0.2, 0.1});
  TodaState direct = jacobi_matrix(d, t);
  TodaState rebuilt = toda_from_divisor_flow(d, 1, t, 1e-5);
  CHECK(max_rel_gap(rebuilt.a, direct.a) < 1e-6);
  CHECK(max_rel_gap(rebuilt.b, direct.b) < 1e-6);
}
