#include <cmath>
#include <vector>

#include "doctest.h"
#include "todakp/darboux.hpp"

using namespace todakp;

namespace {

SolitonData worked() {
  return make_soliton_data({0.0, 1.0, 2.0}, {0.5, 0.25, 0.25});
}

SolitonData four_phase() {
  return make_soliton_data({-1.2, -0.1, 0.8, 1.9}, {0.3, 0.2, 0.35, 0.15});
}

CurvePoint plus_at(double z) {
  CurvePoint p;
  p.sheet = CurvePoint::Sheet::plus;
  p.zeta = z;
  return p;
}

CurvePoint minus_at(double z) {
  CurvePoint p;
  p.sheet = CurvePoint::Sheet::minus;
  p.zeta = z;
  return p;
}

}  // namespace

TEST_CASE("dressing coefficients of the worked instance at time zero") {
  TimeVector z = TimeVector::zero();
  DarbouxOperator d1 = darboux_operator(worked(), 1, z);
  REQUIRE(d1.k == 1);
  CHECK(d1.w[0] == doctest::Approx(3.0 / 4.0).epsilon(1e-12));
  DarbouxOperator d2 = darboux_operator(worked(), 2, z);
  REQUIRE(d2.k == 2);
  CHECK(d2.w[0] == doctest::Approx(21.0 / 11.0).epsilon(1e-12));
  CHECK(d2.w[1] == doctest::Approx(-2.0 / 11.0).epsilon(1e-12));
}

TEST_CASE("dressing order outside the valid range is rejected") {
  CHECK_THROWS_AS(darboux_operator(worked(), 0, TimeVector::zero()),
                  input_error);
  CHECK_THROWS_AS(darboux_operator(worked(), 5, TimeVector::zero()),
                  input_error);
}

TEST_CASE("the operator symbol is the leading minor") {
  SolitonData d = four_phase();
  TimeVector t({0.4, -0.3, 0.2});
  TodaState st = jacobi_matrix(d, t);
  for (int k = 1; k < d.n(); ++k) {
    DarbouxOperator op = darboux_operator(d, k, t);
    for (double z : {-2.5, -0.4, 0.9, 2.8})
      CHECK(op.symbol_at(z) ==
            doctest::Approx(leading_minor_value(st, k, z).value())
                .epsilon(1e-10));
  }
}

TEST_CASE("ladder composition reproduces the coefficients") {
  SolitonData d = four_phase();
  for (const std::vector<double> &tv :
       {std::vector<double>{}, {0.4, -0.3, 0.2}, {1.2, 0.6}}) {
    TimeVector t(tv);
    for (int k = 1; k < d.n(); ++k) {
      DarbouxOperator op = darboux_operator(d, k, t);
      std::vector<double> lw = darboux_ladder_coefficients(d, k, t);
      REQUIRE(lw.size() == op.w.size());
      for (size_t i = 0; i < lw.size(); ++i)
        CHECK(lw[i] == doctest::Approx(op.w[i]).epsilon(1e-9));
    }
  }
}

TEST_CASE("plus-sheet wavefunction is the symbol times the exponential") {
  SolitonData d = worked();
  TimeVector t({0.3, -0.1, 0.2});
  for (int k = 0; k < d.n(); ++k) {
    DarbouxOperator op =
        k == 0 ? DarbouxOperator{} : darboux_operator(d, k, t);
    for (double z : {-1.5, 0.4, 2.7}) {
      WaveValue wv = wavefunction(d, k, plus_at(z), t, false);
      double expect = (k == 0 ? 1.0 : op.symbol_at(z)) * std::exp(phase(z, t));
      CHECK(wv.value() == doctest::Approx(expect).epsilon(1e-10));
    }
  }
}

TEST_CASE("the two minus-sheet routes agree off the phases") {
  SolitonData d = four_phase();
  TimeVector t({0.4, -0.2, 0.15});
  for (int k = 0; k < d.n(); ++k) {
    for (double z : {d.kappa.back() + 0.7, d.kappa.front() - 0.9}) {
      LogReal minor_route = wavefunction_minus_minor_route(d, k, z, t);
      LogReal termwise = dressed_phi(d, k, z, t) /
                         dressed_phi(d, 0, z, TimeVector::zero());
      CHECK(minor_route.sign == termwise.sign);
      CHECK(std::fabs(minor_route.log_mag - termwise.log_mag) < 1e-9);
    }
  }
}

TEST_CASE("sheet gluing holds at every phase of the worked instance") {
  SolitonData d = worked();
  TimeVector t({0.3, -0.1});
  for (int k = 1; k < d.n(); ++k) CHECK(gluing_residual(d, k, t) < 1e-9);
}

TEST_CASE("top-order minus-sheet normalization is flat in zeta") {
  // At k = n-1 the trailing minor in the numerator has degree zero, so the
  // normalized value carries no zeta dependence at all.
  SolitonData d = four_phase();
  int k = d.n() - 1;
  TimeVector t({0.6, -0.4, 0.3});
  double first = 0.0;
  bool have_first = false;
  for (double z : {d.kappa.back() + 0.5, d.kappa.back() + 1.3,
                   d.kappa.front() - 0.8, 0.35}) {
    WaveValue wv = wavefunction(d, k, minus_at(z), t, true);
    REQUIRE(wv.finite);
    if (!have_first) {
      first = wv.value();
      have_first = true;
    } else {
      CHECK(rel_diff(wv.value(), first) < 1e-13);
    }
  }
}

TEST_CASE("normalized wavefunction equals one at time zero") {
  SolitonData d = worked();
  for (int k = 1; k < d.n(); ++k) {
    WaveValue wp =
        wavefunction(d, k, plus_at(3.1), TimeVector::zero(), true);
    WaveValue wm =
        wavefunction(d, k, minus_at(3.1), TimeVector::zero(), true);
    CHECK(wp.value() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(wm.value() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("the reversed dressing annihilates the dual moments") {
  SolitonData d = four_phase();
  TimeVector t({0.3, 0.2, -0.1});
  for (int k = 1; k < d.n(); ++k)
    CHECK(dual_darboux_kernel_residual(d, k, t) < 1e-10);
}
