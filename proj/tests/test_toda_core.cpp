#include <cmath>
#include <vector>

#include "doctest.h"
#include "todakp/toda_core.hpp"

using namespace todakp;

namespace {

SolitonData worked() {
  return make_soliton_data({0.0, 1.0, 2.0}, {0.5, 0.25, 0.25});
}

SolitonData four_phase() {
  return make_soliton_data({-1.2, -0.1, 0.8, 1.9}, {0.3, 0.2, 0.35, 0.15});
}

std::vector<double> state_eigenvalues(const TodaState &st) {
  std::vector<double> d, e;
  jacobi_symmetrized(st, d, e);
  return sym_tridiag_eigenvalues(d, e);
}

double max_rel_gap(const std::vector<double> &x, const std::vector<double> &y) {
  double m = 0.0;
  for (size_t i = 0; i < x.size(); ++i) m = std::max(m, rel_diff(x[i], y[i]));
  return m;
}

// Phases may sit at zero, so spectra are compared on the span scale.
double max_span_gap(const std::vector<double> &x, const SolitonData &d) {
  double m = 0.0;
  for (size_t i = 0; i < x.size(); ++i)
    m = std::max(m, std::fabs(x[i] - d.kappa[i]) / std::max(1.0, d.span()));
  return m;
}

}  // namespace

TEST_CASE("Jacobi entries of the worked instance at time zero") {
  TodaState st = jacobi_matrix(worked(), TimeVector::zero());
  REQUIRE(st.n() == 3);
  CHECK(st.a[0] == doctest::Approx(11.0 / 16.0).epsilon(1e-12));
  CHECK(st.a[1] == doctest::Approx(32.0 / 121.0).epsilon(1e-12));
  CHECK(st.b[0] == doctest::Approx(3.0 / 4.0).epsilon(1e-12));
  CHECK(st.b[1] == doctest::Approx(51.0 / 44.0).epsilon(1e-12));
  CHECK(st.b[2] == doctest::Approx(12.0 / 11.0).epsilon(1e-12));
}

TEST_CASE("dense form keeps the unit subdiagonal convention") {
  TodaState st = jacobi_matrix(worked(), TimeVector({0.3, -0.1}));
  Mat m = jacobi_dense(st);
  for (int i = 0; i < st.n(); ++i)
    for (int j = 0; j < st.n(); ++j) {
      if (i == j)
        CHECK(m(i, j) == st.b[i]);
      else if (j == i + 1)
        CHECK(m(i, j) == st.a[i]);
      else if (j == i - 1)
        CHECK(m(i, j) == 1.0);
      else
        CHECK(m(i, j) == 0.0);
    }
}

TEST_CASE("the Jacobi matrix is isospectral to the phases") {
  for (const SolitonData &d : {worked(), four_phase()}) {
    for (const std::vector<double> &tv :
         {std::vector<double>{}, {0.7, -0.4, 0.2}, {2.0, 1.0, 0.5}}) {
      std::vector<double> eig =
          state_eigenvalues(jacobi_matrix(d, TimeVector(tv)));
      CHECK(max_span_gap(eig, d) < 1e-10);
    }
  }
}

TEST_CASE("trace invariants do not drift along the flow") {
  SolitonData d = four_phase();
  Mat a0 = jacobi_dense(jacobi_matrix(d, TimeVector::zero()));
  Mat a1 = jacobi_dense(jacobi_matrix(d, TimeVector({0.8, -0.5, 0.3})));
  Mat p0 = a0, p1 = a1;
  for (int j = 1; j <= d.n(); ++j) {
    p0 = mat_mul(p0, a0);
    p1 = mat_mul(p1, a1);
    CHECK(rel_diff(trace(p0), trace(p1)) < 1e-12);
  }
}

TEST_CASE("minor polynomials satisfy the splitting identity") {
  SolitonData d = four_phase();
  int n = d.n();
  TodaState st = jacobi_matrix(d, TimeVector({0.4, 0.2, -0.3}));
  MinorPolys mp = minor_polynomials(st);
  REQUIRE((int)mp.delta.size() == n + 1);
  REQUIRE((int)mp.delta_hat.size() == n + 1);
  for (size_t c = 0; c < mp.delta[n].size(); ++c)
    CHECK(mp.delta[n][c] == doctest::Approx(mp.delta_hat[n][c]).epsilon(1e-11));
  for (int j = 1; j < n; ++j) {
    for (double z : {-2.0, -0.5, 0.6, 1.5, 3.0}) {
      double lhs = poly_eval(mp.delta[n], z);
      double rhs = poly_eval(mp.delta[n - j], z) * poly_eval(mp.delta_hat[j], z) -
                   st.a[j - 1] * poly_eval(mp.delta[n - j - 1], z) *
                       poly_eval(mp.delta_hat[j - 1], z);
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
    }
  }
  // The full characteristic polynomial vanishes on the phases.
  for (double kj : d.kappa) {
    double scale = 0.0;
    for (double c : mp.delta[n]) scale = std::max(scale, std::fabs(c));
    CHECK(std::fabs(poly_eval(mp.delta[n], kj)) < 1e-12 * scale);
  }
}

TEST_CASE("recurrence minor values match the polynomial route") {
  SolitonData d = four_phase();
  TodaState st = jacobi_matrix(d, TimeVector({0.5, -0.2}));
  MinorPolys mp = minor_polynomials(st);
  for (int j = 0; j <= d.n(); ++j) {
    for (double z : {-3.0, -0.8, 0.4, 2.6}) {
      CHECK(leading_minor_value(st, j, z).value() ==
            doctest::Approx(poly_eval(mp.delta_hat[j], z)).epsilon(1e-12));
      CHECK(trailing_minor_value(st, j, z).value() ==
            doctest::Approx(poly_eval(mp.delta[j], z)).epsilon(1e-12));
    }
  }
  CHECK_THROWS_AS(leading_minor_value(st, d.n() + 1, 0.0), input_error);
}

TEST_CASE("block spectra interlace and reproduce the minors") {
  SolitonData d = four_phase();
  TodaState st = jacobi_matrix(d, TimeVector({0.3, 0.3, 0.1}));
  BlockSpectra sp = block_spectra(st);
  REQUIRE((int)sp.leading.size() == d.n() + 1);
  for (int j = 1; j <= d.n(); ++j) {
    REQUIRE((int)sp.leading[j].size() == j);
    REQUIRE((int)sp.trailing[j].size() == j);
    for (double z : {-2.4, 1.2}) {
      CHECK(block_char(sp.leading[j], z).value() ==
            doctest::Approx(leading_minor_value(st, j, z).value())
                .epsilon(1e-10));
      CHECK(block_char(sp.trailing[j], z).value() ==
            doctest::Approx(trailing_minor_value(st, j, z).value())
                .epsilon(1e-10));
    }
    // Eigenvalues of nested blocks interlace strictly.
    for (int i = 0; i + 1 < j; ++i) {
      CHECK((double)sp.leading[j][i] < (double)sp.leading[j - 1][i]);
      CHECK((double)sp.leading[j - 1][i] < (double)sp.leading[j][i + 1]);
    }
  }
}

TEST_CASE("factorization flow agrees with the tau route") {
  for (const SolitonData &d : {worked(), four_phase()}) {
    TodaState st0 = jacobi_matrix(d, TimeVector::zero());
    for (const std::vector<double> &tv :
         {std::vector<double>{0.5, 0.3, -0.2}, {3.0, 1.5, 0.8}}) {
      TimeVector t(tv);
      TodaState flowed = bruhat_flow(st0, t);
      TodaState direct = jacobi_matrix(d, t);
      CHECK(max_rel_gap(flowed.a, direct.a) < 1e-9);
      CHECK(max_rel_gap(flowed.b, direct.b) < 1e-9);
      CHECK(max_span_gap(state_eigenvalues(flowed), d) < 1e-9);
    }
  }
}

TEST_CASE("Lax residual and conservation drift stay small") {
  SolitonData d = four_phase();
  TimeVector t({0.3, -0.2, 0.4});
  for (int flow : {1, 2, 3}) {
    FlowResiduals fr = flow_invariant_residuals(d, t, flow, 1e-5);
    CHECK(fr.lax < 1e-6);
    CHECK(fr.conservation_drift < 1e-9);
  }
}

TEST_CASE("Lax residual shrinks at second order in the step") {
  SolitonData d = worked();
  TimeVector t({0.2, 0.1});
  double r2 = flow_invariant_residuals(d, t, 2, 2e-3).lax;
  double r1 = flow_invariant_residuals(d, t, 2, 1e-3).lax;
  CHECK(r2 / r1 > 3.2);
  CHECK(r2 / r1 < 4.8);
}

TEST_CASE("resolvent residues recover both weight systems") {
  for (const SolitonData &d : {worked(), four_phase()}) {
    TodaState st = jacobi_matrix(d, TimeVector::zero());
    SpectralWeights sw = spectral_residues(st, d.kappa);
    CHECK(max_rel_gap(sw.a, d.a) < 1e-10);
    CHECK(max_rel_gap(sw.a_hat, dual_weights(d)) < 1e-10);
  }
  SpectralWeights sww =
      spectral_residues(jacobi_matrix(worked(), TimeVector::zero()),
                        worked().kappa);
  CHECK(sww.a_hat[0] == doctest::Approx(1.0 / 11.0).epsilon(1e-12));
  CHECK(sww.a_hat[1] == doctest::Approx(8.0 / 11.0).epsilon(1e-12));
  CHECK(sww.a_hat[2] == doctest::Approx(2.0 / 11.0).epsilon(1e-12));
}

TEST_CASE("Baker-Akhiezer sheets glue at the phases") {
  SolitonData d = four_phase();
  TimeVector t({0.3, -0.1, 0.05});
  for (double kj : d.kappa) {
    BAVectorPair pair = ba_vectors(d, kj, t);
    REQUIRE((int)pair.psi.size() == d.n());
    REQUIRE((int)pair.psi_sigma.size() == d.n());
    for (int j = 0; j < d.n(); ++j)
      CHECK(rel_diff(pair.psi[j], pair.psi_sigma[j]) < 1e-8);
  }
}

TEST_CASE("dressed sums evaluate termwise at the phases") {
  SolitonData d = worked();
  int n = d.n();
  TimeVector t({0.4, 0.2, -0.1});
  BlockSpectra sp = block_spectra(jacobi_matrix(d, t));
  for (int k = 0; k < n; ++k) {
    for (int l = 0; l < n; ++l) {
      // At zeta = kappa_l every other term carries an exact zero factor, so
      // the sum collapses to the eigenvalue action on the l-th exponential.
      double lag = 1.0;
      for (int s = 0; s < n; ++s)
        if (s != l) lag *= d.kappa[l] - d.kappa[s];
      LogReal expect = LogReal::from(d.a[l] * lag) *
                       LogReal::exp_of(phase(d.kappa[l], t)) *
                       block_char(sp.leading[k], d.kappa[l]);
      LogReal got = dressed_phi(d, k, d.kappa[l], t);
      CHECK(got.sign == expect.sign);
      CHECK(std::fabs(got.log_mag - expect.log_mag) < 1e-10);
    }
  }
}
