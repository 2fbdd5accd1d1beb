#include "todakp/duality.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "todakp/tau_engine.hpp"

namespace todakp {

SolitonData dual_data(const SolitonData &data) {
  SolitonData dual = make_soliton_data(data.kappa, dual_weights(data));
  // Independent route: residues of the first leading/trailing minors at rest.
  // A minor value at an anchor loses one digit per digit of proximity of the
  // nearest block root, so anchors inside the guard cannot support the
  // cross-check and are skipped.
  TodaState st = jacobi_matrix(data, TimeVector::zero());
  SpectralWeights sw = spectral_residues(st, data.kappa);
  BlockSpectra sp = block_spectra(st);
  double guard = 1e-4 * data.span();
  for (int j = 0; j < data.n(); ++j) {
    long double near = std::numeric_limits<long double>::infinity();
    for (long double r : sp.leading[data.n() - 1])
      near = std::min(near, fabsl(data.kappa[j] - r));
    if (near < guard) continue;
    if (rel_diff(sw.a_hat[j], dual.a[j]) > 1e-10)
      throw check_error("dual weight " + std::to_string(j + 1) +
                        " disagrees with the minor residue route");
  }
  return dual;
}

Divisor dual_divisor(const SolitonData &data, int k) {
  int n = data.n();
  if (k < 1 || k > n - 1)
    throw input_error("order k must lie in [1, n-1], got " + std::to_string(k));
  // Sheet-swap route: the dual (n-k)-divisor is the primal (k-1)-divisor with
  // plus and minus parts exchanged.  Order zero has the vacuum zeros as its
  // minus part and an empty plus part.
  std::vector<double> sigma_gammas, sigma_deltas;
  if (k == 1) {
    sigma_gammas = vacuum_divisor(data, TimeVector::zero());
  } else {
    Divisor prim = compatible_divisor(data, k - 1, TimeVector::zero());
    sigma_gammas = prim.deltas;
    sigma_deltas = prim.gammas;
  }
  Divisor direct = compatible_divisor(dual_data(data), n - k, TimeVector::zero());
  double tol = 1e-9 * std::max(1.0, data.span());
  if (direct.gammas.size() != sigma_gammas.size() ||
      direct.deltas.size() != sigma_deltas.size())
    throw check_error("dual divisor part sizes disagree between routes");
  for (size_t i = 0; i < sigma_gammas.size(); ++i)
    if (std::fabs(direct.gammas[i] - sigma_gammas[i]) > tol)
      throw check_error("dual divisor routes disagree on a plus-sheet point");
  for (size_t i = 0; i < sigma_deltas.size(); ++i)
    if (std::fabs(direct.deltas[i] - sigma_deltas[i]) > tol)
      throw check_error("dual divisor routes disagree on a minus-sheet point");
  return direct;
}

DualityResiduals duality_residuals(const SolitonData &data, int k,
                                   const TimeVector &t,
                                   const std::vector<GridPoint> &grid) {
  int n = data.n();
  if (k < 1 || k > n - 1)
    throw input_error("order k must lie in [1, n-1], got " + std::to_string(k));
  SolitonData dual = dual_data(data);
  DualityResiduals r;
  for (const GridPoint &g : grid) {
    double ud = kp_field_point(dual, n - k, g.x, g.y, g.t3);
    double up = kp_field_point(data, k, -g.x, -g.y, -g.t3);
    r.field = std::max(r.field, std::fabs(ud - up));
  }
  // log tau_dual_{n-k}(t) - log tau_k(-t) - sum_j theta_j(t) is t-independent.
  auto gap = [&](const TimeVector &tv) {
    double s =
        tau(dual, n - k, tv).log_mag - tau(data, k, tv.negated()).log_mag;
    for (int j = 0; j < n; ++j) s -= phase(data.kappa[j], tv);
    return s;
  };
  r.scale_constant = gap(TimeVector::zero());
  r.tau = std::fabs(gap(t) - r.scale_constant);
  TodaState dual_at_t = jacobi_matrix(dual, t);
  TodaState primal_at_mt = jacobi_matrix(data, t.negated());
  r.toda_a = std::fabs(dual_at_t.a[n - k - 1] - primal_at_mt.a[k - 1]);
  r.toda_b = std::fabs(dual_at_t.b[n - k - 1] - primal_at_mt.b[k]);
  return r;
}

std::vector<double> dual_product_law(const SolitonData &data) {
  int n = data.n();
  SolitonData dual = dual_data(data);
  std::vector<double> v(n);
  for (int j = 0; j < n; ++j) {
    double p = 1.0;
    for (int m = 0; m < n; ++m)
      if (m != j) p *= data.kappa[j] - data.kappa[m];
    v[j] = data.a[j] * dual.a[j] * p * p;
  }
  return v;
}

std::vector<double> dual_product_law_printed(const SolitonData &data) {
  int n = data.n();
  SolitonData dual = dual_data(data);
  std::vector<double> v(n);
  for (int j = 0; j < n; ++j) {
    double p = 1.0;
    for (int i = 0; i < n; ++i)
      for (int l = i + 1; l < n; ++l)
        if (i != j && l != j) p *= data.kappa[l] - data.kappa[i];
    v[j] = data.a[j] * dual.a[j] * p * p;
  }
  return v;
}

ConstRatio dual_const_ratio(const SolitonData &data, int k) {
  int n = data.n();
  if (k < 1 || k > n - 1)
    throw input_error("order k must lie in [1, n-1], got " + std::to_string(k));
  Divisor prim = compatible_divisor(data, k, TimeVector::zero());
  Divisor dd = dual_divisor(data, k);
  ConstRatio cr;
  cr.per_j.resize(n);
  cr.collided.assign(n, false);
  cr.anchor_gap.assign(n, std::numeric_limits<double>::infinity());
  cr.expected = jacobi_matrix(data, TimeVector::zero()).a[k - 1];
  for (int j = 0; j < n; ++j) {
    double v = 1.0;
    auto fold = [&](const Divisor &d) {
      int cg = -1, cd = -1;
      for (const auto &c : d.collisions)
        if (c.kappa_index == j) {
          cg = c.gamma_index;
          cd = c.delta_index;
          cr.collided[j] = true;
        }
      for (int r = 0; r < (int)d.gammas.size(); ++r)
        if (r != cg) {
          v *= data.kappa[j] - d.gammas[r];
          cr.anchor_gap[j] = std::min(cr.anchor_gap[j],
                                      std::fabs(data.kappa[j] - d.gammas[r]));
        }
      for (int s = 0; s < (int)d.deltas.size(); ++s)
        if (s != cd) {
          v /= data.kappa[j] - d.deltas[s];
          cr.anchor_gap[j] = std::min(cr.anchor_gap[j],
                                      std::fabs(data.kappa[j] - d.deltas[s]));
        }
      // Colliding pair contributes the limit value -1.
      if (cg >= 0) v = -v;
    };
    fold(prim);
    fold(dd);
    cr.per_j[j] = v;
  }
  return cr;
}

}  // namespace todakp
