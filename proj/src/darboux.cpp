#include "todakp/darboux.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace todakp {

DarbouxOperator darboux_operator(const SolitonData &data, int k,
                                 const TimeVector &t) {
  int n = data.n();
  if (k < 1 || k > n - 1)
    throw input_error("dressing order must lie in [1, n-1], got " +
                      std::to_string(k));
  TodaState st = jacobi_matrix(data, t);
  MinorPolys mp = minor_polynomials(st);
  DarbouxOperator op;
  op.k = k;
  op.t = t;
  op.w.resize(k);
  for (int i = 1; i <= k; ++i) op.w[i - 1] = -mp.delta_hat[k][k - i];
  // Kernel conditions: each heat mode E_j is an eigenfunction of the
  // dressing with eigenvalue DeltaHat_k(kappa_j; t), so D^(k) mu_i is the
  // weighted eigenvalue sum; it must vanish for i < k.
  BlockSpectra sp = block_spectra(st);
  HeatBasisSample hb = heat_basis(data, t, k);
  // Each term's accuracy is limited by the distance of its phase point to
  // the nearest minor root: the root positions inherit an absolute error
  // from the double-rounded lattice coefficients, so terms with a nearby
  // root contribute proportional slack to the cancellation bound.
  double root_err = 1e-14 * std::max(1.0, data.span());
  for (int i = 0; i < k; ++i) {
    double acc = 0.0, scale = 0.0, slack = 0.0;
    for (int j = 0; j < n; ++j) {
      LogReal term = LogReal::from(data.a[j] * std::pow(data.kappa[j], i)) *
                     block_char(sp.leading[k], data.kappa[j]);
      term.log_mag += hb.theta[j] - hb.log_scale;
      double v = term.value();
      acc += v;
      scale += std::fabs(v);
      long double near = std::numeric_limits<long double>::infinity();
      for (long double r : sp.leading[k])
        near = std::min(near, fabsl(data.kappa[j] - r));
      if (near > 0.0L)
        slack += std::fabs(v) * (double)(root_err / near);
      else
        slack += std::fabs(v);
    }
    if (scale > 0.0 && std::fabs(acc) > 1e-8 * scale + 10.0 * slack)
      throw check_error("dressing operator failed to annihilate moment " +
                        std::to_string(i));
  }
  return op;
}

namespace {

// Jet = raw x-derivative list (f, f', f'', ...) truncated at the common
// length of the operands.
using Jet = std::vector<double>;

Jet jet_mul(const Jet &f, const Jet &g) {
  size_t m = std::min(f.size(), g.size());
  Jet h(m, 0.0);
  for (size_t r = 0; r < m; ++r) {
    double c = 1.0;  // C(r, i), updated incrementally
    for (size_t i = 0; i <= r; ++i) {
      h[r] += c * f[i] * g[r - i];
      c = c * (double)(r - i) / (double)(i + 1);
    }
  }
  return h;
}

Jet jet_div(const Jet &f, const Jet &g) {
  size_t m = std::min(f.size(), g.size());
  Jet h(m, 0.0);
  for (size_t r = 0; r < m; ++r) {
    double s = f[r];
    double c = 1.0;
    for (size_t i = 0; i < r; ++i) {
      s -= c * h[i] * g[r - i];
      c = c * (double)(r - i) / (double)(i + 1);
    }
    h[r] = s / g[0];
  }
  return h;
}

Jet jet_deriv(const Jet &f) {
  if (f.size() <= 1) return Jet{};
  return Jet(f.begin() + 1, f.end());
}

}  // namespace

std::vector<double> darboux_ladder_coefficients(const SolitonData &data, int k,
                                                const TimeVector &t) {
  int n = data.n();
  if (k < 1 || k > n - 1)
    throw input_error("dressing order must lie in [1, n-1], got " +
                      std::to_string(k));
  // Jets of b_j = (log tau_j)' - (log tau_{j-1})' to derivative order k.
  int m = k + 1;
  std::vector<Jet> taujet(k + 1);
  std::vector<double> shift(k + 1, 0.0);
  for (int j = 0; j <= k; ++j)
    taujet[j] = tau_x_jet(data, j, t, m, &shift[j]);
  std::vector<Jet> bjet(k + 1);  // bjet[j] for b_j, 1-based
  Jet prev_dlog(m, 0.0);         // (log tau_0)' jet = 0
  for (int j = 1; j <= k; ++j) {
    Jet dlog = jet_div(jet_deriv(taujet[j]), taujet[j]);
    Jet b(dlog.size());
    for (size_t i = 0; i < b.size(); ++i) b[i] = dlog[i] - prev_dlog[i];
    bjet[j] = b;
    prev_dlog = dlog;
  }
  // Compose (d/dx - b_j) D^(j-1): with D^(j-1) = d^(j-1) - sum w_i d^(j-1-i),
  // w^(j)_1 = w^(j-1)_1 + b_j,
  // w^(j)_i = w^(j-1)_i - b_j w^(j-1)_{i-1} + dx(w^(j-1)_{i-1}), i >= 2,
  // where the out-of-range w^(j-1)_j is zero.
  std::vector<Jet> w;  // current-level coefficient jets
  for (int j = 1; j <= k; ++j) {
    std::vector<Jet> next(j);
    size_t len = (size_t)(k - j + 1);
    for (int i = 1; i <= j; ++i) {
      Jet v(len, 0.0);
      auto acc = [&](const Jet &src, double fac) {
        for (size_t r = 0; r < len && r < src.size(); ++r) v[r] += fac * src[r];
      };
      if (i <= j - 1) acc(w[i - 1], 1.0);
      if (i == 1) acc(bjet[j], 1.0);
      if (i >= 2) {
        acc(jet_mul(bjet[j], w[i - 2]), -1.0);
        acc(jet_deriv(w[i - 2]), 1.0);
      }
      next[i - 1] = v;
    }
    w = std::move(next);
  }
  std::vector<double> out(k);
  for (int i = 0; i < k; ++i) out[i] = w[i][0];
  return out;
}

namespace {

// Dressed plus-sheet sample in log form (un-normalized).
LogReal plus_sheet(const SolitonData &data, int k, double zeta,
                   const TimeVector &t) {
  BlockSpectra sp = block_spectra(jacobi_matrix(data, t));
  LogReal v = block_char(sp.leading[k], zeta);
  v.log_mag += phase(zeta, t);
  return v;
}

}  // namespace

LogReal wavefunction_minus_minor_route(const SolitonData &data, int k,
                                       double zeta, const TimeVector &t) {
  BlockSpectra sp = block_spectra(jacobi_matrix(data, t));
  int n = data.n();
  LogReal num = block_char(sp.trailing[n - k - 1], zeta);
  num.log_mag += tau(data, k + 1, t).log_mag - tau(data, k, t).log_mag;
  LogReal den = dressed_phi(data, 0, zeta, TimeVector::zero());
  if (den.is_zero())
    throw input_error("evaluation at a vacuum divisor point");
  return num / den;
}

WaveValue wavefunction(const SolitonData &data, int k, const CurvePoint &p,
                       const TimeVector &t, bool normalized, bool probe) {
  int n = data.n();
  if (k < 0 || k > n - 1)
    throw input_error("dressing order must lie in [0, n-1], got " +
                      std::to_string(k));
  WaveValue wv;
  wv.at = p;
  if (p.is_infinity) throw input_error("wavefunction sample at infinity");
  if (p.sheet == CurvePoint::Sheet::plus) {
    LogReal v = plus_sheet(data, k, p.zeta, t);
    if (normalized) {
      LogReal v0 = plus_sheet(data, k, p.zeta, TimeVector::zero());
      if (v0.is_zero()) {
        // Pole of the normalized wavefunction: a gamma divisor point.
        if (!probe)
          throw input_error("evaluation at a plus-sheet divisor point zeta = " +
                            std::to_string(p.zeta));
        wv.finite = false;
        wv.lv = v;
        return wv;
      }
      v = v / v0;
    }
    wv.lv = v;
    return wv;
  }
  // Minus sheet: closed form through the trailing minors.  The termwise
  // dressed sum is the independent route checked against this one in the
  // verification suite.
  BlockSpectra sp0 = block_spectra(jacobi_matrix(data, TimeVector::zero()));
  BlockSpectra spt = block_spectra(jacobi_matrix(data, t));
  LogReal num = block_char(spt.trailing[n - k - 1], p.zeta);
  num.log_mag += tau(data, k + 1, t).log_mag - tau(data, k, t).log_mag;
  LogReal den = block_char(sp0.trailing[n - 1], p.zeta);
  if (den.is_zero()) {
    if (!probe)
      throw input_error("evaluation at a vacuum divisor point zeta = " +
                        std::to_string(p.zeta));
    wv.finite = false;
    wv.lv = num;
    return wv;
  }
  LogReal v = num / den;
  if (normalized) {
    LogReal num0 = block_char(sp0.trailing[n - k - 1], p.zeta);
    num0.log_mag += tau(data, k + 1, TimeVector::zero()).log_mag -
                    tau(data, k, TimeVector::zero()).log_mag;
    if (num0.is_zero()) {
      // Zero of the t = 0 value: a delta divisor point becomes a pole of the
      // normalized wavefunction.
      if (!probe)
        throw input_error("evaluation at a minus-sheet divisor point zeta = " +
                          std::to_string(p.zeta));
      wv.finite = false;
      wv.lv = v;
      return wv;
    }
    v = v / (num0 / den);
  }
  wv.lv = v;
  return wv;
}

double gluing_residual(const SolitonData &data, int k, const TimeVector &t) {
  int n = data.n();
  if (k < 0 || k > n - 1)
    throw input_error("dressing order must lie in [0, n-1], got " +
                      std::to_string(k));
  BlockSpectra sp = block_spectra(jacobi_matrix(data, t));
  double lt = tau(data, k + 1, t).log_mag - tau(data, k, t).log_mag;
  double guard = kAnchorGuardFactor * data.span();
  double worst = 0.0;
  for (int j = 0; j < n; ++j) {
    double z = data.kappa[j];
    // Minor roots park exponentially close to the phase points; once one
    // sits inside the guard the factor (z - root) is not resolvable from
    // the lattice coefficients, so the anchor carries no information.
    long double near = std::numeric_limits<long double>::infinity();
    for (long double r : sp.leading[k]) near = std::min(near, fabsl(z - r));
    for (long double r : sp.trailing[n - k - 1])
      near = std::min(near, fabsl(z - r));
    if (near < guard) continue;
    LogReal plus = block_char(sp.leading[k], z);
    plus.log_mag += phase(z, t);
    LogReal minus = block_char(sp.trailing[n - k - 1], z);
    minus.log_mag += lt;
    double phi0 = data.a[j];
    for (int s = 0; s < n; ++s)
      if (s != j) phi0 *= z - data.kappa[s];
    minus = minus / LogReal::from(phi0);
    // Relative mismatch computed in the log domain to survive huge phases.
    if (plus.is_zero() && minus.is_zero()) continue;
    if (plus.is_zero() || minus.is_zero() || plus.sign != minus.sign) {
      double m = std::max(plus.log_mag, minus.log_mag);
      double pv = plus.is_zero() ? 0.0 : plus.sign * std::exp(plus.log_mag - m);
      double mv = minus.is_zero() ? 0.0 : minus.sign * std::exp(minus.log_mag - m);
      worst = std::max(worst, std::fabs(pv - mv) /
                                  std::max(std::fabs(pv), std::fabs(mv)));
      continue;
    }
    double diff = plus.log_mag - minus.log_mag;
    worst = std::max(worst, std::fabs(std::expm1(diff)));
  }
  return worst;
}

double dual_darboux_kernel_residual(const SolitonData &data, int k,
                                    const TimeVector &t) {
  int n = data.n();
  if (k < 1 || k > n - 1)
    throw input_error("dressing order must lie in [1, n-1], got " +
                      std::to_string(k));
  // The reversed-data dressing of order k built at -t annihilates the dual
  // moments: sum_j a_hat_j kappa_j^i Delta_k(kappa_j; -t) E_j(t) = 0, i < k.
  BlockSpectra sp = block_spectra(jacobi_matrix(data, t.negated()));
  std::vector<double> ah = dual_weights(data);
  double mx = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < n; ++j) mx = std::max(mx, phase(data.kappa[j], t));
  double worst = 0.0;
  for (int i = 0; i < k; ++i) {
    double acc = 0.0, scale = 0.0;
    for (int j = 0; j < n; ++j) {
      LogReal term = LogReal::from(ah[j] * std::pow(data.kappa[j], i)) *
                     block_char(sp.trailing[k], data.kappa[j]);
      term.log_mag += phase(data.kappa[j], t) - mx;
      double v = term.value();
      acc += v;
      scale += std::fabs(v);
    }
    if (scale > 0.0) worst = std::max(worst, std::fabs(acc) / scale);
  }
  return worst;
}

}  // namespace todakp
