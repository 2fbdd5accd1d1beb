#include "todakp/toda_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace todakp {

Mat jacobi_dense(const TodaState &state) {
  int n = state.n();
  Mat m(n, n);
  for (int i = 0; i < n; ++i) {
    m(i, i) = state.b[i];
    if (i + 1 < n) {
      m(i, i + 1) = state.a[i];
      m(i + 1, i) = 1.0;
    }
  }
  return m;
}

void jacobi_symmetrized(const TodaState &state, std::vector<double> &diag,
                        std::vector<double> &offdiag) {
  int n = state.n();
  diag = state.b;
  offdiag.resize(n - 1);
  for (int i = 0; i + 1 < n; ++i) {
    if (!(state.a[i] > 0.0))
      throw check_error("off-diagonal entry " + std::to_string(i + 1) +
                        " left the positive cone");
    offdiag[i] = std::sqrt(state.a[i]);
  }
}

TodaState jacobi_matrix(const SolitonData &data, const TimeVector &t) {
  int n = data.n();
  TodaState st;
  st.t = t;
  st.a.resize(n - 1);
  st.b.resize(n);
  std::vector<double> logtau(n + 1);
  for (int k = 0; k <= n; ++k) logtau[k] = tau(data, k, t).log_mag;
  for (int k = 1; k < n; ++k)
    st.a[k - 1] = std::exp(logtau[k - 1] + logtau[k + 1] - 2.0 * logtau[k]);
  double prev_dx = 0.0;  // d/dx log tau_0 = 0
  for (int k = 1; k <= n; ++k) {
    double dx = phase_moments(data, k, t).dx;
    st.b[k - 1] = dx - prev_dx;
    prev_dx = dx;
  }
  return st;
}

BlockSpectra block_spectra(const TodaState &state) {
  int n = state.n();
  std::vector<long double> d(n), e(std::max(0, n - 1));
  for (int i = 0; i < n; ++i) d[i] = state.b[i];
  for (int i = 0; i + 1 < n; ++i) {
    if (!(state.a[i] > 0.0))
      throw check_error("off-diagonal entry " + std::to_string(i + 1) +
                        " left the positive cone");
    e[i] = sqrtl((long double)state.a[i]);
  }
  BlockSpectra sp;
  sp.leading.resize(n + 1);
  sp.trailing.resize(n + 1);
  for (int j = 1; j <= n; ++j) {
    std::vector<long double> dl(d.begin(), d.begin() + j);
    std::vector<long double> el(e.begin(), e.begin() + std::max(0, j - 1));
    sp.leading[j] = sym_tridiag_eigenvalues_ld(dl, el);
    std::vector<long double> dt(d.end() - j, d.end());
    std::vector<long double> et(e.end() - std::max(0, j - 1), e.end());
    sp.trailing[j] = sym_tridiag_eigenvalues_ld(dt, et);
  }
  return sp;
}

LogReal block_char(const std::vector<long double> &mu, double x) {
  LogReal v;
  v.sign = 1;
  long double lm = 0.0L;
  for (long double m : mu) {
    long double f = (long double)x - m;
    if (f == 0.0L) return LogReal{};
    if (f < 0.0L) {
      v.sign = -v.sign;
      f = -f;
    }
    lm += logl(f);
  }
  v.log_mag = (double)lm;
  return v;
}

namespace {

LogReal to_logreal(long double x) {
  if (x == 0.0L) return LogReal{};
  LogReal r;
  r.sign = x > 0.0L ? 1 : -1;
  r.log_mag = (double)logl(fabsl(x));
  return r;
}

}  // namespace

LogReal leading_minor_value(const TodaState &state, int j, double z) {
  int n = state.n();
  if (j < 0 || j > n) throw input_error("block size out of range");
  long double prev = 0.0L, cur = 1.0L;
  for (int m = 1; m <= j; ++m) {
    long double next = ((long double)z - (long double)state.b[m - 1]) * cur -
                       (m >= 2 ? (long double)state.a[m - 2] * prev : 0.0L);
    prev = cur;
    cur = next;
  }
  return to_logreal(cur);
}

LogReal trailing_minor_value(const TodaState &state, int j, double z) {
  int n = state.n();
  if (j < 0 || j > n) throw input_error("block size out of range");
  long double prev = 0.0L, cur = 1.0L;
  for (int m = 1; m <= j; ++m) {
    long double next = ((long double)z - (long double)state.b[n - m]) * cur -
                       (m >= 2 ? (long double)state.a[n - m] * prev : 0.0L);
    prev = cur;
    cur = next;
  }
  return to_logreal(cur);
}

MinorPolys minor_polynomials(const TodaState &state) {
  int n = state.n();
  MinorPolys mp;
  mp.delta.resize(n + 1);
  mp.delta_hat.resize(n + 1);
  mp.delta[0] = {1.0};
  mp.delta_hat[0] = {1.0};
  if (n >= 1) {
    mp.delta[1] = {-state.b[n - 1], 1.0};
    mp.delta_hat[1] = {-state.b[0], 1.0};
  }
  auto step = [](const std::vector<double> &pj,
                 const std::vector<double> &pjm1, double bshift,
                 double acoef) {
    std::vector<double> c(pj.size() + 1, 0.0);
    for (size_t i = 0; i < pj.size(); ++i) {
      c[i + 1] += pj[i];
      c[i] -= bshift * pj[i];
    }
    for (size_t i = 0; i < pjm1.size(); ++i) c[i] -= acoef * pjm1[i];
    return c;
  };
  for (int j = 1; j < n; ++j) {
    mp.delta[j + 1] =
        step(mp.delta[j], mp.delta[j - 1], state.b[n - j - 1], state.a[n - j - 1]);
    mp.delta_hat[j + 1] =
        step(mp.delta_hat[j], mp.delta_hat[j - 1], state.b[j], state.a[j - 1]);
  }
  // Splitting identity Delta_n = Delta_{n-j} DeltaHat_j - a_j Delta_{n-j-1} DeltaHat_{j-1}
  // at probe points spread across and beyond the spectrum.
  std::vector<double> d, e;
  jacobi_symmetrized(state, d, e);
  std::vector<double> eig = sym_tridiag_eigenvalues(d, e);
  std::vector<double> probes;
  for (size_t i = 0; i + 1 < eig.size(); ++i)
    probes.push_back(0.5 * (eig[i] + eig[i + 1]));
  probes.push_back(eig.back() + 1.0);
  double scale = std::max(1.0, eig.back() - eig.front());
  for (int j = 1; j < n; ++j)
    for (double z : probes) {
      double lhs = poly_eval(mp.delta[n], z);
      double rhs = poly_eval(mp.delta[n - j], z) * poly_eval(mp.delta_hat[j], z) -
                   state.a[j - 1] * poly_eval(mp.delta[n - j - 1], z) *
                       poly_eval(mp.delta_hat[j - 1], z);
      double mag = std::max({std::fabs(lhs), std::fabs(rhs),
                             std::pow(scale, n)});
      if (std::fabs(lhs - rhs) > 1e-8 * mag)
        throw check_error("minor splitting identity violated at probe " +
                          std::to_string(z));
    }
  return mp;
}

namespace {

TodaState bruhat_step(const TodaState &state0, const TimeVector &t) {
  int n = state0.n();
  Mat a0 = jacobi_dense(state0);
  // Argument sum_j A0^j t_j of the group element.
  Mat arg(n, n);
  Mat p = Mat::identity(n);
  for (int j = 1; j <= std::max(1, t.order()); ++j) {
    p = mat_mul(p, a0);
    if (t(j) != 0.0) arg = mat_add(arg, mat_scale(p, t(j)));
  }
  Mat psi = expm(arg);
  Mat l, u;
  crout_lu(psi, l, u);
  Mat flowed = lower_solve(l, mat_mul(a0, l));
  TodaState st;
  st.t = t;
  st.a.resize(n - 1);
  st.b.resize(n);
  for (int i = 0; i < n; ++i) {
    st.b[i] = flowed(i, i);
    if (i + 1 < n) {
      st.a[i] = flowed(i, i + 1);
      if (std::fabs(flowed(i + 1, i) - 1.0) > 1e-8)
        throw check_error("flowed matrix lost the unit subdiagonal");
    }
  }
  return st;
}

}  // namespace

TodaState bruhat_flow(const TodaState &state0, const TimeVector &t) {
  // The factorization conditioning grows like the exponential of the phase
  // spread, so the flow is split into substeps of bounded spread; the
  // hierarchy flows commute, hence stepping along the ray composes to the
  // same endpoint.
  std::vector<double> d, e;
  jacobi_symmetrized(state0, d, e);
  std::vector<double> eig = sym_tridiag_eigenvalues(d, e);
  double spread = 0.0;
  for (double ev : eig) spread = std::max(spread, std::fabs(phase(ev, t)));
  int steps = std::max(1, (int)std::ceil(spread / 5.0));
  std::vector<double> dt(t.raw());
  for (double &v : dt) v /= (double)steps;
  TodaState cur = state0;
  for (int s = 0; s < steps; ++s) cur = bruhat_step(cur, TimeVector(dt));
  cur.t = t;
  return cur;
}

FlowResiduals flow_invariant_residuals(const SolitonData &data,
                                       const TimeVector &t, int flow_index,
                                       double h) {
  if (!(h > 0.0)) throw input_error("finite-difference step must be positive");
  if (flow_index < 1 || flow_index > TimeVector::max_times)
    throw input_error("flow index out of range");
  int n = data.n();
  FlowResiduals r;
  Mat ac = jacobi_dense(jacobi_matrix(data, t));
  Mat ap = jacobi_dense(jacobi_matrix(data, t.shifted(flow_index, h)));
  Mat am = jacobi_dense(jacobi_matrix(data, t.shifted(flow_index, -h)));
  Mat dadt = mat_scale(mat_add(ap, mat_scale(am, -1.0)), 0.5 / h);
  // Generator of the flow: strictly upper-triangular part of A^j.
  Mat aj = mat_pow(ac, flow_index);
  Mat bj(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) bj(i, j) = aj(i, j);
  Mat comm = mat_add(mat_mul(bj, ac), mat_scale(mat_mul(ac, bj), -1.0));
  r.lax = frobenius_norm(mat_add(dadt, mat_scale(comm, -1.0)));
  // Trace-power invariants along the first flow through t1 in [-1, 1].
  std::vector<double> h0(n);
  Mat a00 = jacobi_dense(jacobi_matrix(data, TimeVector::zero()));
  Mat pw = a00;
  for (int j = 1; j <= n; ++j) {
    pw = mat_mul(pw, a00);
    h0[j - 1] = trace(pw) / (j + 1);
  }
  Mat at = ac;
  Mat pt = at;
  for (int j = 1; j <= n; ++j) {
    pt = mat_mul(pt, at);
    r.conservation_drift =
        std::max(r.conservation_drift, std::fabs(trace(pt) / (j + 1) - h0[j - 1]));
  }
  return r;
}

SpectralWeights spectral_residues(const TodaState &state,
                                  const std::vector<double> &kappa) {
  int n = state.n();
  if ((int)kappa.size() != n)
    throw input_error("spectrum length does not match the state size");
  std::vector<double> d, e;
  jacobi_symmetrized(state, d, e);
  std::vector<double> eig = sym_tridiag_eigenvalues(d, e);
  double span = std::max(1e-300, kappa.back() - kappa.front());
  for (int i = 0; i < n; ++i)
    if (std::fabs(eig[i] - kappa[i]) > 1e-7 * std::max(1.0, span))
      throw input_error("state spectrum does not match the given phases");
  SpectralWeights w;
  w.a.resize(n);
  w.a_hat.resize(n);
  for (int l = 0; l < n; ++l) {
    double denom = 1.0;
    for (int s = 0; s < n; ++s)
      if (s != l) denom *= kappa[l] - kappa[s];
    w.a[l] = trailing_minor_value(state, n - 1, kappa[l]).value() / denom;
    w.a_hat[l] = leading_minor_value(state, n - 1, kappa[l]).value() / denom;
  }
  return w;
}

LogReal dressed_phi(const SolitonData &data, int k, double zeta,
                    const TimeVector &t, double *top_log) {
  int n = data.n();
  if (k < 0 || k > n - 1)
    throw input_error("dressing order must lie in [0, n-1]");
  BlockSpectra sp = block_spectra(jacobi_matrix(data, t));
  LogSum sum;
  double top = -std::numeric_limits<double>::infinity();
  for (int l = 0; l < n; ++l) {
    double coef = data.a[l];
    for (int s = 0; s < n; ++s)
      if (s != l) coef *= zeta - data.kappa[s];
    if (coef == 0.0) continue;
    LogReal term = LogReal::from(coef) * block_char(sp.leading[k], data.kappa[l]);
    term.log_mag += phase(data.kappa[l], t);
    sum.add(term);
    top = std::max(top, term.log_mag);
  }
  if (top_log) *top_log = top;
  return sum.result();
}

BAVectorPair ba_vectors(const SolitonData &data, double zeta,
                        const TimeVector &t) {
  int n = data.n();
  TodaState st = jacobi_matrix(data, t);
  BlockSpectra sp = block_spectra(st);
  double th = phase(zeta, t);
  // Phi(zeta; 0) = Delta_{n-1}(zeta; 0) since mu_0(0) = 1.
  LogReal phi0 = dressed_phi(data, 0, zeta, TimeVector::zero());
  BAVectorPair pair;
  pair.zeta = zeta;
  pair.t = t;
  pair.psi.resize(n);
  pair.psi_sigma.resize(n);
  double log_c = 0.0;  // log c_j = (1/2) sum_{s<=j} log a_s(t)
  for (int j = 0; j < n; ++j) {
    if (j > 0) log_c += 0.5 * std::log(st.a[j - 1]);
    LogReal plus = block_char(sp.leading[j], zeta);
    plus.log_mag += 0.5 * th - log_c;
    pair.psi[j] = plus.value();
    LogSum sum;
    for (int l = 0; l < n; ++l) {
      double coef = data.a[l];
      for (int s = 0; s < n; ++s)
        if (s != l) coef *= zeta - data.kappa[s];
      if (coef == 0.0) continue;
      LogReal term =
          LogReal::from(coef) * block_char(sp.leading[j], data.kappa[l]);
      term.log_mag += phase(data.kappa[l], t);
      sum.add(term);
    }
    LogReal minus = sum.result() / phi0;
    minus.log_mag += -0.5 * th - log_c;
    pair.psi_sigma[j] = minus.value();
  }
  return pair;
}

}  // namespace todakp
