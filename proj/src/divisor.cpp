#include "todakp/divisor.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>

namespace todakp {

namespace {

double min_distance(double z,
                    std::initializer_list<const std::vector<long double> *>
                        point_sets) {
  long double dm = std::numeric_limits<long double>::infinity();
  for (const auto *set : point_sets)
    for (long double q : *set) dm = std::min(dm, fabsl((long double)z - q));
  return (double)dm;
}

}  // namespace

std::vector<double> vacuum_divisor(const SolitonData &data,
                                   const TimeVector &t) {
  int n = data.n();
  BlockSpectra sp = block_spectra(jacobi_matrix(data, t));
  const std::vector<long double> &bl = sp.trailing[n - 1];
  double tol = kCollisionTolFactor * data.span();
  std::vector<double> b(bl.begin(), bl.end());
  // Interlacing with the phases is structural; allow rounding-level overlap
  // with a gap end but reject anything that genuinely escaped.
  for (int r = 0; r < (int)b.size(); ++r)
    if (b[r] < data.kappa[r] - tol || b[r] > data.kappa[r + 1] + tol)
      throw check_error("vacuum divisor point " + std::to_string(r + 1) +
                        " escaped its phase gap");
  return b;
}

OvalAssignment oval_assignment(const std::vector<double> &kappa,
                               const Divisor &d) {
  int n = (int)kappa.size();
  OvalAssignment oa;
  oa.before.assign(n - 1, 0);
  oa.after.assign(n - 1, 0);
  auto naive_oval = [&](double z) {
    for (int m = 0; m + 1 < n; ++m)
      if (z >= kappa[m] && z <= kappa[m + 1]) return m + 1;
    return z < kappa.front() ? 1 : n - 1;
  };
  for (double g : d.gammas) ++oa.before[naive_oval(g) - 1];
  for (double dl : d.deltas) ++oa.before[naive_oval(dl) - 1];
  for (int ov : d.gamma_oval) ++oa.after[ov - 1];
  for (int ov : d.delta_oval) ++oa.after[ov - 1];
  return oa;
}

Divisor compatible_divisor(const SolitonData &data, int k,
                           const TimeVector &t) {
  int n = data.n();
  if (k < 1 || k > n - 1)
    throw input_error("order k must lie in [1, n-1], got " + std::to_string(k));
  TodaState st = jacobi_matrix(data, t);
  BlockSpectra sp = block_spectra(st);
  const std::vector<long double> &gl = sp.leading[k];
  const std::vector<long double> &dl = sp.trailing[n - k - 1];
  Divisor d;
  d.k = k;
  d.t = t;
  d.gammas.assign(gl.begin(), gl.end());
  d.deltas.assign(dl.begin(), dl.end());
  d.gamma_oval.assign(d.gammas.size(), 0);
  d.delta_oval.assign(d.deltas.size(), 0);
  double tol = kCollisionTolFactor * data.span();
  // A collision is a gamma AND a delta landing on the same interior phase;
  // the counting rule sends the delta to the left oval and the gamma to the
  // right one.  A lone point near a phase is ordinary: it sits deep in one
  // of the two adjacent ovals and merely parks close to the shared end.
  std::vector<char> placed_g(d.gammas.size(), 0), placed_d(d.deltas.size(), 0);
  for (int j = 1; j + 1 < n; ++j) {
    int gi = -1, di = -1;
    for (int i = 0; i < (int)gl.size(); ++i)
      if (fabsl(gl[i] - (long double)data.kappa[j]) < tol) gi = i;
    for (int i = 0; i < (int)dl.size(); ++i)
      if (fabsl(dl[i] - (long double)data.kappa[j]) < tol) di = i;
    if (gi >= 0 && di >= 0) {
      d.collisions.push_back(DivisorCollision{j, gi, di});
      placed_g[gi] = placed_d[di] = 1;
      d.gamma_oval[gi] = j + 1;
      d.delta_oval[di] = j;
    }
  }
  d.generic = d.collisions.empty();
  // Position-based assignment for the free points, with the side of a
  // near-phase point decided in extended precision.  Points beyond the
  // outermost phases by more than the tolerance have left the finite ovals.
  auto oval_of = [&](long double z) {
    if (z <= (long double)data.kappa.front()) {
      if ((long double)data.kappa.front() - z > tol)
        throw check_error("divisor point in the infinite oval");
      return 1;
    }
    if (z >= (long double)data.kappa.back()) {
      if (z - (long double)data.kappa.back() > tol)
        throw check_error("divisor point in the infinite oval");
      return n - 1;
    }
    int i = 0;
    while (i + 2 < n && z >= (long double)data.kappa[i + 1]) ++i;
    return i + 1;
  };
  for (int i = 0; i < (int)gl.size(); ++i)
    if (!placed_g[i]) d.gamma_oval[i] = oval_of(gl[i]);
  for (int i = 0; i < (int)dl.size(); ++i)
    if (!placed_d[i]) d.delta_oval[i] = oval_of(dl[i]);
  // One point per finite oval.  A free point within the tolerance of an
  // interior phase may have been put on the wrong side of it; rebalance
  // such points toward empty neighbor ovals before declaring failure.
  auto occupancy = [&] {
    std::vector<int> occ(n - 1, 0);
    for (int ov : d.gamma_oval) ++occ[ov - 1];
    for (int ov : d.delta_oval) ++occ[ov - 1];
    return occ;
  };
  auto movable = [&](int i, bool gamma) {
    if (gamma ? placed_g[i] : placed_d[i]) return 0;
    long double z = gamma ? gl[i] : dl[i];
    int ov = gamma ? d.gamma_oval[i] : d.delta_oval[i];
    // Movable toward the oval across the nearest end if that end is an
    // interior phase within the tolerance.
    if (ov > 1 && fabsl(z - (long double)data.kappa[ov - 1]) < tol)
      return ov - 1;
    if (ov < n - 1 && fabsl(z - (long double)data.kappa[ov]) < tol)
      return ov + 1;
    return 0;
  };
  for (int pass = 0; pass < n; ++pass) {
    std::vector<int> occ = occupancy();
    bool moved = false;
    for (int ov = 1; ov <= n - 1 && !moved; ++ov) {
      if (occ[ov - 1] != 0) continue;
      for (int i = 0; i < (int)gl.size() && !moved; ++i)
        if (movable(i, true) == ov && occ[d.gamma_oval[i] - 1] >= 2) {
          d.gamma_oval[i] = ov;
          moved = true;
        }
      for (int i = 0; i < (int)dl.size() && !moved; ++i)
        if (movable(i, false) == ov && occ[d.delta_oval[i] - 1] >= 2) {
          d.delta_oval[i] = ov;
          moved = true;
        }
    }
    if (!moved) break;
  }
  std::vector<int> occ = occupancy();
  for (int m = 0; m + 1 < n; ++m)
    if (occ[m] != 1)
      throw check_error("oval " + std::to_string(m + 1) + " holds " +
                        std::to_string(occ[m]) + " divisor points");
  return d;
}

SolitonData invert_divisor(const std::vector<double> &kappa,
                           const Divisor &d) {
  int n = (int)kappa.size();
  if ((int)d.gammas.size() != d.k || (int)d.deltas.size() != n - d.k - 1)
    throw input_error("divisor sizes do not match order k and n");
  std::vector<double> w(n);
  for (int j = 0; j < n; ++j) {
    int cg = -1, cd = -1;
    for (const auto &c : d.collisions)
      if (c.kappa_index == j) {
        cg = c.gamma_index;
        cd = c.delta_index;
      }
    double num = 1.0, den = 1.0;
    for (int s = 0; s < (int)d.deltas.size(); ++s)
      if (s != cd) num *= kappa[j] - d.deltas[s];
    for (int r = 0; r < (int)d.gammas.size(); ++r)
      if (r != cg) den *= kappa[j] - d.gammas[r];
    for (int l = 0; l < n; ++l)
      if (l != j) den *= kappa[j] - kappa[l];
    double v = num / den;
    if (cg >= 0) v = -v;  // colliding pair dropped, sign flipped
    if (!(v > 0.0))
      throw input_error("divisor is not realizable: weight " +
                        std::to_string(j + 1) + " came out non-positive");
    w[j] = v;
  }
  return make_soliton_data(kappa, w);
}

DivisorIdentityResiduals divisor_identity_residuals(const SolitonData &data,
                                                    int k,
                                                    const TimeVector &t) {
  int n = data.n();
  if (k < 1 || k > n - 1)
    throw input_error("order k must lie in [1, n-1], got " + std::to_string(k));
  DivisorIdentityResiduals res;
  TodaState st = jacobi_matrix(data, t);
  BlockSpectra sp = block_spectra(st);
  BlockSpectra sp0 = block_spectra(jacobi_matrix(data, TimeVector::zero()));
  const std::vector<long double> &gam_k = sp.leading[k];
  const std::vector<long double> &del_k = sp.trailing[n - k - 1];
  const std::vector<long double> &gam_km1 = sp.leading[k - 1];
  const std::vector<long double> &del_km1 = sp.trailing[n - k];
  const std::vector<long double> &b0 = sp0.trailing[n - 1];
  const std::vector<long double> &bt = sp.trailing[n - 1];
  double guard = kAnchorGuardFactor * data.span();
  // Recursion between consecutive orders at probe points.
  std::vector<double> probes;
  for (int j = 0; j + 1 < n; ++j)
    probes.push_back(0.5 * (data.kappa[j] + data.kappa[j + 1]));
  probes.push_back(data.kappa.back() + 1.0);
  for (double z : probes) {
    double lhs = (block_char(del_km1, z) * block_char(gam_k, z)).value() -
                 st.a[k - 1] *
                     (block_char(del_k, z) * block_char(gam_km1, z)).value();
    double rhs = 1.0;
    for (double q : data.kappa) rhs *= z - q;
    res.k_recursion =
        std::max(res.k_recursion, std::fabs(lhs - rhs) / std::fabs(rhs));
  }
  // Gluing form in the log domain, at phases whose factors are resolvable.
  double log_pa = 0.0;
  for (int s = 0; s < k; ++s) log_pa += std::log(st.a[s]);
  double log_tau1 = tau(data, 1, t).log_mag;
  for (int j = 0; j < n; ++j) {
    double z = data.kappa[j];
    if (min_distance(z, {&b0, &gam_k, &del_k}) < guard) continue;
    LogReal lhs = block_char(b0, z) * block_char(gam_k, z);
    lhs.log_mag += phase(z, t);
    LogReal rhs = block_char(del_k, z);
    rhs.log_mag += log_tau1 + log_pa;
    if (lhs.sign != rhs.sign)
      res.gluing_form = std::max(res.gluing_form, 1.0);
    else
      res.gluing_form = std::max(
          res.gluing_form, std::fabs(std::expm1(lhs.log_mag - rhs.log_mag)));
  }
  // tau_1 from the vacuum divisor trajectories, every resolvable anchor.
  for (int l = 0; l < n; ++l) {
    double z = data.kappa[l];
    if (min_distance(z, {&b0, &bt}) < guard) continue;
    LogReal q = block_char(b0, z) / block_char(bt, z);
    if (q.sign != 1) {
      res.tau1 = std::max(res.tau1, 1.0);
      continue;
    }
    double lv = phase(z, t) + q.log_mag;
    res.tau1 = std::max(res.tau1, std::fabs(std::expm1(lv - log_tau1)));
  }
  // Echelon-tail pairing, top order only.
  if (k == n - 1) {
    res.has_rref_pairing = true;
    Mat x = rref_coefficients(data, n - 1);
    std::vector<double> xd(n);
    for (int i = 0; i < n - 1; ++i) xd[i] = std::fabs(x(i, 0));
    xd[n - 1] = 1.0;
    for (int i = 0; i + 1 < n; ++i) {
      if (min_distance(data.kappa[i], {&gam_k}) < guard ||
          min_distance(data.kappa[i + 1], {&gam_k}) < guard)
        continue;
      LogReal lhs = LogReal::from(xd[i + 1]) * block_char(gam_k, data.kappa[i]);
      lhs.log_mag += phase(data.kappa[i], t);
      LogReal rhs = LogReal::from(xd[i]) * block_char(gam_k, data.kappa[i + 1]);
      rhs.log_mag += phase(data.kappa[i + 1], t);
      // The two terms must cancel: equal magnitude, opposite sign.
      double r;
      if (lhs.sign != -rhs.sign)
        r = 1.0;
      else
        r = std::fabs(std::expm1(lhs.log_mag - rhs.log_mag));
      res.rref_pairing = std::max(res.rref_pairing, r);
    }
  }
  return res;
}

TodaState toda_from_divisor_flow(const SolitonData &data, int anchor_j,
                                 const TimeVector &t, double h) {
  int n = data.n();
  if (anchor_j < 1 || anchor_j > n)
    throw input_error("anchor index out of range");
  if (!(h > 0.0)) throw input_error("finite-difference step must be positive");
  long double z = data.kappa[anchor_j - 1];
  double tol = kCollisionTolFactor * data.span();
  // Divisor parts per order at t and at the x-shifted stencil points.
  BlockSpectra sc = block_spectra(jacobi_matrix(data, t));
  BlockSpectra sm = block_spectra(jacobi_matrix(data, t.shifted(1, -h)));
  BlockSpectra sp = block_spectra(jacobi_matrix(data, t.shifted(1, h)));
  // gam[k] has k points, del[k] has n-k-1 points, k = 0..n-1.
  auto gam = [&](const BlockSpectra &s, int k) -> const std::vector<long double> & {
    return s.leading[k];
  };
  auto del = [&](const BlockSpectra &s, int k) -> const std::vector<long double> & {
    return s.trailing[n - k - 1];
  };
  for (int k = 0; k < n; ++k) {
    for (long double q : gam(sc, k))
      if (fabsl(z - q) < tol)
        throw input_error("anchor phase collides with a divisor point");
    for (long double q : del(sc, k))
      if (fabsl(z - q) < tol)
        throw input_error("anchor phase collides with a divisor point");
  }
  TodaState st;
  st.t = t;
  st.a.resize(n - 1);
  st.b.resize(n);
  auto prod_over = [&](const std::vector<long double> &pts) {
    long double p = 1.0L;
    for (long double q : pts) p *= z - q;
    return p;
  };
  // a_k from the cross ratio of consecutive divisor orders at the anchor.
  for (int k = 1; k < n; ++k)
    st.a[k - 1] = (double)((prod_over(gam(sc, k)) * prod_over(del(sc, k - 1))) /
                           (prod_over(del(sc, k)) * prod_over(gam(sc, k - 1))));
  // b_{k+1} = kappa_anchor - sum gamma'/(z-gamma) + sum delta'/(z-delta).
  long double hh = (long double)h;
  for (int k = 0; k < n; ++k) {
    long double v = z;
    const auto &g = gam(sc, k), &gm = gam(sm, k), &gp = gam(sp, k);
    const auto &dd = del(sc, k), &dm = del(sm, k), &dp = del(sp, k);
    for (size_t i = 0; i < g.size(); ++i)
      v -= (gp[i] - gm[i]) / (2.0L * hh) / (z - g[i]);
    for (size_t i = 0; i < dd.size(); ++i)
      v += (dp[i] - dm[i]) / (2.0L * hh) / (z - dd[i]);
    st.b[k] = (double)v;
  }
  return st;
}

}  // namespace todakp
