#include "todakp/tau_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace todakp {

namespace {

constexpr int kSubsetCap = 20;

// Visits all k-subsets of {0..n-1} in lexicographic order.
template <typename F>
void for_each_subset(int n, int k, F &&body) {
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    body(idx);
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace

HeatBasisSample heat_basis(const SolitonData &data, const TimeVector &t,
                           int order) {
  if (order < 0) throw input_error("heat basis order must be >= 0");
  int n = data.n();
  HeatBasisSample s;
  s.theta.resize(n);
  for (int j = 0; j < n; ++j) s.theta[j] = phase(data.kappa[j], t);
  s.log_scale = *std::max_element(s.theta.begin(), s.theta.end());
  s.mu.assign(order + 1, 0.0);
  for (int j = 0; j < n; ++j) {
    double w = data.a[j] * std::exp(s.theta[j] - s.log_scale);
    double p = 1.0;
    for (int i = 0; i <= order; ++i) {
      s.mu[i] += w * p;
      p *= data.kappa[j];
    }
  }
  // Dual moments: reversed flow with the reciprocal-alpha weights.
  std::vector<double> ah = dual_weights(data);
  TimeVector mt = t.negated();
  double mx = phase(data.kappa[0], mt);
  for (int j = 1; j < n; ++j) mx = std::max(mx, phase(data.kappa[j], mt));
  s.log_scale_hat = mx;
  s.mu_hat.assign(order + 1, 0.0);
  for (int j = 0; j < n; ++j) {
    double w = ah[j] * std::exp(phase(data.kappa[j], mt) - mx);
    double p = 1.0;
    for (int i = 0; i <= order; ++i) {
      s.mu_hat[i] += w * p;
      p *= data.kappa[j];
    }
  }
  return s;
}

TauValue tau(const SolitonData &data, int k, const TimeVector &t) {
  int n = data.n();
  if (k < 0 || k > n)
    throw input_error("tau order must lie in [0, n], got " + std::to_string(k));
  if (n > kSubsetCap)
    throw input_error("subset enumeration capped at n = " +
                      std::to_string(kSubsetCap));
  TauValue tv;
  if (k == 0) return tv;  // tau_0 = 1
  std::vector<double> la(n), th(n);
  for (int j = 0; j < n; ++j) {
    la[j] = std::log(data.a[j]);
    th[j] = phase(data.kappa[j], t);
  }
  std::vector<double> logs;
  double mx = -std::numeric_limits<double>::infinity();
  for_each_subset(n, k, [&](const std::vector<int> &idx) {
    double l = 0.0;
    for (int s = 0; s < k; ++s) {
      l += la[idx[s]] + th[idx[s]];
      for (int r = 0; r < s; ++r)
        l += 2.0 * std::log(data.kappa[idx[s]] - data.kappa[idx[r]]);
    }
    logs.push_back(l);
    mx = std::max(mx, l);
  });
  double acc = 0.0;
  for (double l : logs) acc += std::exp(l - mx);
  tv.sign = 1;
  tv.log_mag = mx + std::log(acc);
  return tv;
}

PhaseMoments phase_moments(const SolitonData &data, int k,
                           const TimeVector &t) {
  int n = data.n();
  if (k < 0 || k > n)
    throw input_error("tau order must lie in [0, n], got " + std::to_string(k));
  PhaseMoments pm;
  if (k == 0) {
    pm.s0 = 1.0;
    return pm;  // tau_0 = 1: no phase content
  }
  std::vector<double> la(n), th(n);
  for (int j = 0; j < n; ++j) {
    la[j] = std::log(data.a[j]);
    th[j] = phase(data.kappa[j], t);
  }
  std::vector<double> logs, speeds;
  double mx = -std::numeric_limits<double>::infinity();
  for_each_subset(n, k, [&](const std::vector<int> &idx) {
    double l = 0.0, sI = 0.0;
    for (int s = 0; s < k; ++s) {
      l += la[idx[s]] + th[idx[s]];
      sI += data.kappa[idx[s]];
      for (int r = 0; r < s; ++r)
        l += 2.0 * std::log(data.kappa[idx[s]] - data.kappa[idx[r]]);
    }
    logs.push_back(l);
    speeds.push_back(sI);
    mx = std::max(mx, l);
  });
  pm.shift = mx;
  for (size_t i = 0; i < logs.size(); ++i) {
    double e = std::exp(logs[i] - mx);
    pm.s0 += e;
    pm.s1 += e * speeds[i];
    pm.s2 += e * speeds[i] * speeds[i];
  }
  pm.dx = pm.s1 / pm.s0;
  return pm;
}

std::vector<double> tau_x_jet(const SolitonData &data, int k,
                              const TimeVector &t, int m, double *shift) {
  int n = data.n();
  if (k < 0 || k > n)
    throw input_error("tau order must lie in [0, n], got " + std::to_string(k));
  std::vector<double> jet(m + 1, 0.0);
  if (k == 0) {
    jet[0] = 1.0;
    if (shift) *shift = 0.0;
    return jet;  // tau_0 = 1: all derivatives vanish
  }
  std::vector<double> la(n), th(n);
  for (int j = 0; j < n; ++j) {
    la[j] = std::log(data.a[j]);
    th[j] = phase(data.kappa[j], t);
  }
  std::vector<double> logs, speeds;
  double mx = -std::numeric_limits<double>::infinity();
  for_each_subset(n, k, [&](const std::vector<int> &idx) {
    double l = 0.0, sI = 0.0;
    for (int s = 0; s < k; ++s) {
      l += la[idx[s]] + th[idx[s]];
      sI += data.kappa[idx[s]];
      for (int r = 0; r < s; ++r)
        l += 2.0 * std::log(data.kappa[idx[s]] - data.kappa[idx[r]]);
    }
    logs.push_back(l);
    speeds.push_back(sI);
    mx = std::max(mx, l);
  });
  for (size_t i = 0; i < logs.size(); ++i) {
    double e = std::exp(logs[i] - mx);
    double p = 1.0;
    for (int r = 0; r <= m; ++r) {
      jet[r] += e * p;
      p *= speeds[i];
    }
  }
  if (shift) *shift = mx;
  return jet;
}

double kp_field_point(const SolitonData &data, int k, double x, double y,
                      double t3) {
  PhaseMoments pm = phase_moments(data, k, TimeVector({x, y, t3}));
  if (k == 0) return 0.0;
  // Weighted variance of the subset speeds; manifestly >= 0 and bounded.
  return 2.0 * (pm.s2 * pm.s0 - pm.s1 * pm.s1) / (pm.s0 * pm.s0);
}

std::vector<double> kp_field(const SolitonData &data, int k,
                             const std::vector<GridPoint> &grid) {
  std::vector<double> u;
  u.reserve(grid.size());
  for (const auto &g : grid)
    u.push_back(kp_field_point(data, k, g.x, g.y, g.t3));
  return u;
}

}  // namespace todakp
