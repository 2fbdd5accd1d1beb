#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace todakp {

// Domain errors: bad user input (CLI exit code 1).
struct input_error : std::runtime_error {
  explicit input_error(const std::string &msg) : std::runtime_error(msg) {}
};

// Verification errors: an internal cross-check failed (CLI exit code 2).
struct check_error : std::runtime_error {
  explicit check_error(const std::string &msg) : std::runtime_error(msg) {}
};

// Hierarchy times (t_1 = x, t_2 = y, t_3 = t, ...); entries beyond the stored
// length are implicitly zero.  The cap keeps matrix-exponential arguments and
// phase polynomials in a sane range for a desk-scale tool.
class TimeVector {
public:
  static constexpr int max_times = 8;

  TimeVector() = default;
  explicit TimeVector(std::vector<double> times) : times_(std::move(times)) {
    if ((int)times_.size() > max_times)
      throw input_error("time vector longer than " + std::to_string(max_times));
    for (double v : times_)
      if (!std::isfinite(v)) throw input_error("non-finite time component");
  }
  static TimeVector zero() { return TimeVector(); }

  // 1-based hierarchy index.
  double operator()(int i) const {
    return (i >= 1 && i <= (int)times_.size()) ? times_[i - 1] : 0.0;
  }
  int order() const { return (int)times_.size(); }
  const std::vector<double> &raw() const { return times_; }

  TimeVector negated() const {
    std::vector<double> v(times_);
    for (double &x : v) x = -x;
    return TimeVector(v);
  }
  // Shifts component i (1-based) by h; extends with zeros if needed.
  TimeVector shifted(int i, double h) const {
    std::vector<double> v(times_);
    if ((int)v.size() < i) v.resize(i, 0.0);
    v[i - 1] += h;
    return TimeVector(v);
  }
  double max_abs() const {
    double m = 0.0;
    for (double v : times_) m = std::max(m, std::fabs(v));
    return m;
  }

private:
  std::vector<double> times_;
};

// theta(zeta; t) = sum_i zeta^i t_i, the phase of the heat hierarchy.
inline double phase(double zeta, const TimeVector &t) {
  double s = 0.0, p = 1.0;
  for (int i = 1; i <= t.order(); ++i) {
    p *= zeta;
    s += p * t(i);
  }
  return s;
}

// d(theta)/dt_l = zeta^l evaluated for the first flow: d(theta)/dx = zeta.

// Sign + log-magnitude scalar.  Supports products and signed sums of terms
// whose magnitudes span far beyond double range.
struct LogReal {
  double log_mag = -std::numeric_limits<double>::infinity();
  int sign = 0;  // -1, 0, +1

  static LogReal from(double x) {
    LogReal r;
    if (x == 0.0) return r;
    r.sign = x > 0 ? 1 : -1;
    r.log_mag = std::log(std::fabs(x));
    return r;
  }
  static LogReal exp_of(double log_x) {
    LogReal r;
    r.sign = 1;
    r.log_mag = log_x;
    return r;
  }
  double value() const { return sign == 0 ? 0.0 : sign * std::exp(log_mag); }
  bool is_zero() const { return sign == 0; }

  LogReal operator*(const LogReal &o) const {
    LogReal r;
    r.sign = sign * o.sign;
    r.log_mag = (r.sign == 0) ? -std::numeric_limits<double>::infinity()
                              : log_mag + o.log_mag;
    return r;
  }
  LogReal operator/(const LogReal &o) const {
    if (o.sign == 0) throw input_error("LogReal division by zero");
    LogReal r;
    r.sign = sign * o.sign;
    r.log_mag = (sign == 0) ? -std::numeric_limits<double>::infinity()
                            : log_mag - o.log_mag;
    return r;
  }
};

// Signed log-sum-exp: accumulates sum(sign_i * exp(log_i)) in a cancellation-
// aware way (all terms rescaled by the max magnitude).
class LogSum {
public:
  void add(const LogReal &term) {
    if (term.sign != 0) terms_.push_back(term);
  }
  void add(int sgn, double log_mag) {
    if (sgn != 0) terms_.push_back(LogReal{log_mag, sgn});
  }
  LogReal result() const {
    if (terms_.empty()) return LogReal{};
    double m = terms_[0].log_mag;
    for (const auto &t : terms_) m = std::max(m, t.log_mag);
    double acc = 0.0;
    for (const auto &t : terms_) acc += t.sign * std::exp(t.log_mag - m);
    if (acc == 0.0) return LogReal{};
    LogReal r;
    r.sign = acc > 0 ? 1 : -1;
    r.log_mag = m + std::log(std::fabs(acc));
    return r;
  }

private:
  std::vector<LogReal> terms_;
};

// Relative gap floor used everywhere a degeneracy must be rejected/detected.
constexpr double kCollisionTolFactor = 1e-9;

// Conditioning guard for identity checks anchored at explicit points.  Minor
// roots approach the phase points exponentially fast in time, and once a root
// sits closer to an anchor than this fraction of the phase span, the distance
// itself is no longer resolvable from double-precision lattice coefficients,
// so such anchors are excluded from relative comparisons.
constexpr double kAnchorGuardFactor = 1e-6;

inline double rel_diff(double x, double y) {
  double s = std::max(std::fabs(x), std::fabs(y));
  return s == 0.0 ? 0.0 : std::fabs(x - y) / s;
}

}  // namespace todakp
