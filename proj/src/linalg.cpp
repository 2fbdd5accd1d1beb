#include "todakp/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace todakp {

Mat mat_mul(const Mat &a, const Mat &b) {
  Mat c(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int k = 0; k < a.cols(); ++k) {
      double aik = a(i, k);
      if (aik == 0.0) continue;
      for (int j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

Mat mat_add(const Mat &a, const Mat &b) {
  Mat c(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) + b(i, j);
  return c;
}

Mat mat_scale(const Mat &a, double s) {
  Mat c(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) * s;
  return c;
}

Mat mat_pow(const Mat &a, int p) {
  Mat r = Mat::identity(a.rows());
  for (int i = 0; i < p; ++i) r = mat_mul(r, a);
  return r;
}

double frobenius_norm(const Mat &a) {
  double s = 0.0;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

double trace(const Mat &a) {
  double s = 0.0;
  for (int i = 0; i < a.rows(); ++i) s += a(i, i);
  return s;
}

static double norm_inf(const Mat &a) {
  double m = 0.0;
  for (int i = 0; i < a.rows(); ++i) {
    double r = 0.0;
    for (int j = 0; j < a.cols(); ++j) r += std::fabs(a(i, j));
    m = std::max(m, r);
  }
  return m;
}

Mat expm(const Mat &a) {
  int n = a.rows();
  // Scale so the Taylor series of exp converges fast, then square back.
  double nrm = norm_inf(a);
  int s = 0;
  while (nrm > 0.5) {
    nrm *= 0.5;
    ++s;
  }
  Mat t = mat_scale(a, std::ldexp(1.0, -s));
  Mat sum = Mat::identity(n);
  Mat term = Mat::identity(n);
  for (int k = 1; k <= 64; ++k) {
    term = mat_scale(mat_mul(term, t), 1.0 / k);
    sum = mat_add(sum, term);
    if (frobenius_norm(term) <=
        std::numeric_limits<double>::epsilon() * frobenius_norm(sum))
      break;
  }
  for (int i = 0; i < s; ++i) sum = mat_mul(sum, sum);
  return sum;
}

void crout_lu(const Mat &a, Mat &l, Mat &u) {
  int n = a.rows();
  l = Mat(n, n);
  u = Mat::identity(n);
  for (int j = 0; j < n; ++j) {
    for (int i = j; i < n; ++i) {
      double s = a(i, j);
      for (int k = 0; k < j; ++k) s -= l(i, k) * u(k, j);
      l(i, j) = s;
    }
    double piv = l(j, j);
    double scale = norm_inf(a);
    if (std::fabs(piv) <= 1e-14 * scale)
      throw check_error("LU factorization breakdown at leading minor " +
                        std::to_string(j + 1));
    for (int i = j + 1; i < n; ++i) {
      double s = a(j, i);
      for (int k = 0; k < j; ++k) s -= l(j, k) * u(k, i);
      u(j, i) = s / piv;
    }
  }
}

Mat lower_solve(const Mat &l, const Mat &b) {
  int n = l.rows();
  Mat x(n, b.cols());
  for (int c = 0; c < b.cols(); ++c)
    for (int i = 0; i < n; ++i) {
      double s = b(i, c);
      for (int k = 0; k < i; ++k) s -= l(i, k) * x(k, c);
      x(i, c) = s / l(i, i);
    }
  return x;
}

// Number of eigenvalues of the tridiagonal matrix strictly below x,
// by the standard Sturm-sequence count with underflow guards.
static int sturm_count(const std::vector<double> &d,
                       const std::vector<double> &e2, double x) {
  int count = 0;
  double q = 1.0;
  int m = (int)d.size();
  for (int i = 0; i < m; ++i) {
    q = d[i] - x - ((i > 0) ? e2[i - 1] / q : 0.0);
    if (q == 0.0) q = -std::numeric_limits<double>::min();
    if (q < 0.0) ++count;
  }
  return count;
}

std::vector<double> sym_tridiag_eigenvalues(const std::vector<double> &d,
                                            const std::vector<double> &e) {
  int m = (int)d.size();
  if (m == 0) return {};
  std::vector<double> e2(std::max(0, m - 1));
  for (int i = 0; i + 1 < m; ++i) e2[i] = e[i] * e[i];
  // Gershgorin interval.
  double lo = d[0], hi = d[0];
  for (int i = 0; i < m; ++i) {
    double r = 0.0;
    if (i > 0) r += std::fabs(e[i - 1]);
    if (i + 1 < m) r += std::fabs(e[i]);
    lo = std::min(lo, d[i] - r);
    hi = std::max(hi, d[i] + r);
  }
  double width = hi - lo;
  lo -= 1e-12 * (1.0 + std::fabs(lo)) + 1e-300;
  hi += 1e-12 * (1.0 + std::fabs(hi)) + 1e-300;
  std::vector<double> eig(m);
  for (int k = 0; k < m; ++k) {
    // Bisect until the k-th eigenvalue is pinned to machine precision.
    double a = lo, b = hi;
    for (int it = 0; it < 120; ++it) {
      double mid = 0.5 * (a + b);
      if (sturm_count(d, e2, mid) <= k)
        a = mid;
      else
        b = mid;
      if (b - a <=
          std::numeric_limits<double>::epsilon() * (std::fabs(a) + std::fabs(b)) +
              1e-18 * width)
        break;
    }
    eig[k] = 0.5 * (a + b);
  }
  std::sort(eig.begin(), eig.end());
  return eig;
}

static int sturm_count_ld(const std::vector<long double> &d,
                          const std::vector<long double> &e2, long double x) {
  int count = 0;
  long double q = 1.0L;
  int m = (int)d.size();
  for (int i = 0; i < m; ++i) {
    q = d[i] - x - ((i > 0) ? e2[i - 1] / q : 0.0L);
    if (q == 0.0L) q = -std::numeric_limits<long double>::min();
    if (q < 0.0L) ++count;
  }
  return count;
}

std::vector<long double> sym_tridiag_eigenvalues_ld(
    const std::vector<long double> &d, const std::vector<long double> &e) {
  int m = (int)d.size();
  if (m == 0) return {};
  std::vector<long double> e2(std::max(0, m - 1));
  for (int i = 0; i + 1 < m; ++i) e2[i] = e[i] * e[i];
  long double lo = d[0], hi = d[0];
  for (int i = 0; i < m; ++i) {
    long double r = 0.0L;
    if (i > 0) r += std::fabs((double)e[i - 1]);
    if (i + 1 < m) r += std::fabs((double)e[i]);
    lo = std::min(lo, d[i] - r);
    hi = std::max(hi, d[i] + r);
  }
  long double width = hi - lo;
  lo -= 1e-15L * (1.0L + std::fabs((double)lo)) + 1e-300L;
  hi += 1e-15L * (1.0L + std::fabs((double)hi)) + 1e-300L;
  std::vector<long double> eig(m);
  for (int k = 0; k < m; ++k) {
    long double a = lo, b = hi;
    for (int it = 0; it < 160; ++it) {
      long double mid = 0.5L * (a + b);
      if (sturm_count_ld(d, e2, mid) <= k)
        a = mid;
      else
        b = mid;
      if (b - a <= std::numeric_limits<long double>::epsilon() *
                       (std::fabs((double)a) + std::fabs((double)b)) +
                   1e-22L * width)
        break;
    }
    eig[k] = 0.5L * (a + b);
  }
  std::sort(eig.begin(), eig.end());
  return eig;
}

double poly_eval(const std::vector<double> &c, double zeta) {
  double v = 0.0;
  for (int i = (int)c.size() - 1; i >= 0; --i) v = v * zeta + c[i];
  return v;
}

std::vector<double> poly_from_roots(const std::vector<double> &roots) {
  std::vector<double> c{1.0};
  for (double r : roots) {
    std::vector<double> nc(c.size() + 1, 0.0);
    for (size_t i = 0; i < c.size(); ++i) {
      nc[i + 1] += c[i];
      nc[i] -= r * c[i];
    }
    c = nc;
  }
  return c;
}

void rref_in_place(Mat &a) {
  int lead = 0;
  for (int r = 0; r < a.rows() && lead < a.cols(); ++r, ++lead) {
    int piv = r;
    for (int i = r; i < a.rows(); ++i)
      if (std::fabs(a(i, lead)) > std::fabs(a(piv, lead))) piv = i;
    if (a(piv, lead) == 0.0) {
      --r;
      continue;
    }
    if (piv != r)
      for (int j = 0; j < a.cols(); ++j) std::swap(a(piv, j), a(r, j));
    double d = a(r, lead);
    for (int j = 0; j < a.cols(); ++j) a(r, j) /= d;
    for (int i = 0; i < a.rows(); ++i) {
      if (i == r) continue;
      double f = a(i, lead);
      if (f == 0.0) continue;
      for (int j = 0; j < a.cols(); ++j) a(i, j) -= f * a(r, j);
    }
  }
}

}  // namespace todakp
