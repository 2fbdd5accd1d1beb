#pragma once

#include <vector>

#include "todakp/common.hpp"

namespace todakp {

// Small dense row-major matrix; everything here is desk scale (n <= 20).
class Mat {
public:
  Mat() = default;
  Mat(int rows, int cols, double fill = 0.0)
      : rows_(rows), cols_(cols), v_((size_t)rows * cols, fill) {}
  static Mat identity(int n) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  double &operator()(int i, int j) { return v_[(size_t)i * cols_ + j]; }
  double operator()(int i, int j) const { return v_[(size_t)i * cols_ + j]; }

private:
  int rows_ = 0, cols_ = 0;
  std::vector<double> v_;
};

Mat mat_mul(const Mat &a, const Mat &b);
Mat mat_add(const Mat &a, const Mat &b);
Mat mat_scale(const Mat &a, double s);
Mat mat_pow(const Mat &a, int p);
double frobenius_norm(const Mat &a);
double trace(const Mat &a);

// exp(A) by scaling and squaring with a Taylor series summed to machine
// precision.  Adequate for the bounded-norm arguments this artifact produces.
Mat expm(const Mat &a);

// LU without pivoting, Crout flavor: A = L * U with L lower triangular
// (carrying the pivots on its diagonal) and U unit upper triangular.
// Pivoting is forbidden here: the factorization must respect the natural
// flag order.  Throws check_error naming the offending minor on breakdown.
void crout_lu(const Mat &a, Mat &l, Mat &u);

// Solves L * X = B for lower-triangular L (general diagonal).
Mat lower_solve(const Mat &l, const Mat &b);

// All eigenvalues (ascending) of a symmetric tridiagonal matrix with
// diagonal d (size m) and off-diagonal e (size m-1), by Sturm-sequence
// bisection.  Exact interlacing of leading/trailing principal submatrices is
// what the divisor theory relies on, so no balancing or shifts.
std::vector<double> sym_tridiag_eigenvalues(const std::vector<double> &d,
                                            const std::vector<double> &e);

// Extended-precision variant.  Divisor trajectories park exponentially close
// to the phase points at large times, and quantities of the form
// (kappa_j - eigenvalue) must keep relative accuracy there.
std::vector<long double> sym_tridiag_eigenvalues_ld(
    const std::vector<long double> &d, const std::vector<long double> &e);

// Monic-polynomial helpers; coefficient arrays are low-to-high degree and
// carry the leading coefficient explicitly (c.back() == 1 for monic).
double poly_eval(const std::vector<double> &c, double zeta);
std::vector<double> poly_from_roots(const std::vector<double> &roots);

// Gaussian elimination with partial pivoting to reduced row echelon form,
// in place.  Used only as a test oracle against closed-form coefficients.
void rref_in_place(Mat &a);

}  // namespace todakp
