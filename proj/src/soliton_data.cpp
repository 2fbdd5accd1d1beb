#include "todakp/soliton_data.hpp"

#include <cmath>

namespace todakp {

SolitonData make_soliton_data(const std::vector<double> &kappa,
                              const std::vector<double> &weights) {
  int n = (int)kappa.size();
  if (n < 2) throw input_error("need at least two phases, got " + std::to_string(n));
  if ((int)weights.size() != n)
    throw input_error("phase and weight counts differ (" + std::to_string(n) +
                      " vs " + std::to_string(weights.size()) + ")");
  for (double v : kappa)
    if (!std::isfinite(v)) throw input_error("non-finite phase");
  double span = kappa.back() - kappa.front();
  for (int j = 0; j + 1 < n; ++j)
    if (!(kappa[j + 1] - kappa[j] > kCollisionTolFactor * span))
      throw input_error("phases must increase strictly (gap " +
                        std::to_string(j + 1) + " below the degeneracy floor)");
  double sum = 0.0;
  for (int j = 0; j < n; ++j) {
    if (!(weights[j] > 0.0))
      throw input_error("weight " + std::to_string(j + 1) +
                        " must be positive, got " + std::to_string(weights[j]));
    sum += weights[j];
  }
  SolitonData d;
  d.kappa = kappa;
  d.a.resize(n);
  for (int j = 0; j < n; ++j) d.a[j] = weights[j] / sum;
  return d;
}

AlphaVector alpha_coordinates(const SolitonData &data) {
  int n = data.n();
  std::vector<double> alpha(n);
  for (int j = 0; j < n; ++j) {
    double p = data.a[j];
    for (int m = 0; m < n; ++m)
      if (m != j) p *= data.kappa[j] - data.kappa[m];
    // (-1)^(n-1-j) with 0-based j equals (-1)^(n-j) for 1-based indexing.
    if ((n - 1 - j) % 2 != 0) p = -p;
    alpha[j] = p;
  }
  double first = alpha[0];
  for (double &v : alpha) v /= first;
  return AlphaVector{alpha};
}

SolitonData from_alpha(const std::vector<double> &kappa,
                       const AlphaVector &alpha) {
  int n = (int)kappa.size();
  if ((int)alpha.alpha.size() != n)
    throw input_error("alpha length does not match the phase count");
  std::vector<double> w(n);
  for (int j = 0; j < n; ++j) {
    double p = 1.0;
    for (int m = 0; m < n; ++m)
      if (m != j) p *= kappa[j] - kappa[m];
    double v = alpha.alpha[j] / p;
    if ((n - 1 - j) % 2 != 0) v = -v;
    w[j] = v;
  }
  return make_soliton_data(kappa, w);
}

std::vector<double> dual_weights(const SolitonData &data) {
  int n = data.n();
  std::vector<double> w(n);
  double sum = 0.0;
  for (int j = 0; j < n; ++j) {
    double p = 1.0;
    for (int m = 0; m < n; ++m)
      if (m != j) p *= data.kappa[j] - data.kappa[m];
    w[j] = 1.0 / (data.a[j] * p * p);
    sum += w[j];
  }
  for (double &v : w) v /= sum;
  return w;
}

double representative_minor(const SolitonData &data,
                            const std::vector<int> &cols) {
  double p = 1.0;
  for (size_t s = 0; s < cols.size(); ++s) {
    p *= data.a[cols[s]];
    for (size_t r = 0; r < s; ++r)
      p *= data.kappa[cols[s]] - data.kappa[cols[r]];
  }
  return p;
}

GrassmannRep representative_matrix(const SolitonData &data, int k) {
  int n = data.n();
  if (k < 1 || k > n - 1)
    throw input_error("order k must lie in [1, n-1], got " + std::to_string(k));
  GrassmannRep rep;
  rep.rows = k;
  rep.cols = n;
  rep.form = GrassmannRep::Form::vandermonde_weighted;
  rep.entries = Mat(k, n);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < n; ++j)
      rep.entries(i, j) = data.a[j] * std::pow(data.kappa[j], i);
  // Total positivity holds term by term in the closed form; walk all column
  // subsets and confirm no rounding has crossed zero.
  std::vector<int> cols(k);
  for (int i = 0; i < k; ++i) cols[i] = i;
  while (true) {
    if (!(representative_minor(data, cols) > 0.0))
      throw check_error("non-positive maximal minor");
    int i = k - 1;
    while (i >= 0 && cols[i] == n - k + i) --i;
    if (i < 0) break;
    ++cols[i];
    for (int j = i + 1; j < k; ++j) cols[j] = cols[j - 1] + 1;
  }
  return rep;
}

Mat rref_coefficients(const SolitonData &data, int k) {
  int n = data.n();
  if (k < 1 || k > n - 1)
    throw input_error("order k must lie in [1, n-1], got " + std::to_string(k));
  // x^i_j = (-1)^(k-i) (a_col/a_i) prod_{l<=k, l!=i} (kappa_col - kappa_l)/|kappa_i - kappa_l|
  // for pivot row i in [1,k] and tail column col = k+j: a ratio of maximal
  // minors (Cramer), so no elimination is performed.  The numerator factors
  // are positive (col > k >= l), hence sign(x^i_j) = (-1)^(k-i).
  Mat x(k, n - k);
  for (int i = 1; i <= k; ++i)
    for (int j = 1; j <= n - k; ++j) {
      int col = k + j;
      double v = data.a[col - 1] / data.a[i - 1];
      for (int l = 1; l <= k; ++l) {
        if (l == i) continue;
        v *= (data.kappa[col - 1] - data.kappa[l - 1]) /
             std::fabs(data.kappa[i - 1] - data.kappa[l - 1]);
      }
      if ((k - i) % 2 != 0) v = -v;
      x(i - 1, j - 1) = v;
    }
  return x;
}

}  // namespace todakp
