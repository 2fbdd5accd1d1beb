#pragma once

#include <vector>

#include "todakp/common.hpp"
#include "todakp/linalg.hpp"

namespace todakp {

// Phases kappa_1 < ... < kappa_n and positive weights a (stored normalized to
// sum 1).  The single source of truth for both the KP and the Toda side.
struct SolitonData {
  std::vector<double> kappa;
  std::vector<double> a;
  int n() const { return (int)kappa.size(); }
  double span() const { return kappa.back() - kappa.front(); }
};

// Projective weight coordinates, stored with the first entry scaled to 1.
struct AlphaVector {
  std::vector<double> alpha;
};

// A k x n representative matrix of the underlying Grassmannian point.
struct GrassmannRep {
  enum class Form { vandermonde_weighted, rref };
  int rows = 0, cols = 0;
  Mat entries;
  Form form = Form::vandermonde_weighted;
};

// Validates and normalizes; throws input_error on non-monotone kappa
// (including gaps below the degeneracy floor), non-positive weights, or n < 2.
SolitonData make_soliton_data(const std::vector<double> &kappa,
                              const std::vector<double> &weights);

// alpha_j = (-1)^(n-j) a_j prod_{m != j}(kappa_j - kappa_m), projectively.
AlphaVector alpha_coordinates(const SolitonData &data);
SolitonData from_alpha(const std::vector<double> &kappa,
                       const AlphaVector &alpha);

// Weights of the time-reversed flow: componentwise reciprocal alphas,
// renormalized.  Equivalently a_hat_j proportional to
// 1 / (a_j prod_{m != j}(kappa_j - kappa_m)^2).
std::vector<double> dual_weights(const SolitonData &data);

// Row i of the vandermonde-weighted form is (a_j kappa_j^(i-1))_j.  Every
// maximal minor is prod a_{i_s} times a Vandermonde factor of the chosen
// columns, so positivity is verified from the closed form, not determinants.
GrassmannRep representative_matrix(const SolitonData &data, int k);

// Tail coefficients x^i_j of the reduced row echelon form [I_k | X],
// k x (n-k), signed; |X| is entrywise positive.
Mat rref_coefficients(const SolitonData &data, int k);

// Closed-form maximal minor over the given strictly increasing column set.
double representative_minor(const SolitonData &data,
                            const std::vector<int> &cols);

}  // namespace todakp
