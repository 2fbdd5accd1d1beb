#pragma once

#include <vector>

#include "todakp/common.hpp"
#include "todakp/soliton_data.hpp"

namespace todakp {

// tau_k(t) in sign + log-magnitude form.  For this data class every term of
// the expansion is positive, so sign stays +1.
struct TauValue {
  double log_mag = 0.0;
  int sign = 1;
  double value() const { return sign * std::exp(log_mag); }
};

// Samples of the heat-hierarchy basis at one time point.  mu and mu_hat are
// stored rescaled by exp(-log_scale) / exp(-log_scale_hat) so large phases
// cannot overflow; mu_value(i) undoes the rescaling.
struct HeatBasisSample {
  std::vector<double> theta;   // theta(kappa_j; t)
  std::vector<double> mu;      // rescaled: sum_j a_j kappa_j^i e^(theta_j - log_scale)
  std::vector<double> mu_hat;  // rescaled dual moments at -t
  double log_scale = 0.0;
  double log_scale_hat = 0.0;
  double mu_value(int i) const { return mu[i] * std::exp(log_scale); }
  double mu_hat_value(int i) const { return mu_hat[i] * std::exp(log_scale_hat); }
};

// theta_j, E_j = e^theta_j (log form), and moments mu_i for i = 0..order.
// mu_hat uses the dual weights and the reversed time vector.
HeatBasisSample heat_basis(const SolitonData &data, const TimeVector &t,
                           int order);

// Positive Cauchy-Binet expansion
//   tau_k(t) = sum_{|I|=k} prod a_i * prod_{r<s in I}(kappa_s - kappa_r)^2 * e^(theta_I)
// in log-sum-exp form; tau_0 = 1.
TauValue tau(const SolitonData &data, int k, const TimeVector &t);

// Phase-moment sums of the expansion above:
//   S_m = sum_I c_I s_I^m e^(theta_I - shift),  s_I = sum_{i in I} kappa_i,
// shift = max over I of (log c_I + theta_I).  m = 0, 1, 2.
struct PhaseMoments {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0;
  double shift = 0.0;
  double dx =
      0.0;  // d/dx log tau_k = s1/s0 (0 for k = 0 by the empty convention)
};
PhaseMoments phase_moments(const SolitonData &data, int k, const TimeVector &t);

// Rescaled x-derivative jet of tau_k at t: component r holds
// S_r = sum_I c_I s_I^r e^(theta_I - shift), so d^r/dx^r tau_k = e^shift S_r.
std::vector<double> tau_x_jet(const SolitonData &data, int k,
                              const TimeVector &t, int m, double *shift);

// u = 2 d^2/dx^2 log tau_k = 2 (S2 S0 - S1^2) / S0^2, evaluated analytically.
double kp_field_point(const SolitonData &data, int k, double x, double y,
                      double t3);
struct GridPoint {
  double x, y, t3;
};
std::vector<double> kp_field(const SolitonData &data, int k,
                             const std::vector<GridPoint> &grid);

}  // namespace todakp
