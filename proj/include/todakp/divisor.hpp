#pragma once

#include <vector>

#include "todakp/common.hpp"
#include "todakp/soliton_data.hpp"
#include "todakp/toda_core.hpp"

namespace todakp {

// One pair of colliding divisor points sitting on a phase point kappa_j.
// Indices are 0-based into kappa / gammas / deltas.
struct DivisorCollision {
  int kappa_index = -1;
  int gamma_index = -1;
  int delta_index = -1;
};

// Order-k divisor: k gamma points on the plus sheet, n-k-1 delta points on
// the minus sheet, one point per finite oval after the counting rule.
// Oval m (1-based) is the segment [kappa_m, kappa_{m+1}].
struct Divisor {
  std::vector<double> gammas;
  std::vector<double> deltas;
  int k = 0;
  TimeVector t;
  std::vector<int> gamma_oval;  // 1-based oval index per gamma
  std::vector<int> delta_oval;  // 1-based oval index per delta
  bool generic = true;
  std::vector<DivisorCollision> collisions;
};

// Per-oval occupancy before and after collision resolution.
struct OvalAssignment {
  std::vector<int> before;  // naive interval counts, collisions on the knot
  std::vector<int> after;   // post counting rule; all entries must equal 1
};

// Zeros b_1(t) < ... < b_{n-1}(t) of the vacuum wavefunction: eigenvalues of
// the trailing (n-1) x (n-1) block of the symmetrized Jacobi matrix.
std::vector<double> vacuum_divisor(const SolitonData &data,
                                   const TimeVector &t);

// gammas from the leading k x k block, deltas from the trailing
// (n-k-1) x (n-k-1) block; collision pairs (|point - kappa_j| under the
// tolerance) are assigned delta to the left oval and gamma to the right one.
// Throws check_error if any oval ends up with occupancy != 1.
Divisor compatible_divisor(const SolitonData &data, int k,
                           const TimeVector &t);
OvalAssignment oval_assignment(const std::vector<double> &kappa,
                               const Divisor &d);

// Inverse map: a_j proportional to
//   prod_s(kappa_j - delta_s) / [prod_r(kappa_j - gamma_r) prod_{l!=j}(kappa_j - kappa_l)]
// with the colliding gamma/delta factors dropped and the sign flipped at a
// collision index.  Throws input_error if any weight comes out non-positive
// (the divisor is not realizable).
SolitonData invert_divisor(const std::vector<double> &kappa, const Divisor &d);

// Max relative residuals of the divisor identities at time t.
//   k_recursion: prod(z-k_j) = prod(z-delta^(k-1)) prod(z-gamma^(k))
//                              - a_k prod(z-delta^(k)) prod(z-gamma^(k-1))
//                at probe points (midpoints of the kappa gaps and kappa_n+1);
//   gluing_form: prod_r(k_j-b_r(0)) prod_l(k_j-gamma^(k)_l(t)) E_j(t)
//                = tau_1(t) a_1(t)...a_k(t) prod_s(k_j-delta^(k)_s(t));
//   tau1:        tau_1(t) = E_l(t) prod_r (k_l-b_r(0))/(k_l-b_r(t));
//   rref_pairing (k = n-1 only):
//                x_{i+1} E_i(t) prod(k_i-gamma) + x_i E_{i+1}(t) prod(k_{i+1}-gamma) = 0
//                with x the de-signed echelon tail, x_n = 1.
struct DivisorIdentityResiduals {
  double k_recursion = 0.0;
  double gluing_form = 0.0;
  double tau1 = 0.0;
  double rref_pairing = 0.0;
  bool has_rref_pairing = false;
};
DivisorIdentityResiduals divisor_identity_residuals(const SolitonData &data,
                                                    int k,
                                                    const TimeVector &t);

// Reconstructs the full Jacobi state at t from divisor trajectories alone:
// a_k from the product-ratio formulas anchored at kappa_{anchor_j}, b_k from
// the logarithmic-derivative sums with divisor velocities by central finite
// differences of step h.  Throws input_error if the anchor collides with a
// divisor point at t (pick another anchor).
TodaState toda_from_divisor_flow(const SolitonData &data, int anchor_j,
                                 const TimeVector &t, double h);

}  // namespace todakp
