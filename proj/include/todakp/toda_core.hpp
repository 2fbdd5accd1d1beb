#pragma once

#include <vector>

#include "todakp/common.hpp"
#include "todakp/linalg.hpp"
#include "todakp/soliton_data.hpp"
#include "todakp/tau_engine.hpp"

namespace todakp {

// Tridiagonal Jacobi data at one time point: superdiagonal a_1..a_{n-1} > 0,
// diagonal b_1..b_n, unit subdiagonal.
struct TodaState {
  std::vector<double> a;
  std::vector<double> b;
  TimeVector t;
  int n() const { return (int)b.size(); }
};

// Dense n x n matrix of the state (unit subdiagonal convention).
Mat jacobi_dense(const TodaState &state);

// Symmetrized version: off-diagonal sqrt(a_k), same spectrum and the same
// leading/trailing principal-minor polynomials.
void jacobi_symmetrized(const TodaState &state, std::vector<double> &diag,
                        std::vector<double> &offdiag);

// Trailing minors Delta_j and leading minors DeltaHat_j of (zeta I - A),
// monic of degree j, as low-to-high coefficient arrays.
struct MinorPolys {
  std::vector<std::vector<double>> delta;      // j = 0..n
  std::vector<std::vector<double>> delta_hat;  // j = 0..n
};

// a_k from tau ratios in the log domain, b_k from the analytic x-derivative
// of log tau_k - log tau_{k-1}.
TodaState jacobi_matrix(const SolitonData &data, const TimeVector &t);

// Eigenvalues of every leading/trailing principal block of the symmetrized
// state, in extended precision.  leading[j] carries the j roots of
// DeltaHat_j, trailing[j] the j roots of Delta_j.
struct BlockSpectra {
  std::vector<std::vector<long double>> leading;
  std::vector<std::vector<long double>> trailing;
};
BlockSpectra block_spectra(const TodaState &state);

// Signed log value of the monic root product prod_i (x - mu_i), accumulated
// in extended precision.  This route keeps relative accuracy when x sits
// exponentially close to a root, where the coefficient form cancels.
LogReal block_char(const std::vector<long double> &mu, double x);

// det(zI - block) for the leading/trailing j x j principal block, evaluated
// by the extended-precision three-term recurrence directly on the state
// entries.  Avoids representing the block eigenvalues, so the only accuracy
// limit left is the rounding of the entries themselves.
LogReal leading_minor_value(const TodaState &state, int j, double z);
LogReal trailing_minor_value(const TodaState &state, int j, double z);

// Builds every minor polynomial by the two three-term recurrences
//   Delta_{j+1}    = (zeta - b_{n-j}) Delta_j    - a_{n-j} Delta_{j-1}
//   DeltaHat_{j+1} = (zeta - b_{j+1}) DeltaHat_j - a_j     DeltaHat_{j-1}
// and cross-checks the splitting identity
//   Delta_n = Delta_{n-j} DeltaHat_j - a_j Delta_{n-j-1} DeltaHat_{j-1}
// at probe points (throws check_error on gross violation).
MinorPolys minor_polynomials(const TodaState &state);

// psi(t) = exp(sum_j A0^j t_j) = L U (Crout, no pivoting), then the flowed
// matrix is the tridiagonal part of L^{-1} A0 L.  Breakdown of the
// factorization surfaces as check_error with the offending minor index.
TodaState bruhat_flow(const TodaState &state0, const TimeVector &t);

struct FlowResiduals {
  double lax = 0.0;                 // ||dA/dt_j - [B_j, A]||_F, central FD
  double conservation_drift = 0.0;  // max_j |H_j(t) - H_j(0)|, H_j = tr A^{j+1}/(j+1)
};
// B_j is the strictly upper-triangular part of A^j.
FlowResiduals flow_invariant_residuals(const SolitonData &data,
                                       const TimeVector &t, int flow_index,
                                       double h);

// Residues of the resolvent at the spectrum: a_l from Delta_{n-1}, dual
// weights from DeltaHat_{n-1}.  The state's spectrum must match kappa.
struct SpectralWeights {
  std::vector<double> a;
  std::vector<double> a_hat;
};
SpectralWeights spectral_residues(const TodaState &state,
                                  const std::vector<double> &kappa);

// Baker-Akhiezer vectors at (zeta, t): components j = 0..n-1 on each sheet.
// Both components carry the column factor 1/c_j, c_j = sqrt(a_1(t)...a_j(t));
// this is the normalization under which the sheet-gluing conditions
// psi_j(kappa_l) = psi_sigma_j(kappa_l) hold identically.
struct BAVectorPair {
  std::vector<double> psi;        // e^(theta/2) / c_j * DeltaHat_j(zeta; t)
  std::vector<double> psi_sigma;  // e^(-theta/2) / c_j * D^(j)Phi(zeta;t)/Phi(zeta;0)
  double zeta = 0.0;
  TimeVector t;
};
BAVectorPair ba_vectors(const SolitonData &data, double zeta,
                        const TimeVector &t);

// Phi(zeta; t) = sum_l a_l E_l(t) prod_{s != l}(zeta - kappa_s) and its image
// under the order-k dressing, computed termwise (each E_l is an eigenfunction
// of the dressing with eigenvalue DeltaHat_k(kappa_l; t)).  Signed log form.
// When top_log is given it receives the log magnitude of the largest summand,
// the natural scale for backward-error bounds on the cancellation.
LogReal dressed_phi(const SolitonData &data, int k, double zeta,
                    const TimeVector &t, double *top_log = nullptr);

}  // namespace todakp
