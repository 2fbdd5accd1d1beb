#pragma once

#include <vector>

#include "todakp/common.hpp"
#include "todakp/soliton_data.hpp"
#include "todakp/toda_core.hpp"

namespace todakp {

// Order-k dressing operator d^k/dx^k - w_1 d^(k-1)/dx^(k-1) - ... - w_k.
// Its symbol zeta^k - w_1 zeta^(k-1) - ... - w_k equals DeltaHat_k(zeta; t).
struct DarbouxOperator {
  int k = 0;
  std::vector<double> w;  // w_1..w_k
  TimeVector t;
  double symbol_at(double zeta) const {
    double v = 1.0;
    for (int i = 1; i <= k; ++i) v = v * zeta - w[i - 1];
    return v;
  }
};

// Point on the two-sheeted rational curve; sigma swaps sheets, fixes zeta.
struct CurvePoint {
  enum class Sheet { plus, minus };
  Sheet sheet = Sheet::plus;
  double zeta = 0.0;
  bool is_infinity = false;
  CurvePoint flipped() const {
    CurvePoint q = *this;
    q.sheet = (sheet == Sheet::plus) ? Sheet::minus : Sheet::plus;
    return q;
  }
};

// Wavefunction sample; finite == false tags an exact pole hit under probing.
struct WaveValue {
  CurvePoint at;
  LogReal lv;
  bool finite = true;
  double value() const { return lv.value(); }
};

// w coefficients read off DeltaHat_k; the kernel conditions D^(k) mu_i = 0,
// i < k, are re-checked through the eigenfunction action
// D^(k) E_j = DeltaHat_k(kappa_j; t) E_j (throws check_error if violated).
DarbouxOperator darboux_operator(const SolitonData &data, int k,
                                 const TimeVector &t);

// Same coefficients from composing the first-order ladder
// D^(k) = (d/dx - b_k(t)) D^(k-1).  The x-derivatives the composition needs
// come from exact tau jets (higher phase moments), not from the minor
// recurrences, so this is an independent route to validate against.
std::vector<double> darboux_ladder_coefficients(const SolitonData &data, int k,
                                                const TimeVector &t);

// Un-normalized dressed wavefunction of order k at a curve point:
//   plus sheet:  DeltaHat_k(zeta; t) e^(theta(zeta; t))
//   minus sheet: (tau_{k+1}/tau_k)(t) * Delta_{n-k-1}(zeta; t) / Delta_{n-1}(zeta; 0)
// normalized == true divides by the value at t = 0.  Exact pole hits throw
// input_error unless probe is set, in which case a tagged non-finite value is
// returned so scans can bracket sign changes.
WaveValue wavefunction(const SolitonData &data, int k, const CurvePoint &p,
                       const TimeVector &t, bool normalized,
                       bool probe = false);

// Same minus-sheet value as wavefunction, exposed in raw signed log form.
// The independent termwise route D^(k)Phi(zeta; t) / Phi(zeta; 0) comes from
// dressed_phi; their agreement is a verification-suite property.
LogReal wavefunction_minus_minor_route(const SolitonData &data, int k,
                                       double zeta, const TimeVector &t);

// max over j of the relative plus/minus mismatch at kappa_j.
double gluing_residual(const SolitonData &data, int k, const TimeVector &t);

// Kernel residual of the reversed-data dressing acting on the dual moments:
// max_i |sum_j a_hat_j kappa_j^i Delta_k(kappa_j; -t) E_j(t)| (rescaled).
double dual_darboux_kernel_residual(const SolitonData &data, int k,
                                    const TimeVector &t);

}  // namespace todakp
