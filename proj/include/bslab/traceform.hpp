#pragma once

#include <string>
#include <vector>

#include "bslab/hardy.hpp"

namespace bslab {

struct TraceReport {
  std::string identity;
  Complex lhs{0.0, 0.0};
  Complex rhs{0.0, 0.0};
  double residual = 0.0;  // |lhs-rhs| / (1 + |lhs| + |rhs|)
  double tolerance = 0.0;
  bool pass = false;
  bool inconclusive = false;
  std::string note;
};

double trace_residual(Complex lhs, Complex rhs);

// B_0 + nu(R)/pi  vs  (1/pi) int log|D_4(t+i0)| dt  (nu = 0 policy); the
// real-axis integral uses the graded grid plus a {1/t^2, 1/t^3} tail fitted
// per side on [T/2, T].
TraceReport verify_tr12(const ZeroSet& zs, const BoundaryData& bd_D4, double tol);

// j=1:  B_1/2 = J_1          (Re Q_1 = 0, odd moments vanish)
// j=2:  B_2/3 = Re Q_2 + J_2
TraceReport verify_trj(const Potential& V, const ZeroSet& zs, const BoundaryData& bd_psi,
                       int j, double tol);

// psi'/psi vs B'/B - (i/pi) int dmu/(k-t)^2 with dmu = log|psi| dt.
TraceReport verify_tre1(const DetEvaluator& ev, const ZeroSet& zs, const BoundaryData& bd_psi,
                        Complex k, double tol, double min_zero_dist = 1e-3);

// nu(R) + sum m_j Im k_j <= ||V||^2 F(||V||_{3/2}); reports the margin and
// the minimal C2 that would make the bound hold.
TraceReport check_bound_T4(const Potential& V, const ZeroSet& zs, double C2);

inline constexpr double kCstar = 0.023132359956735;  // 1/(8 (4 pi)^{2/3})

// Max violation across the supplied k grid of the determinant and
// Hilbert-Schmidt envelopes; all bounds are one-sided.
TraceReport check_envelope_bounds(const DetEvaluator& ev, const std::vector<Complex>& k_grid,
                                  double slack = 1e-6);

// Channel-sum norms used by the envelope checks (Frobenius cutoff semantics).
struct OperatorNorms {
  double hs_sq = 0.0;
  double b4_pow4 = 0.0;
  int L = -1;
};
OperatorNorms operator_norms(const DetEvaluator& ev, Complex k);

}  // namespace bslab
