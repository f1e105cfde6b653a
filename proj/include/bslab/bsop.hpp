#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bslab/greenfn.hpp"
#include "bslab/linalg.hpp"
#include "bslab/potential.hpp"
#include "bslab/quadrature.hpp"

namespace bslab {

struct TruncationFailure : std::runtime_error {
  TruncationFailure(const std::string& msg, int ell, double last)
      : std::runtime_error(msg), ell_reached(ell), last_contribution(last) {}
  int ell_reached;
  double last_contribution;
};

// Symmetrized Nystrom block of one partial wave:
//   A_ij = sqrt(w_i) U(r_i) g_l(k; r_i, r_j) U(r_j) sqrt(w_j),  U = V^{1/2}.
struct ChannelMatrix {
  int ell = 0;
  Complex k{0.0, 0.0};
  CMatrix A;
  double frobenius = 0.0;
};

struct ChannelSet {
  std::vector<ChannelMatrix> channels;  // ell = 0..L
  int L = -1;
  double tail_bound = 0.0;
};

// Semiseparable factors of one channel: A_ij = ik a_min(i,j) b_max(i,j) with
// a_i = sqrt(w_i) U_i r_i j_l(k r_i), b_i = sqrt(w_i) U_i r_i h_l(k r_i).
// Individual factors over/underflow at high l, so they stay in scaled form.
struct ChannelFactors {
  int ell = 0;
  Complex k{0.0, 0.0};
  std::vector<ScaledC> a, b;
};

// Per-(k, quadrature) Bessel/Hankel tables shared across channels. The
// tables can grow in ell without recomputing the existing orders: the
// Hankel recurrence continues upward and the Miller run for j re-anchors
// against the stored boundary orders.
class ChannelWorkspace {
 public:
  ChannelWorkspace(const Potential& V, Complex k, const Quadrature& q, int lmax);

  void extend(int new_lmax);
  ChannelFactors factors(int ell) const;
  CMatrix dense(int ell) const;
  int lmax() const { return lmax_; }
  Complex k() const { return k_; }
  const Quadrature& quadrature() const { return *q_; }

 private:
  Complex k_;
  const Quadrature* q_;
  int lmax_;
  std::vector<std::vector<ScaledC>> j_, h_;  // [node][ell], include s_i
  std::vector<ScaledC> s_;                   // sqrt(w_i) U(r_i) r_i
};

// O(n) channel functionals (see ChannelFactors for the kernel structure).
Complex channel_trace(const ChannelFactors& f);
Complex channel_trace2(const ChannelFactors& f);
Complex channel_trace3(const ChannelFactors& f);
double channel_frobenius_sq(const ChannelFactors& f);

// All of the above in one fused pass; the hot path of scans.
struct ChannelSums {
  Complex trace{0.0, 0.0};
  Complex trace2{0.0, 0.0};
  Complex trace3{0.0, 0.0};
  Complex logdet_IplusA{0.0, 0.0};
  double frob_sq = 0.0;
};
ChannelSums channel_sums(const ChannelFactors& f, bool with_frobenius = false);
// log det(I+A) via the backward transfer recurrence of the semiseparable
// structure; imaginary part only defined mod 2 pi.
Complex channel_logdet_IplusA(const ChannelFactors& f);
inline Complex channel_logdet2(const ChannelFactors& f) {
  return channel_logdet_IplusA(f) - channel_trace(f);
}
inline Complex channel_logdet4(const ChannelFactors& f) {
  return channel_logdet2(f) + 0.5 * channel_trace2(f) - channel_trace3(f) / 3.0;
}
std::vector<Complex> channel_apply(const ChannelFactors& f, const std::vector<Complex>& x);
// Largest singular value by power iteration on conj(A) A.
double channel_sigma_max(const ChannelFactors& f, double tol = 1e-9, int max_iter = 200);
// ||A||_{B4}^4 = tr((A^H A)^2)
double channel_b4_norm4(const ChannelFactors& f);

ChannelMatrix build_channel(const Potential& V, int ell, Complex k, const Quadrature& q);

// Channels until (2l+1)||A_l||_F^2 < eps * running total for 3 consecutive l.
ChannelSet channel_cutoff(const Potential& V, Complex k, const Quadrature& q, double eps,
                          int L_max = kDefaultLMax);

// sum_l (2l+1) ||A_l||_F^2, the square of the Hilbert-Schmidt norm.
double hs_norm_sq(const ChannelSet& cs);

// sum_l (2l+1) tr(A_l^n)
Complex trace_power(const ChannelSet& cs, int n);

}  // namespace bslab
