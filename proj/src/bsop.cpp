#include "bslab/bsop.hpp"

#include <cmath>

namespace bslab {

ChannelWorkspace::ChannelWorkspace(const Potential& V, Complex k, const Quadrature& q,
                                   int lmax)
    : k_(k), q_(&q), lmax_(lmax) {
  if (k == Complex(0.0, 0.0)) throw std::invalid_argument("channel workspace: k must be nonzero");
  int n = q.order;
  j_.resize(n);
  h_.resize(n);
  s_.resize(n);
  for (int i = 0; i < n; ++i) {
    Complex z = k * q.nodes[i];
    j_[i] = sph_bessel_j_array(z, lmax);
    h_[i] = sph_hankel1_array(z, lmax);
    Complex U = std::sqrt(V.eval(q.nodes[i]));  // principal branch
    s_[i] = ScaledC(std::sqrt(q.weights[i]) * U * q.nodes[i]);
    // fold the node factor in once so per-channel extraction is a copy
    for (int l = 0; l <= lmax; ++l) {
      j_[i][l] = j_[i][l] * s_[i];
      h_[i][l] = h_[i][l] * s_[i];
    }
  }
}

void ChannelWorkspace::extend(int new_lmax) {
  if (new_lmax <= lmax_) return;
  int n = q_->order;
  for (int i = 0; i < n; ++i) {
    Complex z = k_ * q_->nodes[i];
    j_[i].resize(new_lmax + 1);
    h_[i].resize(new_lmax + 1);
    double az = std::abs(z);
    if (az == 0.0) continue;  // higher orders vanish at the origin
    Complex inv = 1.0 / z;
    // Hankel: continue the upward recurrence from the stored pair
    if (lmax_ == 0 && new_lmax >= 1)
      h_[i][1] = h_[i][0] * ScaledC(inv - Complex(0.0, 1.0));
    for (int l = std::max(lmax_, 1); l < new_lmax; ++l)
      h_[i][l + 1] = h_[i][l] * ScaledC((2.0 * l + 1.0) * inv) - h_[i][l - 1];
    // j: short Miller run anchored at whichever stored boundary order is
    // better conditioned
    int anchor = (lmax_ >= 1 && j_[i][lmax_ - 1].log_abs() > j_[i][lmax_].log_abs())
                     ? lmax_ - 1
                     : lmax_;
    if (j_[i][anchor].zero()) continue;  // profile vanishes at this node
    int start = new_lmax + 20 + int(std::ceil(az));
    Complex fp{0.0, 0.0}, f{1e-30, 0.0};
    long e = 0;
    std::vector<Complex> tmp(new_lmax - anchor + 1);
    std::vector<long> te(new_lmax - anchor + 1);
    for (int l = start; l >= anchor + 1; --l) {
      Complex fm = ((2.0 * l + 1.0) * inv) * f - fp;
      fp = f;
      f = fm;
      if (std::max(std::abs(f.real()), std::abs(f.imag())) > 0x1p900) {
        f = Complex(std::ldexp(f.real(), -900), std::ldexp(f.imag(), -900));
        fp = Complex(std::ldexp(fp.real(), -900), std::ldexp(fp.imag(), -900));
        e += 900;
      }
      if (l - 1 <= new_lmax) {
        tmp[l - 1 - anchor] = f;
        te[l - 1 - anchor] = e;
      }
    }
    ScaledC ratio = j_[i][anchor] / ScaledC(tmp[0], te[0]);
    for (int l = std::max(anchor + 1, lmax_ + 1); l <= new_lmax; ++l)
      j_[i][l] = ScaledC(tmp[l - anchor], te[l - anchor]) * ratio;
  }
  lmax_ = new_lmax;
}

ChannelFactors ChannelWorkspace::factors(int ell) const {
  if (ell < 0 || ell > lmax_) throw std::invalid_argument("channel factors: ell out of range");
  int n = q_->order;
  ChannelFactors f;
  f.ell = ell;
  f.k = k_;
  f.a.resize(n);
  f.b.resize(n);
  for (int i = 0; i < n; ++i) {
    f.a[i] = j_[i][ell];
    f.b[i] = h_[i][ell];
  }
  return f;
}

CMatrix ChannelWorkspace::dense(int ell) const {
  ChannelFactors f = factors(ell);
  int n = q_->order;
  CMatrix A(n, n);
  ScaledC c(Complex(0.0, 1.0) * k_);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i <= j; ++i) {
      Complex v = (c * f.a[i] * f.b[j]).value();
      A(i, j) = v;
      A(j, i) = v;
    }
  return A;
}

Complex channel_trace(const ChannelFactors& f) {
  ScaledC c(Complex(0.0, 1.0) * f.k);
  ScaledC t;
  for (size_t i = 0; i < f.a.size(); ++i) t += f.a[i] * f.b[i];
  return (c * t).value();
}

Complex channel_trace2(const ChannelFactors& f) {
  // tr A^2 = c^2 [ sum_i (a_i b_i)^2 + 2 sum_i (sum_{p<i} a_p^2) b_i^2 ]
  size_t n = f.a.size();
  ScaledC diag, off, preA2;
  for (size_t i = 0; i < n; ++i) {
    ScaledC d = f.a[i] * f.b[i];
    diag += d * d;
    off += preA2 * (f.b[i] * f.b[i]);
    preA2 += f.a[i] * f.a[i];
  }
  ScaledC c(Complex(0.0, 1.0) * f.k);
  return (c * c * (diag + ScaledC(Complex(2.0, 0.0)) * off)).value();
}

Complex channel_trace3(const ChannelFactors& f) {
  // tr A^3 = c^3 [ sum d_i^3 + 3 sum a_i^3 b_i S_i + 3 sum a_i b_i^3 P_i
  //              + 6 sum d_i P_i S_i ],  P_i = sum_{p<i} a_p^2, S_i = sum_{r>i} b_r^2
  size_t n = f.a.size();
  std::vector<ScaledC> sufB2(n + 1);
  for (size_t i = n; i-- > 0;) sufB2[i] = sufB2[i + 1] + f.b[i] * f.b[i];
  ScaledC total, preA2;
  for (size_t i = 0; i < n; ++i) {
    ScaledC a2 = f.a[i] * f.a[i];
    ScaledC b2 = f.b[i] * f.b[i];
    ScaledC d = f.a[i] * f.b[i];
    total += d * d * d;
    total += ScaledC(Complex(3.0, 0.0)) * (d * a2 * sufB2[i + 1]);
    total += ScaledC(Complex(3.0, 0.0)) * (d * b2 * preA2);
    total += ScaledC(Complex(6.0, 0.0)) * (d * preA2 * sufB2[i + 1]);
    preA2 += a2;
  }
  ScaledC c(Complex(0.0, 1.0) * f.k);
  return (c * c * c * total).value();
}

namespace {
ScaledC abs_sq(const ScaledC& x) { return ScaledC(Complex(std::norm(x.m), 0.0), 2 * x.e); }
}  // namespace

double channel_frobenius_sq(const ChannelFactors& f) {
  size_t n = f.a.size();
  ScaledC diag, off, preA2;
  for (size_t i = 0; i < n; ++i) {
    diag += abs_sq(f.a[i] * f.b[i]);
    off += preA2 * abs_sq(f.b[i]);
    preA2 += abs_sq(f.a[i]);
  }
  double k2 = std::norm(f.k);
  return (ScaledC(Complex(k2, 0.0)) * (diag + ScaledC(Complex(2.0, 0.0)) * off)).value().real();
}

namespace {

// Plain-double fused pass, valid when the factor exponents are tame (the
// oscillatory regime, which dominates scans along the real axis).
ChannelSums channel_sums_plain(const ChannelFactors& f, bool with_frobenius) {
  size_t n = f.a.size();
  Complex c = Complex(0.0, 1.0) * f.k;
  std::vector<Complex> a(n), b(n), sufB2(n + 1, Complex(0, 0));
  for (size_t i = 0; i < n; ++i) {
    a[i] = f.a[i].value();
    b[i] = f.b[i].value();
  }
  Complex alpha{1.0, 0.0}, beta{0.0, 0.0};
  for (size_t i = n; i-- > 0;) {
    sufB2[i] = sufB2[i + 1] + b[i] * b[i];
    Complex z = b[i] * alpha - a[i] * beta;
    alpha += c * a[i] * z;
    beta += c * b[i] * z;
  }
  Complex tr{0, 0}, diag2{0, 0}, off2{0, 0}, tot3{0, 0}, preA2{0, 0};
  double frobD = 0.0, frobO = 0.0, preAbsA2 = 0.0;
  for (size_t i = 0; i < n; ++i) {
    Complex a2 = a[i] * a[i];
    Complex b2 = b[i] * b[i];
    Complex d = a[i] * b[i];
    Complex d2 = d * d;
    tr += d;
    diag2 += d2;
    off2 += preA2 * b2;
    tot3 += d * (d2 + 3.0 * (a2 * sufB2[i + 1] + b2 * preA2) + 6.0 * preA2 * sufB2[i + 1]);
    if (with_frobenius) {
      frobD += std::norm(d);
      frobO += preAbsA2 * std::norm(b[i]);
      preAbsA2 += std::norm(a[i]);
    }
    preA2 += a2;
  }
  ChannelSums s;
  Complex c2 = c * c;
  s.trace = c * tr;
  s.trace2 = c2 * (diag2 + 2.0 * off2);
  s.trace3 = c2 * c * tot3;
  if (with_frobenius) s.frob_sq = std::norm(f.k) * (frobD + 2.0 * frobO);
  if (alpha == Complex(0.0, 0.0))
    s.logdet_IplusA = Complex(-std::numeric_limits<double>::infinity(), 0.0);
  else
    s.logdet_IplusA = std::log(alpha);
  return s;
}

ChannelSums channel_sums_scaled(const ChannelFactors& f, bool with_frobenius) {
  size_t n = f.a.size();
  ScaledC c(Complex(0.0, 1.0) * f.k);
  // backward: suffix sums of b^2 and the determinant transfer recurrence
  std::vector<ScaledC> sufB2(n + 1);
  ScaledC alpha(Complex(1.0, 0.0));
  ScaledC beta;
  for (size_t i = n; i-- > 0;) {
    sufB2[i] = sufB2[i + 1] + f.b[i] * f.b[i];
    ScaledC z = f.b[i] * alpha - f.a[i] * beta;
    alpha += c * (f.a[i] * z);
    beta += c * (f.b[i] * z);
  }
  // forward: trace powers and Frobenius mass
  ScaledC tr, diag2, off2, tot3, preA2, frobD, frobO, preAbsA2;
  const ScaledC three(Complex(3.0, 0.0)), six(Complex(6.0, 0.0));
  for (size_t i = 0; i < n; ++i) {
    ScaledC a2 = f.a[i] * f.a[i];
    ScaledC b2 = f.b[i] * f.b[i];
    ScaledC d = f.a[i] * f.b[i];
    ScaledC d2 = d * d;
    tr += d;
    diag2 += d2;
    off2 += preA2 * b2;
    tot3 += d * d2 + three * (d * (a2 * sufB2[i + 1] + b2 * preA2)) +
            six * (d * preA2 * sufB2[i + 1]);
    if (with_frobenius) {
      frobD += abs_sq(d);
      frobO += preAbsA2 * abs_sq(f.b[i]);
      preAbsA2 += abs_sq(f.a[i]);
    }
    preA2 += a2;
  }
  ChannelSums s;
  const ScaledC two(Complex(2.0, 0.0));
  s.trace = (c * tr).value();
  s.trace2 = (c * c * (diag2 + two * off2)).value();
  s.trace3 = (c * c * c * tot3).value();
  if (with_frobenius)
    s.frob_sq = (ScaledC(Complex(std::norm(f.k), 0.0)) * (frobD + two * frobO)).value().real();
  if (alpha.zero())
    s.logdet_IplusA = Complex(-std::numeric_limits<double>::infinity(), 0.0);
  else
    s.logdet_IplusA = Complex(alpha.log_abs(), std::arg(alpha.m));
  return s;
}

}  // namespace

ChannelSums channel_sums(const ChannelFactors& f, bool with_frobenius) {
  long amax = 0, bmax = 0;
  for (const ScaledC& x : f.a) amax = std::max(amax, std::labs(x.e));
  for (const ScaledC& x : f.b) bmax = std::max(bmax, std::labs(x.e));
  if (amax + bmax <= 300) return channel_sums_plain(f, with_frobenius);
  return channel_sums_scaled(f, with_frobenius);
}

Complex channel_logdet_IplusA(const ChannelFactors& f) {
  // Backward elimination of det(I + c a_< b_>) = 1 + c a^T (I+N)^{-1} b:
  //   z_i = b_i alpha_i - a_i beta_i,
  //   alpha_{i-1} = alpha_i + c a_i z_i,  beta_{i-1} = beta_i + c b_i z_i,
  // starting from alpha = 1, beta = 0; det = alpha after the i = 0 step.
  ScaledC c(Complex(0.0, 1.0) * f.k);
  ScaledC alpha(Complex(1.0, 0.0));
  ScaledC beta;
  for (size_t i = f.a.size(); i-- > 0;) {
    ScaledC z = f.b[i] * alpha - f.a[i] * beta;
    alpha += c * (f.a[i] * z);
    beta += c * (f.b[i] * z);
  }
  if (alpha.zero()) return Complex(-std::numeric_limits<double>::infinity(), 0.0);
  return Complex(alpha.log_abs(), std::arg(alpha.m));
}

std::vector<Complex> channel_apply(const ChannelFactors& f, const std::vector<Complex>& x) {
  size_t n = f.a.size();
  long amax = 0, bmax = 0;
  for (const ScaledC& v : f.a) amax = std::max(amax, std::labs(v.e));
  for (const ScaledC& v : f.b) bmax = std::max(bmax, std::labs(v.e));
  std::vector<Complex> y(n);
  if (amax + bmax <= 300) {
    Complex c = Complex(0.0, 1.0) * f.k;
    std::vector<Complex> a(n), b(n), suf(n + 1, Complex(0, 0));
    for (size_t i = 0; i < n; ++i) {
      a[i] = f.a[i].value();
      b[i] = f.b[i].value();
    }
    for (size_t i = n; i-- > 0;) suf[i] = suf[i + 1] + b[i] * x[i];
    Complex pre{0.0, 0.0};
    for (size_t i = 0; i < n; ++i) {
      pre += a[i] * x[i];
      y[i] = c * (b[i] * pre + a[i] * suf[i + 1]);
    }
    return y;
  }
  std::vector<ScaledC> suf(n + 1);
  for (size_t i = n; i-- > 0;) suf[i] = suf[i + 1] + f.b[i] * ScaledC(x[i]);
  ScaledC c(Complex(0.0, 1.0) * f.k);
  ScaledC pre;
  for (size_t i = 0; i < n; ++i) {
    pre += f.a[i] * ScaledC(x[i]);
    y[i] = (c * (f.b[i] * pre + f.a[i] * suf[i + 1])).value();
  }
  return y;
}

double channel_sigma_max(const ChannelFactors& f, double tol, int max_iter) {
  size_t n = f.a.size();
  std::vector<Complex> v(n);
  for (size_t i = 0; i < n; ++i) v[i] = Complex(1.0 / std::sqrt(double(n)), 0.0);
  double lam = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    std::vector<Complex> w = channel_apply(f, v);
    // conj(A) w = conj(A conj(w))
    for (Complex& z : w) z = std::conj(z);
    std::vector<Complex> u = channel_apply(f, w);
    for (Complex& z : u) z = std::conj(z);
    double nn = 0.0;
    for (const Complex& z : u) nn += std::norm(z);
    nn = std::sqrt(nn);
    if (nn == 0.0) return 0.0;
    for (Complex& z : u) z /= nn;
    double prev = lam;
    lam = nn;
    v.swap(u);
    if (it > 4 && std::abs(lam - prev) <= tol * lam) break;
  }
  return std::sqrt(lam);
}

double channel_b4_norm4(const ChannelFactors& f) {
  // tr((A^H A)^2) = ||conj(A) A||_F^2, assembled column by column.
  size_t n = f.a.size();
  double s = 0.0;
  std::vector<Complex> e(n, Complex(0.0, 0.0));
  for (size_t j = 0; j < n; ++j) {
    e[j] = 1.0;
    std::vector<Complex> w = channel_apply(f, e);
    for (Complex& z : w) z = std::conj(z);
    std::vector<Complex> u = channel_apply(f, w);
    for (const Complex& z : u) s += std::norm(z);
    e[j] = 0.0;
  }
  return s;
}

ChannelMatrix build_channel(const Potential& V, int ell, Complex k, const Quadrature& q) {
  ChannelWorkspace ws(V, k, q, ell);
  ChannelMatrix cm;
  cm.ell = ell;
  cm.k = k;
  cm.A = ws.dense(ell);
  cm.frobenius = cm.A.frobenius();
  return cm;
}

ChannelSet channel_cutoff(const Potential& V, Complex k, const Quadrature& q, double eps,
                          int L_max) {
  if (!(eps > 0.0)) throw std::invalid_argument("channel_cutoff: eps must be positive");
  ChannelWorkspace ws(V, k, q, L_max);
  ChannelSet cs;
  double total = 0.0;
  std::vector<double> contrib;
  int consecutive = 0;
  for (int ell = 0; ell <= L_max; ++ell) {
    ChannelMatrix cm;
    cm.ell = ell;
    cm.k = k;
    cm.A = ws.dense(ell);
    cm.frobenius = cm.A.frobenius();
    double c = (2.0 * ell + 1.0) * cm.frobenius * cm.frobenius;
    cs.channels.push_back(std::move(cm));
    cs.L = ell;
    total += c;
    contrib.push_back(c);
    if (V.is_zero()) break;
    consecutive = (total > 0.0 && c < eps * total) ? consecutive + 1 : 0;
    if (consecutive >= 3) break;
  }
  if (!V.is_zero() && consecutive < 3)
    throw TruncationFailure("channel_cutoff: no convergence by L_max", cs.L,
                            contrib.empty() ? 0.0 : contrib.back());
  size_t m = contrib.size();
  if (m >= 3 && contrib[m - 3] > 0.0) {
    // geometric extrapolation of the omitted channels from the last 3 kept
    double rho = std::min(std::sqrt(contrib[m - 1] / contrib[m - 3]), 0.95);
    cs.tail_bound = (rho > 0.0) ? contrib[m - 1] * rho / (1.0 - rho) : 0.0;
  }
  return cs;
}

double hs_norm_sq(const ChannelSet& cs) {
  if (cs.channels.empty()) throw std::invalid_argument("hs_norm_sq: empty channel set");
  double s = 0.0;
  for (const ChannelMatrix& c : cs.channels)
    s += (2.0 * c.ell + 1.0) * c.frobenius * c.frobenius;
  return s;
}

Complex trace_power(const ChannelSet& cs, int n) {
  if (n < 2) throw std::invalid_argument("trace_power: n must be >= 2");
  Complex s{0.0, 0.0};
  for (const ChannelMatrix& c : cs.channels) {
    Complex t{0.0, 0.0};
    int N = c.A.rows();
    if (n == 2) {
      for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) t += c.A(i, j) * c.A(j, i);
    } else {
      CMatrix P = c.A;
      for (int p = 2; p < n; ++p) P = matmul(P, c.A);
      for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) t += P(i, j) * c.A(j, i);
    }
    s += (2.0 * c.ell + 1.0) * t;
  }
  return s;
}

}  // namespace bslab
