#include "bslab/traceform.hpp"

#include <cmath>
#include <memory>
#include <sstream>

namespace bslab {

double trace_residual(Complex lhs, Complex rhs) {
  return std::abs(lhs - rhs) / (1.0 + std::abs(lhs) + std::abs(rhs));
}

namespace {

// per-side {1/t^2, 1/t^3} least-squares tail of the boundary samples and its
// integral over |t| > T
double fitted_tail_integral(const BoundaryData& bd, int sign) {
  double a11 = 0, a12 = 0, a22 = 0, b1 = 0, b2 = 0;
  int used = 0;
  for (size_t i = 0; i < bd.t.size(); ++i) {
    double t = bd.t[i];
    if (sign > 0 && t < 0.5 * bd.T_max) continue;
    if (sign < 0 && t > -0.5 * bd.T_max) continue;
    double p2 = 1.0 / (t * t), p3 = p2 / t;
    a11 += p2 * p2;
    a12 += p2 * p3;
    a22 += p3 * p3;
    b1 += p2 * bd.h[i];
    b2 += p3 * bd.h[i];
    ++used;
  }
  if (used < 4) return 0.0;
  double det = a11 * a22 - a12 * a12;
  if (det == 0.0) return 0.0;
  double c2 = (b1 * a22 - b2 * a12) / det;
  double c3 = (a11 * b2 - a12 * b1) / det;
  // int_{T}^{inf} (c2/t^2 + c3/t^3) dt, mirrored for the negative side
  double T = bd.T_max;
  return c2 / T + sign * c3 / (2.0 * T * T);
}

std::string format_complex(Complex z) {
  std::ostringstream os;
  os.precision(6);
  os << "(" << z.real() << "," << z.imag() << ")";
  return os.str();
}

}  // namespace

TraceReport verify_tr12(const ZeroSet& zs, const BoundaryData& bd_D4, double tol) {
  TraceReport rep;
  rep.identity = "tr12";
  rep.tolerance = tol;
  double B0 = zs.B.empty() ? blaschke_coeffs(zs, 0)[0] : zs.B[0];
  rep.lhs = Complex(B0, 0.0);  // + nu(R)/pi with nu = 0
  double I = 0.0;
  for (size_t i = 0; i < bd_D4.t.size(); ++i) I += bd_D4.w[i] * bd_D4.h[i];
  I += fitted_tail_integral(bd_D4, +1);
  I += fitted_tail_integral(bd_D4, -1);
  rep.rhs = Complex(I / M_PI, 0.0);
  rep.residual = trace_residual(rep.lhs, rep.rhs);
  rep.pass = rep.residual <= tol;
  if (!zs.unresolved.empty()) {
    rep.inconclusive = true;
    rep.note = "unresolved cells in the zero search";
  }
  return rep;
}

TraceReport verify_trj(const Potential& V, const ZeroSet& zs, const BoundaryData& bd_psi,
                       int j, double tol) {
  if (j != 1 && j != 2)
    throw std::invalid_argument("verify_trj: only j = 1, 2 are supported");
  if (j == 2 && (V.smoothness_m() < 1 || !V.has_derivative()))
    throw std::invalid_argument("verify_trj: j = 2 needs a potential with derivative data");
  TraceReport rep;
  rep.identity = "trj:" + std::to_string(j);
  rep.tolerance = tol;
  std::vector<double> B = (int(zs.B.size()) > j) ? zs.B : blaschke_coeffs(zs, j);
  rep.lhs = Complex(B[j] / (j + 1.0), 0.0);  // + K_j with nu = 0
  std::vector<double> J = moments_J(bd_psi, j);
  double reQ = (j == 2) ? V.moments_Q().Q2.real() : 0.0;
  rep.rhs = Complex(reQ + J[j], 0.0);
  rep.residual = trace_residual(rep.lhs, rep.rhs);
  rep.pass = rep.residual <= tol;
  if (!zs.unresolved.empty()) rep.inconclusive = true;
  return rep;
}

TraceReport verify_tre1(const DetEvaluator& ev, const ZeroSet& zs, const BoundaryData& bd_psi,
                        Complex k, double tol, double min_zero_dist) {
  if (!(k.imag() >= 0.1))
    throw std::invalid_argument("verify_tre1: Im k must be at least 0.1");
  for (const Zero& z : zs.zeros)
    if (std::abs(k - z.k) < min_zero_dist)
      throw std::invalid_argument("verify_tre1: k too close to a zero of psi");
  TraceReport rep;
  rep.identity = "tre1@" + format_complex(k);
  rep.tolerance = tol;
  double h = 1e-5 * std::max(1.0, std::abs(k));
  rep.lhs = (ev.psi(k + h) - ev.psi(k - h)) / (2.0 * h) / ev.psi(k);
  rep.rhs = blaschke_log_deriv(zs, k) + Complex(0.0, 1.0) * cauchy_transform_deriv(bd_psi, k);
  rep.residual = trace_residual(rep.lhs, rep.rhs);
  rep.pass = rep.residual <= tol;
  return rep;
}

TraceReport check_bound_T4(const Potential& V, const ZeroSet& zs, double C2) {
  if (!(C2 > 0.0)) throw std::invalid_argument("check_bound_T4: C2 must be positive");
  TraceReport rep;
  rep.identity = "T4_bound";
  double sum_im = 0.0;
  for (const Zero& z : zs.zeros) sum_im += z.multiplicity * z.k.imag();
  rep.lhs = Complex(sum_im, 0.0);  // + nu(R) with nu = 0
  double l32 = V.norm_lp(1.5);
  double n2 = V.norm_lp(2.0);
  double four_pi = 4.0 * M_PI;
  double q = std::pow(68.0, 0.25);
  auto rhs_at = [&](double c2) {
    double a1 = c2 * q / std::pow(four_pi, 7.0 / 6.0);
    double a2 = std::sqrt(68.0) * c2 * c2 / std::pow(four_pi, 5.0 / 6.0);
    double a3 = c2 * c2 * c2 * q / (3.0 * M_PI * std::sqrt(four_pi));
    double F = a1 * std::sqrt(l32) + a2 * l32 + a3 * std::pow(l32, 1.5);
    return n2 * n2 * F;
  };
  rep.rhs = Complex(rhs_at(C2), 0.0);
  rep.pass = rep.lhs.real() <= rep.rhs.real();
  rep.residual = rep.pass ? 0.0 : trace_residual(rep.lhs, rep.rhs);
  double c_min = 0.0;
  if (sum_im > 0.0) {
    double lo = 0.0, hi = 1.0;
    while (rhs_at(hi) < sum_im && hi < 1e6) hi *= 2.0;
    for (int it = 0; it < 60; ++it) {
      double mid = 0.5 * (lo + hi);
      (rhs_at(mid) >= sum_im ? hi : lo) = mid;
    }
    c_min = hi;
  }
  std::ostringstream os;
  os.precision(6);
  os << "minimal C2 = " << c_min;
  rep.note = os.str();
  return rep;
}

OperatorNorms operator_norms(const DetEvaluator& ev, Complex k) {
  OperatorNorms out;
  if (ev.potential().is_zero()) {
    out.L = 0;
    return out;
  }
  const NumericsConfig& cfg = ev.config();
  int cap = ev.channel_cap(k);
  int ell_geo = int(std::ceil(1.02 * std::abs(k) * ev.potential().support_radius())) + 3;
  int lmax = std::min(cap, ell_geo + 12);
  ChannelWorkspace ws(ev.potential(), k, ev.quadrature(), lmax);
  int consecutive = 0;
  for (int ell = 0; ell <= cap; ++ell) {
    if (ell > ws.lmax()) ws.extend(std::min(cap, std::max(ws.lmax() + 16, ws.lmax() * 3 / 2)));
    ChannelFactors f = ws.factors(ell);
    double w = 2.0 * ell + 1.0;
    double c = w * channel_frobenius_sq(f);
    out.hs_sq += c;
    out.b4_pow4 += w * channel_b4_norm4(f);
    out.L = ell;
    consecutive = (out.hs_sq > 0.0 && c < cfg.ell_eps * out.hs_sq) ? consecutive + 1 : 0;
    if (consecutive >= 3) break;
  }
  return out;
}

TraceReport check_envelope_bounds(const DetEvaluator& ev, const std::vector<Complex>& k_grid,
                                  double slack) {
  const Potential& V = ev.potential();
  double l32sq = std::pow(V.norm_lp(1.5), 2.0);
  double l32cu = std::pow(V.norm_lp(1.5), 3.0);
  double n2sq = std::pow(V.norm_lp(2.0), 2.0);
  struct Item {
    const char* name;
    double worst = -std::numeric_limits<double>::infinity();
  };
  Item items[6] = {{"log|psi| <= C* ||V||_{3/2}^2"},
                   {"|psi2| <= C* ||V||_{3/2}^2"},
                   {"hs^2 <= 2 C* ||V||_{3/2}^2"},
                   {"hs^2 <= ||V||_2^2/(8 pi Im k)"},
                   {"|psi3| <= ||V||_{3/2}^3/(96 pi)"},
                   {"log|D4| <= (17/2) ||Y0||_{B4}^4"}};
  for (Complex k : k_grid) {
    DetEval de = ev.eval(k);
    OperatorNorms nn = operator_norms(ev, k);
    items[0].worst = std::max(items[0].worst, de.log_abs_psi - kCstar * l32sq);
    items[1].worst = std::max(items[1].worst, std::abs(de.psi2) - kCstar * l32sq);
    items[2].worst = std::max(items[2].worst, nn.hs_sq - 2.0 * kCstar * l32sq);
    if (k.imag() > 0.0)
      items[3].worst =
          std::max(items[3].worst, nn.hs_sq - n2sq / (8.0 * M_PI * k.imag()));
    items[4].worst = std::max(items[4].worst, std::abs(de.psi3) - l32cu / (96.0 * M_PI));
    items[5].worst = std::max(items[5].worst, de.log_abs_D4 - 8.5 * nn.b4_pow4);
  }
  TraceReport rep;
  rep.identity = "envelope";
  rep.tolerance = slack;
  double worst = -std::numeric_limits<double>::infinity();
  std::ostringstream os;
  os.precision(3);
  for (const Item& it : items) {
    worst = std::max(worst, it.worst);
    os << it.name << ": margin " << -it.worst << "; ";
  }
  rep.lhs = Complex(worst, 0.0);
  rep.rhs = Complex(slack, 0.0);
  rep.residual = std::max(0.0, worst);
  rep.pass = worst <= slack;
  rep.note = os.str();
  return rep;
}

}  // namespace bslab
