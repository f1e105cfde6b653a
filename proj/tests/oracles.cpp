#include "oracles.hpp"

#include <cmath>
#include <stdexcept>

#include "bslab/quadrature.hpp"

namespace bslab::oracles {

int shooting_count(const Potential& V, int ell, int steps) {
  if (!V.is_real()) throw std::invalid_argument("shooting oracle needs a real potential");
  double R = V.support_radius();
  double r0 = 1e-3 * R;  // power-law start; the centrifugal term would defeat
                         // RK4 any closer to the origin
  double h = (R - r0) / steps;
  double u = 1.0, up = (ell + 1.0) / r0;
  auto rhs = [&](double r, double uu) {
    double veff = ell * (ell + 1.0) / (r * r) + V.eval(r).real();
    return veff * uu;
  };
  int nodes = 0;
  double r = r0;
  for (int i = 0; i < steps; ++i) {
    // RK4 on (u, u')
    double k1u = up, k1p = rhs(r, u);
    double k2u = up + 0.5 * h * k1p, k2p = rhs(r + 0.5 * h, u + 0.5 * h * k1u);
    double k3u = up + 0.5 * h * k2p, k3p = rhs(r + 0.5 * h, u + 0.5 * h * k2u);
    double k4u = up + h * k3p, k4p = rhs(r + h, u + h * k3u);
    double un = u + h / 6.0 * (k1u + 2 * k2u + 2 * k3u + k4u);
    double upn = up + h / 6.0 * (k1p + 2 * k2p + 2 * k3p + k4p);
    if (un == 0.0 || (un > 0) != (u > 0)) ++nodes;
    u = un;
    up = upn;
    r += h;
    double s = std::max(std::abs(u), std::abs(up));
    if (s > 1e250) {
      u /= s;
      up /= s;
    }
  }
  // beyond the support u = a r^{l+1} + b r^{-l}; one more crossing iff
  // (-b/a)^{1/(2l+1)} lies past R
  double a = (ell * u / R + up) * std::pow(R, -double(ell)) / (2.0 * ell + 1.0);
  double b = (u - a * std::pow(R, ell + 1.0)) * std::pow(R, double(ell));
  if (a != 0.0) {
    double ratio = -b / a;
    if (ratio > std::pow(R, 2.0 * ell + 1.0)) ++nodes;
  }
  return nodes;
}

int shooting_count_total(const Potential& V, int ell_max) {
  int total = 0;
  for (int l = 0; l <= ell_max; ++l) {
    int c = shooting_count(V, l);
    total += (2 * l + 1) * c;
    if (c == 0 && l > 0) break;  // deeper channels bind less
  }
  return total;
}

double well_swave_kappa(double V0, int branch) {
  // roots of q cot q = -kappa, q = sqrt(V0 - kappa^2); branch n lives in
  // q in ((2n+1) pi/2, (n+1) pi)
  auto F = [&](double kap) {
    double q = std::sqrt(V0 - kap * kap);
    return q * std::cos(q) / std::sin(q) + kap;
  };
  double qlo = (2 * branch + 1) * M_PI / 2.0, qhi = (branch + 1) * M_PI;
  double sqv = std::sqrt(V0);
  if (sqv <= qlo) throw std::invalid_argument("well has no s-wave state on this branch");
  // kappa window for q in (qlo, min(qhi, sqrt(V0))); the cot pole at q = qhi
  // is excluded from the bracket
  double lo = (sqv > qhi) ? std::sqrt(V0 - qhi * qhi) + 1e-10 : 1e-12;
  double hi = std::sqrt(V0 - qlo * qlo) - 1e-12;
  if (F(lo) * F(hi) > 0) throw std::runtime_error("well_swave_kappa: bracket failed");
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (F(lo) * F(mid) <= 0)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

double hs_norm_sq_oracle(const Potential& V, double im_k) {
  double R = V.support_radius();
  auto f = [&](double s) -> Complex {
    return Complex(std::exp(-2.0 * im_k * s) * V.autocorrelation_abs(s), 0.0);
  };
  Complex I = panel_integrate(f, 0.0, 2.0 * R, {}, 24, 24);
  return I.real() / (4.0 * M_PI);
}

}  // namespace bslab::oracles
