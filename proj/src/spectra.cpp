#include "bslab/spectra.hpp"

#include <algorithm>
#include <cmath>

namespace bslab {

ZeroFinder::ZeroFinder(const DetEvaluator& ev, SpectraConfig cfg) : ev_(&ev), cfg_(cfg) {}

Complex ZeroFinder::psi_logderiv(Complex k) const {
  double h = cfg_.fd_step * std::max(1.0, std::abs(k));
  Complex f = ev_->psi(k);
  Complex fp = (ev_->psi(k + h) - ev_->psi(k - h)) / (2.0 * h);
  return fp / f;
}

// One Gauss panel of psi'/psi and k psi'/psi along [a,b].
ZeroFinder::EdgeQuad ZeroFinder::panel_quad(Complex a, Complex b, double* min_abs) const {
  const GaussRule& g = gauss_legendre(8);
  Complex dz = b - a;
  EdgeQuad out;
  for (int i = 0; i < 8; ++i) {
    Complex k = a + (0.5 + 0.5 * g.x[i]) * dz;
    double h = cfg_.fd_step * std::max(1.0, std::abs(k));
    Complex f = ev_->psi(k);
    Complex ld = (ev_->psi(k + h) - ev_->psi(k - h)) / (2.0 * h) / f;
    *min_abs = std::min(*min_abs, std::abs(f));
    Complex wdz = 0.5 * g.w[i] * dz;
    out.winding += wdz * ld;
    out.moment += wdz * ld * k;
  }
  return out;
}

// Composite Gauss with panels refined wherever the winding integrand is not
// yet resolved; poles near an edge pull the refinement toward them.
void ZeroFinder::edge_adaptive(Complex a, Complex b, const EdgeQuad& whole, double tol,
                               int depth, EdgeQuad& acc, double* min_abs) const {
  Complex mid = 0.5 * (a + b);
  EdgeQuad left = panel_quad(a, mid, min_abs);
  EdgeQuad right = panel_quad(mid, b, min_abs);
  Complex sum = left.winding + right.winding;
  if (depth <= 0 || std::abs(sum - whole.winding) < tol) {
    acc.winding += left.winding + right.winding;
    acc.moment += left.moment + right.moment;
    return;
  }
  edge_adaptive(a, mid, left, 0.6 * tol, depth - 1, acc, min_abs);
  edge_adaptive(mid, b, right, 0.6 * tol, depth - 1, acc, min_abs);
}

ZeroFinder::ContourResult ZeroFinder::contour(const Rect& rect, int panels) const {
  Complex corners[5] = {Complex(rect.re_lo, rect.im_lo), Complex(rect.re_hi, rect.im_lo),
                        Complex(rect.re_hi, rect.im_hi), Complex(rect.re_lo, rect.im_hi),
                        Complex(rect.re_lo, rect.im_lo)};
  ContourResult res{Complex(0, 0), Complex(0, 0), std::numeric_limits<double>::max()};
  double tol = 0.02 * 2.0 * M_PI / panels;  // refinement goal per seed panel
  for (int e = 0; e < 4; ++e) {
    Complex z0 = corners[e], z1 = corners[e + 1];
    int seeds = std::max(2, std::min(panels, int(cfg_.contour_panels)));
    Complex dz = (z1 - z0) / double(seeds);
    for (int p = 0; p < seeds; ++p) {
      Complex a = z0 + double(p) * dz;
      EdgeQuad whole = panel_quad(a, a + dz, &res.min_edge_abs);
      EdgeQuad acc;
      edge_adaptive(a, a + dz, whole, tol, 14, acc, &res.min_edge_abs);
      res.winding += acc.winding;
      res.moment += acc.moment;
    }
  }
  Complex two_pi_i(0.0, 2.0 * M_PI);
  res.winding /= two_pi_i;
  res.moment /= two_pi_i;
  return res;
}

int ZeroFinder::count_checked(const Rect& rect, Complex* centroid) const {
  if (rect.im_lo < cfg_.delta_floor)
    throw std::invalid_argument("count_zeros: rectangle must stay above the Im k floor");
  int panels = cfg_.contour_panels;
  double worst_edge = std::numeric_limits<double>::max();
  for (int attempt = 0; attempt < 4; ++attempt, panels *= 2) {
    ContourResult r = contour(rect, panels);
    worst_edge = std::min(worst_edge, r.min_edge_abs);
    if (r.min_edge_abs < cfg_.tol_edge)
      throw BoundaryConflict("count_zeros: |psi| below tol_edge on the contour");
    double n = std::round(r.winding.real());
    double tol = (attempt >= 2) ? 0.25 : 0.08;
    if (std::abs(r.winding - n) <= tol && n >= 0.0) {
      if (centroid) *centroid = (n > 0.0) ? r.moment / n : Complex(0, 0);
      return int(n);
    }
  }
  // a persistent non-integer winding usually means a zero grazes the contour
  if (worst_edge < 1e-3)
    throw BoundaryConflict("count_zeros: contour passes too close to a zero");
  throw WindingResolutionError("count_zeros: winding integral failed to resolve an integer");
}

int ZeroFinder::count_zeros(const Rect& rect) const { return count_checked(rect, nullptr); }

bool ZeroFinder::refine(const Rect& rect, int count, Complex guess, ZeroSet& out) const {
  // Modified Newton for an m-fold zero; multiplicity comes from the winding.
  Complex k = guess;
  double m = double(count);
  for (int it = 0; it < 80; ++it) {
    if (k.imag() <= cfg_.delta_floor) return false;
    double h = cfg_.fd_step * std::max(1.0, std::abs(k));
    Complex f = ev_->psi(k);
    Complex fp = (ev_->psi(k + h) - ev_->psi(k - h)) / (2.0 * h);
    if (fp == Complex(0.0, 0.0)) break;
    Complex dk = -m * f / fp;
    k += dk;
    if (std::abs(dk) < 1e-14 * std::max(1.0, std::abs(k))) break;
  }
  if (k.imag() <= cfg_.delta_floor) return false;
  double resid = std::abs(ev_->psi(k));
  if (!(resid <= cfg_.tol_zero) || !rect.contains(k, 1e-7 * (1.0 + rect.diam())))
    return false;
  Zero z;
  z.k = k;
  z.multiplicity = count;
  z.lambda = k * k;
  z.newton_residual = resid;
  out.zeros.push_back(z);
  return true;
}

void ZeroFinder::subdivide(const Rect& rect, int depth, ZeroSet& out) const {
  int count = 0;
  Complex centroid;
  try {
    count = count_checked(rect, &centroid);
  } catch (const BoundaryConflict&) {
    // a zero sits near this contour; retry with a slightly inflated box
    if (depth >= cfg_.max_depth) {
      out.unresolved.push_back(rect);
      return;
    }
    Rect r2 = rect;
    double jx = 0.013 * rect.width(), jy = 0.013 * rect.height();
    r2.re_lo -= jx;
    r2.re_hi += jx;
    r2.im_lo = std::max(cfg_.delta_floor, r2.im_lo - jy);
    r2.im_hi += jy;
    subdivide(r2, depth + 1, out);
    return;
  }
  if (count == 0) return;

  // With the centroid of the enclosed zeros in hand, try Newton directly; a
  // cluster of distinct zeros fails the recount and gets split instead.
  ZeroSet probe;
  if (refine(rect, count, centroid, probe)) {
    Complex k0 = probe.zeros.back().k;
    // recount box: |psi| ~ rho^count near an m-fold zero, so the radius must
    // keep the edge modulus above tol_edge
    double rho = std::max(1e-3 * (1.0 + std::abs(k0)),
                          std::pow(100.0 * cfg_.tol_edge, 1.0 / count));
    rho = std::min(rho, 0.45 * rect.diam());
    Rect tiny{k0.real() - rho, k0.real() + rho, std::max(cfg_.delta_floor, k0.imag() - rho),
              k0.imag() + rho};
    bool confirmed = false;
    if (tiny.im_lo < k0.imag()) {
      try {
        confirmed = (count_checked(tiny, nullptr) == count);
      } catch (const std::exception&) {
        confirmed = false;
      }
    }
    if (confirmed) {
      out.zeros.push_back(probe.zeros.back());
      return;
    }
  }
  if (depth >= cfg_.max_depth || rect.diam() < 1e-9) {
    out.unresolved.push_back(rect);
    return;
  }
  // 2x2 split, jittering the cut lines off any zero they might graze
  const double fracs[5] = {0.5, 0.46, 0.54, 0.42, 0.58};
  for (double fx : fracs) {
    double xm = rect.re_lo + fx * rect.width();
    double ym = rect.im_lo + fx * rect.height();
    Rect q[4] = {{rect.re_lo, xm, rect.im_lo, ym},
                 {xm, rect.re_hi, rect.im_lo, ym},
                 {rect.re_lo, xm, ym, rect.im_hi},
                 {xm, rect.re_hi, ym, rect.im_hi}};
    try {
      ZeroSet sub;
      for (const Rect& r : q) subdivide(r, depth + 1, sub);
      for (const Zero& z : sub.zeros) out.zeros.push_back(z);
      for (const Rect& r : sub.unresolved) out.unresolved.push_back(r);
      return;
    } catch (const BoundaryConflict&) {
      continue;  // move the cut and retry
    }
  }
  out.unresolved.push_back(rect);
}

ZeroSet ZeroFinder::locate_zeros(const Rect& rect) const {
  ZeroSet zs;
  zs.search_rect = rect;
  subdivide(rect, 0, zs);
  std::sort(zs.zeros.begin(), zs.zeros.end(),
            [](const Zero& a, const Zero& b) { return a.k.imag() > b.k.imag(); });
  zs.B = blaschke_coeffs(zs, cfg_.nmax_B);
  double r0 = 0.0;
  for (const Zero& z : zs.zeros) r0 = std::max(r0, std::abs(z.k));
  if (cfg_.estimate_r0 && !ev_->potential().is_zero())
    r0 = std::max(r0, r0_estimate(*ev_));
  zs.r0 = r0;
  return zs;
}

double r0_estimate(const DetEvaluator& ev, int arc_samples, double rho_max) {
  if (ev.potential().is_zero()) return 0.0;
  auto arc_ok = [&](double rho) {
    for (int i = 0; i < arc_samples; ++i) {
      double th = M_PI * (i + 0.5) / arc_samples;
      if (ev.operator_norm(rho * Complex(std::cos(th), std::sin(th))) > 0.5) return false;
    }
    return true;
  };
  double hi = 1.0;
  while (!arc_ok(hi)) {
    hi *= 2.0;
    if (hi > rho_max)
      throw OutOfRange("r0_estimate: operator norm stays above 1/2 within the radius limit");
  }
  double lo = (hi == 1.0) ? 1e-3 : hi / 2.0;
  for (int it = 0; it < 12; ++it) {
    double mid = 0.5 * (lo + hi);
    if (arc_ok(mid))
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

std::vector<double> blaschke_coeffs(const ZeroSet& zs, int nmax) {
  std::vector<double> B(nmax + 1, 0.0);
  for (int n = 0; n <= nmax; ++n) {
    double s = 0.0;
    for (const Zero& z : zs.zeros) s += z.multiplicity * std::pow(z.k, n + 1).imag();
    B[n] = 2.0 * s;
  }
  return B;
}

}  // namespace bslab
