#pragma once

#include <array>
#include <string>
#include <vector>

#include "bslab/det.hpp"

namespace bslab {

struct Zero {
  Complex k{0.0, 0.0};       // Im k > 0
  int multiplicity = 1;
  Complex lambda{0.0, 0.0};  // k^2
  double newton_residual = 0.0;
};

struct Rect {
  double re_lo = 0.0, re_hi = 0.0, im_lo = 0.0, im_hi = 0.0;
  double width() const { return re_hi - re_lo; }
  double height() const { return im_hi - im_lo; }
  double diam() const { return std::max(width(), height()); }
  bool contains(Complex k, double slack = 0.0) const {
    return k.real() >= re_lo - slack && k.real() <= re_hi + slack &&
           k.imag() >= im_lo - slack && k.imag() <= im_hi + slack;
  }
};

struct ZeroSet {
  std::vector<Zero> zeros;  // ordered by decreasing Im k
  std::vector<double> B;    // B_0..B_nmax
  double r0 = 0.0;
  Rect search_rect;
  std::vector<Rect> unresolved;
  int total_multiplicity() const {
    int s = 0;
    for (const Zero& z : zeros) s += z.multiplicity;
    return s;
  }
};

struct SpectraConfig {
  double tol_zero = 1e-9;
  double delta_floor = 1e-3;
  int max_depth = 26;
  double tol_edge = 1e-7;
  double fd_step = 1e-5;  // psi' central-difference step scale
  int nmax_B = 8;
  int contour_panels = 10;  // per edge, doubled on poor winding resolution
  bool estimate_r0 = true;
};

struct BoundaryConflict : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct WindingResolutionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Argument-principle machinery on psi over rectangles in the upper half-plane.
class ZeroFinder {
 public:
  ZeroFinder(const DetEvaluator& ev, SpectraConfig cfg = {});

  // Winding number of psi around rect, with the zero-count first moment.
  int count_zeros(const Rect& rect) const;

  ZeroSet locate_zeros(const Rect& rect) const;

  Complex psi(Complex k) const { return ev_->psi(k); }
  Complex psi_logderiv(Complex k) const;  // psi'/psi by central differences

 private:
  struct ContourResult {
    Complex winding;   // (1/2 pi i) contour integral of psi'/psi
    Complex moment;    // same with an extra factor k
    double min_edge_abs;
  };
  struct EdgeQuad {
    Complex winding{0.0, 0.0};
    Complex moment{0.0, 0.0};
  };
  EdgeQuad panel_quad(Complex a, Complex b, double* min_abs) const;
  void edge_adaptive(Complex a, Complex b, const EdgeQuad& whole, double tol, int depth,
                     EdgeQuad& acc, double* min_abs) const;
  ContourResult contour(const Rect& rect, int panels) const;
  int count_checked(const Rect& rect, Complex* centroid) const;
  void subdivide(const Rect& rect, int depth, ZeroSet& out) const;
  bool refine(const Rect& rect, int count, Complex guess, ZeroSet& out) const;

  const DetEvaluator* ev_;
  SpectraConfig cfg_;
};

// Smallest radius rho (bisection grid) with max_{|k|=rho, Im k>=0} ||Y0(k)|| <= 1/2,
// sampled at arc_samples points.
double r0_estimate(const DetEvaluator& ev, int arc_samples = 32, double rho_max = 100.0);

// B_n = 2 sum_j m_j Im(k_j^{n+1}), n = 0..nmax
std::vector<double> blaschke_coeffs(const ZeroSet& zs, int nmax);

}  // namespace bslab
