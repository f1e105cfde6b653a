#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

#include "bslab/scaled.hpp"

namespace bslab {

// Gauss-Legendre rule on [-1,1]; nodes ascending.
struct GaussRule {
  std::vector<double> x;
  std::vector<double> w;
};

// Cached; thread-safe.
const GaussRule& gauss_legendre(int n);

// Gauss-Legendre rule mapped to [0,R].
struct Quadrature {
  std::vector<double> nodes;    // strictly increasing, in (0,R)
  std::vector<double> weights;  // positive
  int order = 0;
  double R = 0.0;
};

Quadrature build_quadrature(double R, int n);

// Integrates f over [a,b] with a composite rule split at the given interior
// breakpoints, pts Gauss points per panel.
Complex panel_integrate(const std::function<Complex(double)>& f, double a, double b,
                        std::vector<double> breaks, int pts = 32, int subdiv = 1);

// Adaptive Gauss integration to a relative tolerance (absolute floor abs_tol).
Complex adaptive_integrate(const std::function<Complex(double)>& f, double a, double b,
                           double rel_tol, double abs_tol = 1e-300, int max_depth = 30);

}  // namespace bslab
