#pragma once

#include <functional>
#include <string>
#include <vector>

#include "bslab/spectra.hpp"

namespace bslab {

// Boundary samples h(t_i) = log|f(t_i + i0)| on a symmetric grid graded
// toward 0 (t = +-T u^3 on Gauss nodes u in (0,1)), with the 1/t expansion
// coefficients I_0..I_m describing h beyond T_max.
struct BoundaryData {
  std::vector<double> t;  // ascending, symmetric under t -> -t
  std::vector<double> w;  // quadrature weights for int_{-T}^{T}
  std::vector<double> h;
  std::vector<double> tail_coeffs;  // I_0..I_m
  double T_max = 0.0;
};

// Grid only; h is filled by the caller (sampled scan or analytic data).
BoundaryData make_boundary_grid(double T_max, int total_points);
void fill_boundary(BoundaryData& bd, const std::function<double(double)>& h);

// Least-squares fit of h ~ sum_j I_j / t^{j+1} on |t| >= T_max/2.
std::vector<double> fit_tail_coeffs(const BoundaryData& bd, int m);

// M(k) = (1/pi) int h(t)/(k-t) dt, grid quadrature plus the fitted tail.
// Near the real axis the sampled part switches to local-quadratic
// singularity subtraction.
Complex cauchy_transform(const BoundaryData& bd, Complex k);
// M'(k) = -(1/pi) int h(t)/(k-t)^2 dt
Complex cauchy_transform_deriv(const BoundaryData& bd, Complex k);

// J_j = v.p. (1/pi) int h_{j-1},  h_{j-1}(t) = t^j (h(t) - P_{j-1}(t)),
// realized by exact +-t pairing on the symmetric grid plus closed-form tails.
std::vector<double> moments_J(const BoundaryData& bd, int m);

struct AsymptoticRecord {
  double tau;
  Complex M;
  Complex partial_sum;  // through order m-1
  double remainder;     // tau^{m+1} |M - partial| - |J_m - i I_m|
};
std::vector<AsymptoticRecord> asymptotic_M(const BoundaryData& bd, int m,
                                           const std::vector<double>& taus);

Complex blaschke_eval(const ZeroSet& zs, Complex k);
Complex blaschke_log_deriv(const ZeroSet& zs, Complex k);  // B'/B

struct BlaschkeSeries {
  Complex value;
  double tail_bound;
};
// -i sum_{n=0}^{nmax} B_n/((n+1) k^{n+1}); requires |k| > r0.
BlaschkeSeries blaschke_log_series(const ZeroSet& zs, Complex k, int nmax);

struct FactorizationData {
  ZeroSet zeros;
  double nu_total = 0.0;  // singular-measure mass; fixed 0 by policy
  std::vector<double> K_coeffs;
  std::vector<double> J_coeffs;
  std::vector<std::pair<Complex, double>> residual_probes;  // (k, |psi - B e^{iM}|)
};

// Residuals |psi(k) - B(k) e^{iM(k)}| at the probes; probes with
// Im k < 1e-2 are rejected.
FactorizationData inner_outer_residual(const DetEvaluator& ev, const ZeroSet& zs,
                                       const BoundaryData& bd_psi,
                                       const std::vector<Complex>& probes, int moment_order = 2);

// CSV helpers for boundary scans (columns "t,h").
void write_boundary_csv(const BoundaryData& bd, const std::string& path);
BoundaryData read_boundary_csv(const std::string& path);

}  // namespace bslab
