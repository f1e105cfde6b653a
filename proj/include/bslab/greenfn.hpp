#pragma once

#include <array>
#include <stdexcept>
#include <vector>

#include "bslab/scaled.hpp"

namespace bslab {

struct OutOfRange : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SingularKernel : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Wavenumber in the closed upper half-plane, k != 0.
struct WaveNumber {
  Complex k;
  explicit WaveNumber(Complex kk) : k(kk) {
    if (k == Complex(0.0, 0.0)) throw std::invalid_argument("wavenumber must be nonzero");
    if (k.imag() < 0.0) throw std::invalid_argument("wavenumber must have Im k >= 0");
  }
};

inline constexpr int kDefaultLMax = 60;
inline constexpr double kImKLimit = 50.0;

// e^{ik|x-y|} / (4 pi |x-y|).
Complex free_resolvent_kernel(const std::array<double, 3>& x, const std::array<double, 3>& y,
                              Complex k);

// j_l(z) and h^{(1)}_l(z) = j_l + i y_l for l = 0..lmax, in scaled form.
// j: Miller downward recurrence normalized against j_0/j_1 (upward once the
// recurrence is oscillatory for every requested order); h: upward recurrence,
// stable on the closed upper half-plane.
std::vector<ScaledC> sph_bessel_j_array(Complex z, int lmax);
std::vector<ScaledC> sph_hankel1_array(Complex z, int lmax);

// Plain-double wrappers; throw OutOfRange on overflow and SingularKernel at z=0.
Complex spherical_bessel_j(int l, Complex z, int lmax = kDefaultLMax);
Complex spherical_hankel1(int l, Complex z, int lmax = kDefaultLMax);

// Kernel of the l-th radial block of the free resolvent on L^2((0,inf),dr):
//   g_l(k;r,r') = i k j_l(k r_<) h^{(1)}_l(k r_>) r r'
Complex radial_green(int l, Complex k, double r, double rp, int lmax = kDefaultLMax);

// Legendre polynomial P_l(x) for the partial-wave completeness checks.
double legendre_p(int l, double x);

}  // namespace bslab
