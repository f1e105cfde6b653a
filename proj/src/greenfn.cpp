#include "bslab/greenfn.hpp"

#include <cmath>

namespace bslab {

namespace {

// sin(z)/z with a series fallback near the origin.
Complex sinc_z(Complex z) {
  if (std::abs(z) < 1e-4) {
    Complex z2 = z * z;
    return 1.0 - z2 / 6.0 * (1.0 - z2 / 20.0 * (1.0 - z2 / 42.0));
  }
  return std::sin(z) / z;
}

ScaledC scaled_sin(Complex z) {
  // sin z = (e^{iz} - e^{-iz}) / 2i, assembled in scaled form for large Im z.
  if (std::abs(z.imag()) < 500.0) return ScaledC(std::sin(z));
  ScaledC a = scaled_exp(Complex(0.0, 1.0) * z);
  ScaledC b = scaled_exp(Complex(0.0, -1.0) * z);
  return (a - b) * Complex(0.0, -0.5);
}

ScaledC scaled_cos(Complex z) {
  if (std::abs(z.imag()) < 500.0) return ScaledC(std::cos(z));
  ScaledC a = scaled_exp(Complex(0.0, 1.0) * z);
  ScaledC b = scaled_exp(Complex(0.0, -1.0) * z);
  return (a + b) * Complex(0.5, 0.0);
}

}  // namespace

Complex free_resolvent_kernel(const std::array<double, 3>& x, const std::array<double, 3>& y,
                              Complex k) {
  double d2 = 0.0;
  for (int i = 0; i < 3; ++i) d2 += (x[i] - y[i]) * (x[i] - y[i]);
  double d = std::sqrt(d2);
  if (d == 0.0) throw SingularKernel("free_resolvent_kernel: coincident points");
  return std::exp(Complex(0.0, 1.0) * k * d) / (4.0 * M_PI * d);
}

namespace {

// Recurrences run in plain complex arithmetic; when the pair outgrows 2^900
// both members are rescaled and the shift is tracked as a binary exponent.
inline bool too_big(Complex f) {
  return std::max(std::abs(f.real()), std::abs(f.imag())) > 0x1p900;
}

}  // namespace

std::vector<ScaledC> sph_bessel_j_array(Complex z, int lmax) {
  std::vector<ScaledC> j(lmax + 1);
  double az = std::abs(z);
  if (az == 0.0) {
    j[0] = ScaledC(Complex(1.0, 0.0));
    return j;  // higher orders vanish at z=0
  }
  if (std::abs(z.imag()) > 700.0)
    throw OutOfRange("sph_bessel_j_array: |Im z| too large");

  Complex inv = 1.0 / z;
  Complex j0 = sinc_z(z);
  Complex j1 = sinc_z(z) * inv - std::cos(z) * inv;

  if (az > lmax + 1.0) {
    // Oscillatory regime for every requested order: upward is stable and the
    // values stay of order 1/|z| (times at most e^{|Im z|}).
    j[0] = ScaledC(j0);
    if (lmax >= 1) j[1] = ScaledC(j1);
    Complex fm = j0, f = j1;
    long e = 0;
    for (int l = 1; l < lmax; ++l) {
      Complex fn = ((2.0 * l + 1.0) * inv) * f - fm;
      fm = f;
      f = fn;
      if (too_big(f)) {
        f = Complex(std::ldexp(f.real(), -900), std::ldexp(f.imag(), -900));
        fm = Complex(std::ldexp(fm.real(), -900), std::ldexp(fm.imag(), -900));
        e += 900;
      }
      j[l + 1] = ScaledC(f, e);
    }
    return j;
  }

  // Miller downward recurrence normalized by whichever of j_0, j_1 is better
  // conditioned.
  int start = lmax + 20 + static_cast<int>(std::ceil(az));
  Complex fp{0.0, 0.0};
  Complex f{1e-30, 0.0};
  long e = 0;
  std::vector<Complex> tmp(lmax + 1, Complex(0, 0));
  std::vector<long> te(lmax + 1, 0);
  for (int l = start; l >= 1; --l) {
    Complex fm = ((2.0 * l + 1.0) * inv) * f - fp;
    fp = f;
    f = fm;
    if (too_big(f)) {
      f = Complex(std::ldexp(f.real(), -900), std::ldexp(f.imag(), -900));
      fp = Complex(std::ldexp(fp.real(), -900), std::ldexp(fp.imag(), -900));
      e += 900;
    }
    if (l - 1 <= lmax) {
      tmp[l - 1] = f;
      te[l - 1] = e;
    }
  }
  std::vector<ScaledC> raw(lmax + 1);
  for (int l = 0; l <= lmax; ++l) raw[l] = ScaledC(tmp[l], te[l]);
  ScaledC sj0 = (std::abs(z.imag()) > 500.0) ? scaled_sin(z) * ScaledC(inv) : ScaledC(j0);
  ScaledC sj1 = (std::abs(z.imag()) > 500.0)
                    ? (scaled_sin(z) * ScaledC(inv) - scaled_cos(z)) * ScaledC(inv)
                    : ScaledC(j1);
  // normalize against the larger of j_0, j_1: near a real zero of sin z the
  // smaller one is destroyed by cancellation
  ScaledC ratio;
  if (!raw[0].zero() && (lmax < 1 || raw[1].zero() || sj0.log_abs() >= sj1.log_abs()))
    ratio = sj0 / raw[0];
  else
    ratio = sj1 / raw[1];
  for (int l = 0; l <= lmax; ++l) j[l] = raw[l] * ratio;
  return j;
}

std::vector<ScaledC> sph_hankel1_array(Complex z, int lmax) {
  if (z == Complex(0.0, 0.0)) throw SingularKernel("sph_hankel1_array: z = 0");
  if (std::abs(z.imag()) > 700.0)
    throw OutOfRange("sph_hankel1_array: |Im z| too large");
  std::vector<ScaledC> h(lmax + 1);
  Complex inv = 1.0 / z;
  // h0 = -i e^{iz}/z, h1 = -e^{iz}(1/z + i/z^2); upward growth handled by
  // the same rescale bookkeeping as the j recurrence
  ScaledC eiz = scaled_exp(Complex(0.0, 1.0) * z);
  h[0] = eiz * (Complex(0.0, -1.0) * inv);
  if (lmax >= 1) h[1] = eiz * (-(inv + Complex(0.0, 1.0) * inv * inv));
  if (lmax < 2) return h;
  Complex fm = h[0].m, f = h[1].m;
  long e0 = h[0].e, e1 = h[1].e;
  if (e0 != e1) {  // align the starting pair
    fm = Complex(std::ldexp(fm.real(), int(e0 - e1)), std::ldexp(fm.imag(), int(e0 - e1)));
    e0 = e1;
  }
  long e = e1;
  for (int l = 1; l < lmax; ++l) {
    Complex fn = ((2.0 * l + 1.0) * inv) * f - fm;
    fm = f;
    f = fn;
    if (too_big(f)) {
      f = Complex(std::ldexp(f.real(), -900), std::ldexp(f.imag(), -900));
      fm = Complex(std::ldexp(fm.real(), -900), std::ldexp(fm.imag(), -900));
      e += 900;
    }
    h[l + 1] = ScaledC(f, e);
  }
  return h;
}

Complex spherical_bessel_j(int l, Complex z, int lmax) {
  if (l < 0) throw std::invalid_argument("spherical_bessel_j: l must be >= 0");
  if (l > lmax) throw std::invalid_argument("spherical_bessel_j: l exceeds configured L_max");
  Complex v = sph_bessel_j_array(z, l)[l].value();
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
    throw OutOfRange("spherical_bessel_j: overflow");
  return v;
}

Complex spherical_hankel1(int l, Complex z, int lmax) {
  if (l < 0) throw std::invalid_argument("spherical_hankel1: l must be >= 0");
  if (l > lmax) throw std::invalid_argument("spherical_hankel1: l exceeds configured L_max");
  Complex v = sph_hankel1_array(z, l)[l].value();
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
    throw OutOfRange("spherical_hankel1: overflow");
  return v;
}

Complex radial_green(int l, Complex k, double r, double rp, int lmax) {
  if (!(r > 0.0) || !(rp > 0.0))
    throw std::invalid_argument("radial_green: radii must be positive");
  if (l > lmax) throw std::invalid_argument("radial_green: l exceeds configured L_max");
  double rlo = std::min(r, rp), rhi = std::max(r, rp);
  ScaledC j = sph_bessel_j_array(k * rlo, l)[l];
  ScaledC h = sph_hankel1_array(k * rhi, l)[l];
  Complex v = (j * h * ScaledC(Complex(0.0, 1.0) * k * r * rp)).value();
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
    throw OutOfRange("radial_green: overflow");
  return v;
}

double legendre_p(int l, double x) {
  double p0 = 1.0;
  if (l == 0) return p0;
  double p1 = x;
  for (int j = 1; j < l; ++j) {
    double p2 = ((2.0 * j + 1.0) * x * p1 - j * p0) / (j + 1.0);
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

}  // namespace bslab
