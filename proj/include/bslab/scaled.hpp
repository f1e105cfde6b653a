#pragma once

#include <cmath>
#include <complex>
#include <limits>

namespace bslab {

using Complex = std::complex<double>;

// Complex value m * 2^e with the mantissa kept near unit magnitude.
// High partial waves pair a regular factor that underflows with an
// irregular one that overflows; tracking the binary exponent keeps
// their products representable.
struct ScaledC {
  Complex m{0.0, 0.0};
  long e{0};

  ScaledC() = default;
  ScaledC(Complex z) : m(z) { normalize(); }
  ScaledC(Complex z, long ex) : m(z), e(ex) { normalize(); }

  void normalize() {
    double a = std::max(std::abs(m.real()), std::abs(m.imag()));
    if (a >= 0x1p-60 && a <= 0x1p60) return;  // keep mantissa near unit cheaply
    if (a == 0.0 || !std::isfinite(a)) {
      e = 0;
      return;
    }
    int ex;
    std::frexp(a, &ex);
    m = Complex(std::ldexp(m.real(), -ex), std::ldexp(m.imag(), -ex));
    e += ex;
  }

  bool zero() const { return m == Complex(0.0, 0.0); }

  // Clamps to 0 / +-inf outside the double range.
  Complex value() const {
    if (zero()) return {0.0, 0.0};
    if (e > 1020) {
      double s = std::numeric_limits<double>::infinity();
      return Complex(m.real() * s, m.imag() * s);
    }
    if (e < -1070) return {0.0, 0.0};
    return Complex(std::ldexp(m.real(), static_cast<int>(e)),
                   std::ldexp(m.imag(), static_cast<int>(e)));
  }

  double log_abs() const {
    if (zero()) return -std::numeric_limits<double>::infinity();
    return std::log(std::abs(m)) + static_cast<double>(e) * M_LN2;
  }

  friend ScaledC operator*(const ScaledC& x, const ScaledC& y) {
    if (x.zero() || y.zero()) return ScaledC();
    ScaledC r;
    r.m = x.m * y.m;
    r.e = x.e + y.e;
    r.normalize();
    return r;
  }

  friend ScaledC operator*(const ScaledC& x, Complex c) { return x * ScaledC(c); }
  friend ScaledC operator*(Complex c, const ScaledC& x) { return x * ScaledC(c); }

  friend ScaledC operator/(const ScaledC& x, const ScaledC& y) {
    ScaledC r;
    r.m = x.m / y.m;
    r.e = x.e - y.e;
    r.normalize();
    return r;
  }

  friend ScaledC operator+(const ScaledC& x, const ScaledC& y) {
    if (x.zero()) return y;
    if (y.zero()) return x;
    long d = x.e - y.e;
    if (d > 120) return x;
    if (d < -120) return y;
    ScaledC r;
    if (d >= 0) {
      r.m = x.m + Complex(std::ldexp(y.m.real(), static_cast<int>(-d)),
                          std::ldexp(y.m.imag(), static_cast<int>(-d)));
      r.e = x.e;
    } else {
      r.m = y.m + Complex(std::ldexp(x.m.real(), static_cast<int>(d)),
                          std::ldexp(x.m.imag(), static_cast<int>(d)));
      r.e = y.e;
    }
    r.normalize();
    return r;
  }

  friend ScaledC operator-(const ScaledC& x, const ScaledC& y) {
    return x + ScaledC(-y.m, y.e);
  }

  ScaledC& operator+=(const ScaledC& y) {
    *this = *this + y;
    return *this;
  }
  ScaledC& operator*=(const ScaledC& y) {
    *this = *this * y;
    return *this;
  }
};

// exp(z) for z with large |Im z| kept in scaled form.
inline ScaledC scaled_exp(Complex z) {
  double re = z.real();
  long e = std::lround(re / M_LN2);
  Complex m = std::exp(Complex(re - static_cast<double>(e) * M_LN2, z.imag()));
  return ScaledC(m, e);
}

}  // namespace bslab
