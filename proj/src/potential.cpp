#include "bslab/potential.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bslab/quadrature.hpp"

namespace bslab {

Profile profile_from_string(const std::string& s) {
  if (s == "gaussian") return Profile::gaussian;
  if (s == "square_well") return Profile::square_well;
  if (s == "exponential") return Profile::exponential;
  if (s == "table") return Profile::table;
  throw std::invalid_argument("unknown potential profile: " + s);
}

std::string to_string(Profile p) {
  switch (p) {
    case Profile::gaussian: return "gaussian";
    case Profile::square_well: return "square_well";
    case Profile::exponential: return "exponential";
    case Profile::table: return "table";
  }
  return "?";
}

Potential Potential::make(Profile profile, Complex amplitude, double shape,
                          double support_radius, int smoothness_m) {
  if (profile == Profile::table)
    throw std::invalid_argument("use make_table for tabulated potentials");
  if (!(shape > 0.0)) throw std::invalid_argument("shape parameter must be positive");
  Potential V;
  V.profile_ = profile;
  V.g_ = amplitude;
  V.shape_ = shape;
  V.m_ = smoothness_m;
  switch (profile) {
    case Profile::gaussian:
      // exp(-(R/shape)^2) <= 1e-16 independently of the coupling
      V.R_ = shape * std::sqrt(16.0 * std::log(10.0));
      break;
    case Profile::exponential:
      V.R_ = shape * 16.0 * std::log(10.0);
      break;
    case Profile::square_well:
      V.R_ = shape;
      break;
    default:
      break;
  }
  if (support_radius > 0.0) V.R_ = support_radius;
  return V;
}

Potential Potential::make_table(TableData data, int smoothness_m) {
  if (data.r.size() != data.v.size() || data.r.size() < 2)
    throw std::invalid_argument("table potential needs matching r/v samples");
  if (!std::is_sorted(data.r.begin(), data.r.end()))
    throw std::invalid_argument("table potential radii must be increasing");
  Potential V;
  V.profile_ = Profile::table;
  V.g_ = Complex(1.0, 0.0);
  V.R_ = data.r.back();
  V.m_ = smoothness_m;
  V.table_ = std::make_shared<const TableData>(std::move(data));
  return V;
}

Complex Potential::raw_amplitude_at(double r) const {
  switch (profile_) {
    case Profile::gaussian: {
      double u = r / shape_;
      return g_ * std::exp(-u * u);
    }
    case Profile::square_well:
      return (r <= shape_) ? g_ : Complex(0.0, 0.0);
    case Profile::exponential:
      return g_ * std::exp(-r / shape_);
    case Profile::table: {
      const auto& T = *table_;
      if (r <= T.r.front()) return T.v.front();
      auto it = std::upper_bound(T.r.begin(), T.r.end(), r);
      size_t hi = size_t(it - T.r.begin());
      if (hi >= T.r.size()) return T.v.back();
      size_t lo = hi - 1;
      double w = (r - T.r[lo]) / (T.r[hi] - T.r[lo]);
      return (1.0 - w) * T.v[lo] + w * T.v[hi];
    }
  }
  return {0.0, 0.0};
}

Complex Potential::eval(double r) const {
  if (r < 0.0) throw std::invalid_argument("eval: r must be nonnegative");
  if (r > R_) return {0.0, 0.0};
  return raw_amplitude_at(r);
}

Complex Potential::deriv(double r) const {
  if (r < 0.0) throw std::invalid_argument("deriv: r must be nonnegative");
  if (r > R_) return {0.0, 0.0};
  switch (profile_) {
    case Profile::gaussian: {
      double u = r / shape_;
      return g_ * (-2.0 * u / shape_) * std::exp(-u * u);
    }
    case Profile::square_well:
      return {0.0, 0.0};  // derivative away from the edge
    case Profile::exponential:
      return g_ * (-1.0 / shape_) * std::exp(-r / shape_);
    case Profile::table:
      throw std::runtime_error("table potential has no derivative data");
  }
  return {0.0, 0.0};
}

bool Potential::is_zero() const {
  if (profile_ == Profile::table) {
    for (const Complex& z : table_->v)
      if (z != Complex(0.0, 0.0)) return false;
    return true;
  }
  return g_ == Complex(0.0, 0.0);
}

bool Potential::is_real() const {
  if (profile_ == Profile::table) {
    for (const Complex& z : table_->v)
      if (z.imag() != 0.0) return false;
    return true;
  }
  return g_.imag() == 0.0;
}

std::vector<double> Potential::kink_radii() const {
  switch (profile_) {
    case Profile::square_well:
      return {shape_};
    case Profile::exponential:
      return {};  // smooth on (0,R); r=0 is an endpoint
    case Profile::table:
      return {table_->r.begin() + 1, table_->r.end() - 1};
    default:
      return {};
  }
}

double Potential::norm_lp(double p) const {
  if (p != 1.0 && p != 1.5 && p != 2.0)
    throw std::invalid_argument("norm_lp: p must be one of 1, 3/2, 2");
  if (is_zero()) return 0.0;
  auto f = [&](double r) -> Complex {
    return Complex(std::pow(std::abs(raw_amplitude_at(r)), p) * r * r, 0.0);
  };
  Complex I = panel_integrate(f, 0.0, R_, kink_radii(), 32, 8);
  return std::pow(4.0 * M_PI * I.real(), 1.0 / p);
}

namespace {

// A(t) = int V1(x - t e) V2(x) dx for radial V1=V2, in bipolar coordinates:
//   A(t) = (2 pi / t) int u V(u) [ int_{|u-t|}^{u+t} v V(v) dv ] du, t > 0.
template <class F>
Complex radial_cross_correlation(const F& f, double t, double R,
                                 const std::vector<double>& kinks) {
  if (t == 0.0) {
    auto g = [&](double r) { return f(r) * f(r) * (r * r); };
    return 4.0 * M_PI * panel_integrate(g, 0.0, R, kinks, 32, 8);
  }
  if (t >= 2.0 * R) return {0.0, 0.0};
  auto outer = [&](double u) -> Complex {
    double lo = std::abs(u - t), hi = std::min(u + t, R);
    if (hi <= lo) return {0.0, 0.0};
    std::vector<double> ik = kinks;
    auto inner = [&](double v) { return f(v) * v; };
    Complex I = panel_integrate(inner, lo, hi, ik, 24, 2);
    return f(u) * u * I;
  };
  double ulo = std::max(0.0, t - R), uhi = R;
  // The inner limits cross profile kinks at u = t +- r_k; split there.
  std::vector<double> ok = kinks;
  for (double rk : kinks) {
    ok.push_back(t - rk);
    ok.push_back(t + rk);
    ok.push_back(rk - t);
  }
  ok.push_back(t);
  ok.push_back(R - t);
  Complex I = panel_integrate(outer, ulo, uhi, ok, 24, 6);
  return (2.0 * M_PI / t) * I;
}

}  // namespace

Complex Potential::autocorrelation(double t) const {
  if (t < 0.0) throw std::invalid_argument("autocorrelation: t must be nonnegative");
  if (is_zero() || t >= 2.0 * R_) return {0.0, 0.0};
  auto f = [&](double r) { return raw_amplitude_at(r); };
  return radial_cross_correlation(f, t, R_, kink_radii()) / (8.0 * M_PI);
}

double Potential::autocorrelation_abs(double t) const {
  if (t < 0.0) throw std::invalid_argument("autocorrelation_abs: t must be nonnegative");
  if (is_zero() || t >= 2.0 * R_) return 0.0;
  auto f = [&](double r) { return Complex(std::abs(raw_amplitude_at(r)), 0.0); };
  return radial_cross_correlation(f, t, R_, kink_radii()).real();
}

Moments Potential::moments_Q() const {
  Moments M;
  if (is_zero()) {
    M.I_list = {0.0, 0.0, 0.0};
    return M;
  }
  auto f0 = [&](double r) -> Complex {
    Complex v = raw_amplitude_at(r);
    return v * v * (r * r);
  };
  Complex I2 = panel_integrate(f0, 0.0, R_, kink_radii(), 32, 8);
  M.Q0 = (4.0 * M_PI * I2) / (16.0 * M_PI);
  if (!has_derivative())
    throw std::runtime_error("moments_Q: Q2 needs derivative data, unsupported for table profiles");
  auto f2 = [&](double r) -> Complex {
    Complex v = raw_amplitude_at(r);
    Complex dv = deriv(r);
    return (dv * dv + 2.0 * v * v * v) * (r * r);
  };
  Complex J = panel_integrate(f2, 0.0, R_, kink_radii(), 32, 8);
  M.Q2 = (4.0 * M_PI * J) / (3.0 * M_PI * 64.0);
  M.I_list = {M.Q0.imag(), 0.0, M.Q2.imag()};
  return M;
}

}  // namespace bslab
