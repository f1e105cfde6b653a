#pragma once

#include <memory>
#include <string>
#include <vector>

#include "bslab/scaled.hpp"

namespace bslab {

enum class Profile { gaussian, square_well, exponential, table };

Profile profile_from_string(const std::string& s);
std::string to_string(Profile p);

struct Moments {
  Complex Q0{0.0, 0.0};
  Complex Q2{0.0, 0.0};
  // I_j = Im Q_j; odd entries vanish for this class of symbols.
  std::vector<double> I_list;
};

struct TableData {
  std::vector<double> r;
  std::vector<Complex> v;
};

// Radial complex potential with truncated support: eval(r) = 0 for r > R.
class Potential {
 public:
  // shape: gaussian/exponential width, square_well edge radius; ignored for table.
  static Potential make(Profile profile, Complex amplitude, double shape,
                        double support_radius = 0.0, int smoothness_m = 1);
  static Potential make_table(TableData data, int smoothness_m = 0);

  Complex eval(double r) const;
  Complex deriv(double r) const;  // dV/dr, analytic per profile
  bool has_derivative() const { return profile_ != Profile::table; }

  double support_radius() const { return R_; }
  Complex amplitude() const { return g_; }
  double shape() const { return shape_; }
  Profile profile() const { return profile_; }
  int smoothness_m() const { return m_; }
  bool is_zero() const;
  bool is_real() const;

  // Radii where the profile loses smoothness; quadratures split there.
  std::vector<double> kink_radii() const;

  // (4 pi int_0^R |V|^p r^2 dr)^{1/p}, p in {1, 3/2, 2}.
  double norm_lp(double p) const;

  // gamma(t) = A(t)/(8 pi) with A(t) = int V(x - t e) V(x) dx  (no conjugation).
  Complex autocorrelation(double t) const;
  // Same reduction applied to |V|; used by the Hilbert-Schmidt oracle.
  double autocorrelation_abs(double t) const;

  Moments moments_Q() const;

 private:
  Potential() = default;
  Complex raw_amplitude_at(double r) const;

  Profile profile_ = Profile::gaussian;
  Complex g_{0.0, 0.0};
  double shape_ = 1.0;
  double R_ = 0.0;
  int m_ = 1;
  std::shared_ptr<const TableData> table_;
};

}  // namespace bslab
