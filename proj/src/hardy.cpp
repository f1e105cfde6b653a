#include "bslab/hardy.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace bslab {

BoundaryData make_boundary_grid(double T_max, int total_points) {
  if (!(T_max > 0.0)) throw std::invalid_argument("boundary grid: T_max must be positive");
  int per_side = std::max(8, total_points / 2);
  const GaussRule& g = gauss_legendre(per_side);
  BoundaryData bd;
  bd.T_max = T_max;
  bd.t.resize(2 * per_side);
  bd.w.resize(2 * per_side);
  for (int i = 0; i < per_side; ++i) {
    double u = 0.5 * (g.x[i] + 1.0);
    double wu = 0.5 * g.w[i];
    double t = T_max * u * u * u;
    double wt = 3.0 * T_max * u * u * wu;
    bd.t[per_side + i] = t;
    bd.w[per_side + i] = wt;
    bd.t[per_side - 1 - i] = -t;
    bd.w[per_side - 1 - i] = wt;
  }
  bd.h.assign(bd.t.size(), 0.0);
  return bd;
}

void fill_boundary(BoundaryData& bd, const std::function<double(double)>& h) {
  for (size_t i = 0; i < bd.t.size(); ++i) bd.h[i] = h(bd.t[i]);
}

std::vector<double> fit_tail_coeffs(const BoundaryData& bd, int m) {
  // normal equations for h(t) ~ sum_j I_j t^{-(j+1)} on |t| >= T/2
  int dim = m + 1;
  std::vector<double> ata(dim * dim, 0.0), atb(dim, 0.0);
  int used = 0;
  for (size_t i = 0; i < bd.t.size(); ++i) {
    double t = bd.t[i];
    if (std::abs(t) < 0.5 * bd.T_max) continue;
    ++used;
    std::vector<double> phi(dim);
    double p = 1.0 / t;
    for (int j = 0; j < dim; ++j) {
      phi[j] = p;
      p /= t;
    }
    for (int a = 0; a < dim; ++a) {
      atb[a] += phi[a] * bd.h[i];
      for (int b = 0; b < dim; ++b) ata[a * dim + b] += phi[a] * phi[b];
    }
  }
  if (used < dim) throw std::invalid_argument("fit_tail_coeffs: not enough far-field samples");
  // Gaussian elimination on the small SPD system
  for (int c = 0; c < dim; ++c) {
    int piv = c;
    for (int r = c + 1; r < dim; ++r)
      if (std::abs(ata[r * dim + c]) > std::abs(ata[piv * dim + c])) piv = r;
    for (int j = 0; j < dim; ++j) std::swap(ata[c * dim + j], ata[piv * dim + j]);
    std::swap(atb[c], atb[piv]);
    for (int r = c + 1; r < dim; ++r) {
      double f = ata[r * dim + c] / ata[c * dim + c];
      for (int j = c; j < dim; ++j) ata[r * dim + j] -= f * ata[c * dim + j];
      atb[r] -= f * atb[c];
    }
  }
  std::vector<double> I(dim, 0.0);
  for (int r = dim - 1; r >= 0; --r) {
    double s = atb[r];
    for (int j = r + 1; j < dim; ++j) s -= ata[r * dim + j] * I[j];
    I[r] = s / ata[r * dim + r];
  }
  return I;
}

namespace {

double tail_model(const BoundaryData& bd, double t) {
  double s = 0.0, p = 1.0 / t;
  for (double I : bd.tail_coeffs) {
    s += I * p;
    p /= t;
  }
  return s;
}

// int_{T}^{inf} P(t) (k-t)^{-pow} dt via the substitution t = T/u.
Complex tail_cauchy(const BoundaryData& bd, Complex k, int sign, int pow) {
  if (bd.tail_coeffs.empty()) return {0.0, 0.0};
  const GaussRule& g = gauss_legendre(48);
  Complex s{0.0, 0.0};
  for (int i = 0; i < 48; ++i) {
    double u = 0.5 * (g.x[i] + 1.0);
    double wu = 0.5 * g.w[i];
    double t = sign * bd.T_max / u;
    Complex den = k - t;
    Complex ker = (pow == 1) ? 1.0 / den : 1.0 / (den * den);
    s += wu * tail_model(bd, t) * ker * (bd.T_max / (u * u));
  }
  return s;
}

// int_{-T}^{T} (t-t0)^j / (k-t) dt, j = 0,1,2
void poly_cauchy_moments(Complex k, double t0, double T, Complex out[3]) {
  Complex L0 = std::log(k + T) - std::log(k - T);
  out[0] = L0;
  Complex a = k - t0;
  // int (t-t0)^j/(k-t) = -int (t-t0)^{j-1} dt + a * out[j-1]
  double m1 = ((T - t0) * (T - t0) - (-T - t0) * (-T - t0)) / 2.0;  // int (t-t0) dt
  out[1] = -2.0 * T + a * out[0];
  out[2] = -m1 + a * out[1];
}

}  // namespace

Complex cauchy_transform(const BoundaryData& bd, Complex k) {
  if (!(k.imag() > 0.0))
    throw std::invalid_argument("cauchy_transform: Im k must be positive");
  size_t n = bd.t.size();
  Complex s{0.0, 0.0};
  double t0 = k.real();
  bool near_axis = k.imag() < 0.05 && std::abs(t0) < bd.T_max;
  if (!near_axis) {
    for (size_t i = 0; i < n; ++i) s += bd.w[i] * bd.h[i] / (k - bd.t[i]);
  } else {
    // local quadratic fit of h around t0, integrated in closed form
    double c[3] = {0.0, 0.0, 0.0};
    {
      size_t j0 = std::lower_bound(bd.t.begin(), bd.t.end(), t0) - bd.t.begin();
      size_t lo = (j0 > 8) ? j0 - 8 : 0;
      size_t hi = std::min(n, j0 + 8);
      double A[9] = {0, 0, 0, 0, 0, 0, 0, 0, 0}, rhs[3] = {0, 0, 0};
      for (size_t i = lo; i < hi; ++i) {
        double d = bd.t[i] - t0;
        double phi[3] = {1.0, d, d * d};
        for (int a = 0; a < 3; ++a) {
          rhs[a] += phi[a] * bd.h[i];
          for (int b = 0; b < 3; ++b) A[a * 3 + b] += phi[a] * phi[b];
        }
      }
      // 3x3 solve
      for (int cc = 0; cc < 3; ++cc) {
        int piv = cc;
        for (int r = cc + 1; r < 3; ++r)
          if (std::abs(A[r * 3 + cc]) > std::abs(A[piv * 3 + cc])) piv = r;
        for (int j = 0; j < 3; ++j) std::swap(A[cc * 3 + j], A[piv * 3 + j]);
        std::swap(rhs[cc], rhs[piv]);
        for (int r = cc + 1; r < 3; ++r) {
          double f = A[r * 3 + cc] / A[cc * 3 + cc];
          for (int j = cc; j < 3; ++j) A[r * 3 + j] -= f * A[cc * 3 + j];
          rhs[r] -= f * rhs[cc];
        }
      }
      for (int r = 2; r >= 0; --r) {
        double v = rhs[r];
        for (int j = r + 1; j < 3; ++j) v -= A[r * 3 + j] * c[j];
        c[r] = v / A[r * 3 + r];
      }
    }
    for (size_t i = 0; i < n; ++i) {
      double d = bd.t[i] - t0;
      double p = c[0] + c[1] * d + c[2] * d * d;
      s += bd.w[i] * (bd.h[i] - p) / (k - bd.t[i]);
    }
    Complex mom[3];
    poly_cauchy_moments(k, t0, bd.T_max, mom);
    s += c[0] * mom[0] + c[1] * mom[1] + c[2] * mom[2];
  }
  s += tail_cauchy(bd, k, +1, 1);
  s += tail_cauchy(bd, k, -1, 1);
  return s / M_PI;
}

Complex cauchy_transform_deriv(const BoundaryData& bd, Complex k) {
  if (!(k.imag() > 0.0))
    throw std::invalid_argument("cauchy_transform_deriv: Im k must be positive");
  Complex s{0.0, 0.0};
  for (size_t i = 0; i < bd.t.size(); ++i) {
    Complex d = k - bd.t[i];
    s += bd.w[i] * bd.h[i] / (d * d);
  }
  s += tail_cauchy(bd, k, +1, 2);
  s += tail_cauchy(bd, k, -1, 2);
  return -s / M_PI;
}

std::vector<double> moments_J(const BoundaryData& bd, int m) {
  if (int(bd.tail_coeffs.size()) < m + 1)
    throw std::invalid_argument("moments_J: tail coefficients missing through order m");
  std::vector<double> J(m + 1, 0.0);
  size_t n = bd.t.size();
  for (int j = 0; j <= m; ++j) {
    double s = 0.0;
    for (size_t i = 0; i < n; ++i) {
      double t = bd.t[i];
      // h_{j-1}(t) = t^j (h - P_{j-1}),  P_{j-1} = sum_{p<j} I_p/t^{p+1}
      double P = 0.0, q = 1.0 / t;
      for (int p = 0; p < j; ++p) {
        P += bd.tail_coeffs[p] * q;
        q /= t;
      }
      s += bd.w[i] * std::pow(t, j) * (bd.h[i] - P);
    }
    // symmetric tail: only odd i-j survive the +-t pairing
    double tail = 0.0;
    for (int i = j + 1; i < int(bd.tail_coeffs.size()); ++i)
      if ((i - j) % 2 == 1) tail += 2.0 * bd.tail_coeffs[i] * std::pow(bd.T_max, j - i) / (i - j);
    J[j] = (s + tail) / M_PI;
  }
  return J;
}

std::vector<AsymptoticRecord> asymptotic_M(const BoundaryData& bd, int m,
                                           const std::vector<double>& taus) {
  std::vector<double> J = moments_J(bd, m);
  std::vector<AsymptoticRecord> out;
  for (double tau : taus) {
    Complex k(0.0, tau);
    AsymptoticRecord rec;
    rec.tau = tau;
    rec.M = cauchy_transform(bd, k);
    Complex S{0.0, 0.0};
    Complex kp = k;
    for (int j = 0; j < m; ++j) {
      S += (J[j] - Complex(0.0, 1.0) * bd.tail_coeffs[j]) / kp;
      kp *= k;
    }
    rec.partial_sum = S;
    double head = std::abs(Complex(J[m], -bd.tail_coeffs[m]));
    rec.remainder = std::pow(tau, m + 1) * std::abs(rec.M - S) - head;
    out.push_back(rec);
  }
  return out;
}

Complex blaschke_eval(const ZeroSet& zs, Complex k) {
  if (!(k.imag() > 0.0)) throw std::invalid_argument("blaschke_eval: Im k must be positive");
  Complex B{1.0, 0.0};
  for (const Zero& z : zs.zeros) {
    Complex den = k - std::conj(z.k);
    if (den == Complex(0.0, 0.0)) throw std::invalid_argument("blaschke_eval: pole hit");
    Complex f = (k - z.k) / den;
    for (int m = 0; m < z.multiplicity; ++m) B *= f;
  }
  return B;
}

Complex blaschke_log_deriv(const ZeroSet& zs, Complex k) {
  Complex s{0.0, 0.0};
  for (const Zero& z : zs.zeros)
    s += double(z.multiplicity) * Complex(0.0, 2.0 * z.k.imag()) /
         ((k - z.k) * (k - std::conj(z.k)));
  return s;
}

BlaschkeSeries blaschke_log_series(const ZeroSet& zs, Complex k, int nmax) {
  if (zs.zeros.empty()) return {Complex(0.0, 0.0), 0.0};
  double r0 = zs.r0;
  if (!(std::abs(k) > r0))
    throw std::invalid_argument("blaschke_log_series: |k| must exceed r0");
  std::vector<double> B = (int(zs.B.size()) > nmax) ? zs.B : blaschke_coeffs(zs, nmax);
  Complex s{0.0, 0.0};
  Complex kp = k;
  for (int n = 0; n <= nmax; ++n) {
    s += B[n] / ((n + 1.0) * kp);
    kp *= k;
  }
  double rho = r0 / std::abs(k);
  double A = 0.5 * M_PI * (B.empty() ? 0.0 : std::abs(B[0]));
  double tail = (r0 > 0.0) ? (A / r0) * std::pow(rho, nmax + 2) / (1.0 - rho)
                           : 0.0;
  return {Complex(0.0, -1.0) * s, tail};
}

FactorizationData inner_outer_residual(const DetEvaluator& ev, const ZeroSet& zs,
                                       const BoundaryData& bd_psi,
                                       const std::vector<Complex>& probes, int moment_order) {
  FactorizationData fd;
  fd.zeros = zs;
  fd.nu_total = 0.0;
  fd.K_coeffs.assign(moment_order + 1, 0.0);
  fd.J_coeffs = moments_J(bd_psi, moment_order);
  for (Complex k : probes) {
    if (k.imag() < 1e-2)
      throw std::invalid_argument("inner_outer_residual: probe below Im k = 1e-2 rejected");
    Complex psi = ev.psi(k);
    Complex B = blaschke_eval(zs, k);
    Complex M = cauchy_transform(bd_psi, k);
    double r = std::abs(psi - B * std::exp(Complex(0.0, 1.0) * M));
    fd.residual_probes.emplace_back(k, r);
  }
  return fd;
}

void write_boundary_csv(const BoundaryData& bd, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  os << "t,h\n";
  os.precision(17);
  for (size_t i = 0; i < bd.t.size(); ++i) os << bd.t[i] << "," << bd.h[i] << "\n";
}

BoundaryData read_boundary_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  BoundaryData bd;
  std::string line;
  std::getline(is, line);  // header
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    double t, h;
    char comma;
    ss >> t >> comma >> h;
    bd.t.push_back(t);
    bd.h.push_back(h);
  }
  if (!bd.t.empty()) bd.T_max = std::abs(bd.t.back());
  bd.w.assign(bd.t.size(), 0.0);
  return bd;
}

}  // namespace bslab
