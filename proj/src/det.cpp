#include "bslab/det.hpp"

#include <cmath>

#include <memory>

#include "bslab/parallel.hpp"

namespace bslab {

Complex det2(const ChannelSet& cs, double* eig_residual) {
  Complex total{1.0, 0.0};
  double worst = 0.0;
  for (const ChannelMatrix& c : cs.channels) {
    EigResult eig = eigen_dense(c.A);
    worst = std::max(worst, eig.max_residual);
    Complex fac{1.0, 0.0};
    for (const Complex& lam : eig.values) fac *= (1.0 + lam) * std::exp(-lam);
    Complex pw{1.0, 0.0};
    for (int m = 0; m < 2 * c.ell + 1; ++m) pw *= fac;
    total *= pw;
  }
  if (eig_residual) *eig_residual = worst;
  return total;
}

// ---------------------------------------------------------------------------

struct DetEvaluator::GammaTable {
  std::vector<double> t;
  std::vector<double> w;
  std::vector<Complex> gamma;
};

DetEvaluator::DetEvaluator(Potential V, NumericsConfig cfg)
    : V_(std::move(V)), cfg_(cfg), quad_(build_quadrature(std::max(V_.support_radius(), 1e-8), cfg.quad_n)) {}

const DetEvaluator::GammaTable& DetEvaluator::gamma_table(int level) const {
  {
    std::lock_guard<std::mutex> lk(cache_mtx_);
    auto it = gamma_cache_.find(level);
    if (it != gamma_cache_.end()) return *it->second;
  }
  // Composite 16-point panels over [0, 2R], 32 * 2^level panels.
  auto tbl = std::make_shared<GammaTable>();
  double len = 2.0 * V_.support_radius();
  int panels = 32 << level;
  const GaussRule& g = gauss_legendre(16);
  double h = len / panels;
  tbl->t.reserve(size_t(panels) * 16);
  tbl->w.reserve(size_t(panels) * 16);
  for (int p = 0; p < panels; ++p) {
    double c = (p + 0.5) * h;
    for (int i = 0; i < 16; ++i) {
      tbl->t.push_back(c + 0.5 * h * g.x[i]);
      tbl->w.push_back(0.5 * h * g.w[i]);
    }
  }
  tbl->gamma.resize(tbl->t.size());
  for (size_t i = 0; i < tbl->t.size(); ++i) tbl->gamma[i] = V_.autocorrelation(tbl->t[i]);
  std::lock_guard<std::mutex> lk(cache_mtx_);
  auto it = gamma_cache_.emplace(level, tbl).first;
  return *it->second;
}

Complex DetEvaluator::psi2_closed(Complex k) const {
  if (V_.is_zero()) return {0.0, 0.0};
  // Panel length must resolve e^{2ikt}: keep 2|k| h <= 4.
  double len = 2.0 * V_.support_radius();
  int need = std::max(32, int(std::ceil(len * std::abs(k) / 2.0)));
  int level = 0;
  while ((32 << level) < need && level < 12) ++level;
  const GammaTable& tbl = gamma_table(level);
  Complex s{0.0, 0.0};
  Complex ik2 = Complex(0.0, 2.0) * k;
  for (size_t i = 0; i < tbl.t.size(); ++i)
    s += tbl.w[i] * std::exp(ik2 * tbl.t[i]) * tbl.gamma[i];
  return s;
}

int DetEvaluator::channel_cap(Complex k) const {
  if (!cfg_.auto_L) return cfg_.L_max;
  double zmax = std::abs(k) * V_.support_radius();
  return std::max(cfg_.L_max, int(std::ceil(1.15 * zmax)) + 40);
}

DetEval DetEvaluator::eval(Complex k) const {
  if (k == Complex(0.0, 0.0)) throw std::invalid_argument("eval_det: k must be nonzero");
  DetEval out;
  out.k = k;
  out.diagnostics.n = cfg_.quad_n;
  if (V_.is_zero()) {
    out.diagnostics.L = 0;
    return out;
  }

  if (cfg_.det_route == DetRoute::eigen) {
    ChannelSet cs = channel_cutoff(V_, k, quad_, cfg_.ell_eps, cfg_.L_max);
    double resid = 0.0;
    out.psi = det2(cs, &resid);
    out.psi2 = 0.5 * trace_power(cs, 2);
    out.psi3 = trace_power(cs, 3) / 3.0;
    out.D4 = out.psi * std::exp(out.psi2 - out.psi3);
    out.log_abs_psi = std::log(std::abs(out.psi));
    out.log_abs_D4 = std::log(std::abs(out.D4));
    out.diagnostics.L = cs.L;
    out.diagnostics.tail_bound = cs.tail_bound;
    out.diagnostics.eig_residual = resid;
    return out;
  }

  int cap = channel_cap(k);
  // The log det_4 channel series converges superexponentially once ell
  // passes |k| R; the trace sums carry an unresolvable quadrature floor and
  // are cut at the same point. Tables start just past that knee and extend
  // only if the stop criterion is late.
  int ell_geo = int(std::ceil(1.02 * std::abs(k) * V_.support_radius())) + 3;
  int lmax = std::min(cap, ell_geo + 12);
  ChannelWorkspace ws(V_, k, quad_, lmax);
  Complex log_d4{0.0, 0.0};
  Complex psi2_ch{0.0, 0.0};
  Complex psi3{0.0, 0.0};
  int consecutive = 0;
  int L = cap;
  for (int ell = 0; ell <= cap; ++ell) {
    if (ell > ws.lmax()) ws.extend(std::min(cap, std::max(ws.lmax() + 16, ws.lmax() * 3 / 2)));
    ChannelSums cs = channel_sums(ws.factors(ell));
    double w = 2.0 * ell + 1.0;
    Complex d4 = w * (cs.logdet_IplusA - cs.trace + 0.5 * cs.trace2 - cs.trace3 / 3.0);
    Complex t2 = w * 0.5 * cs.trace2;
    Complex t3 = w * cs.trace3 / 3.0;
    log_d4 += d4;
    psi2_ch += t2;
    psi3 += t3;
    double scale = std::max(1.0, std::abs(log_d4));
    consecutive = (std::abs(d4) < cfg_.det_eps * scale) ? consecutive + 1 : 0;
    if (consecutive >= 3 && ell >= ell_geo) {
      L = ell;
      break;
    }
  }
  Complex psi2 = (cfg_.psi2_mode == Psi2Mode::closed) ? psi2_closed(k) : psi2_ch;
  Complex log_psi = log_d4 - psi2 + psi3;
  out.psi = std::exp(log_psi);
  out.D4 = std::exp(log_d4);
  out.psi2 = psi2;
  out.psi3 = psi3;
  out.log_abs_psi = log_psi.real();
  out.log_abs_D4 = log_d4.real();
  out.diagnostics.L = L;
  return out;
}

double DetEvaluator::operator_norm(Complex k) const {
  if (V_.is_zero()) return 0.0;
  int cap = channel_cap(k);
  int ell_geo = int(std::ceil(1.02 * std::abs(k) * V_.support_radius())) + 3;
  int lmax = std::min(cap, ell_geo + 12);
  ChannelWorkspace ws(V_, k, quad_, lmax);
  double best = 0.0;
  int below = 0;
  for (int ell = 0; ell <= cap; ++ell) {
    if (ell > ws.lmax()) ws.extend(std::min(cap, std::max(ws.lmax() + 16, ws.lmax() * 3 / 2)));
    double s = channel_sigma_max(ws.factors(ell));
    best = std::max(best, s);
    below = (s < 1e-3 * best) ? below + 1 : 0;
    if (below >= 3) break;
  }
  return best;
}

std::vector<ScanRow> log_det_scan(const Potential& V, const std::vector<Complex>& k_list,
                                  const NumericsConfig& cfg) {
  DetEvaluator ev(V, cfg);
  std::vector<ScanRow> rows(k_list.size());
  parallel_for(int(k_list.size()), [&](int i) {
    try {
      rows[i].eval = ev.eval(k_list[i]);
    } catch (const std::exception& e) {
      rows[i].error = e.what();
    }
  });
  return rows;
}

}  // namespace bslab
