#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "bslab/bsop.hpp"

namespace bslab {

enum class Psi2Mode { closed, channels };
enum class DetRoute { transfer, eigen };

struct NumericsConfig {
  int quad_n = 200;
  double ell_eps = 1e-3;  // Frobenius cutoff threshold for channel_cutoff
  int L_max = kDefaultLMax;
  bool auto_L = true;      // grow the channel cap with |k| R instead of L_max
  double det_eps = 1e-9;   // relative increment stop for the channel sums
  Psi2Mode psi2_mode = Psi2Mode::closed;
  DetRoute det_route = DetRoute::transfer;
};

struct DetDiagnostics {
  int L = -1;
  int n = 0;
  double tail_bound = 0.0;
  double eig_residual = 0.0;  // only populated on the eigen route
};

struct DetEval {
  Complex k{0.0, 0.0};
  Complex psi{1.0, 0.0};
  Complex D4{1.0, 0.0};
  Complex psi2{0.0, 0.0};
  Complex psi3{0.0, 0.0};
  double log_abs_psi = 0.0;
  double log_abs_D4 = 0.0;
  DetDiagnostics diagnostics;
};

// det_2(I + Y0) = prod_l [ prod_i (1+lambda_i) e^{-lambda_i} ]^{2l+1} over the
// channel eigenvalues; eig_residual (if requested) reports the worst
// eigenpair defect across channels.
Complex det2(const ChannelSet& cs, double* eig_residual = nullptr);

// Shares the potential-level caches (autocorrelation panels, quadrature)
// across many k evaluations; all evaluation methods are thread-safe.
class DetEvaluator {
 public:
  DetEvaluator(Potential V, NumericsConfig cfg);

  const Potential& potential() const { return V_; }
  const NumericsConfig& config() const { return cfg_; }
  const Quadrature& quadrature() const { return quad_; }

  // psi_2(k) = int_0^{2R} e^{2ikt} gamma(t) dt on the compactly supported
  // autocorrelation; the gamma panel tables are cached per resolution level.
  Complex psi2_closed(Complex k) const;

  DetEval eval(Complex k) const;
  Complex psi(Complex k) const { return eval(k).psi; }

  // Discretized ||Y0(k)||: largest channel singular value.
  double operator_norm(Complex k) const;

  // Channel cap used at this k (auto mode scales with |k| R).
  int channel_cap(Complex k) const;

 private:
  struct GammaTable;
  const GammaTable& gamma_table(int level) const;

  Potential V_;
  NumericsConfig cfg_;
  Quadrature quad_;
  mutable std::mutex cache_mtx_;
  mutable std::map<int, std::shared_ptr<const GammaTable>> gamma_cache_;
};

struct ScanRow {
  std::optional<DetEval> eval;
  std::string error;  // empty on success
};

std::vector<ScanRow> log_det_scan(const Potential& V, const std::vector<Complex>& k_list,
                                  const NumericsConfig& cfg);

}  // namespace bslab
