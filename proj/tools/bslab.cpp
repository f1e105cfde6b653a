#include <cstdio>
#include <filesystem>
#include <fstream>

#include "CLI11.hpp"
#include "bslab/config.hpp"
#include "bslab/parallel.hpp"
#include "bslab/traceform.hpp"
#include "json.hpp"

using namespace bslab;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFail = 1;
constexpr int kExitConfigError = 2;
constexpr int kExitNumericFailure = 3;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void atomic_write(const std::string& path, const std::string& content) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + tmp);
    os << content;
  }
  std::filesystem::rename(tmp, path);
}

ordered_json json_complex(Complex z) { return ordered_json::array({z.real(), z.imag()}); }

ordered_json report_json(const TraceReport& r, const RunConfig& cfg) {
  ordered_json j;
  j["identity"] = r.identity;
  j["lhs"] = json_complex(r.lhs);
  j["rhs"] = json_complex(r.rhs);
  j["residual"] = r.residual;
  j["verdict"] = r.pass ? "pass" : "fail";
  if (r.inconclusive) j["inconclusive"] = true;
  if (!r.note.empty()) j["note"] = r.note;
  j["params"] = cfg.params_hash();
  return j;
}

std::vector<Complex> scan_grid(const RunConfig& cfg) {
  double re0 = cfg.get_num("scan", "re_min", 0.5);
  double re1 = cfg.get_num("scan", "re_max", 5.0);
  int ren = cfg.get_int("scan", "re_n", 10);
  double im0 = cfg.get_num("scan", "im_min", 0.0);
  double im1 = cfg.get_num("scan", "im_max", 0.0);
  int imn = cfg.get_int("scan", "im_n", 1);
  if (ren < 1 || imn < 1) throw ConfigError("scan: re_n and im_n must be >= 1");
  std::vector<Complex> ks;
  for (int i = 0; i < imn; ++i)
    for (int j = 0; j < ren; ++j) {
      double re = (ren == 1) ? re0 : re0 + (re1 - re0) * j / double(ren - 1);
      double im = (imn == 1) ? im0 : im0 + (im1 - im0) * i / double(imn - 1);
      ks.emplace_back(re, im);
    }
  return ks;
}

Rect rect_from(const RunConfig& cfg) {
  Rect r;
  r.re_lo = cfg.get_num("eigs", "rect_re_lo", -3.0);
  r.re_hi = cfg.get_num("eigs", "rect_re_hi", 3.0);
  r.im_lo = cfg.get_num("eigs", "rect_im_lo", 0.02);
  r.im_hi = cfg.get_num("eigs", "rect_im_hi", 3.2);
  if (!(r.re_lo < r.re_hi) || !(r.im_lo < r.im_hi))
    throw ConfigError("eigs: degenerate search rectangle");
  return r;
}

ordered_json zeroset_json(const ZeroSet& zs, const RunConfig& cfg) {
  ordered_json j;
  ordered_json zeros = ordered_json::array();
  for (const Zero& z : zs.zeros) {
    ordered_json e;
    e["k_re"] = z.k.real();
    e["k_im"] = z.k.imag();
    e["mult"] = z.multiplicity;
    e["lambda_re"] = z.lambda.real();
    e["lambda_im"] = z.lambda.imag();
    e["residual"] = z.newton_residual;
    zeros.push_back(e);
  }
  j["zeros"] = zeros;
  j["B"] = zs.B;
  j["r0"] = zs.r0;
  ordered_json unres = ordered_json::array();
  for (const Rect& r : zs.unresolved)
    unres.push_back(ordered_json::array({r.re_lo, r.re_hi, r.im_lo, r.im_hi}));
  j["unresolved"] = unres;
  j["params_hash"] = cfg.params_hash();
  return j;
}

// Boundary samples of log|psi| and log|D4| along the real axis.
void sample_boundaries(const DetEvaluator& ev, BoundaryData& bd_psi, BoundaryData& bd_d4) {
  int n = int(bd_psi.t.size());
  parallel_for(n, [&](int i) {
    DetEval de = ev.eval(Complex(bd_psi.t[i], 0.0));
    bd_psi.h[i] = de.log_abs_psi;
    bd_d4.h[i] = de.log_abs_D4;
  });
}

struct Pipeline {
  RunConfig cfg;
  Potential V;
  NumericsConfig num;
  DetEvaluator ev;
  explicit Pipeline(const RunConfig& c)
      : cfg(c), V(c.make_potential()), num(c.make_numerics()), ev(V, num) {}
};

int cmd_scan(Pipeline& P, const std::string& out) {
  std::vector<Complex> ks = scan_grid(P.cfg);
  std::vector<ScanRow> rows = log_det_scan(P.V, ks, P.num);
  std::string csv;
  csv += "# params_hash=" + P.cfg.params_hash() + "\n";
  csv +=
      "k_re,k_im,psi_re,psi_im,logabs_psi,logabs_D4,psi2_re,psi2_im,psi3_re,psi3_im,L,n,tail_"
      "bound,error\n";
  for (size_t i = 0; i < rows.size(); ++i) {
    const ScanRow& r = rows[i];
    if (r.eval) {
      const DetEval& d = *r.eval;
      csv += fmt(d.k.real()) + "," + fmt(d.k.imag()) + "," + fmt(d.psi.real()) + "," +
             fmt(d.psi.imag()) + "," + fmt(d.log_abs_psi) + "," + fmt(d.log_abs_D4) + "," +
             fmt(d.psi2.real()) + "," + fmt(d.psi2.imag()) + "," + fmt(d.psi3.real()) + "," +
             fmt(d.psi3.imag()) + "," + std::to_string(d.diagnostics.L) + "," +
             std::to_string(d.diagnostics.n) + "," + fmt(d.diagnostics.tail_bound) + ",\n";
    } else {
      csv += fmt(ks[i].real()) + "," + fmt(ks[i].imag()) + ",,,,,,,,,,,," + r.error + "\n";
    }
  }
  atomic_write(out, csv);
  std::printf("scan: %zu rows -> %s\n", rows.size(), out.c_str());
  return kExitOk;
}

int cmd_eigs(Pipeline& P, const std::string& out) {
  ZeroFinder zf(P.ev, P.cfg.make_spectra());
  ZeroSet zs = zf.locate_zeros(rect_from(P.cfg));
  atomic_write(out, zeroset_json(zs, P.cfg).dump(2) + "\n");
  std::printf("eigs: %zu zeros (total multiplicity %d) -> %s\n", zs.zeros.size(),
              zs.total_multiplicity(), out.c_str());
  return kExitOk;
}

int cmd_factorize(Pipeline& P, const std::string& out) {
  double T = P.cfg.get_num("boundary", "T_max", 60.0);
  int pts = P.cfg.get_int("boundary", "points", 2048);
  BoundaryData bd_psi = make_boundary_grid(T, pts);
  BoundaryData bd_d4 = bd_psi;
  sample_boundaries(P.ev, bd_psi, bd_d4);
  if (P.V.has_derivative()) {
    Moments mom = P.V.moments_Q();
    bd_psi.tail_coeffs = {mom.Q0.imag(), 0.0, mom.Q2.imag()};
  } else {
    bd_psi.tail_coeffs = fit_tail_coeffs(bd_psi, 2);
  }

  ZeroFinder zf(P.ev, P.cfg.make_spectra());
  ZeroSet zs = zf.locate_zeros(rect_from(P.cfg));

  int np = P.cfg.get_int("factorize", "probe_count", 8);
  double rad = P.cfg.get_num("factorize", "probe_radius", 3.0);
  std::vector<Complex> probes;
  std::vector<double> pre = P.cfg.get_list("factorize", "probe_re");
  std::vector<double> pim = P.cfg.get_list("factorize", "probe_im");
  if (!pre.empty() && pre.size() == pim.size()) {
    for (size_t i = 0; i < pre.size(); ++i) probes.emplace_back(pre[i], pim[i]);
  } else {
    for (int i = 0; i < np; ++i) {
      double th = M_PI * (i + 0.5) / np;
      probes.push_back(rad * Complex(std::cos(th), std::sin(th)));
    }
  }
  int order = P.cfg.get_int("factorize", "moment_order", 2);
  FactorizationData fd = inner_outer_residual(P.ev, zs, bd_psi, probes, order);

  ordered_json j;
  j["K"] = fd.K_coeffs;
  j["J"] = fd.J_coeffs;
  j["nu_total"] = fd.nu_total;
  ordered_json rp = ordered_json::array();
  for (const auto& [k, r] : fd.residual_probes) {
    ordered_json e;
    e["k_re"] = k.real();
    e["k_im"] = k.imag();
    e["residual"] = r;
    rp.push_back(e);
  }
  j["residual_probes"] = rp;
  j["zeros"] = zeroset_json(zs, P.cfg)["zeros"];
  j["params_hash"] = P.cfg.params_hash();
  std::string bpath = P.cfg.get_str("output", "boundary_csv", "");
  if (!bpath.empty()) write_boundary_csv(bd_psi, bpath);
  atomic_write(out, j.dump(2) + "\n");
  double worst = 0.0;
  for (const auto& [k, r] : fd.residual_probes) worst = std::max(worst, r);
  std::printf("factorize: %zu probes, max residual %.3e -> %s\n", fd.residual_probes.size(),
              worst, out.c_str());
  return kExitOk;
}

int cmd_verify(Pipeline& P, const std::string& out) {
  std::istringstream ids(P.cfg.get_str("verify", "identities", "tr12"));
  std::vector<std::string> wanted;
  for (std::string w; ids >> w;) wanted.push_back(w);
  if (wanted.empty()) throw ConfigError("verify: no identities requested");

  double T = P.cfg.get_num("boundary", "T_max", 60.0);
  int pts = P.cfg.get_int("boundary", "points", 2048);
  BoundaryData bd_psi = make_boundary_grid(T, pts);
  BoundaryData bd_d4 = bd_psi;
  sample_boundaries(P.ev, bd_psi, bd_d4);
  if (P.V.has_derivative()) {
    Moments mom = P.V.moments_Q();
    bd_psi.tail_coeffs = {mom.Q0.imag(), 0.0, mom.Q2.imag()};
  } else {
    bd_psi.tail_coeffs = fit_tail_coeffs(bd_psi, 2);
  }

  ZeroFinder zf(P.ev, P.cfg.make_spectra());
  ZeroSet zs = zf.locate_zeros(rect_from(P.cfg));

  std::vector<TraceReport> reports;
  for (const std::string& w : wanted) {
    if (w == "tr12") {
      reports.push_back(verify_tr12(zs, bd_d4, P.cfg.get_num("verify", "tol_tr12", 1e-3)));
    } else if (w == "trj1" || w == "trj:1") {
      reports.push_back(
          verify_trj(P.V, zs, bd_psi, 1, P.cfg.get_num("verify", "tol_trj", 1e-2)));
    } else if (w == "trj2" || w == "trj:2") {
      reports.push_back(
          verify_trj(P.V, zs, bd_psi, 2, P.cfg.get_num("verify", "tol_trj", 1e-2)));
    } else if (w == "tre1") {
      std::vector<double> re = P.cfg.get_list("verify", "tre1_re");
      std::vector<double> im = P.cfg.get_list("verify", "tre1_im");
      if (re.empty() || re.size() != im.size())
        throw ConfigError("verify: tre1 needs matching tre1_re / tre1_im lists");
      for (size_t i = 0; i < re.size(); ++i)
        reports.push_back(verify_tre1(P.ev, zs, bd_psi, Complex(re[i], im[i]),
                                      P.cfg.get_num("verify", "tol_tre1", 1e-3)));
    } else if (w == "envelope") {
      std::vector<Complex> grid;
      for (int i = 0; i < 10; ++i)
        for (int j = 0; j < 20; ++j)
          grid.emplace_back(-4.75 + 9.5 * j / 19.0, 0.05 + 3.15 * i / 9.0);
      reports.push_back(
          check_envelope_bounds(P.ev, grid, P.cfg.get_num("verify", "envelope_slack", 1e-6)));
    } else if (w == "t4") {
      reports.push_back(check_bound_T4(P.V, zs, P.cfg.get_num("verify", "c2", 1.0)));
    } else {
      throw ConfigError("verify: unknown identity '" + w + "'");
    }
  }
  ordered_json arr = ordered_json::array();
  bool all_pass = true;
  for (const TraceReport& r : reports) {
    arr.push_back(report_json(r, P.cfg));
    all_pass = all_pass && r.pass;
    std::printf("%-18s %s  residual=%.3e\n", r.identity.c_str(), r.pass ? "pass" : "FAIL",
                r.residual);
  }
  atomic_write(out, arr.dump(2) + "\n");
  return all_pass ? kExitOk : kExitVerifyFail;
}

int cmd_info(Pipeline& P) {
  std::printf("profile        : %s\n", to_string(P.V.profile()).c_str());
  std::printf("amplitude      : (%g, %g)\n", P.V.amplitude().real(), P.V.amplitude().imag());
  std::printf("support radius : %g\n", P.V.support_radius());
  std::printf("||V||_1        : %.12g\n", P.V.norm_lp(1.0));
  std::printf("||V||_3/2      : %.12g\n", P.V.norm_lp(1.5));
  std::printf("||V||_2        : %.12g\n", P.V.norm_lp(2.0));
  if (P.V.has_derivative()) {
    Moments m = P.V.moments_Q();
    std::printf("Q0             : (%.12g, %.12g)\n", m.Q0.real(), m.Q0.imag());
    std::printf("Q2             : (%.12g, %.12g)\n", m.Q2.real(), m.Q2.imag());
  }
  std::printf("params_hash    : %s\n", P.cfg.params_hash().c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Birman-Schwinger determinant laboratory"};
  app.require_subcommand(1);

  std::string config_path, out_path;
  std::vector<std::string> overrides;
  app.add_option("-c,--config", config_path, "configuration file");
  app.add_option("-o,--out", out_path, "output path (overrides [output] keys)");
  app.add_option("--set", overrides, "override config keys (section.key=value)")->take_all();

  CLI::App* sc_scan = app.add_subcommand("scan", "determinant scan over a k grid -> CSV");
  CLI::App* sc_eigs = app.add_subcommand("eigs", "locate zeros of psi -> JSON");
  CLI::App* sc_verify = app.add_subcommand("verify", "trace-formula verification -> JSON");
  CLI::App* sc_fact = app.add_subcommand("factorize", "inner/outer factorization -> JSON");
  CLI::App* sc_info = app.add_subcommand("info", "print potential summary");

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig cfg = config_path.empty() ? RunConfig::parse("") : RunConfig::load(config_path);
    for (const std::string& ov : overrides) {
      size_t dot = ov.find('.');
      size_t eq = ov.find('=');
      if (dot == std::string::npos || eq == std::string::npos || eq < dot)
        throw ConfigError("--set expects section.key=value, got: " + ov);
      cfg.set(ov.substr(0, dot), ov.substr(dot + 1, eq - dot - 1), ov.substr(eq + 1));
    }
    Pipeline P(cfg);
    if (sc_info->parsed()) return cmd_info(P);
    if (sc_scan->parsed()) {
      std::string out =
          out_path.empty() ? P.cfg.get_str("output", "scan_csv", "scan.csv") : out_path;
      return cmd_scan(P, out);
    }
    if (sc_eigs->parsed()) {
      std::string out =
          out_path.empty() ? P.cfg.get_str("output", "eigs_json", "eigs.json") : out_path;
      return cmd_eigs(P, out);
    }
    if (sc_verify->parsed()) {
      std::string out =
          out_path.empty() ? P.cfg.get_str("output", "verify_json", "verify.json") : out_path;
      return cmd_verify(P, out);
    }
    if (sc_fact->parsed()) {
      std::string out =
          out_path.empty() ? P.cfg.get_str("output", "factorize_json", "factorize.json") : out_path;
      return cmd_factorize(P, out);
    }
    return kExitConfigError;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfigError;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "numeric failure: %s\n", e.what());
    return kExitNumericFailure;
  }
}
