#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "bslab/traceform.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace bslab;

namespace {

struct WellPipeline {
  Potential V;
  DetEvaluator ev;
  ZeroSet zs;
  BoundaryData bd_psi;
  BoundaryData bd_d4;

  WellPipeline(double V0, int quad_n, double T, int pts)
      : V(Potential::make(Profile::square_well, Complex(-V0, 0.0), 1.0)),
        ev(V, [&] {
          NumericsConfig c;
          c.quad_n = quad_n;
          return c;
        }()) {
    SpectraConfig scfg;
    scfg.estimate_r0 = false;
    zs = ZeroFinder(ev, scfg).locate_zeros(Rect{-0.2, 0.2, 0.01, 5.0});
    bd_psi = make_boundary_grid(T, pts);
    bd_d4 = bd_psi;
    for (size_t i = 0; i < bd_psi.t.size(); ++i) {
      DetEval de = ev.eval(Complex(bd_psi.t[i], 0.0));
      bd_psi.h[i] = de.log_abs_psi;
      bd_d4.h[i] = de.log_abs_D4;
    }
    Moments mom = V.moments_Q();
    bd_psi.tail_coeffs = {mom.Q0.imag(), 0.0, mom.Q2.imag()};
  }
};

}  // namespace

TEST_CASE("residual metric") {
  CHECK(trace_residual(Complex(1, 0), Complex(1, 0)) == 0.0);
  CHECK(trace_residual(Complex(0, 0), Complex(3, 0)) == doctest::Approx(0.75));
}

TEST_CASE("all identities are trivial for the zero potential") {
  Potential zero = Potential::make(Profile::gaussian, Complex(0, 0), 1.0);
  NumericsConfig cfg;
  DetEvaluator ev(zero, cfg);
  ZeroSet zs;
  zs.B = blaschke_coeffs(zs, 4);
  BoundaryData bd = make_boundary_grid(30.0, 256);
  bd.tail_coeffs = {0.0, 0.0, 0.0};
  TraceReport r12 = verify_tr12(zs, bd, 1e-3);
  CHECK(r12.pass);
  CHECK(r12.residual == 0.0);
  TraceReport r1 = verify_trj(zero, zs, bd, 1, 1e-2);
  CHECK(r1.pass);
  TraceReport re1 = verify_tre1(ev, zs, bd, Complex(0, 2), 1e-3);
  CHECK(re1.pass);
  CHECK(std::abs(re1.lhs) < 1e-12);
  TraceReport t4 = check_bound_T4(zero, zs, 1.0);
  CHECK(t4.pass);
  CHECK(t4.lhs == Complex(0.0, 0.0));
}

TEST_CASE("tr12 on the V0=5 well") {
  WellPipeline P(5.0, 120, 40.0, 1024);
  REQUIRE(P.zs.zeros.size() == 1);
  TraceReport rep = verify_tr12(P.zs, P.bd_d4, 2e-2);
  // lhs = 2 kappa
  CHECK(rep.lhs.real() == doctest::Approx(2.0 * oracles::well_swave_kappa(5.0)).epsilon(1e-3));
  CHECK(rep.pass);
  CHECK(!rep.inconclusive);
}

TEST_CASE("tr12 vanishes for a well below the binding threshold") {
  WellPipeline P(1.0, 100, 40.0, 1024);
  CHECK(P.zs.zeros.empty());
  TraceReport rep = verify_tr12(P.zs, P.bd_d4, 1e-3);
  CHECK(rep.lhs == Complex(0.0, 0.0));
  CHECK(std::abs(rep.rhs) < 2e-3);
}

TEST_CASE("trj input validation") {
  Potential V = Potential::make(Profile::square_well, Complex(-5, 0), 1.0, 0.0, 0);
  ZeroSet zs;
  BoundaryData bd = make_boundary_grid(20.0, 128);
  bd.tail_coeffs = {0.0, 0.0, 0.0};
  CHECK_THROWS_AS(verify_trj(V, zs, bd, 3, 1e-2), std::invalid_argument);
  CHECK_THROWS_AS(verify_trj(V, zs, bd, 2, 1e-2), std::invalid_argument);  // m=0 well
}

TEST_CASE("tre1 guards") {
  Potential V = Potential::make(Profile::square_well, Complex(-5, 0), 1.0);
  NumericsConfig cfg;
  cfg.quad_n = 100;
  DetEvaluator ev(V, cfg);
  ZeroSet zs;
  Zero z;
  z.k = Complex(0, 1);
  z.multiplicity = 1;
  zs.zeros.push_back(z);
  BoundaryData bd = make_boundary_grid(20.0, 128);
  bd.tail_coeffs = {0.0};
  CHECK_THROWS_AS(verify_tre1(ev, zs, bd, Complex(0.5, 0.05), 1e-3), std::invalid_argument);
  CHECK_THROWS_AS(verify_tre1(ev, zs, bd, Complex(1e-4, 1.0), 1e-3), std::invalid_argument);
}

TEST_CASE("tre1 rhs is analytic away from the zeros") {
  WellPipeline P(5.0, 120, 40.0, 1024);
  auto rhs = [&](Complex k) {
    return blaschke_log_deriv(P.zs, k) + Complex(0, 1) * cauchy_transform_deriv(P.bd_psi, k);
  };
  Complex k(0.4, 1.9);
  double h = 1e-5;
  Complex dx = (rhs(k + h) - rhs(k - h)) / (2.0 * h);
  Complex dy = (rhs(k + Complex(0, h)) - rhs(k - Complex(0, h))) / (2.0 * h * Complex(0, 1));
  CHECK(std::abs(dx - dy) < 1e-6 * std::max(1.0, std::abs(dx)));
}

TEST_CASE("tre1 residual on the well at a few probes") {
  WellPipeline P(5.0, 150, 50.0, 1500);
  for (Complex k : {Complex(0, 1.5), Complex(0, 2), Complex(1, 2)}) {
    TraceReport rep = verify_tre1(P.ev, P.zs, P.bd_psi, k, 5e-3);
    CHECK(rep.pass);
  }
}

TEST_CASE("T4 bound on the V0=5 well against the oracle count") {
  WellPipeline P(5.0, 120, 30.0, 512);
  REQUIRE(P.zs.total_multiplicity() == oracles::shooting_count_total(P.V));
  TraceReport rep = check_bound_T4(P.V, P.zs, 1.0);
  CHECK(rep.pass);
  CHECK(rep.lhs.real() == doctest::Approx(oracles::well_swave_kappa(5.0)).epsilon(1e-3));
  CHECK(rep.rhs.real() > rep.lhs.real());
  CHECK(rep.note.find("minimal C2") != std::string::npos);
}

TEST_CASE("T4 rhs scales as the norm formula dictates") {
  ZeroSet zs;
  for (double g : {1.0, 2.0, 4.0}) {
    Potential V = Potential::make(Profile::square_well, Complex(-g, 0), 1.0);
    TraceReport rep = check_bound_T4(V, zs, 1.3);
    double l32 = V.norm_lp(1.5), n2 = V.norm_lp(2.0);
    double q = std::pow(68.0, 0.25), fp = 4.0 * M_PI;
    double a1 = 1.3 * q / std::pow(fp, 7.0 / 6.0);
    double a2 = std::sqrt(68.0) * 1.3 * 1.3 / std::pow(fp, 5.0 / 6.0);
    double a3 = std::pow(1.3, 3.0) * q / (3.0 * M_PI * std::sqrt(fp));
    double F = a1 * std::sqrt(l32) + a2 * l32 + a3 * std::pow(l32, 1.5);
    CHECK(rep.rhs.real() == doctest::Approx(n2 * n2 * F).epsilon(1e-12));
  }
}

TEST_CASE("envelope bounds hold on a small grid for the weak gaussian") {
  Potential V = Potential::make(Profile::gaussian, Complex(1.0, 0.5), 1.0);
  NumericsConfig cfg;
  cfg.quad_n = 120;
  DetEvaluator ev(V, cfg);
  std::vector<Complex> grid;
  for (double re : {-2.0, 0.5, 3.0})
    for (double im : {0.05, 0.8, 2.5}) grid.emplace_back(re, im);
  TraceReport rep = check_envelope_bounds(ev, grid);
  CHECK(rep.pass);
  CHECK(rep.residual == 0.0);
}

TEST_CASE("boundary sampling is deterministic across repeated runs") {
  WellPipeline a(5.0, 80, 20.0, 256);
  WellPipeline b(5.0, 80, 20.0, 256);
  for (size_t i = 0; i < a.bd_psi.t.size(); ++i) {
    CHECK(a.bd_psi.h[i] == b.bd_psi.h[i]);
    CHECK(a.bd_d4.h[i] == b.bd_d4.h[i]);
  }
  TraceReport ra = verify_tr12(a.zs, a.bd_d4, 1e-3);
  TraceReport rb = verify_tr12(b.zs, b.bd_d4, 1e-3);
  CHECK(ra.lhs == rb.lhs);
  CHECK(ra.rhs == rb.rhs);
  CHECK(ra.residual == rb.residual);
}
