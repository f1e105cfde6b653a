#include "bslab/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace bslab {

namespace {

GaussRule compute_gauss(int n) {
  GaussRule r;
  r.x.resize(n);
  r.w.resize(n);
  // Newton iteration on P_n with Chebyshev initial guesses.
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double p0 = 0.0, p1 = 0.0;
    for (int it = 0; it < 100; ++it) {
      p0 = 1.0;
      p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      double dp = n * (x * p0 - p1) / (x * x - 1.0);
      double dx = p0 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    p0 = 1.0;
    p1 = 0.0;
    for (int j = 0; j < n; ++j) {
      double p2 = p1;
      p1 = p0;
      p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
    }
    double dp = n * (x * p0 - p1) / (x * x - 1.0);
    r.x[i] = -x;
    r.x[n - 1 - i] = x;
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.w[i] = w;
    r.w[n - 1 - i] = w;
  }
  return r;
}

std::map<int, GaussRule> g_rules;
std::mutex g_rules_mtx;

}  // namespace

const GaussRule& gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
  std::lock_guard<std::mutex> lk(g_rules_mtx);
  auto it = g_rules.find(n);
  if (it == g_rules.end()) it = g_rules.emplace(n, compute_gauss(n)).first;
  return it->second;
}

Quadrature build_quadrature(double R, int n) {
  if (n < 2) throw std::invalid_argument("build_quadrature: order must be >= 2");
  if (!(R > 0.0)) throw std::invalid_argument("build_quadrature: R must be positive");
  const GaussRule& g = gauss_legendre(n);
  Quadrature q;
  q.order = n;
  q.R = R;
  q.nodes.resize(n);
  q.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    q.nodes[i] = 0.5 * R * (g.x[i] + 1.0);
    q.weights[i] = 0.5 * R * g.w[i];
  }
  return q;
}

Complex panel_integrate(const std::function<Complex(double)>& f, double a, double b,
                        std::vector<double> breaks, int pts, int subdiv) {
  if (b <= a) return {0.0, 0.0};
  breaks.push_back(a);
  breaks.push_back(b);
  std::sort(breaks.begin(), breaks.end());
  const GaussRule& g = gauss_legendre(pts);
  Complex total{0.0, 0.0};
  for (size_t p = 0; p + 1 < breaks.size(); ++p) {
    double lo = std::max(a, breaks[p]);
    double hi = std::min(b, breaks[p + 1]);
    if (hi - lo <= 0.0) continue;
    double h = (hi - lo) / subdiv;
    for (int s = 0; s < subdiv; ++s) {
      double c = lo + (s + 0.5) * h;
      for (int i = 0; i < pts; ++i) total += (0.5 * h * g.w[i]) * f(c + 0.5 * h * g.x[i]);
    }
  }
  return total;
}

namespace {

struct AdaptiveCtx {
  const std::function<Complex(double)>* f;
  double rel_tol;
  double abs_tol;
};

Complex gauss_on(const std::function<Complex(double)>& f, double a, double b, int n) {
  const GaussRule& g = gauss_legendre(n);
  Complex s{0.0, 0.0};
  double c = 0.5 * (a + b), h = 0.5 * (b - a);
  for (int i = 0; i < n; ++i) s += (h * g.w[i]) * f(c + h * g.x[i]);
  return s;
}

Complex adapt_rec(const AdaptiveCtx& ctx, double a, double b, Complex whole, int depth,
                  double glob_scale) {
  double m = 0.5 * (a + b);
  Complex left = gauss_on(*ctx.f, a, m, 15);
  Complex right = gauss_on(*ctx.f, m, b, 15);
  Complex err = left + right - whole;
  double tol = ctx.rel_tol * std::max(glob_scale, std::abs(left + right));
  if (depth <= 0 || std::abs(err) <= std::max(tol, ctx.abs_tol)) return left + right;
  return adapt_rec(ctx, a, m, left, depth - 1, glob_scale) +
         adapt_rec(ctx, m, b, right, depth - 1, glob_scale);
}

}  // namespace

Complex adaptive_integrate(const std::function<Complex(double)>& f, double a, double b,
                           double rel_tol, double abs_tol, int max_depth) {
  if (b <= a) return {0.0, 0.0};
  AdaptiveCtx ctx{&f, rel_tol * 0.1, abs_tol};
  Complex whole = gauss_on(f, a, b, 15);
  return adapt_rec(ctx, a, b, whole, max_depth, std::abs(whole));
}

}  // namespace bslab
