#include "stringlab/quadrature.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace stringlab {

namespace {

std::vector<QuadNode> build_rule(int n) {
  // Legendre P_n roots by Newton from the Chebyshev-like initial guess.
  std::vector<QuadNode> rule(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double p0, p1, dp = 0;
    for (int it = 0; it < 100; ++it) {
      p0 = 1;
      p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    rule[i] = {x, 2.0 / ((1 - x * x) * dp * dp)};
  }
  return rule;
}

}  // namespace

std::span<const QuadNode> gauss_legendre(int n) {
  if (n < 1 || n > 128) throw std::invalid_argument("gauss_legendre: order out of range");
  static std::map<int, std::vector<QuadNode>> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, build_rule(n)).first;
  return it->second;
}

std::vector<QuadNode> gauss_legendre(int n, double a, double b) {
  auto base = gauss_legendre(n);
  std::vector<QuadNode> rule(base.begin(), base.end());
  double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  for (auto& q : rule) {
    q.x = mid + half * q.x;
    q.w *= half;
  }
  return rule;
}

namespace {

double simpson(double fa, double fm, double fb, double h) {
  return h / 6 * (fa + 4 * fm + fb);
}

double adaptive_rec(const std::function<double(double)>& f, double a, double b, double fa,
                    double fm, double fb, double whole, double tol, double floor,
                    int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = simpson(fa, flm, fm, m - a);
  double right = simpson(fm, frm, fb, b - m);
  double err = left + right - whole;
  if (depth <= 0 || std::abs(err) <= 15 * std::max(tol, floor))
    return left + right + err / 15;
  return adaptive_rec(f, a, m, fa, flm, fm, left, tol / 2, floor, depth - 1) +
         adaptive_rec(f, m, b, fm, frm, fb, right, tol / 2, floor, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol, int max_depth) {
  if (a == b) return 0;
  double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  double whole = simpson(fa, fm, fb, b - a);
  // rounding floor: the error estimator cannot resolve below the integrand
  // magnitude times machine precision
  double floor =
      1e-14 * std::abs(b - a) * (std::abs(fa) + std::abs(fm) + std::abs(fb) + 1e-30);
  return adaptive_rec(f, a, b, fa, fm, fb, whole, tol, floor, max_depth);
}

namespace {

using VecD = std::vector<double>;

VecD simpson_multi(const VecD& fa, const VecD& fm, const VecD& fb, double h) {
  VecD r(fa.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = h / 6 * (fa[i] + 4 * fm[i] + fb[i]);
  return r;
}

VecD adaptive_rec_multi(const std::function<VecD(double)>& f, double a, double b,
                        const VecD& fa, const VecD& fm, const VecD& fb, const VecD& whole,
                        double tol, double floor, int depth) {
  double m = 0.5 * (a + b);
  VecD flm = f(0.5 * (a + m)), frm = f(0.5 * (m + b));
  VecD left = simpson_multi(fa, flm, fm, m - a);
  VecD right = simpson_multi(fm, frm, fb, b - m);
  VecD err(fa.size());
  double emax = 0;
  for (std::size_t i = 0; i < err.size(); ++i) {
    err[i] = left[i] + right[i] - whole[i];
    emax = std::max(emax, std::abs(err[i]));
  }
  if (depth <= 0 || emax <= 15 * std::max(tol, floor)) {
    VecD r(fa.size());
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = left[i] + right[i] + err[i] / 15;
    return r;
  }
  VecD rl = adaptive_rec_multi(f, a, m, fa, flm, fm, left, tol / 2, floor, depth - 1);
  VecD rr = adaptive_rec_multi(f, m, b, fm, frm, fb, right, tol / 2, floor, depth - 1);
  for (std::size_t i = 0; i < rl.size(); ++i) rl[i] += rr[i];
  return rl;
}

}  // namespace

std::vector<double> adaptive_simpson_multi(
    const std::function<std::vector<double>(double)>& f, double a, double b, double tol,
    int max_depth) {
  VecD fa = f(a);
  if (a == b) return VecD(fa.size(), 0.0);
  VecD fb = f(b), fm = f(0.5 * (a + b));
  VecD whole = simpson_multi(fa, fm, fb, b - a);
  double scale = 1e-30;
  for (std::size_t i = 0; i < fa.size(); ++i)
    scale = std::max({scale, std::abs(fa[i]), std::abs(fm[i]), std::abs(fb[i])});
  double floor = 1e-14 * std::abs(b - a) * scale;
  return adaptive_rec_multi(f, a, b, fa, fm, fb, whole, tol, floor, max_depth);
}

}  // namespace stringlab
