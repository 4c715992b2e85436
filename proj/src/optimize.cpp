#include "stringlab/optimize.hpp"

#include <algorithm>
#include <cmath>

namespace stringlab {

namespace {

// Solve the symmetric system H dx = -g by Gaussian elimination with partial
// pivoting; returns false when H is numerically singular.
bool solve_dense(std::vector<std::vector<double>> h, std::vector<double> g,
                 std::vector<double>& dx) {
  const int n = int(g.size());
  for (int c = 0; c < n; ++c) {
    int piv = c;
    for (int r = c + 1; r < n; ++r)
      if (std::abs(h[r][c]) > std::abs(h[piv][c])) piv = r;
    if (std::abs(h[piv][c]) < 1e-14) return false;
    std::swap(h[piv], h[c]);
    std::swap(g[piv], g[c]);
    for (int r = c + 1; r < n; ++r) {
      double m = h[r][c] / h[c][c];
      for (int k = c; k < n; ++k) h[r][k] -= m * h[c][k];
      g[r] -= m * g[c];
    }
  }
  dx.assign(n, 0.0);
  for (int r = n - 1; r >= 0; --r) {
    double s = -g[r];
    for (int k = r + 1; k < n; ++k) s -= h[r][k] * dx[k];
    dx[r] = s / h[r][r];
  }
  return true;
}

}  // namespace

std::vector<double> fd_gradient(const Objective& f, const std::vector<double>& x,
                                double h) {
  std::vector<double> g(x.size());
  std::vector<double> p = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    p[i] = x[i] + h;
    double fp = f(p);
    p[i] = x[i] - h;
    double fm = f(p);
    p[i] = x[i];
    g[i] = (fp - fm) / (2 * h);
  }
  return g;
}

MinimizeResult nelder_mead(const Objective& f, const std::vector<double>& x0,
                           const MinimizeOptions& opts) {
  const int n = int(x0.size());
  int evals = 0;
  auto eval = [&](const std::vector<double>& p) {
    ++evals;
    return f(p);
  };

  std::vector<std::vector<double>> simplex(n + 1, x0);
  std::vector<double> fv(n + 1);
  for (int i = 0; i < n; ++i) simplex[i + 1][i] += opts.simplex_scale;
  for (int i = 0; i <= n; ++i) fv[i] = eval(simplex[i]);

  auto order = [&] {
    std::vector<int> idx(n + 1);
    for (int i = 0; i <= n; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return fv[a] < fv[b]; });
    std::vector<std::vector<double>> s2(n + 1);
    std::vector<double> f2(n + 1);
    for (int i = 0; i <= n; ++i) {
      s2[i] = simplex[idx[i]];
      f2[i] = fv[idx[i]];
    }
    simplex = std::move(s2);
    fv = std::move(f2);
  };

  for (int it = 0; it < opts.max_iterations; ++it) {
    order();
    if (fv[n] - fv[0] < opts.f_tol * (1 + std::abs(fv[0]))) break;

    std::vector<double> centroid(n, 0.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) centroid[j] += simplex[i][j] / n;

    auto blend = [&](double t) {
      std::vector<double> p(n);
      for (int j = 0; j < n; ++j) p[j] = centroid[j] + t * (centroid[j] - simplex[n][j]);
      return p;
    };

    std::vector<double> xr = blend(1.0);
    double fr = eval(xr);
    if (fr < fv[0]) {
      std::vector<double> xe = blend(2.0);
      double fe = eval(xe);
      if (fe < fr) {
        simplex[n] = xe;
        fv[n] = fe;
      } else {
        simplex[n] = xr;
        fv[n] = fr;
      }
    } else if (fr < fv[n - 1]) {
      simplex[n] = xr;
      fv[n] = fr;
    } else {
      std::vector<double> xc = blend(fr < fv[n] ? 0.5 : -0.5);
      double fc = eval(xc);
      if (fc < std::min(fr, fv[n])) {
        simplex[n] = xc;
        fv[n] = fc;
      } else {
        for (int i = 1; i <= n; ++i) {
          for (int j = 0; j < n; ++j)
            simplex[i][j] = simplex[0][j] + 0.5 * (simplex[i][j] - simplex[0][j]);
          fv[i] = eval(simplex[i]);
        }
      }
    }
  }
  order();
  return {simplex[0], fv[0], 0.0, evals};
}

MinimizeResult minimize(const Objective& f, const std::vector<double>& x0,
                        const MinimizeOptions& opts) {
  MinimizeResult best = nelder_mead(f, x0, opts);
  const int n = int(x0.size());
  const double h = opts.fd_step;

  for (int step = 0; step < opts.polish_steps; ++step) {
    std::vector<double> g = fd_gradient(f, best.x, h);
    best.evaluations += 2 * n;
    double gn = 0;
    for (double v : g) gn += v * v;
    best.grad_norm = std::sqrt(gn);
    if (best.grad_norm < 1e-11) break;

    // central-difference Hessian
    std::vector<std::vector<double>> hess(n, std::vector<double>(n, 0.0));
    std::vector<double> p = best.x;
    double f0 = best.value;
    for (int i = 0; i < n; ++i) {
      p[i] = best.x[i] + h;
      double fp = f(p);
      p[i] = best.x[i] - h;
      double fm = f(p);
      p[i] = best.x[i];
      hess[i][i] = (fp - 2 * f0 + fm) / (h * h);
      best.evaluations += 2;
    }
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        p[i] += h; p[j] += h;
        double fpp = f(p);
        p[j] -= 2 * h;
        double fpm = f(p);
        p[i] -= 2 * h;
        double fmm = f(p);
        p[j] += 2 * h;
        double fmp = f(p);
        p[i] = best.x[i];
        p[j] = best.x[j];
        hess[i][j] = hess[j][i] = (fpp - fpm - fmp + fmm) / (4 * h * h);
        best.evaluations += 4;
      }
    // Levenberg damping, escalated until a step improves; the argmin set can
    // be a flat valley, so the plain Newton system may be singular
    double hscale = 1e-12;
    for (int i = 0; i < n; ++i) hscale = std::max(hscale, std::abs(hess[i][i]));
    bool improved = false;
    double lambda = 1e-8 * hscale;
    for (int attempt = 0; attempt < 10 && !improved; ++attempt) {
      std::vector<std::vector<double>> damped = hess;
      for (int i = 0; i < n; ++i) damped[i][i] += lambda;
      std::vector<double> dx;
      if (solve_dense(damped, g, dx)) {
        double t = 1.0;
        std::vector<double> cand(n);
        for (int ls = 0; ls < 8; ++ls) {
          for (int i = 0; i < n; ++i) cand[i] = best.x[i] + t * dx[i];
          double fc = f(cand);
          ++best.evaluations;
          if (fc < best.value) {
            best.x = cand;
            best.value = fc;
            improved = true;
            break;
          }
          t *= 0.25;
        }
      }
      lambda = std::max(lambda * 100, 1e-8 * hscale);
    }
    if (!improved) break;
  }

  // the certificate gradient balances truncation against roundoff at a
  // smaller step than the descent derivatives
  const double h_cert = h / 10;
  auto grad_norm_at = [&](const std::vector<double>& x) {
    std::vector<double> g = fd_gradient(f, x, h_cert);
    best.evaluations += 2 * n;
    double gn = 0;
    for (double v : g) gn += v * v;
    return std::make_pair(std::sqrt(gn), g);
  };

  // near the minimum the objective change per step falls below double
  // resolution; gate the last Newton steps on the gradient norm instead
  auto [gn, g] = grad_norm_at(best.x);
  best.grad_norm = gn;
  for (int step = 0; step < 4 && best.grad_norm > 1e-12; ++step) {
    std::vector<std::vector<double>> hess(n, std::vector<double>(n, 0.0));
    std::vector<double> p = best.x;
    double f0 = f(best.x);
    for (int i = 0; i < n; ++i) {
      p[i] = best.x[i] + h;
      double fp = f(p);
      p[i] = best.x[i] - h;
      double fm = f(p);
      p[i] = best.x[i];
      hess[i][i] = (fp - 2 * f0 + fm) / (h * h);
    }
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        p[i] += h; p[j] += h;
        double fpp = f(p);
        p[j] -= 2 * h;
        double fpm = f(p);
        p[i] -= 2 * h;
        double fmm = f(p);
        p[j] += 2 * h;
        double fmp = f(p);
        p[i] = best.x[i];
        p[j] = best.x[j];
        hess[i][j] = hess[j][i] = (fpp - fpm - fmp + fmm) / (4 * h * h);
      }
    best.evaluations += 2 * n * n + 1;
    double hscale = 1e-12;
    for (int i = 0; i < n; ++i) hscale = std::max(hscale, std::abs(hess[i][i]));
    for (int i = 0; i < n; ++i) hess[i][i] += 1e-6 * hscale;
    std::vector<double> dx;
    if (!solve_dense(hess, g, dx)) break;
    double step_norm = 0, x_norm = 0;
    for (int i = 0; i < n; ++i) {
      step_norm += dx[i] * dx[i];
      x_norm += best.x[i] * best.x[i];
    }
    if (std::sqrt(step_norm) > 1e-3 * (1 + std::sqrt(x_norm))) break;
    std::vector<double> cand(n);
    for (int i = 0; i < n; ++i) cand[i] = best.x[i] + dx[i];
    auto [gn2, g2] = grad_norm_at(cand);
    if (gn2 >= best.grad_norm) break;
    best.x = cand;
    best.value = f(cand);
    ++best.evaluations;
    best.grad_norm = gn2;
    g = g2;
  }
  return best;
}

std::vector<double> halton(int k, int dim) {
  static const int primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29};
  if (dim > 10) throw std::invalid_argument("halton: dim too large");
  std::vector<double> p(dim);
  for (int d = 0; d < dim; ++d) {
    int base = primes[d];
    double f = 1.0, r = 0.0;
    int i = k + 1;
    while (i > 0) {
      f /= base;
      r += f * (i % base);
      i /= base;
    }
    p[d] = r;
  }
  return p;
}

}  // namespace stringlab
