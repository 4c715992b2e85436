#include "stringlab/recovery.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "stringlab/quadrature.hpp"
#include "stringlab/svd3.hpp"

namespace stringlab {

TubeDeformation::TubeDeformation(std::shared_ptr<const TailoredFrame> frame, double eps,
                                 BoxGrid grid)
    : TubeField(eps, std::move(grid)), frame_(std::move(frame)) {
  if (std::abs(frame_->curve().length() - grid_.length) > 1e-12)
    throw std::invalid_argument("TubeDeformation: curve length and grid extent differ");
}

Vec3 TubeDeformation::value_impl(const Vec3& x) const {
  FrameJet j = frame_->eval(x.x);
  return j.u + (eps_ * x.y) * j.n + (eps_ * x.z) * j.b;
}

Mat3 TubeDeformation::gradient_impl(const Vec3& x) const {
  FrameJet j = frame_->eval(x.x);
  Vec3 col1 = j.du + (eps_ * x.y) * j.dn + (eps_ * x.z) * j.db;
  return Mat3::from_columns(col1, j.n, j.b);
}

double TubeDeformation::det_impl(const Vec3& x) const {
  FrameJet j = frame_->eval(x.x);
  return det_cols(j.du, j.n, j.b) + eps_ * x.y * det_cols(j.dn, j.n, j.b) +
         eps_ * x.z * det_cols(j.db, j.n, j.b);
}

Vec3 TubeDeformation::grad_det_impl(const Vec3& x) const {
  FrameJet j = frame_->eval(x.x);
  Vec3 col1 = j.du + (eps_ * x.y) * j.dn + (eps_ * x.z) * j.db;
  Vec3 dcol1 = j.d2u + (eps_ * x.y) * j.d2n + (eps_ * x.z) * j.d2b;
  double d1 = det_cols(dcol1, j.n, j.b) + det_cols(col1, j.dn, j.b) +
              det_cols(col1, j.n, j.db);
  double d2 = eps_ * det_cols(j.dn, j.n, j.b);
  double d3 = eps_ * det_cols(j.db, j.n, j.b);
  return {d1, d2, d3};
}

DetFiber TubeDeformation::det_fiber(double x1, double x2) const {
  FrameJet j = frame_->eval(x1);
  double a = det_cols(j.du, j.n, j.b) + eps_ * x2 * det_cols(j.dn, j.n, j.b);
  double b = eps_ * det_cols(j.db, j.n, j.b);
  return {a, b};
}

std::vector<double> TubeDeformation::x1_breakpoints() const {
  return frame_->breakpoints();
}

TubeDeformation::DetReport TubeDeformation::det_report(int samples_per_piece) const {
  // det - 1 is affine in (x2, x3); extremes sit at the corners of J' x J'
  DetReport rep;
  std::vector<double> edges = x1_breakpoints();
  for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
    for (int i = 0; i <= samples_per_piece; ++i) {
      double x1 = edges[k] + (edges[k + 1] - edges[k]) * i / samples_per_piece;
      x1 = std::min(x1, grid_.length);
      for (int cy = 0; cy < 2; ++cy)
        for (int cz = 0; cz < 2; ++cz) {
          Vec3 x{x1, cy ? grid_.jp_hi : grid_.jp_lo, cz ? grid_.jp_hi : grid_.jp_lo};
          rep.c0 = std::max(rep.c0, std::abs(det_impl(x) - 1.0));
          rep.c1 = std::max(rep.c1, norm(grad_det_impl(x)));
        }
    }
  }
  rep.c1 += rep.c0;
  return rep;
}

namespace {

Mat3 project_member(const Mat3& m, Manifold manifold) {
  Mat3 proj = m;
  if (manifold == Manifold::SO3) {
    proj = polar_rotation(m);
  } else {
    double d = det(m);
    if (!(d > 0)) throw std::invalid_argument("PathDeformation: section determinant not positive");
    proj = m * std::pow(d, -1.0 / 3.0);
  }
  if (norm(proj - m) > 1e-6)
    throw std::invalid_argument("PathDeformation: section too far from the manifold");
  return proj;
}

}  // namespace

PathDeformation::PathDeformation(const PiecewiseAffineCurve& curve,
                                 const std::vector<Mat3x2>& sections, Manifold m,
                                 double beta, double eps, BoxGrid grid)
    : TubeField(eps, std::move(grid)), beta_(beta) {
  if (!(beta > 0 && beta < 0.5))
    throw std::invalid_argument("PathDeformation: beta must lie in (0, 1/2)");
  if (sections.size() != curve.segments())
    throw std::invalid_argument("PathDeformation: one section per segment required");
  width_ = std::pow(eps, beta);
  const std::size_t nseg = curve.segments();
  for (std::size_t n = 1; n < nseg; ++n)
    if (curve.t[n] + width_ >= curve.t[n + 1])
      throw std::invalid_argument("PathDeformation: transition windows overlap");

  std::vector<Mat3> members(nseg);
  for (std::size_t n = 0; n < nseg; ++n)
    members[n] = project_member(with_first_column(curve.slope(n), sections[n]), m);

  // branch layout with continuity offsets
  segments_.push_back({curve.t[0], curve.t[1], members[0], Vec3{}});
  for (std::size_t n = 1; n < nseg; ++n) {
    const Segment& prev = segments_.back();
    Window w{curve.t[n], curve.t[n] + width_, ManifoldPath(members[n - 1], members[n], m),
             Vec3{}, {}, {}};
    w.offset = prev.offset + curve.t[n] * prev.map.col(0);

    // analytic panels: transition clamps at 0.03 / 0.97 plus the midpoint
    // clock joint of two-leg paths
    const double joints[] = {0.0, 0.03, 0.5, 0.97, 1.0};
    for (int seg = 0; seg + 1 < 5; ++seg) {
      double a = w.t0 + joints[seg] * width_, b = w.t0 + joints[seg + 1] * width_;
      for (int sub = 0; sub < 4; ++sub) {
        w.panel_edges.push_back(a + (b - a) * sub / 4.0);
      }
    }
    w.panel_edges.push_back(w.t1);
    w.prefix.resize(w.panel_edges.size());
    w.prefix[0] = {};
    for (std::size_t k = 0; k + 1 < w.panel_edges.size(); ++k) {
      Vec3 acc{};
      for (const auto& node : gauss_legendre(16, w.panel_edges[k], w.panel_edges[k + 1])) {
        Mat3 p, dp, d2p;
        p_jet(w, node.x, p, dp, d2p);
        acc += node.w * p.col(0);
      }
      w.prefix[k + 1] = w.prefix[k] + acc;
    }

    Vec3 full = w.prefix.back();
    Vec3 b_next = full - (w.t0 + width_) * members[n].col(0) + w.offset;
    windows_.push_back(std::move(w));
    segments_.push_back({curve.t[n] + width_, curve.t[n + 1], members[n], b_next});
  }

  edges_.push_back(segments_[0].t0);
  for (std::size_t n = 0; n < windows_.size(); ++n) {
    edges_.push_back(windows_[n].t0);
    edges_.push_back(windows_[n].t1);
  }
  edges_.push_back(segments_.back().t1);
}

void PathDeformation::p_jet(const Window& w, double x1, Mat3& p, Mat3& dp,
                            Mat3& d2p) const {
  double s = (x1 - w.t0) / width_;
  StepJet psi = transition_jet(s);
  p = w.path.value(psi.s);
  Mat3 dpath = w.path.derivative(psi.s, 1);
  Mat3 d2path = w.path.derivative(psi.s, 2);
  double c1 = psi.ds / width_;
  double c2 = psi.d2s / (width_ * width_);
  dp = dpath * c1;
  d2p = d2path * (c1 * c1) + dpath * c2;
}

Vec3 PathDeformation::integral_to(const Window& w, double x1) const {
  auto it = std::upper_bound(w.panel_edges.begin(), w.panel_edges.end(), x1);
  std::size_t k = std::max<std::ptrdiff_t>(0, it - w.panel_edges.begin() - 1);
  k = std::min(k, w.panel_edges.size() - 2);
  Vec3 acc = w.prefix[k];
  for (const auto& node : gauss_legendre(16, w.panel_edges[k], x1)) {
    Mat3 p, dp, d2p;
    p_jet(w, node.x, p, dp, d2p);
    acc += node.w * p.col(0);
  }
  return acc;
}

std::size_t PathDeformation::branch_at(double x1) const {
  // branches interleave segment 0, window 0, segment 1, window 1, ...
  auto it = std::upper_bound(edges_.begin(), edges_.end(), x1);
  std::size_t k = std::max<std::ptrdiff_t>(0, it - edges_.begin() - 1);
  return std::min(k, edges_.size() - 2);
}

Vec3 PathDeformation::value_impl(const Vec3& x) const {
  Vec3 xe{x.x, eps_ * x.y, eps_ * x.z};
  std::size_t b = branch_at(x.x);
  if (b % 2 == 0) {
    const Segment& s = segments_[b / 2];
    return s.map * xe + s.offset;
  }
  const Window& w = windows_[b / 2];
  Mat3 p, dp, d2p;
  p_jet(w, x.x, p, dp, d2p);
  return integral_to(w, x.x) + p * (xe - x.x * e1) + w.offset;
}

Mat3 PathDeformation::gradient_impl(const Vec3& x) const {
  std::size_t b = branch_at(x.x);
  if (b % 2 == 0) return segments_[b / 2].map;
  const Window& w = windows_[b / 2];
  Mat3 p, dp, d2p;
  p_jet(w, x.x, p, dp, d2p);
  Vec3 col1 = p.col(0) + eps_ * (dp * Vec3{0, x.y, x.z});
  return Mat3::from_columns(col1, p.col(1), p.col(2));
}

double PathDeformation::det_impl(const Vec3& x) const { return det(gradient_impl(x)); }

Vec3 PathDeformation::grad_det_impl(const Vec3& x) const {
  std::size_t b = branch_at(x.x);
  if (b % 2 == 0) return {};
  const Window& w = windows_[b / 2];
  Mat3 p, dp, d2p;
  p_jet(w, x.x, p, dp, d2p);
  Vec3 cross_term{0, x.y, x.z};
  Vec3 col1 = p.col(0) + eps_ * (dp * cross_term);
  Vec3 dcol1 = dp.col(0) + eps_ * (d2p * cross_term);
  double d1 = det_cols(dcol1, p.col(1), p.col(2)) + det_cols(col1, dp.col(1), p.col(2)) +
              det_cols(col1, p.col(1), dp.col(2));
  double d2 = eps_ * det_cols(dp.col(1), p.col(1), p.col(2));
  double d3 = eps_ * det_cols(dp.col(2), p.col(1), p.col(2));
  return {d1, d2, d3};
}

DetFiber PathDeformation::det_fiber(double x1, double x2) const {
  std::size_t b = branch_at(x1);
  if (b % 2 == 0) return {det(segments_[b / 2].map), 0.0};
  const Window& w = windows_[b / 2];
  Mat3 p, dp, d2p;
  p_jet(w, x1, p, dp, d2p);
  Vec3 base = p.col(0) + (eps_ * x2) * dp.col(1);
  double a = det_cols(base, p.col(1), p.col(2));
  double slope = eps_ * det_cols(dp.col(2), p.col(1), p.col(2));
  return {a, slope};
}

std::vector<double> PathDeformation::x1_breakpoints() const {
  std::vector<double> b;
  b.push_back(segments_.front().t0);
  for (const Window& w : windows_) {
    b.push_back(w.t0);
    // transition joints are only C^2; keep quadrature panels aligned
    b.push_back(w.t0 + 0.03 * width_);
    b.push_back(w.t0 + 0.5 * width_);
    b.push_back(w.t0 + 0.97 * width_);
    b.push_back(w.t1);
  }
  b.push_back(segments_.back().t1);
  return b;
}

std::vector<std::pair<double, double>> PathDeformation::window_spans() const {
  std::vector<std::pair<double, double>> spans;
  for (const Window& w : windows_) spans.emplace_back(w.t0, w.t1);
  return spans;
}

double PathDeformation::continuity_defect() const {
  double worst = 0;
  for (const Window& w : windows_) {
    for (double x1 : {w.t0, w.t1}) {
      for (double y : {grid_.jp_lo, 0.0, grid_.jp_hi})
        for (double z : {grid_.jp_lo, 0.0, grid_.jp_hi}) {
          Vec3 lhs = value_impl({x1 - 1e-13, y, z});
          Vec3 rhs = value_impl({x1 + 1e-13, y, z});
          worst = std::max(worst, norm(lhs - rhs));
        }
    }
  }
  return worst;
}

double integrate_phi(const DetFiber& fiber, double x3, double h) {
  if (!(h > 0)) throw std::invalid_argument("integrate_phi: step must be positive");
  double phi = 0;
  double s = 0;
  double dir = x3 >= 0 ? 1.0 : -1.0;
  auto rhs = [&fiber](double p) {
    double d = fiber(p);
    if (d <= 0.25)
      throw std::runtime_error("integrate_phi: determinant fell below the conditioning bound");
    return 1.0 / d;
  };
  while (dir * (x3 - s) > 0) {
    double step = std::min(h, dir * (x3 - s)) * dir;
    double k1 = rhs(phi);
    double k2 = rhs(phi + 0.5 * step * k1);
    double k3 = rhs(phi + 0.5 * step * k2);
    double k4 = rhs(phi + step * k3);
    phi += step / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
    s += step;
  }
  return phi;
}

PerturbationField inner_perturbation(const TubeField& v, const BoxGrid& grid, double gamma,
                                     double ode_step) {
  if (!(ode_step > 0 && ode_step <= 1e-3))
    throw std::invalid_argument("inner_perturbation: step must be positive and at most 1e-3");

  PerturbationField out;
  out.grid = grid;
  out.gamma = gamma;
  out.ode_step = ode_step;

  // determinant norms over Q_L'; det - 1 and its gradient are affine in
  // (x2, x3), so corner samples give the sup per axis position
  {
    std::vector<double> edges = v.x1_breakpoints();
    double c0 = 0, g0 = 0, dmin = std::numeric_limits<double>::max();
    for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
      for (int i = 0; i <= 16; ++i) {
        double x1 = edges[k] + (edges[k + 1] - edges[k]) * i / 16.0;
        for (double y : {grid.jp_lo, grid.jp_hi})
          for (double z : {grid.jp_lo, grid.jp_hi}) {
            Vec3 x{std::clamp(x1, 0.0, grid.length), y, z};
            double d = v.det_rescaled(x);
            c0 = std::max(c0, std::abs(d - 1.0));
            g0 = std::max(g0, norm(v.grad_det(x)));
            dmin = std::min(dmin, d);
          }
      }
    }
    out.det_c0 = c0;
    out.det_c1 = c0 + g0;
    out.det_lower = dmin;
    if (c0 > 0.5)
      throw std::runtime_error(
          "inner_perturbation: ||det - 1|| exceeds 1/2; determinant lower bound lost");
  }

  out.phi.resize(grid.nodes());
  out.d1.resize(grid.nodes());
  out.d2.resize(grid.nodes());
  out.d3.resize(grid.nodes());

  for (int i1 = 0; i1 < grid.n1; ++i1) {
    double x1 = grid.x1(i1);
    for (int i2 = 0; i2 < grid.n2; ++i2) {
      double x2 = grid.x2(i2);
      DetFiber fiber = v.det_fiber(x1, x2);

      // march outward from zero in each direction, reusing the running state
      auto solve_direction = [&](bool positive) {
        double phi = 0, s = 0;
        auto rhs = [&fiber](double p) {
          double d = fiber(p);
          if (d <= 0.25)
            throw std::runtime_error(
                "inner_perturbation: determinant fell below the conditioning bound");
          return 1.0 / d;
        };
        for (int i3 = 0; i3 < grid.n3; ++i3) {
          int idx = positive ? i3 : grid.n3 - 1 - i3;
          double target = grid.x3(idx);
          if ((positive && target < 0) || (!positive && target > 0) ||
              (target == 0 && !positive))
            continue;
          double dir = positive ? 1.0 : -1.0;
          while (dir * (target - s) > 1e-300) {
            double step = std::min(ode_step, dir * (target - s)) * dir;
            double k1 = rhs(phi);
            double k2 = rhs(phi + 0.5 * step * k1);
            double k3 = rhs(phi + 0.5 * step * k2);
            double k4 = rhs(phi + step * k3);
            phi += step / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
            s += step;
          }
          std::size_t node = grid.index(i1, i2, idx);
          out.phi[node] = phi;
          out.d3[node] = rhs(phi);
          if (phi < grid.jp_lo || phi > grid.jp_hi)
            throw std::runtime_error(
                "inner_perturbation: phi escaped J'; cross-section scale too coarse");
        }
      };
      solve_direction(true);
      solve_direction(false);

      // Leibniz derivatives and the integral-equation residual
      for (int i3 = 0; i3 < grid.n3; ++i3) {
        std::size_t node = grid.index(i1, i2, i3);
        double phi = out.phi[node];
        double det_at_phi = fiber(phi);
        std::vector<double> integrals{0.0, 0.0};
        if (phi != 0) {
          integrals = adaptive_simpson_multi(
              [&](double s) {
                Vec3 g = v.grad_det({x1, x2, s});
                return std::vector<double>{g.x, g.y};
              },
              0.0, phi, 1e-12);
        }
        out.d1[node] = -integrals[0] / det_at_phi;
        out.d2[node] = -integrals[1] / det_at_phi;
        // integral equation: int_0^phi det ds = x3, exact for the affine fiber
        double lhs = fiber.a * phi + 0.5 * fiber.b * phi * phi;
        out.residual_max = std::max(out.residual_max, std::abs(lhs - grid.x3(i3)));

        out.c0_err = std::max(out.c0_err, std::abs(phi - grid.x3(i3)));
        double gnorm = std::sqrt(out.d1[node] * out.d1[node] + out.d2[node] * out.d2[node] +
                                 (out.d3[node] - 1) * (out.d3[node] - 1));
        out.c1_err = std::max(out.c1_err, gnorm);
      }
    }
  }
  out.c1_err += out.c0_err;
  return out;
}

ComposedDeformation::ComposedDeformation(std::shared_ptr<const TubeField> v, double ode_step)
    : TubeField(v->epsilon(), v->domain()), v_(std::move(v)), h_(ode_step) {}

double ComposedDeformation::phi(double x1, double x2, double x3) const {
  return integrate_phi(v_->det_fiber(x1, x2), x3, h_);
}

Vec3 ComposedDeformation::phi_gradient(double x1, double x2, double x3) const {
  DetFiber fiber = v_->det_fiber(x1, x2);
  double p = integrate_phi(fiber, x3, h_);
  double det_at = fiber(p);
  std::vector<double> integrals{0.0, 0.0};
  if (p != 0) {
    integrals = adaptive_simpson_multi(
        [&](double s) {
          Vec3 g = v_->grad_det({x1, x2, s});
          return std::vector<double>{g.x, g.y};
        },
        0.0, p, 1e-12);
  }
  return {-integrals[0] / det_at, -integrals[1] / det_at, 1.0 / det_at};
}

Vec3 ComposedDeformation::value_impl(const Vec3& x) const {
  double p = phi(x.x, x.y, x.z);
  return v_->value({x.x, x.y, p});
}

Mat3 ComposedDeformation::gradient_impl(const Vec3& x) const {
  DetFiber fiber = v_->det_fiber(x.x, x.y);
  double p = integrate_phi(fiber, x.z, h_);
  double det_at = fiber(p);
  // the determinant gradient is affine along the fiber (checked invariant of
  // both deformation families), so the endpoint trapezoid integrates the
  // Leibniz terms exactly
  Vec3 g_lo = v_->grad_det({x.x, x.y, 0.0});
  Vec3 g_hi = p != 0 ? v_->grad_det({x.x, x.y, p}) : g_lo;
  double int1 = 0.5 * p * (g_lo.x + g_hi.x);
  double int2 = 0.5 * p * (g_lo.y + g_hi.y);
  Vec3 dphi{-int1 / det_at, -int2 / det_at, 1.0 / det_at};
  Mat3 g = v_->rescaled_gradient_at({x.x, x.y, p});
  Vec3 g3 = g.col(2);
  Vec3 col1 = g.col(0) + (eps_ * dphi.x) * g3;
  Vec3 col2 = g.col(1) + dphi.y * g3;
  Vec3 col3 = dphi.z * g3;
  return Mat3::from_columns(col1, col2, col3);
}

double ComposedDeformation::det_impl(const Vec3& x) const {
  DetFiber fiber = v_->det_fiber(x.x, x.y);
  double p = integrate_phi(fiber, x.z, h_);
  Mat3 g = v_->rescaled_gradient_at({x.x, x.y, p});
  return det(g) / fiber(p);
}

double det_check(const TubeField& u, const BoxGrid& grid, double fd_step,
                 std::span<const std::pair<double, double>> skip_spans) {
  if (!(fd_step > 0)) throw std::invalid_argument("det_check: fd_step must be positive");
  const double h = fd_step;
  const double eps = u.epsilon();
  double worst = 0;
  for (int i1 = 1; i1 + 1 < grid.n1; ++i1) {
    double x1 = grid.x1(i1);
    bool skip = false;
    for (const auto& [lo, hi] : skip_spans)
      if (x1 >= lo - h && x1 <= hi + h) skip = true;
    if (skip) continue;
    for (int i2 = 1; i2 + 1 < grid.n2; ++i2) {
      for (int i3 = 1; i3 + 1 < grid.n3; ++i3) {
        Vec3 x{x1, grid.x2(i2), grid.x3(i3)};
        Vec3 c1 = (u.value({x.x + h, x.y, x.z}) - u.value({x.x - h, x.y, x.z})) / (2 * h);
        Vec3 c2 =
            (u.value({x.x, x.y + h, x.z}) - u.value({x.x, x.y - h, x.z})) / (2 * h * eps);
        Vec3 c3 =
            (u.value({x.x, x.y, x.z + h}) - u.value({x.x, x.y, x.z - h})) / (2 * h * eps);
        worst = std::max(worst, std::abs(det_cols(c1, c2, c3) - 1.0));
      }
    }
  }
  return worst;
}

}  // namespace stringlab
