// Recovery deformations and the inner perturbation that restores exact
// incompressibility: thin tubes around a framed midline, piecewise-affine
// deformations joined by reparametrized matrix paths, the fiberwise ODE for
// the perturbed third coordinate, and the composed exactly-incompressible
// deformation.

#pragma once

#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "stringlab/field.hpp"
#include "stringlab/frame.hpp"

namespace stringlab {

// v(x) = u(x1) + eps x2 n(x1) + eps x3 b(x1) over a tailored frame.
class TubeDeformation : public TubeField {
 public:
  TubeDeformation(std::shared_ptr<const TailoredFrame> frame, double eps, BoxGrid grid);

  const TailoredFrame& frame() const { return *frame_; }

  struct DetReport {
    double c0 = 0;  // sup |det - 1| over Q_L'
    double c1 = 0;  // c0 + sup |grad det|
  };
  DetReport det_report(int samples_per_piece = 16) const;

  std::vector<double> x1_breakpoints() const override;
  DetFiber det_fiber(double x1, double x2) const override;

 protected:
  Vec3 value_impl(const Vec3& x) const override;
  Mat3 gradient_impl(const Vec3& x) const override;
  double det_impl(const Vec3& x) const override;
  Vec3 grad_det_impl(const Vec3& x) const override;

 private:
  std::shared_ptr<const TailoredFrame> frame_;
};

// The three-branch deformation of the intermediate regime: affine on the
// segments, a matrix path reparametrized onto [t_n, t_n + eps^beta] across
// each junction, with offsets chosen for continuity.
class PathDeformation : public TubeField {
 public:
  PathDeformation(const PiecewiseAffineCurve& curve, const std::vector<Mat3x2>& sections,
                  Manifold m, double beta, double eps, BoxGrid grid);

  double beta() const { return beta_; }
  double window_width() const { return width_; }
  // [t_n, t_n + eps^beta] spans, for window-aware scans
  std::vector<std::pair<double, double>> window_spans() const;

  std::vector<double> x1_breakpoints() const override;
  DetFiber det_fiber(double x1, double x2) const override;

  // max continuity mismatch across branch boundaries, sampled over the cross
  // section (diagnostic; construction keeps it at rounding level)
  double continuity_defect() const;

 protected:
  Vec3 value_impl(const Vec3& x) const override;
  Mat3 gradient_impl(const Vec3& x) const override;
  double det_impl(const Vec3& x) const override;
  Vec3 grad_det_impl(const Vec3& x) const override;

 private:
  struct Window {
    double t0, t1;
    ManifoldPath path;
    Vec3 offset;                      // d_eps
    std::vector<double> panel_edges;  // analytic panels for the running integral
    std::vector<Vec3> prefix;         // integral of P_eps e1 up to each edge
  };
  struct Segment {
    double t0, t1;
    Mat3 map;
    Vec3 offset;  // b_eps
  };

  void p_jet(const Window& w, double x1, Mat3& p, Mat3& dp, Mat3& d2p) const;
  Vec3 integral_to(const Window& w, double x1) const;
  // index into the interleaved branch list; windows are odd entries
  std::size_t branch_at(double x1) const;

  std::vector<Segment> segments_;
  std::vector<Window> windows_;
  std::vector<double> edges_;  // sorted branch edges
  double beta_, width_;
};

// phi on a fiber: solves d phi / d x3 = 1 / det(x1, x2, phi), phi(0) = 0 by
// classical fourth-order steps of size at most h.
double integrate_phi(const DetFiber& fiber, double x3, double h);

struct PerturbationField {
  BoxGrid grid;
  double gamma = 1;     // recorded rate exponent of the input family
  double ode_step = 1e-3;
  std::vector<double> phi, d1, d2, d3;  // node arrays

  double det_lower = 1;    // l: min det of the input along the solves
  double det_c0 = 0;       // ||det - 1||_C0(Q_L')
  double det_c1 = 0;       // det_c0 + ||grad det||_C0
  double c0_err = 0;       // ||phi - x3||_C0 over nodes
  double c1_err = 0;       // c0_err + max |(d1, d2, d3 - 1)|
  double residual_max = 0; // integral-equation residual
};

PerturbationField inner_perturbation(const TubeField& v, const BoxGrid& grid,
                                     double gamma, double ode_step = 1e-3);

// u = v o Phi with Phi(x) = (x1, x2, phi(x)); phi is re-solved on demand so
// evaluation carries no grid coupling.
class ComposedDeformation : public TubeField {
 public:
  ComposedDeformation(std::shared_ptr<const TubeField> v, double ode_step = 1e-3);

  const TubeField& base() const { return *v_; }
  double phi(double x1, double x2, double x3) const;
  // (d1 phi, d2 phi, d3 phi) via the Leibniz rule and the ODE right-hand side
  Vec3 phi_gradient(double x1, double x2, double x3) const;

  std::vector<double> x1_breakpoints() const override { return v_->x1_breakpoints(); }
  DetFiber det_fiber(double, double) const override { return {1.0, 0.0}; }

 protected:
  Vec3 value_impl(const Vec3& x) const override;
  Mat3 gradient_impl(const Vec3& x) const override;
  double det_impl(const Vec3& x) const override;
  Vec3 grad_det_impl(const Vec3&) const override { return {}; }

 private:
  std::shared_ptr<const TubeField> v_;
  double h_;
};

// Independent incompressibility verification: determinant of the central
// finite-difference rescaled gradient over interior grid nodes, skipping
// nodes inside the given x1 spans.
double det_check(const TubeField& u, const BoxGrid& grid, double fd_step,
                 std::span<const std::pair<double, double>> skip_spans = {});

}  // namespace stringlab
