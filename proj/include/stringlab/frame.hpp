// Moving frames along smooth midlines: a rotation-minimizing unit normal,
// the tailored frame (n, b) with det(u'|n|b) = 1 everywhere that matches
// prescribed cross sections on inner windows, and smooth unit-determinant
// paths between matrices used by the intermediate-regime recovery.

#pragma once

#include <memory>
#include <vector>

#include "stringlab/curve.hpp"
#include "stringlab/density.hpp"
#include "stringlab/geometry.hpp"

namespace stringlab {

// Quintic smoothstep jets on [0,1] (clamped outside).
struct StepJet {
  double s, ds, d2s;
};
StepJet smoothstep_jet(double t);

// The transition reparametrization: 0 near 0, 1 near 1, |psi'| <= 2,
// realized by the quintic smoothstep pre-squeezed to [0.03, 0.97].
StepJet transition_jet(double t);
std::pair<double, double> transition(double t);

// Unit normal field along a smooth curve: rotation-minimizing double
// reflection through the corner arcs, constant on affine pieces, projected
// exactly orthonormal to the tangent. Derivatives come from the transport
// law n' = -(n . T') T, not from differencing samples.
class MovingFrame {
 public:
  struct Jet {
    Vec3 n, dn, d2n;
  };

  MovingFrame(std::shared_ptr<const SmoothCurve> curve, int nodes_per_arc = 1024);

  const SmoothCurve& curve() const { return *curve_; }
  Jet eval(double t) const;
  Vec3 normal(double t) const { return eval(t).n; }
  // b = u' x n / |u' x n|^2
  Vec3 binormal(double t) const;
  // constant normal on the affine piece with the given index into
  // curve().pieces()
  Vec3 piece_normal(std::size_t piece_index) const;

 private:
  std::shared_ptr<const SmoothCurve> curve_;
  // parallel to curve pieces: affine pieces hold one entry, arcs hold the
  // transported node chain
  std::vector<std::vector<Vec3>> normals_;
};

MovingFrame normal_field(std::shared_ptr<const SmoothCurve> curve);

// Argmin cross sections for a list of slopes; repeated slopes are solved
// once.
std::vector<Mat3x2> optimal_cross_sections(const std::vector<Vec3>& slopes,
                                           const StoredDensity& density,
                                           const ReduceOptions& opts = {});

class MovingFrame;

// Argmin cross sections for the affine pieces of a curve, with the argmin
// branch selected by warm-starting from the transported frame. When the
// minimizer is a rotation orbit this picks the representative the frame can
// reach without a half turn.
std::vector<Mat3x2> aligned_cross_sections(const SmoothCurve& curve,
                                           const MovingFrame& frame,
                                           const StoredDensity& density,
                                           const ReduceOptions& opts = {});

// Everything the tube deformation needs at one axis position.
struct FrameJet {
  Vec3 u, du, d2u;
  Vec3 n, dn, d2n;
  Vec3 b, db, d2b;
};

class TailoredFrame {
 public:
  TailoredFrame(std::shared_ptr<const SmoothCurve> curve, MovingFrame frame,
                std::vector<Mat3x2> sections, double delta, double eta);

  const SmoothCurve& curve() const { return *curve_; }
  std::shared_ptr<const SmoothCurve> curve_ptr() const { return curve_; }

  FrameJet eval(double x1) const;

  double ball_radius() const { return ball_radius_; }      // |n| stays below
  double cylinder_radius() const { return cyl_radius_; }   // |u' x n| stays above

  // zone edges (curve breakpoints plus collar and cutoff edges)
  std::vector<double> breakpoints() const;

  // spans where the frame equals the target cross sections exactly
  struct InnerWindow {
    double lo, hi;
    Vec3 xi;
    Mat3x2 section;
  };
  const std::vector<InnerWindow>& inner_windows() const { return inner_; }

 private:
  struct Zone {
    enum class Kind { Arc, CollarIn, Inner, CollarOut };
    Kind kind;
    double lo, hi;
    std::size_t piece;  // curve piece index
    // affine-segment data
    Vec3 xi;
    Mat3x2 section;
    Vec3 n0;
    // great-circle blend cache (collars)
    Vec3 d0, d1;
    double theta = 0, m1 = 1;
    // cutoff ramp widths at each end of the inner zone
    double psi_lo = 0, psi_hi = 0;
    // binormal correction cache
    Vec3 corr;
  };

  const Zone& zone_at(double x1) const;
  void blend_jet(const Zone& z, double x1, Vec3& n, Vec3& dn, Vec3& d2n) const;

  std::shared_ptr<const SmoothCurve> curve_;
  MovingFrame frame_;
  std::vector<Zone> zones_;
  std::vector<InnerWindow> inner_;
  double ball_radius_ = 0, cyl_radius_ = 0;
};

TailoredFrame tailored_frame(std::shared_ptr<const SmoothCurve> curve,
                             const std::vector<Mat3x2>& sections, double delta,
                             double eta);

enum class Manifold { SO3, SL3 };

// Smooth path in SO(3) or SL(3) between two members: the one-parameter
// exponential arc when the principal logarithm exists, otherwise a
// two-leg route through an intermediate rotation with smoothstep clocks.
class ManifoldPath {
 public:
  ManifoldPath(const Mat3& f0, const Mat3& f1, Manifold m);

  Manifold manifold() const { return manifold_; }
  Mat3 value(double t) const;
  Mat3 derivative(double t, int order) const;
  const Mat3& start() const { return f0_; }
  const Mat3& finish() const { return f1_; }

 private:
  struct Leg {
    Mat3 base;
    Mat3 gen;  // traceless generator
  };
  Mat3 leg_eval(const Leg& leg, double s, int order, double ds, double d2s) const;

  Manifold manifold_;
  Mat3 f0_, f1_;
  std::vector<Leg> legs_;
};

ManifoldPath manifold_path(const Mat3& f0, const Mat3& f1, Manifold m);

}  // namespace stringlab
