// Piecewise-affine midline curves and the constructions that prepare them
// for tube recovery: Bernstein/Bezier corner rounding to C^k regularity,
// loop insertion at direction reversals, and sawtooth laminates realizing
// convexified energy values.

#pragma once

#include <array>
#include <optional>
#include <tuple>
#include <vector>

#include "stringlab/geometry.hpp"
#include "stringlab/norms.hpp"

namespace stringlab {

struct RadialEnvelope;  // density.hpp

double bernstein(int q, int p, double t, int order = 0);

struct PiecewiseAffineCurve {
  std::vector<double> t;  // breakpoints, t.front() = 0 < ... < t.back() = L
  std::vector<Vec3> u;    // values at the breakpoints

  PiecewiseAffineCurve() = default;
  PiecewiseAffineCurve(std::vector<double> ts, std::vector<Vec3> us);

  // Constant-slope segments glued from u(0) = origin.
  static PiecewiseAffineCurve from_slopes(const std::vector<Vec3>& slopes,
                                          const std::vector<double>& lengths,
                                          const Vec3& origin = {});

  std::size_t segments() const { return t.size() - 1; }
  double length() const { return t.back(); }
  Vec3 slope(std::size_t n) const { return (u[n + 1] - u[n]) / (t[n + 1] - t[n]); }
  double min_segment_length() const;
  Vec3 value(double s) const;
  SampledCurve sample(int n) const;

  void validate() const;  // strict increase, nonzero slopes
};

// Detects xi^{n+1} = -nu xi^n within an angular tolerance of pi.
bool anti_parallel(const Vec3& a, const Vec3& b, double tol = 1e-9);

// Replaces every reversal breakpoint by a detour through u(t) + delta*xi_perp
// (sigma = 1 for unequal speeds, 1/2 for equal), leaving the curve unchanged
// elsewhere. The output has no anti-parallel adjacent slopes.
PiecewiseAffineCurve insert_loops(const PiecewiseAffineCurve& curve, double delta);

class SmoothCurve {
 public:
  struct Piece {
    double t0, t1;
    bool affine;
    // affine: u(t) = base + (t - t0) * slope
    Vec3 base, slope;
    // corner arc: degree-2k Bezier on control points, reparametrized to
    // [t0, t1] = [tc - eta, tc + eta]
    std::vector<Vec3> control;
    double eta = 0;
  };

  SmoothCurve(std::vector<Piece> pieces, int k);

  int smoothness() const { return k_; }
  double length() const { return pieces_.back().t1; }
  const std::vector<Piece>& pieces() const { return pieces_; }

  Vec3 value(double t) const { return derivative(t, 0); }
  Vec3 derivative(double t, int order) const;
  // orders 0..3 with a single piece lookup
  std::array<Vec3, 4> jet3(double t) const;
  std::size_t piece_index(double t) const;

  // |u'| bounds: c from the distance of adjacent-slope hulls to the origin,
  // C from the largest slope.
  double speed_min() const { return c_min_; }
  double speed_max() const { return c_max_; }

  std::vector<double> breakpoints() const;
  SampledCurve sample(int n) const;

 private:
  const Piece& piece_at(double t) const;

  std::vector<Piece> pieces_;
  int k_;
  double c_min_, c_max_;
};

// Rounds every interior corner with a degree-2k Bezier arc on the 2k+1
// control points u(t_c - (k-m) eta/k); affine elsewhere; C^k overall.
// Requires no anti-parallel adjacent slopes and eta below half the minimal
// segment length.
SmoothCurve mollify(const PiecewiseAffineCurve& curve, int k, double eta);

// Also wraps an unmollified curve (k = 0) so downstream code can treat
// piecewise-affine input uniformly.
SmoothCurve as_smooth(const PiecewiseAffineCurve& curve);

struct LaminateCell {
  std::size_t parent_segment;
  Vec3 xi, xi_a, xi_b;
  double lambda;  // fraction of each period spent on xi_a
  double period;
};

struct LaminateCurve {
  PiecewiseAffineCurve refined;
  std::vector<LaminateCell> cells;
};

// Replaces every segment whose speed sits strictly below the profile f by a
// sawtooth between the radii of the enclosing contact segment of the convex
// envelope, with at least j teeth (sup deviation <= |I|/j). Segments already
// on the envelope pass through untouched.
LaminateCurve laminate_relax(const PiecewiseAffineCurve& curve, const RadialEnvelope& env,
                             int j);

// Splits xi with |xi| <= rstar into the two sphere points xi +- sqrt(rstar^2
// - |xi|^2) e_perp averaging back to xi with lambda = 1/2.
std::tuple<Vec3, Vec3, double> caratheodory_split(const Vec3& xi, double rstar);

// Sawtooth refinement onto the zero-level sphere of radius rstar: every
// segment with |xi| < rstar becomes j alternating unit-speed teeth.
PiecewiseAffineCurve zero_set_refine(const PiecewiseAffineCurve& curve, double rstar,
                                     int j);

}  // namespace stringlab
