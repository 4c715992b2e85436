// Stored elastic densities W0, the incompressible density W (infinite off
// det F = 1), the reduced density obtained by minimizing out the two
// cross-section columns under det(xi|A) = 1, radial profiles of reduced
// densities, and their convex envelopes.

#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "stringlab/geometry.hpp"
#include "stringlab/optimize.hpp"

namespace stringlab {

constexpr double kInfiniteEnergy = std::numeric_limits<double>::infinity();

enum class GrowthClass { H2, H3 };

enum class DensityModel {
  SingleWellSO3,    // c * dist^2(F, SO(3))
  Frobenius,        // |F|^2
  DoubleWellRadial  // c * min of dist^2 to two scaled-rotation orbits
};

struct StoredDensity {
  DensityModel model = DensityModel::SingleWellSO3;
  GrowthClass growth = GrowthClass::H3;
  double scale = 1.0;              // c
  double well_a = 1.0, well_b = 2.0;  // double-well radii (a < b)
  double c2 = 0, C2 = 0;           // quadratic growth constants
  double c3 = 0, C3 = 0;           // squared-distance growth constants (H3)

  static StoredDensity single_well(double c = 1.0);
  static StoredDensity frobenius();
  static StoredDensity double_well(double a, double b, double c = 1.0);
};

StoredDensity parse_density_model(const std::string& name);
std::string density_model_name(const StoredDensity& d);

double eval_w0(const StoredDensity& d, const Mat3& f);

// W0(F) when |det F - 1| <= tol, the infinite marker otherwise.
double eval_w(const StoredDensity& d, const Mat3& f, double tol);

// Samples random matrices and checks the declared growth class; throws when
// a bound is violated.
void check_growth_class(const StoredDensity& d, int samples = 2000);

struct ReducedSample {
  Vec3 xi;
  double value = 0;
  Mat3x2 cross_section;  // argmin A with det(xi|A) = 1
  double grad_norm = 0;  // local-min certificate in the reduced coordinates
  int evaluations = 0;
};

struct ReduceOptions {
  int starts = 8;              // deterministic multi-start seeds
  double certificate = 1e-8;   // required gradient norm at the reported min
  const ReducedSample* warm_start = nullptr;
};

// Minimizes W0((xi|A)) over A with det(xi|A) = 1. The linear constraint in
// the second column is eliminated exactly: a2 = c/|c|^2 + span{c}^perp with
// c = xi x a1, leaving five free parameters. xi = 0 reports the infinite
// value.
ReducedSample reduce_density(const StoredDensity& d, const Vec3& xi,
                             const ReduceOptions& opts = {});

// Independent check: multi-resolution grid search over the same five
// parameters, final resolution <= final_step.
double reduce_density_bruteforce(const StoredDensity& d, const Vec3& xi,
                                 double range = 3.0, double final_step = 0.05);

struct ContactSegment {
  double r1, r2;  // signed radii; the envelope is affine and below f here
};

struct RadialEnvelope {
  std::vector<double> r;   // positive sample radii, increasing
  std::vector<double> f;   // profile values
  std::vector<double> fc;  // envelope values at the sample radii
  std::vector<ContactSegment> contacts;
  // vertices of the lower convex hull of the even extension on [-rmax, rmax]
  std::vector<double> hull_r, hull_v;

  double r_min() const { return r.front(); }
  double r_max() const { return r.back(); }

  // piecewise-linear interpolation of the sampled profile; radius must lie
  // in [r_min, r_max]
  double profile_at(double radius) const;
  // envelope value for |radius| <= r_max (the even hull extends across 0)
  double envelope_at(double radius) const;
  ContactSegment contact_containing(double radius) const;
};

struct ProfileOptions {
  ReduceOptions reduce;
  bool check_frame_indifference = true;
  double frame_tol = 1e-6;
};

std::vector<double> default_radial_grid(double r_min = 0.05, double r_max = 8.0,
                                        int samples = 400);

// f(r) = reduced density at r e1; requires a frame-indifferent model (checked
// by sampling rotations). Consecutive radii warm-start each other.
RadialEnvelope radial_profile(const StoredDensity& d, const std::vector<double>& radii,
                              const ProfileOptions& opts = {});

// Lower convex hull of the even extension of the sampled profile by monotone
// chain; fills fc, the hull vertices, and the contact segments.
void convex_envelope(RadialEnvelope& env, double turn_tol = 1e-9);

// Linear interpolation of f^c at |xi|; range error outside the evaluable
// radius span.
double eval_wbar_c(const RadialEnvelope& env, const Vec3& xi);

// Largest radius with f^c <= zero_tol, if any.
std::optional<double> zero_level_radius(const RadialEnvelope& env, double zero_tol = 1e-8);

}  // namespace stringlab
