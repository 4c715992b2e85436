#include "stringlab/density.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "stringlab/matfun.hpp"
#include "stringlab/svd3.hpp"

namespace stringlab {

StoredDensity StoredDensity::single_well(double c) {
  StoredDensity d;
  d.model = DensityModel::SingleWellSO3;
  d.growth = GrowthClass::H3;
  d.scale = c;
  d.c3 = c;
  d.C3 = c;
  d.c2 = 0.5 * c;
  d.C2 = 6.0 * c;
  return d;
}

StoredDensity StoredDensity::frobenius() {
  StoredDensity d;
  d.model = DensityModel::Frobenius;
  d.growth = GrowthClass::H2;
  d.scale = 1.0;
  d.c2 = 1.0;
  d.C2 = 1.0;
  return d;
}

StoredDensity StoredDensity::double_well(double a, double b, double c) {
  if (!(0 < a && a < b)) throw std::invalid_argument("double_well: need 0 < a < b");
  StoredDensity d;
  d.model = DensityModel::DoubleWellRadial;
  d.growth = GrowthClass::H2;
  d.scale = c;
  d.well_a = a;
  d.well_b = b;
  double m = std::max(a * a + 2 / a, b * b + 2 / b);
  d.c2 = 0.5 * c;
  d.C2 = 2.0 * c * (1 + m);
  return d;
}

StoredDensity parse_density_model(const std::string& name) {
  if (name == "single_well_so3") return StoredDensity::single_well();
  if (name == "frobenius") return StoredDensity::frobenius();
  if (name == "double_well_radial") return StoredDensity::double_well(1.0, 2.0);
  throw std::invalid_argument("unknown density model: " + name);
}

std::string density_model_name(const StoredDensity& d) {
  switch (d.model) {
    case DensityModel::SingleWellSO3: return "single_well_so3";
    case DensityModel::Frobenius: return "frobenius";
    case DensityModel::DoubleWellRadial: return "double_well_radial";
  }
  return "?";
}

namespace {

// diag(w, w^{-1/2}, w^{-1/2}) has unit determinant; its rotation orbit
// carries every first column of norm w.
Vec3 well_diag(double w) {
  double s = 1.0 / std::sqrt(w);
  return {w, s, s};
}

}  // namespace

double eval_w0(const StoredDensity& d, const Mat3& f) {
  if (!finite(f)) throw std::invalid_argument("eval_w0: non-finite matrix");
  switch (d.model) {
    case DensityModel::SingleWellSO3:
      return d.scale * dist2_so3(f);
    case DensityModel::Frobenius:
      return norm2(f);
    case DensityModel::DoubleWellRadial:
      return d.scale * std::min(dist2_so3_orbit(f, well_diag(d.well_a)),
                                dist2_so3_orbit(f, well_diag(d.well_b)));
  }
  throw std::logic_error("eval_w0: unhandled model");
}

double eval_w(const StoredDensity& d, const Mat3& f, double tol) {
  if (tol < 0) throw std::invalid_argument("eval_w: tol must be nonnegative");
  if (std::abs(det(f) - 1.0) > tol) return kInfiniteEnergy;
  return eval_w0(d, f);
}

void check_growth_class(const StoredDensity& d, int samples) {
  std::mt19937 rng(1234);
  std::uniform_real_distribution<double> entry(-3.0, 3.0);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (int s = 0; s < samples; ++s) {
    Mat3 f;
    if (s % 4 == 0) {
      // cluster some samples near rotations to exercise the lower bounds
      Vec3 w{unit(rng), unit(rng), unit(rng)};
      f = so3_exp(w);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) f.m[i][j] += 0.1 * unit(rng);
    } else {
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) f.m[i][j] = entry(rng);
    }
    double w0 = eval_w0(d, f);
    double n2 = norm2(f);
    const double slack = 1e-9 * (1 + n2);
    if (w0 < -slack) throw std::runtime_error("growth check: negative density");
    if (w0 < d.c2 * n2 - d.C2 - slack)
      throw std::runtime_error("growth check: lower quadratic bound violated");
    if (w0 > d.C2 * (n2 + 1) + slack)
      throw std::runtime_error("growth check: upper quadratic bound violated");
    if (d.growth == GrowthClass::H3) {
      double dist2 = dist2_so3(f);
      if (w0 < d.c3 * dist2 - slack || w0 > d.C3 * dist2 + slack)
        throw std::runtime_error("growth check: squared-distance bounds violated");
    }
  }
}

namespace {

// Five-parameter chart of the constraint set det(xi|A) = 1: theta = (a1,
// tau1, tau2) with a2 = c/|c|^2 + tau1 u1 + tau2 u2 and c = xi x a1. Since c
// is always orthogonal to xi, anchoring the c^perp basis at the axis
// direction keeps the chart free of degeneracies for every a1.
struct Chart {
  Vec3 axis;  // xi / |xi|

  bool decode(const Vec3& xi, const std::vector<double>& theta, Mat3x2& a) const {
    Vec3 a1{theta[0], theta[1], theta[2]};
    Vec3 c = cross(xi, a1);
    double c2 = norm2(c);
    if (c2 < 1e-20) return false;
    Vec3 u1 = normalized(cross(c, axis));
    Vec3 u2 = cross(c / std::sqrt(c2), u1);
    a.a1 = a1;
    a.a2 = c / c2 + theta[3] * u1 + theta[4] * u2;
    return true;
  }

  std::vector<double> encode(const Vec3& xi, const Mat3x2& a) const {
    Vec3 c = cross(xi, a.a1);
    double c2 = norm2(c);
    Vec3 u1 = normalized(cross(c, axis));
    Vec3 u2 = cross(c / std::sqrt(c2), u1);
    Vec3 rest = a.a2 - c / c2;
    return {a.a1.x, a.a1.y, a.a1.z, dot(rest, u1), dot(rest, u2)};
  }
};

// Orthonormal completion scaled so |a1| = |a2| = 1/sqrt(|xi|); it attains
// the minimal cross-section norm 2/|xi| and is exact for the Frobenius
// model.
Mat3x2 canonical_completion(const Vec3& xi) {
  double s = norm(xi);
  Vec3 a1 = orthogonal_unit(xi) / std::sqrt(s);
  Vec3 c = cross(xi, a1);
  return {a1, c / norm2(c)};
}

}  // namespace

ReducedSample reduce_density(const StoredDensity& d, const Vec3& xi,
                             const ReduceOptions& opts) {
  if (!finite(xi)) throw std::invalid_argument("reduce_density: non-finite xi");
  double s = norm(xi);
  if (s < 1e-14) return {xi, kInfiniteEnergy, {}, 0, 0};

  Mat3x2 canon = canonical_completion(xi);
  Chart chart{xi / s};

  auto objective = [&](const std::vector<double>& theta) {
    Mat3x2 a;
    if (!chart.decode(xi, theta, a)) return 1e30;
    return eval_w0(d, with_first_column(xi, a));
  };

  std::vector<std::vector<double>> seeds;
  seeds.push_back(chart.encode(xi, canon));
  if (opts.warm_start && std::isfinite(opts.warm_start->value))
    seeds.push_back(chart.encode(xi, opts.warm_start->cross_section));
  double spread = 1.5 * std::max(1.0, 1.0 / std::sqrt(s));
  int fresh = std::max(0, opts.starts - int(seeds.size()));
  for (int i = 0; i < fresh; ++i) {
    std::vector<double> h = halton(i, 5);
    std::vector<double> seed = seeds[0];
    for (int k = 0; k < 5; ++k) seed[k] += spread * (h[k] - 0.5) * 2.0;
    seeds.push_back(std::move(seed));
  }

  MinimizeOptions mopts;
  mopts.simplex_scale = 0.4 * std::max(1.0, 1.0 / std::sqrt(s));
  MinimizeResult best;
  best.value = kInfiniteEnergy;
  MinimizeResult warm_result;
  warm_result.value = kInfiniteEnergy;
  int total_evals = 0;
  for (std::size_t si = 0; si < seeds.size(); ++si) {
    MinimizeResult r = minimize(objective, seeds[si], mopts);
    total_evals += r.evaluations;
    if (opts.warm_start && si == 1) warm_result = r;
    if (r.value < best.value) best = r;
  }
  // the argmin can be a whole orbit; on ties keep the branch continued from
  // the warm start so downstream constructions see a coherent selection
  if (std::isfinite(warm_result.value) &&
      warm_result.value <= best.value + 1e-9 * (1 + std::abs(best.value)))
    best = warm_result;
  best.evaluations = total_evals;

  Mat3x2 a;
  if (!chart.decode(xi, best.x, a))
    throw OptimizerError("reduce_density: descent left the chart", best);
  ReducedSample out{xi, best.value, a, best.grad_norm, best.evaluations};

  double detv = det(with_first_column(xi, a));
  if (std::abs(detv - 1.0) > 1e-10)
    throw OptimizerError("reduce_density: determinant constraint violated", best);
  double upper = d.C2 * (s * s + 2 / s + 1) + 1e-6 * (1 + s * s);
  double lower = d.c2 * s * s - d.C2 - 1e-6 * (1 + s * s);
  if (out.value > upper || out.value < lower)
    throw OptimizerError("reduce_density: value escapes the growth sandwich", best);
  if (best.grad_norm > opts.certificate * (1 + std::abs(out.value)))
    throw OptimizerError("reduce_density: local-min certificate failed", best);
  return out;
}

double reduce_density_bruteforce(const StoredDensity& d, const Vec3& xi, double range,
                                 double final_step) {
  double s = norm(xi);
  if (s < 1e-14) return kInfiniteEnergy;
  Chart chart{xi / s};
  auto objective = [&](const std::vector<double>& theta) {
    Mat3x2 a;
    if (!chart.decode(xi, theta, a)) return 1e30;
    return eval_w0(d, with_first_column(xi, a));
  };

  const int pts = 11;  // grid points per axis and round
  auto scan = [&](const std::vector<double>& center, double halfwidth,
                  std::vector<std::vector<double>>* top) {
    std::vector<double> theta(5);
    std::vector<std::pair<double, std::vector<double>>> ranked;
    int idx[5];
    for (idx[0] = 0; idx[0] < pts; ++idx[0])
      for (idx[1] = 0; idx[1] < pts; ++idx[1])
        for (idx[2] = 0; idx[2] < pts; ++idx[2])
          for (idx[3] = 0; idx[3] < pts; ++idx[3])
            for (idx[4] = 0; idx[4] < pts; ++idx[4]) {
              for (int k = 0; k < 5; ++k)
                theta[k] = center[k] + halfwidth * (2.0 * idx[k] / (pts - 1) - 1.0);
              double v = objective(theta);
              ranked.emplace_back(v, theta);
            }
    std::sort(ranked.begin(), ranked.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    top->clear();
    for (const auto& [v, th] : ranked) {
      bool distinct = true;
      for (const auto& seen : *top) {
        double dist = 0;
        for (int k = 0; k < 5; ++k) dist += (seen[k] - th[k]) * (seen[k] - th[k]);
        if (std::sqrt(dist) < halfwidth) distinct = false;
      }
      if (distinct) top->push_back(th);
      if (top->size() == 4) break;
    }
    return ranked.front().first;
  };

  std::vector<std::vector<double>> top;
  std::vector<double> origin(5, 0.0);
  scan(origin, range, &top);

  double best = 1e30;
  for (const auto& start : top) {
    std::vector<double> center = start;
    double hw = range * 2.0 / (pts - 1);
    while (true) {
      std::vector<std::vector<double>> local;
      double v = scan(center, hw, &local);
      best = std::min(best, v);
      center = local.front();
      if (2 * hw / (pts - 1) <= final_step * 0.02) break;
      hw *= 0.4;
    }
  }
  return best;
}

std::vector<double> default_radial_grid(double r_min, double r_max, int samples) {
  if (!(0 < r_min && r_min < r_max) || samples < 3)
    throw std::invalid_argument("default_radial_grid: bad range");
  std::vector<double> r;
  r.reserve(samples);
  if (r_min < 1.0 && 1.0 < r_max) {
    // log-spaced with an exact node at the unit-speed radius
    double lo = std::log(r_min), hi = std::log(r_max);
    int n_lo = std::max(2, int(std::lround((samples - 1) * (0.0 - lo) / (hi - lo))));
    int n_hi = samples - 1 - n_lo;
    for (int i = 0; i < n_lo; ++i) r.push_back(std::exp(lo + (0.0 - lo) * i / n_lo));
    for (int i = 0; i <= n_hi; ++i) r.push_back(std::exp(0.0 + (hi - 0.0) * i / n_hi));
  } else {
    double lo = std::log(r_min), hi = std::log(r_max);
    for (int i = 0; i < samples; ++i) r.push_back(std::exp(lo + (hi - lo) * i / (samples - 1)));
  }
  return r;
}

RadialEnvelope radial_profile(const StoredDensity& d, const std::vector<double>& radii,
                              const ProfileOptions& opts) {
  if (radii.size() < 3) throw std::invalid_argument("radial_profile: need >= 3 radii");
  for (std::size_t i = 0; i + 1 < radii.size(); ++i)
    if (!(0 < radii[i] && radii[i] < radii[i + 1]))
      throw std::invalid_argument("radial_profile: radii must be positive increasing");

  if (opts.check_frame_indifference) {
    std::size_t m = radii.size();
    const double probes[] = {radii[m / 4], radii[m / 2], radii[3 * m / 4]};
    const Mat3 rots[] = {rotation_about({1, 2, 0.5}, 1.1), rotation_about({-0.3, 1, 2}, 2.4)};
    for (double r : probes) {
      ReducedSample base = reduce_density(d, r * e1, opts.reduce);
      for (const Mat3& rot : rots) {
        ReducedSample rotated = reduce_density(d, rot * (r * e1), opts.reduce);
        if (std::abs(rotated.value - base.value) > opts.frame_tol * (1 + std::abs(base.value)))
          throw std::runtime_error(
              "radial_profile: model is not frame-indifferent; profile undefined");
      }
    }
  }

  RadialEnvelope env;
  env.r = radii;
  env.f.resize(radii.size());
  ReducedSample prev;
  prev.value = kInfiniteEnergy;
  ReduceOptions ropts = opts.reduce;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    ropts.warm_start = std::isfinite(prev.value) ? &prev : nullptr;
    ropts.starts = std::isfinite(prev.value) ? std::max(4, opts.reduce.starts / 2)
                                             : opts.reduce.starts;
    ReducedSample sample = reduce_density(d, radii[i] * e1, ropts);
    env.f[i] = sample.value;
    prev = sample;
  }
  convex_envelope(env);
  return env;
}

void convex_envelope(RadialEnvelope& env, double turn_tol) {
  const std::size_t m = env.r.size();
  if (m < 3) throw std::invalid_argument("convex_envelope: need >= 3 samples");
  for (double v : env.f)
    if (!std::isfinite(v)) throw std::invalid_argument("convex_envelope: profile must be finite");

  // even extension: mirror the samples through r = 0
  std::vector<double> xs(2 * m), ys(2 * m);
  for (std::size_t i = 0; i < m; ++i) {
    xs[m - 1 - i] = -env.r[i];
    ys[m - 1 - i] = env.f[i];
    xs[m + i] = env.r[i];
    ys[m + i] = env.f[i];
  }

  std::vector<std::size_t> hull;  // indices into xs/ys
  double fmax = 1.0;
  for (double v : ys) fmax = std::max(fmax, std::abs(v));
  for (std::size_t i = 0; i < xs.size(); ++i) {
    while (hull.size() >= 2) {
      std::size_t a = hull[hull.size() - 2], b = hull[hull.size() - 1];
      double cross = (xs[b] - xs[a]) * (ys[i] - ys[a]) - (ys[b] - ys[a]) * (xs[i] - xs[a]);
      if (cross <= turn_tol * (xs[i] - xs[a]) * fmax)
        hull.pop_back();
      else
        break;
    }
    hull.push_back(i);
  }

  env.hull_r.clear();
  env.hull_v.clear();
  for (std::size_t i : hull) {
    env.hull_r.push_back(xs[i]);
    env.hull_v.push_back(ys[i]);
  }

  env.fc.resize(m);
  for (std::size_t i = 0; i < m; ++i) env.fc[i] = env.envelope_at(env.r[i]);

  // contact segments: maximal sample runs where the hull sits strictly below
  // the profile, delimited by the nearest touching samples
  env.contacts.clear();
  const double ctol = 1e-9;
  auto touching = [&](std::size_t i) {
    double h = env.envelope_at(xs[i]);
    return ys[i] - h <= ctol * (1 + std::abs(ys[i]));
  };
  std::size_t i = 0;
  while (i < xs.size()) {
    if (touching(i)) {
      ++i;
      continue;
    }
    std::size_t lo = i;
    while (i < xs.size() && !touching(i)) ++i;
    double r1 = lo > 0 ? xs[lo - 1] : xs.front();
    double r2 = i < xs.size() ? xs[i] : xs.back();
    if (r2 > 0) env.contacts.push_back({r1, r2});
  }
}

double RadialEnvelope::profile_at(double radius) const {
  double a = std::abs(radius);
  if (a < r_min() * (1 - 1e-12) || a > r_max() * (1 + 1e-12))
    throw std::out_of_range("RadialEnvelope: radius outside the sampled profile range");
  a = std::clamp(a, r_min(), r_max());
  auto it = std::upper_bound(r.begin(), r.end(), a);
  std::size_t i = std::min<std::size_t>(r.size() - 2, std::max<std::ptrdiff_t>(0, it - r.begin() - 1));
  double w = (a - r[i]) / (r[i + 1] - r[i]);
  return (1 - w) * f[i] + w * f[i + 1];
}

double RadialEnvelope::envelope_at(double radius) const {
  if (hull_r.empty()) throw std::logic_error("RadialEnvelope: envelope not built");
  if (std::abs(radius) > r_max() * (1 + 1e-12))
    throw std::out_of_range("RadialEnvelope: radius outside the envelope range");
  double a = std::clamp(radius, hull_r.front(), hull_r.back());
  auto it = std::upper_bound(hull_r.begin(), hull_r.end(), a);
  std::size_t i =
      std::min<std::size_t>(hull_r.size() - 2, std::max<std::ptrdiff_t>(0, it - hull_r.begin() - 1));
  double w = (a - hull_r[i]) / (hull_r[i + 1] - hull_r[i]);
  return (1 - w) * hull_v[i] + w * hull_v[i + 1];
}

ContactSegment RadialEnvelope::contact_containing(double radius) const {
  for (const ContactSegment& seg : contacts)
    if (seg.r1 - 1e-12 <= radius && radius <= seg.r2 + 1e-12) return seg;
  throw std::runtime_error("RadialEnvelope: no contact segment contains the radius");
}

double eval_wbar_c(const RadialEnvelope& env, const Vec3& xi) {
  return env.envelope_at(norm(xi));
}

std::optional<double> zero_level_radius(const RadialEnvelope& env, double zero_tol) {
  if (env.hull_r.empty()) throw std::logic_error("zero_level_radius: envelope not built");
  // walk hull edges right to left and find the last downward crossing of the
  // zero tolerance level
  for (std::size_t k = env.hull_r.size() - 1; k > 0; --k) {
    double v0 = env.hull_v[k - 1], v1 = env.hull_v[k];
    double r0 = env.hull_r[k - 1], r1 = env.hull_r[k];
    if (r1 <= 0) break;
    if (v1 <= zero_tol) return std::max(r1, 0.0);
    if (v0 <= zero_tol && v1 > zero_tol) {
      double w = (zero_tol - v0) / (v1 - v0);
      double cross = r0 + w * (r1 - r0);
      return std::max(cross, 0.0);
    }
  }
  return std::nullopt;
}

}  // namespace stringlab
