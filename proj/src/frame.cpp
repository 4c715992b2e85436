#include "stringlab/frame.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

#include "stringlab/matfun.hpp"

namespace stringlab {

StepJet smoothstep_jet(double t) {
  if (t <= 0) return {0, 0, 0};
  if (t >= 1) return {1, 0, 0};
  double t2 = t * t, t3 = t2 * t;
  return {6 * t3 * t2 - 15 * t2 * t2 + 10 * t3, 30 * t2 * (t - 1) * (t - 1),
          60 * t * (t - 1) * (2 * t - 1)};
}

namespace {
constexpr double kSqueezeLo = 0.03;
constexpr double kSqueezeSpan = 0.94;
}  // namespace

StepJet transition_jet(double t) {
  double tau = (std::clamp(t, 0.0, 1.0) - kSqueezeLo) / kSqueezeSpan;
  StepJet s = smoothstep_jet(tau);
  return {s.s, s.ds / kSqueezeSpan, s.d2s / (kSqueezeSpan * kSqueezeSpan)};
}

std::pair<double, double> transition(double t) {
  StepJet j = transition_jet(t);
  return {j.s, j.ds};
}

namespace {

// tangent direction and its first two derivatives from curve jets
struct TangentJet {
  Vec3 T, dT, d2T;
};

TangentJet tangent_jet(const std::array<Vec3, 4>& jet) {
  const Vec3 &du = jet[1], &d2u = jet[2], &d3u = jet[3];
  double g = norm(du);
  if (g < 1e-14) throw std::runtime_error("tangent_jet: vanishing speed");
  Vec3 T = du / g;
  double dg = dot(du, d2u) / g;
  Vec3 dT = d2u / g - du * (dg / (g * g));
  double d2g = (norm2(d2u) + dot(du, d3u)) / g - dot(du, d2u) * dg / (g * g);
  Vec3 d2T = d3u / g - 2.0 * (dg / (g * g)) * d2u - (d2g / (g * g)) * du +
             (2 * dg * dg / (g * g * g)) * du;
  return {T, dT, d2T};
}

Vec3 double_reflect(const Vec3& x0, const Vec3& t0, const Vec3& n0, const Vec3& x1,
                    const Vec3& t1) {
  Vec3 v1 = x1 - x0;
  double c1 = norm2(v1);
  Vec3 nl = n0, tl = t0;
  if (c1 > 1e-28) {
    nl = n0 - (2 * dot(v1, n0) / c1) * v1;
    tl = t0 - (2 * dot(v1, t0) / c1) * v1;
  }
  Vec3 v2 = t1 - tl;
  double c2 = norm2(v2);
  Vec3 n1 = nl;
  if (c2 > 1e-28) n1 = nl - (2 * dot(v2, nl) / c2) * v2;
  // exact orthonormal projection against the new tangent
  n1 = n1 - dot(n1, t1) * t1;
  return normalized(n1);
}

}  // namespace

MovingFrame::MovingFrame(std::shared_ptr<const SmoothCurve> curve, int nodes_per_arc)
    : curve_(std::move(curve)) {
  const auto& pieces = curve_->pieces();
  normals_.resize(pieces.size());

  Vec3 t_start = normalized(curve_->derivative(pieces.front().t0, 1));
  Vec3 current = orthogonal_unit(t_start);

  for (std::size_t i = 0; i < pieces.size(); ++i) {
    const auto& p = pieces[i];
    if (p.affine) {
      normals_[i] = {current};
      continue;
    }
    int m = nodes_per_arc;
    std::vector<Vec3> chain(m + 1);
    chain[0] = current;
    double h = (p.t1 - p.t0) / m;
    Vec3 x_prev = curve_->value(p.t0);
    Vec3 t_prev = normalized(curve_->derivative(p.t0, 1));
    for (int k = 1; k <= m; ++k) {
      double tk = p.t0 + k * h;
      Vec3 xk = curve_->value(tk);
      Vec3 tk_dir = normalized(curve_->derivative(tk, 1));
      chain[k] = double_reflect(x_prev, t_prev, chain[k - 1], xk, tk_dir);
      x_prev = xk;
      t_prev = tk_dir;
    }
    normals_[i] = std::move(chain);
    current = normals_[i].back();
  }
}

MovingFrame::Jet MovingFrame::eval(double t) const {
  std::size_t idx = curve_->piece_index(t);
  const auto& p = curve_->pieces()[idx];
  if (p.affine) return {normals_[idx][0], {}, {}};

  const auto& chain = normals_[idx];
  int m = int(chain.size()) - 1;
  double h = (p.t1 - p.t0) / m;
  int k = std::clamp(int((t - p.t0) / h), 0, m);
  Vec3 n = chain[k];
  double tk = p.t0 + k * h;
  if (t != tk) {
    Vec3 x0 = curve_->value(tk);
    Vec3 t0 = normalized(curve_->derivative(tk, 1));
    Vec3 x1 = curve_->value(t);
    Vec3 t1 = normalized(curve_->derivative(t, 1));
    n = double_reflect(x0, t0, n, x1, t1);
  }
  auto jet = curve_->jet3(t);
  TangentJet tj = tangent_jet(jet);
  Vec3 dn = -dot(n, tj.dT) * tj.T;
  Vec3 d2n = -(dot(dn, tj.dT) + dot(n, tj.d2T)) * tj.T - dot(n, tj.dT) * tj.dT;
  return {n, dn, d2n};
}

Vec3 MovingFrame::binormal(double t) const {
  Vec3 du = curve_->derivative(t, 1);
  Vec3 w = cross(du, eval(t).n);
  double r = norm2(w);
  if (r < 1e-24) throw std::runtime_error("MovingFrame: degenerate binormal");
  return w / r;
}

Vec3 MovingFrame::piece_normal(std::size_t piece_index) const {
  if (piece_index >= normals_.size() || !curve_->pieces()[piece_index].affine)
    throw std::invalid_argument("piece_normal: not an affine piece");
  return normals_[piece_index][0];
}

MovingFrame normal_field(std::shared_ptr<const SmoothCurve> curve) {
  return MovingFrame(std::move(curve));
}

std::vector<Mat3x2> optimal_cross_sections(const std::vector<Vec3>& slopes,
                                           const StoredDensity& density,
                                           const ReduceOptions& opts) {
  std::vector<Mat3x2> sections;
  sections.reserve(slopes.size());
  std::map<std::array<double, 3>, Mat3x2> cache;
  for (const Vec3& xi : slopes) {
    std::array<double, 3> key{xi.x, xi.y, xi.z};
    auto it = cache.find(key);
    if (it == cache.end()) {
      ReducedSample s = reduce_density(density, xi, opts);
      if (!std::isfinite(s.value))
        throw std::invalid_argument("optimal_cross_sections: zero slope");
      it = cache.emplace(key, s.cross_section).first;
    }
    sections.push_back(it->second);
  }
  return sections;
}

std::vector<Mat3x2> aligned_cross_sections(const SmoothCurve& curve,
                                           const MovingFrame& frame,
                                           const StoredDensity& density,
                                           const ReduceOptions& opts) {
  std::vector<Mat3x2> sections;
  std::map<std::array<double, 6>, Mat3x2> cache;
  const auto& pieces = curve.pieces();
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    if (!pieces[i].affine) continue;
    const Vec3 xi = pieces[i].slope;
    const Vec3 n0 = frame.piece_normal(i);
    std::array<double, 6> key{xi.x, xi.y, xi.z, n0.x, n0.y, n0.z};
    auto it = cache.find(key);
    if (it == cache.end()) {
      ReducedSample warm;
      warm.xi = xi;
      warm.value = 0;  // any finite marker; only the section seeds the search
      Vec3 c = cross(xi, n0);
      warm.cross_section = {n0, c / norm2(c)};
      ReduceOptions aligned = opts;
      aligned.warm_start = &warm;
      ReducedSample s = reduce_density(density, xi, aligned);
      it = cache.emplace(key, s.cross_section).first;
    }
    sections.push_back(it->second);
  }
  return sections;
}

TailoredFrame::TailoredFrame(std::shared_ptr<const SmoothCurve> curve, MovingFrame frame,
                             std::vector<Mat3x2> sections, double delta, double eta)
    : curve_(std::move(curve)), frame_(std::move(frame)) {
  if (!(delta > 0) || !(eta > 0))
    throw std::invalid_argument("TailoredFrame: delta and eta must be positive");
  const auto& pieces = curve_->pieces();
  std::size_t n_affine = 0;
  for (const auto& p : pieces) n_affine += p.affine ? 1 : 0;
  if (sections.size() != n_affine)
    throw std::invalid_argument("TailoredFrame: one cross section per affine piece required");

  double max_ae1 = 0, min_cross = std::numeric_limits<double>::max();
  std::size_t a_idx = 0;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    const auto& p = pieces[i];
    if (!p.affine) {
      Zone z;
      z.kind = Zone::Kind::Arc;
      z.lo = p.t0;
      z.hi = p.t1;
      z.piece = i;
      zones_.push_back(z);
      continue;
    }
    const Mat3x2& A = sections[a_idx++];
    const Vec3 xi = p.slope;
    if (std::abs(det(with_first_column(xi, A)) - 1.0) > 1e-9)
      throw std::invalid_argument("TailoredFrame: section violates det(xi|A) = 1");
    Vec3 cxa = cross(xi, A.a1);
    double cn = norm(cxa);
    if (cn < 1e-12)
      throw std::runtime_error("TailoredFrame: xi x A e1 degenerate; no admissible blend");
    max_ae1 = std::max(max_ae1, norm(A.a1));
    min_cross = std::min(min_cross, cn);

    Vec3 n0 = frame_.piece_normal(i);
    double len = p.t1 - p.t0;
    double wl = i == 0 ? 0.0 : std::min(0.5 * delta, len / 8);
    double wr = i + 1 == pieces.size() ? 0.0 : std::min(0.5 * delta, len / 8);
    double inner_len = len - wl - wr;
    double wpsi = std::min(0.5 * eta, inner_len / 8);

    Vec3 d1 = A.a1 / norm(A.a1);
    double theta = std::atan2(norm(cross(n0, d1)), dot(n0, d1));
    if (theta > M_PI - 1e-6) {
      std::ostringstream msg;
      msg << "TailoredFrame: blend targets antipodal near x1 = " << p.t0;
      throw std::runtime_error(msg.str());
    }
    Vec3 bhat = cxa / (cn * cn);
    Vec3 corr = A.a2 - bhat;

    auto make_zone = [&](Zone::Kind kind, double lo, double hi) {
      Zone z;
      z.kind = kind;
      z.lo = lo;
      z.hi = hi;
      z.piece = i;
      z.xi = xi;
      z.section = A;
      z.n0 = n0;
      z.d0 = n0;
      z.d1 = d1;
      z.theta = theta;
      z.m1 = norm(A.a1);
      z.corr = corr;
      return z;
    };

    if (wl > 0) zones_.push_back(make_zone(Zone::Kind::CollarIn, p.t0, p.t0 + wl));
    Zone inner = make_zone(Zone::Kind::Inner, p.t0 + wl, p.t1 - wr);
    inner.psi_lo = wl > 0 ? wpsi : 0.0;
    inner.psi_hi = wr > 0 ? wpsi : 0.0;
    zones_.push_back(inner);
    if (wr > 0) zones_.push_back(make_zone(Zone::Kind::CollarOut, p.t1 - wr, p.t1));

    inner_.push_back(
        {inner.lo + inner.psi_lo, inner.hi - inner.psi_hi, xi, A});
  }

  ball_radius_ = 2 * std::max(1.0, max_ae1);
  cyl_radius_ = 0.5 * std::min(curve_->speed_min(), min_cross);

  // admissibility sweep: inside the ball, outside the cylinder, everywhere
  for (const Zone& z : zones_) {
    for (int k = 0; k <= 64; ++k) {
      double x1 = z.lo + (z.hi - z.lo) * k / 64.0;
      FrameJet j = eval(x1);
      if (norm(j.n) >= ball_radius_ + 1e-9 ||
          norm(cross(j.du, j.n)) <= cyl_radius_ * (1 - 1e-9)) {
        std::ostringstream msg;
        msg << "TailoredFrame: blend leaves the admissible region at x1 = " << x1;
        throw std::runtime_error(msg.str());
      }
    }
  }
}

const TailoredFrame::Zone& TailoredFrame::zone_at(double x1) const {
  auto it = std::upper_bound(zones_.begin(), zones_.end(), x1,
                             [](double v, const Zone& z) { return v < z.hi; });
  if (it == zones_.end()) --it;
  return *it;
}

void TailoredFrame::blend_jet(const Zone& z, double x1, Vec3& n, Vec3& dn,
                              Vec3& d2n) const {
  double w = z.hi - z.lo;
  double tau, dtau;
  if (z.kind == Zone::Kind::CollarIn) {
    tau = (x1 - z.lo) / w;
    dtau = 1 / w;
  } else {
    tau = (z.hi - x1) / w;
    dtau = -1 / w;
  }
  StepJet s = smoothstep_jet(tau);
  double sp = s.ds * dtau;
  double spp = s.d2s * dtau * dtau;

  double mu = 1 + s.s * (z.m1 - 1);
  double dmu_ds = z.m1 - 1;

  Vec3 dir, dir_s, dir_ss;
  if (z.theta < 1e-12) {
    dir = z.d0;
    dir_s = {};
    dir_ss = {};
  } else {
    double st = std::sin(z.theta);
    dir = (std::sin((1 - s.s) * z.theta) * z.d0 + std::sin(s.s * z.theta) * z.d1) / st;
    dir_s =
        (z.theta * (-std::cos((1 - s.s) * z.theta)) * z.d0 + z.theta * std::cos(s.s * z.theta) * z.d1) /
        st;
    dir_ss = -(z.theta * z.theta) * dir;
  }
  Vec3 n_s = dmu_ds * dir + mu * dir_s;
  Vec3 n_ss = 2 * dmu_ds * dir_s + mu * dir_ss;
  n = mu * dir;
  dn = n_s * sp;
  d2n = n_ss * (sp * sp) + n_s * spp;
}

FrameJet TailoredFrame::eval(double x1) const {
  const Zone& z = zone_at(x1);
  auto jet = curve_->jet3(x1);

  FrameJet out;
  out.u = jet[0];
  out.du = jet[1];
  out.d2u = jet[2];

  double psi = 0, dpsi = 0, d2psi = 0;
  switch (z.kind) {
    case Zone::Kind::Arc: {
      MovingFrame::Jet mj = frame_.eval(x1);
      out.n = mj.n;
      out.dn = mj.dn;
      out.d2n = mj.d2n;
      break;
    }
    case Zone::Kind::CollarIn:
    case Zone::Kind::CollarOut:
      blend_jet(z, x1, out.n, out.dn, out.d2n);
      break;
    case Zone::Kind::Inner: {
      out.n = z.section.a1;
      out.dn = {};
      out.d2n = {};
      if (z.psi_lo > 0 && x1 < z.lo + z.psi_lo) {
        StepJet s = smoothstep_jet((x1 - z.lo) / z.psi_lo);
        psi = s.s;
        dpsi = s.ds / z.psi_lo;
        d2psi = s.d2s / (z.psi_lo * z.psi_lo);
      } else if (z.psi_hi > 0 && x1 > z.hi - z.psi_hi) {
        StepJet s = smoothstep_jet((z.hi - x1) / z.psi_hi);
        psi = s.s;
        dpsi = -s.ds / z.psi_hi;
        d2psi = s.d2s / (z.psi_hi * z.psi_hi);
      } else {
        psi = 1;
      }
      break;
    }
  }

  // binormal: w / |w|^2 plus the cutoff correction toward A e2
  Vec3 w = cross(out.du, out.n);
  Vec3 dw = cross(jet[2], out.n) + cross(out.du, out.dn);
  Vec3 d2w = cross(jet[3], out.n) + 2.0 * cross(jet[2], out.dn) + cross(out.du, out.d2n);
  double rho = norm2(w);
  if (rho < 1e-24) throw std::runtime_error("TailoredFrame: degenerate |u' x n|");
  double drho = 2 * dot(w, dw);
  double d2rho = 2 * (norm2(dw) + dot(w, d2w));
  Vec3 b = w / rho;
  Vec3 db = dw / rho - w * (drho / (rho * rho));
  Vec3 d2b = d2w / rho - 2.0 * (drho / (rho * rho)) * dw - (d2rho / (rho * rho)) * w +
             (2 * drho * drho / (rho * rho * rho)) * w;

  out.b = b + psi * z.corr;
  out.db = db + dpsi * z.corr;
  out.d2b = d2b + d2psi * z.corr;
  return out;
}

std::vector<double> TailoredFrame::breakpoints() const {
  std::vector<double> b{zones_.front().lo};
  for (const Zone& z : zones_) {
    if (z.kind == Zone::Kind::Inner) {
      if (z.psi_lo > 0) b.push_back(z.lo + z.psi_lo);
      if (z.psi_hi > 0) b.push_back(z.hi - z.psi_hi);
    }
    b.push_back(z.hi);
  }
  return b;
}

TailoredFrame tailored_frame(std::shared_ptr<const SmoothCurve> curve,
                             const std::vector<Mat3x2>& sections, double delta,
                             double eta) {
  MovingFrame frame = normal_field(curve);
  return TailoredFrame(curve, std::move(frame), sections, delta, eta);
}

ManifoldPath::ManifoldPath(const Mat3& f0, const Mat3& f1, Manifold m)
    : manifold_(m), f0_(f0), f1_(f1) {
  const double member_tol = 1e-8;
  if (m == Manifold::SO3) {
    if (!is_rotation(f0, member_tol) || !is_rotation(f1, member_tol))
      throw std::invalid_argument("ManifoldPath: endpoints must lie in SO(3)");
    Vec3 w = so3_log(transpose(f0) * f1);
    legs_.push_back({f0, skew(w)});
    return;
  }
  if (!is_unimodular(f0, member_tol) || !is_unimodular(f1, member_tol))
    throw std::invalid_argument("ManifoldPath: endpoints must have unit determinant");
  Mat3 b = inverse(f0) * f1;
  if (auto lg = mat_log(b)) {
    Mat3 gen = *lg - Mat3::identity() * (trace(*lg) / 3.0);
    legs_.push_back({f0, gen});
    return;
  }
  // principal branch unavailable: route through an intermediate rotation
  const Vec3 axes[] = {e3, e1, e2};
  for (const Vec3& axis : axes) {
    Mat3 rmid = rotation_about(axis, M_PI / 2);
    Mat3 b2 = transpose(rmid) * b;
    if (auto lg2 = mat_log(b2)) {
      Mat3 gen2 = *lg2 - Mat3::identity() * (trace(*lg2) / 3.0);
      legs_.push_back({f0, skew(so3_log(rmid))});
      legs_.push_back({f0 * rmid, gen2});
      return;
    }
  }
  throw std::runtime_error("ManifoldPath: no principal logarithm after fallbacks");
}

Mat3 ManifoldPath::leg_eval(const Leg& leg, double s, int order, double ds,
                            double d2s) const {
  Mat3 p = leg.base * mat_exp(s * leg.gen);
  if (order == 0) return p;
  if (order == 1) return (p * leg.gen) * ds;
  return (p * leg.gen * leg.gen) * (ds * ds) + (p * leg.gen) * d2s;
}

Mat3 ManifoldPath::value(double t) const { return derivative(t, 0); }

Mat3 ManifoldPath::derivative(double t, int order) const {
  double tc = std::clamp(t, 0.0, 1.0);
  if (legs_.size() == 1) return leg_eval(legs_[0], tc, order, 1.0, 0.0);
  if (tc <= 0.5) {
    StepJet s = smoothstep_jet(2 * tc);
    return leg_eval(legs_[0], s.s, order, 2 * s.ds, 4 * s.d2s);
  }
  StepJet s = smoothstep_jet(2 * tc - 1);
  return leg_eval(legs_[1], s.s, order, 2 * s.ds, 4 * s.d2s);
}

ManifoldPath manifold_path(const Mat3& f0, const Mat3& f1, Manifold m) {
  return ManifoldPath(f0, f1, m);
}

}  // namespace stringlab
