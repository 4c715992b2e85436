#include "stringlab/curve.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "stringlab/density.hpp"

namespace stringlab {

namespace {

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  static std::vector<std::vector<double>> table = {{1}};
  while (int(table.size()) <= n) {
    int r = int(table.size());
    std::vector<double> row(r + 1, 1.0);
    for (int i = 1; i < r; ++i) row[i] = table[r - 1][i - 1] + table[r - 1][i];
    table.push_back(std::move(row));
  }
  return table[n][k];
}

double bernstein_value(int q, int p, double t) {
  if (q < 0 || q > p) return 0;
  return binomial(p, q) * std::pow(1 - t, p - q) * std::pow(t, q);
}

}  // namespace

double bernstein(int q, int p, double t, int order) {
  if (p < 0) throw std::invalid_argument("bernstein: p must be nonnegative");
  if (order < 0 || order > p) throw std::invalid_argument("bernstein: order must lie in [0, p]");
  if (order == 0) return bernstein_value(q, p, t);
  if (order == 1) return p * (bernstein_value(q - 1, p - 1, t) - bernstein_value(q, p - 1, t));
  // d^j b_{q,p} = p!/(p-j)! sum_m (-1)^{m+j} C(j,m) b_{q-m,p-j}
  double fac = 1;
  for (int i = 0; i < order; ++i) fac *= p - i;
  double sum = 0;
  int m_lo = std::max(0, q - p + order), m_hi = std::min(order, q);
  for (int m = m_lo; m <= m_hi; ++m) {
    double sgn = ((m + order) % 2 == 0) ? 1.0 : -1.0;
    sum += sgn * binomial(order, m) * bernstein_value(q - m, p - order, t);
  }
  return fac * sum;
}

PiecewiseAffineCurve::PiecewiseAffineCurve(std::vector<double> ts, std::vector<Vec3> us)
    : t(std::move(ts)), u(std::move(us)) {
  validate();
}

PiecewiseAffineCurve PiecewiseAffineCurve::from_slopes(const std::vector<Vec3>& slopes,
                                                       const std::vector<double>& lengths,
                                                       const Vec3& origin) {
  if (slopes.size() != lengths.size() || slopes.empty())
    throw std::invalid_argument("from_slopes: need matching nonempty slope/length lists");
  std::vector<double> ts{0.0};
  std::vector<Vec3> us{origin};
  for (std::size_t i = 0; i < slopes.size(); ++i) {
    ts.push_back(ts.back() + lengths[i]);
    us.push_back(us.back() + lengths[i] * slopes[i]);
  }
  return PiecewiseAffineCurve(std::move(ts), std::move(us));
}

void PiecewiseAffineCurve::validate() const {
  if (t.size() < 2 || t.size() != u.size())
    throw std::invalid_argument("PiecewiseAffineCurve: need >= 2 consistent breakpoints");
  if (t.front() != 0) throw std::invalid_argument("PiecewiseAffineCurve: must start at 0");
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    if (!(t[i] < t[i + 1]))
      throw std::invalid_argument("PiecewiseAffineCurve: breakpoints must strictly increase");
    if (norm(slope(i)) < 1e-14)
      throw std::invalid_argument("PiecewiseAffineCurve: zero slope segment");
  }
  for (const Vec3& v : u)
    if (!finite(v)) throw std::invalid_argument("PiecewiseAffineCurve: non-finite value");
}

double PiecewiseAffineCurve::min_segment_length() const {
  double m = t.back();
  for (std::size_t i = 0; i + 1 < t.size(); ++i) m = std::min(m, t[i + 1] - t[i]);
  return m;
}

Vec3 PiecewiseAffineCurve::value(double s) const {
  if (s <= t.front()) return u.front() + (s - t.front()) * slope(0);
  if (s >= t.back()) return u.back() + (s - t.back()) * slope(segments() - 1);
  auto it = std::upper_bound(t.begin(), t.end(), s);
  std::size_t n = std::size_t(it - t.begin()) - 1;
  return u[n] + (s - t[n]) * slope(n);
}

SampledCurve PiecewiseAffineCurve::sample(int n) const {
  if (n < 2) throw std::invalid_argument("sample: need >= 2 nodes");
  SampledCurve s;
  s.t.resize(n);
  s.u.resize(n);
  s.du.resize(n);
  for (int i = 0; i < n; ++i) {
    double ti = length() * i / (n - 1);
    s.t[i] = ti;
    s.u[i] = value(ti);
    // derivative from the segment containing ti (right-continuous)
    std::size_t seg = 0;
    while (seg + 1 < segments() && t[seg + 1] <= ti) ++seg;
    s.du[i] = slope(seg);
  }
  return s;
}

bool anti_parallel(const Vec3& a, const Vec3& b, double tol) {
  double na = norm(a), nb = norm(b);
  if (na == 0 || nb == 0) return false;
  return dot(a, b) < 0 && norm(cross(a, b)) <= tol * na * nb;
}

PiecewiseAffineCurve insert_loops(const PiecewiseAffineCurve& curve, double delta) {
  if (!(delta > 0)) throw std::invalid_argument("insert_loops: delta must be positive");
  const std::size_t nseg = curve.segments();

  struct Loop {
    std::size_t n;  // breakpoint index
    double sigma;
    Vec3 perp;
  };
  std::vector<Loop> loops;
  for (std::size_t n = 1; n < nseg; ++n) {
    Vec3 xi_prev = curve.slope(n - 1), xi_next = curve.slope(n);
    if (!anti_parallel(xi_prev, xi_next)) continue;
    double nu = norm(xi_next) / norm(xi_prev);
    double sigma = std::abs(nu - 1.0) > 1e-12 ? 1.0 : 0.5;
    Vec3 perp = orthogonal_unit(xi_prev) * norm(xi_prev);
    loops.push_back({n, sigma, perp});
  }
  if (loops.empty()) return curve;

  // feasibility: each detour window must sit strictly inside the adjacent
  // segments and clear of the neighboring detours
  for (std::size_t i = 0; i < loops.size(); ++i) {
    const Loop& lp = loops[i];
    double left_limit = curve.t[lp.n - 1];
    double right_limit = curve.t[lp.n + 1];
    if (i > 0 && loops[i - 1].n == lp.n - 1)
      left_limit = curve.t[lp.n - 1] + delta * loops[i - 1].sigma;
    if (i + 1 < loops.size() && loops[i + 1].n == lp.n + 1)
      right_limit = curve.t[lp.n + 1] - delta;
    if (!(curve.t[lp.n] - delta > left_limit && curve.t[lp.n] + delta * lp.sigma < right_limit))
      throw std::invalid_argument("insert_loops: delta too large for the segment layout");
  }

  std::vector<double> ts;
  std::vector<Vec3> us;
  std::size_t next_loop = 0;
  for (std::size_t n = 0; n < curve.t.size(); ++n) {
    if (next_loop < loops.size() && loops[next_loop].n == n) {
      const Loop& lp = loops[next_loop++];
      double tc = curve.t[n];
      ts.push_back(tc - delta);
      us.push_back(curve.value(tc - delta));
      ts.push_back(tc);
      us.push_back(curve.u[n] + delta * lp.perp);
      ts.push_back(tc + delta * lp.sigma);
      us.push_back(curve.value(tc + delta * lp.sigma));
    } else {
      ts.push_back(curve.t[n]);
      us.push_back(curve.u[n]);
    }
  }
  PiecewiseAffineCurve out(std::move(ts), std::move(us));
  for (std::size_t n = 1; n < out.segments(); ++n)
    if (anti_parallel(out.slope(n - 1), out.slope(n)))
      throw std::logic_error("insert_loops: reversal survived the loop construction");
  return out;
}

SmoothCurve::SmoothCurve(std::vector<Piece> pieces, int k) : pieces_(std::move(pieces)), k_(k) {
  if (pieces_.empty()) throw std::invalid_argument("SmoothCurve: no pieces");
  c_min_ = std::numeric_limits<double>::max();
  c_max_ = 0;
  auto segment_dist_to_origin = [](const Vec3& a, const Vec3& b) {
    Vec3 d = b - a;
    double len2 = norm2(d);
    if (len2 == 0) return norm(a);
    double s = std::clamp(-dot(a, d) / len2, 0.0, 1.0);
    return norm(a + s * d);
  };
  for (const Piece& p : pieces_) {
    if (p.affine) {
      c_min_ = std::min(c_min_, norm(p.slope));
      c_max_ = std::max(c_max_, norm(p.slope));
    } else {
      // u' stays in the hull of the two adjacent slopes
      int kk = (int(p.control.size()) - 1) / 2;
      Vec3 xi1 = double(kk) / p.eta * (p.control[1] - p.control[0]);
      Vec3 xi2 = double(kk) / p.eta * (p.control[2 * kk] - p.control[2 * kk - 1]);
      c_min_ = std::min(c_min_, segment_dist_to_origin(xi1, xi2));
      c_max_ = std::max(c_max_, std::max(norm(xi1), norm(xi2)));
    }
  }
}

const SmoothCurve::Piece& SmoothCurve::piece_at(double t) const {
  return pieces_[piece_index(t)];
}

std::size_t SmoothCurve::piece_index(double t) const {
  auto it = std::upper_bound(pieces_.begin(), pieces_.end(), t,
                             [](double v, const Piece& p) { return v < p.t1; });
  if (it == pieces_.end()) --it;
  return std::size_t(it - pieces_.begin());
}

std::array<Vec3, 4> SmoothCurve::jet3(double t) const {
  const Piece& p = piece_at(t);
  std::array<Vec3, 4> jet{};
  if (p.affine) {
    jet[0] = p.base + (t - p.t0) * p.slope;
    jet[1] = p.slope;
    return jet;
  }
  int degree = int(p.control.size()) - 1;
  double s = (t - p.t0) / (2 * p.eta);
  for (int order = 0; order <= 3; ++order) {
    if (order > degree) break;
    double scale = std::pow(1.0 / (2 * p.eta), order);
    Vec3 acc{};
    for (int m = 0; m <= degree; ++m) acc += bernstein(m, degree, s, order) * p.control[m];
    jet[order] = scale * acc;
  }
  return jet;
}

Vec3 SmoothCurve::derivative(double t, int order) const {
  const Piece& p = piece_at(t);
  if (p.affine) {
    if (order == 0) return p.base + (t - p.t0) * p.slope;
    if (order == 1) return p.slope;
    return {};
  }
  int degree = int(p.control.size()) - 1;
  if (order > degree) return {};
  double s = (t - p.t0) / (2 * p.eta);
  double scale = std::pow(1.0 / (2 * p.eta), order);
  Vec3 acc{};
  for (int m = 0; m <= degree; ++m)
    acc += bernstein(m, degree, s, order) * p.control[m];
  return scale * acc;
}

std::vector<double> SmoothCurve::breakpoints() const {
  std::vector<double> b;
  b.push_back(pieces_.front().t0);
  for (const Piece& p : pieces_) b.push_back(p.t1);
  return b;
}

SampledCurve SmoothCurve::sample(int n) const {
  if (n < 2) throw std::invalid_argument("sample: need >= 2 nodes");
  SampledCurve s;
  s.t.resize(n);
  s.u.resize(n);
  s.du.resize(n);
  double L = length();
  for (int i = 0; i < n; ++i) {
    double ti = L * i / (n - 1);
    s.t[i] = ti;
    s.u[i] = value(ti);
    s.du[i] = derivative(ti, 1);
  }
  return s;
}

SmoothCurve mollify(const PiecewiseAffineCurve& curve, int k, double eta) {
  if (k < 1) throw std::invalid_argument("mollify: k must be >= 1");
  if (!(eta > 0) || !(eta < 0.5 * curve.min_segment_length()))
    throw std::invalid_argument("mollify: eta must be below half the minimal segment length");
  for (std::size_t n = 1; n < curve.segments(); ++n)
    if (anti_parallel(curve.slope(n - 1), curve.slope(n)))
      throw std::invalid_argument("mollify: anti-parallel adjacent slopes; insert loops first");

  std::vector<SmoothCurve::Piece> pieces;
  double cursor = 0;
  for (std::size_t n = 1; n < curve.t.size() - 1; ++n) {
    double tc = curve.t[n];
    if (norm(curve.slope(n - 1) - curve.slope(n)) < 1e-14) continue;  // no corner
    SmoothCurve::Piece aff;
    aff.t0 = cursor;
    aff.t1 = tc - eta;
    aff.affine = true;
    aff.base = curve.value(cursor);
    aff.slope = curve.slope(n - 1);
    if (aff.t1 > aff.t0) pieces.push_back(aff);

    SmoothCurve::Piece arc;
    arc.t0 = tc - eta;
    arc.t1 = tc + eta;
    arc.affine = false;
    arc.eta = eta;
    arc.control.resize(2 * k + 1);
    for (int m = 0; m <= 2 * k; ++m)
      arc.control[m] = curve.value(tc - (k - m) * eta / k);
    pieces.push_back(arc);
    cursor = tc + eta;
  }
  SmoothCurve::Piece tail;
  tail.t0 = cursor;
  tail.t1 = curve.length();
  tail.affine = true;
  tail.base = curve.value(cursor);
  tail.slope = curve.slope(curve.segments() - 1);
  pieces.push_back(tail);
  return SmoothCurve(std::move(pieces), k);
}

SmoothCurve as_smooth(const PiecewiseAffineCurve& curve) {
  std::vector<SmoothCurve::Piece> pieces;
  for (std::size_t n = 0; n < curve.segments(); ++n) {
    SmoothCurve::Piece p;
    p.t0 = curve.t[n];
    p.t1 = curve.t[n + 1];
    p.affine = true;
    p.base = curve.u[n];
    p.slope = curve.slope(n);
    pieces.push_back(p);
  }
  return SmoothCurve(std::move(pieces), 0);
}

LaminateCurve laminate_relax(const PiecewiseAffineCurve& curve, const RadialEnvelope& env,
                             int j) {
  if (j < 1) throw std::invalid_argument("laminate_relax: j must be >= 1");
  const double lmin = curve.min_segment_length();

  std::vector<double> ts{0.0};
  std::vector<Vec3> us{curve.u.front()};
  std::vector<LaminateCell> cells;

  for (std::size_t n = 0; n < curve.segments(); ++n) {
    Vec3 xi = curve.slope(n);
    double s = norm(xi);
    double f = env.profile_at(s);
    double fc = env.envelope_at(s);
    double seg_len = curve.t[n + 1] - curve.t[n];
    if (fc >= f - 1e-9) {
      ts.push_back(curve.t[n + 1]);
      us.push_back(curve.u[n + 1]);
      continue;
    }
    ContactSegment seg = env.contact_containing(s);
    Vec3 dir = xi / s;
    Vec3 xi_a = seg.r1 * dir;
    Vec3 xi_b = seg.r2 * dir;
    double lambda = (seg.r2 - s) / (seg.r2 - seg.r1);
    int teeth = std::max<long>(
        {j, long(std::ceil(j * seg_len / lmin)),
         long(std::ceil(j * lambda * (1 - lambda) * norm(xi_a - xi_b)))});
    double period = seg_len / teeth;
    Vec3 base = curve.u[n];
    double t0 = curve.t[n];
    for (int tooth = 0; tooth < teeth; ++tooth) {
      double start = t0 + tooth * period;
      ts.push_back(start + lambda * period);
      us.push_back(base + (tooth * period) * xi + (lambda * period) * xi_a);
      double end = tooth + 1 == teeth ? curve.t[n + 1] : start + period;
      ts.push_back(end);
      us.push_back(tooth + 1 == teeth ? curve.u[n + 1] : base + ((tooth + 1) * period) * xi);
    }
    cells.push_back({n, xi, xi_a, xi_b, lambda, period});
  }
  return {PiecewiseAffineCurve(std::move(ts), std::move(us)), std::move(cells)};
}

std::tuple<Vec3, Vec3, double> caratheodory_split(const Vec3& xi, double rstar) {
  if (!(rstar > 0)) throw std::invalid_argument("caratheodory_split: rstar must be positive");
  double s = norm(xi);
  if (s > rstar * (1 + 1e-12))
    throw std::domain_error("caratheodory_split: |xi| exceeds the zero-level radius");
  double w2 = std::max(rstar * rstar - s * s, 0.0);
  if (w2 == 0) return {xi, xi, 0.5};
  Vec3 perp = s < 1e-14 ? e1 : orthogonal_unit(xi);
  Vec3 shift = std::sqrt(w2) * perp;
  return {xi + shift, xi - shift, 0.5};
}

PiecewiseAffineCurve zero_set_refine(const PiecewiseAffineCurve& curve, double rstar,
                                     int j) {
  const double lmin = curve.min_segment_length();
  std::vector<double> ts{0.0};
  std::vector<Vec3> us{curve.u.front()};
  for (std::size_t n = 0; n < curve.segments(); ++n) {
    Vec3 xi = curve.slope(n);
    double seg_len = curve.t[n + 1] - curve.t[n];
    if (norm(xi) >= rstar * (1 - 1e-9)) {
      ts.push_back(curve.t[n + 1]);
      us.push_back(curve.u[n + 1]);
      continue;
    }
    auto [xi_a, xi_b, lambda] = caratheodory_split(xi, rstar);
    int teeth = std::max<long>(j, long(std::ceil(j * seg_len / lmin)));
    double period = seg_len / teeth;
    Vec3 base = curve.u[n];
    double t0 = curve.t[n];
    for (int tooth = 0; tooth < teeth; ++tooth) {
      double start = t0 + tooth * period;
      ts.push_back(start + lambda * period);
      us.push_back(base + (tooth * period) * xi + (lambda * period) * xi_a);
      double end = tooth + 1 == teeth ? curve.t[n + 1] : start + period;
      ts.push_back(end);
      us.push_back(tooth + 1 == teeth ? curve.u[n + 1] : base + ((tooth + 1) * period) * xi);
    }
  }
  return PiecewiseAffineCurve(std::move(ts), std::move(us));
}

}  // namespace stringlab
