// Reference cuboids for the thin-body analysis: the rod axis [0, L] crossed
// with the closed square J x J, embedded in the larger J' x J' where the
// reparametrized third coordinate is allowed to range.

#pragma once

#include <stdexcept>
#include <vector>

#include "stringlab/geometry.hpp"

namespace stringlab {

struct BoxGrid {
  double length = 1.0;        // axis extent L
  double j_lo = -0.5, j_hi = 0.5;    // J
  double jp_lo = -1.0, jp_hi = 1.0;  // J', with closure(J) inside its interior
  int n1 = 129, n2 = 17, n3 = 33;    // node counts per axis on [0,L] x J x J

  BoxGrid() = default;
  BoxGrid(double L, int nn1, int nn2, int nn3) : length(L), n1(nn1), n2(nn2), n3(nn3) {
    validate();
  }

  void validate() const {
    if (!(length > 0)) throw std::invalid_argument("BoxGrid: L must be positive");
    if (!(j_lo < 0 && 0 < j_hi)) throw std::invalid_argument("BoxGrid: 0 must lie in J");
    if (!(jp_lo < j_lo && j_hi < jp_hi))
      throw std::invalid_argument("BoxGrid: closure of J must lie inside interior of J'");
    if (n1 < 2 || n2 < 2 || n3 < 2) throw std::invalid_argument("BoxGrid: need >= 2 nodes per axis");
  }

  double x1(int i) const { return length * i / (n1 - 1); }
  double x2(int i) const { return j_lo + (j_hi - j_lo) * i / (n2 - 1); }
  double x3(int i) const { return j_lo + (j_hi - j_lo) * i / (n3 - 1); }

  double h1() const { return length / (n1 - 1); }
  double h2() const { return (j_hi - j_lo) / (n2 - 1); }
  double h3() const { return (j_hi - j_lo) / (n3 - 1); }

  std::size_t nodes() const { return std::size_t(n1) * n2 * n3; }
  std::size_t index(int i1, int i2, int i3) const {
    return (std::size_t(i1) * n2 + i2) * n3 + i3;
  }

  bool contains(const Vec3& x) const {
    return x.x >= 0 && x.x <= length && x.y >= j_lo && x.y <= j_hi && x.z >= j_lo &&
           x.z <= j_hi;
  }
  // Membership in Q_L' = [0,L] x J' x J'.
  bool contains_prime(const Vec3& x, double slack = 1e-12) const {
    return x.x >= -slack && x.x <= length + slack && x.y >= jp_lo - slack &&
           x.y <= jp_hi + slack && x.z >= jp_lo - slack && x.z <= jp_hi + slack;
  }
};

}  // namespace stringlab
