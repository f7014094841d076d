#pragma once

#include "qdl/cpoly.hpp"
#include "qdl/poly.hpp"

#include <string>
#include <utility>
#include <vector>

namespace qdl {

/// A type-II point of the Berkovich projective line over L: the boundary of
/// the closed ball B(center, e^{-alpha}). Every type-II point has a unique
/// such representation with a finite center (the Gauss point of the 1/z chart
/// is x_{0,0} too), so no infinity-chart flag is needed.
/// Canonical form drops all center terms with exponent >= alpha; equality is
/// then alpha = alpha' and ord(c - c') >= alpha.
struct TypeIIPoint {
  PuiseuxSeries center;
  Rat alpha;

  static TypeIIPoint make(PuiseuxSeries c, Rat a) {
    TypeIIPoint x;
    x.center = c.drop_from(a);
    x.alpha = std::move(a);
    return x;
  }
  static TypeIIPoint gauss() { return make(PuiseuxSeries::zero(), Rat(0)); }

  friend bool operator==(const TypeIIPoint& a, const TypeIIPoint& b) {
    if (a.alpha != b.alpha) return false;
    return (a.center - b.center).drop_from(a.alpha).is_zero();
  }
  friend bool operator!=(const TypeIIPoint& a, const TypeIIPoint& b) { return !(a == b); }

  std::string str() const { return "x_{" + center.str() + ", " + alpha.str() + "}"; }
};

/// Join exponent of two balls: min(a1, a2, ord(c1 - c2)).
Rat join_exponent(const TypeIIPoint& x, const TypeIIPoint& y);

/// The wedge of the two balls (the smallest ball containing both).
TypeIIPoint join(const TypeIIPoint& x, const TypeIIPoint& y);

/// Whether the ball of `outer` contains the ball of `inner` (not strict).
bool contains(const TypeIIPoint& outer, const TypeIIPoint& inner);

/// Path distance in the hyperbolic space, in units where |tau| = e^{-1}.
Rat hyperbolic_distance(const TypeIIPoint& x, const TypeIIPoint& y);

/// A direction at a type-II point, identified with P^1 over the residue
/// field: the residue class of (z - c) / tau^alpha, or infinity for the
/// direction of everything outside the closed ball.
struct Slot {
  bool inf = false;
  Scalar v;

  static Slot infinity() {
    Slot s;
    s.inf = true;
    return s;
  }
  static Slot finite(Scalar x) {
    Slot s;
    s.v = std::move(x);
    return s;
  }
  static Slot of_cpoint(const CPoint& p) { return p.inf ? infinity() : finite(p.v); }
  CPoint to_cpoint() const { return inf ? CPoint::infinity() : CPoint::finite(v); }

  friend bool operator==(const Slot& a, const Slot& b) {
    if (a.inf || b.inf) return a.inf && b.inf;
    return a.v == b.v;
  }
  friend bool operator!=(const Slot& a, const Slot& b) { return !(a == b); }
  std::string str() const { return inf ? "inf" : v.str(); }
};

struct Direction {
  TypeIIPoint at;
  Slot slot;
};

/// Slot at x of a rigid point p (p distinct from the ball boundary sphere).
Slot slot_of(const TypeIIPoint& x, const PointL& p);

/// Slot at x of another type-II point y != x.
Slot slot_of_point(const TypeIIPoint& x, const TypeIIPoint& y);

/// Image point, tangent map, and local degree of a rational map at a type-II
/// point, computed together by the recentering loop.
struct MapAtPoint {
  TypeIIPoint image;
  CRatMap tangent;
  int degree;
};

MapAtPoint map_point_full(const RatMapL& phi, const TypeIIPoint& x);

TypeIIPoint map_point(const RatMapL& phi, const TypeIIPoint& x);
CRatMap tangent_map(const RatMapL& phi, const TypeIIPoint& x);
int local_degree(const RatMapL& phi, const TypeIIPoint& x);

/// Critical points of a degree-2 rational map, with multiplicity (each point
/// listed once; total multiplicity 2).
std::vector<std::pair<PointL, int>> critical_points(const RatMapL& phi);

/// Result of the good/bad analysis of a direction. Good directions carry the
/// image slot at phi(x), the degree k of the tangent map there, and surplus
/// 0; the unique bad direction of a quadratic map at a degree-1 point has
/// surplus 1.
struct DirectionClass {
  bool bad;
  Slot image;
  int degree;
  int surplus;
};

DirectionClass classify_direction(const RatMapL& phi, const TypeIIPoint& x, const Slot& s);

/// All preimages of a type-II point, with multiplicity = local degree;
/// multiplicities sum to 2.
std::vector<std::pair<TypeIIPoint, int>> preimages(const RatMapL& phi, const TypeIIPoint& x);

/// Solutions beta of min_i(ord A_i + i beta) - min_j(ord B_j + j beta) =
/// cst + slope * beta, the piecewise-linear valuation equation of the ray
/// {x_{c, beta}} for the recentered pair (A, B). Sorted, deduplicated.
std::vector<Rat> ray_solutions(const PolyL& A, const PolyL& B, const Rat& slope, const Rat& cst);

/// Type-II fixed points of phi of the form x_{c, beta} on the ray above the
/// rigid point c (candidates from the valuation equation, verified exactly).
std::vector<TypeIIPoint> fixed_points_on_ray(const RatMapL& phi, const PuiseuxSeries& c);

}  // namespace qdl
