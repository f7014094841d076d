#pragma once

#include "qdl/cpoly.hpp"
#include "qdl/poly.hpp"

#include <vector>

namespace qdl {

/// Lower convex hull of {(i, ord a_i)}; a segment of slope -s and length k
/// announces exactly k roots (with multiplicity) of ord s.
struct NewtonPolygon {
  struct Segment {
    Rat slope;   // hull slope; root ord = -slope
    int length;  // horizontal extent = number of roots
  };
  std::vector<Segment> segments;
  int zero_root_multiplicity = 0;  // leading coefficients with ord = +inf
};

NewtonPolygon newton_polygon(const PolyL& p);

struct RootL {
  PuiseuxSeries value;
  int multiplicity;
};

/// Newton-Puiseux roots of p over L, certified by the substitution residual:
/// ord(p(r)) >= target_prec + ord(leading coefficient) for every root.
/// Sum of multiplicities equals deg p.
std::vector<RootL> roots(const PolyL& p, const Rat& target_prec);

/// Polynomial gcd over L (Euclid with zero tests modulo precision), monic.
PolyL gcdL(PolyL a, PolyL b);

/// Euclidean division over L.
std::pair<PolyL, PolyL> divmodL(const PolyL& a, const PolyL& b);

}  // namespace qdl
