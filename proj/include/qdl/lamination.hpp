#pragma once

#include "qdl/rat.hpp"

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qdl {

/// Raised when a constructed lamination fails one of the five defining
/// axioms; should be unreachable and indicates a hard failure.
struct AxiomViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Raised when no (angle, flavor) pair reproduces a target lamination tower.
struct NoMatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Reduces an exact angle to the fundamental domain [0, 1) of R/Z.
Rat angle_mod1(const Rat& t);

/// The unique period-q orbit of angle doubling with rotation number p/q,
/// sorted increasingly; found by brute force over denominator 2^q - 1.
std::vector<Rat> rotation_orbit(int p, int q);

/// The open characteristic arc ]theta0, theta1[: the shortest complementary
/// arc of the rotation orbit (hi may exceed 1 when the arc wraps through 0).
/// For q = 2 both arcs have length 1/3 and the one not containing 0 is
/// chosen; any other tie is an error.
std::pair<Rat, Rat> characteristic_interval(int p, int q);

/// Symbol word of t under doubling against the theta-partition into the
/// semicircles bounded by theta/2 and theta/2 + 1/2. eps = +1 closes the
/// intervals on the left endpoints, eps = -1 on the right ones.
std::vector<int> itinerary(const Rat& theta, int eps, const Rat& t, int depth);

enum class Flavor { Plus, Minus, Join };

/// The level-l restriction of a lamination: the partition of the support
/// m2^{-l}(A0) induced by itinerary equality.
struct LevelLamination {
  int p = 0, q = 0, level = 0;
  Rat theta;
  Flavor flavor = Flavor::Plus;
  std::vector<Rat> support;               // sorted angles in [0, 1)
  std::vector<std::vector<int>> classes;  // partition of support indices

  int index_of(const Rat& t) const;  // position in support, or -1
  int class_of_index(int i) const;
  int class_of(const Rat& t) const;  // class id, or -1 when not supported
  std::vector<Rat> class_angles(int c) const;
};

/// Partitions the level support by itinerary equality (join flavor merges
/// the two partitions transitively) and verifies the five axioms.
LevelLamination build_lamination(int p, int q, const Rat& theta, Flavor flavor,
                                 int level);

/// Empty when all five axioms hold on the restriction, otherwise a
/// description of the first failure.
std::string check_axioms(const LevelLamination& lam);

struct MatchResult {
  bool prefixed = false;     // matched through a two-to-one class
  Rat lo, hi;                // closure of the widest admissible arc
  std::vector<std::pair<Rat, Rat>> arcs;  // all admissible arcs (closures)
  std::vector<Rat> thetas;   // admissible angles (prefixed case)
  Flavor flavor = Flavor::Plus;
};

/// Recovers an angle interval and flavor reproducing the target tower of
/// restrictions (levels 0..L of one lamination).
MatchResult match_lamination(const std::vector<LevelLamination>& target);

/// One non-trivial class per line, angles as num/den, sorted.
std::string dump_lamination(const LevelLamination& lam);

}  // namespace qdl
