#pragma once

#include "qdl/berkovich.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qdl {

/// Raised when a semi-decidable search hits its configured bound without
/// reaching a certificate either way.
struct SearchBoundExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class CaseKind { Simple, AttractingShift, IndifferentOrbit, OneRepelling, TwoRepelling };
std::string case_name(CaseKind k);

enum class FixedKind { Attracting, Indifferent, Repelling };

/// One row of the rigid fixed-point table. Multiple fixed points carry
/// multiplier 1 (indifferent); superattracting points have multiplier 0.
struct FixedPointEntry {
  PointL point;
  int multiplicity;
  PuiseuxSeries multiplier;
  FixedKind kind;
};

/// The three fixed points of a quadratic map on P^1, with multiplicity.
/// Kind by the valuation of the multiplier: positive attracting, zero
/// indifferent, negative repelling. At least one is non-repelling.
std::vector<FixedPointEntry> fixed_points_with_multipliers(const RatMapL& phi);

struct Transition {
  std::string from, to;
  friend bool operator==(const Transition& a, const Transition& b) {
    return a.from == b.from && a.to == b.to;
  }
};

/// Finite-type model attached to a report: the full 2-shift for case 1
/// (q = 0 sentinel) or the Sigma_q subshift for case 2.
struct ShiftModel {
  int q = 0;
  std::vector<std::string> symbols;
  std::vector<Transition> transitions;
  std::string factor_map;
};

/// Sigma_q on symbols X_0..X_{q-1}, Y_0..Y_{q-1} with the four transition
/// families X_j -> X_{j+1}, X_{q-1} -> Y_j, Y_j -> X_j, Y_0 -> Y_j, plus the
/// factor map onto the full {X, Y}-shift (q-to-1 exactly over the backward
/// orbit of X^inf).
ShiftModel subshift_sigma_q(int q);
ShiftModel full_two_shift();

/// Fixed Rivera-domain data: for q = 1 the Julia point itself with its fixed
/// Fatou ball directions; for q >= 2 the starlike domain with center theta0
/// and boundary orbit starting at the point whose ball carries the critical
/// points.
struct RiveraData {
  TypeIIPoint theta0;
  std::vector<TypeIIPoint> orbit;
  int q = 1;
  std::vector<TypeIIPoint> skeleton;   // boundary orbit vertices of the domain
  std::vector<Direction> ball_domains; // fixed Fatou ball directions (q = 1)
};

enum class RiveraOutcome { Found, SimpleCase, AttractingCase, NotFound };

struct RiveraResult {
  RiveraOutcome outcome = RiveraOutcome::NotFound;
  RiveraData data;          // Found
  TypeIIPoint simple_point; // SimpleCase: fixed point of local degree 2
  PointL attractor;         // AttractingCase
};

RiveraResult find_fixed_rivera_domain(const RatMapL& phi, int depth_bound = 32);

enum class JuliaOutcome { Julia, Fatou, Undecided };

struct JuliaResult {
  JuliaOutcome outcome = JuliaOutcome::Undecided;
  bool exact = false;
};

/// Decides Julia membership of an indifferent periodic type-II point by the
/// bad-direction criterion: Julia iff the local degree of the return map is
/// two or some bad direction has an infinite forward orbit under the tangent
/// return map. Exact backend decisions are exact; float decisions carry
/// exact = false and may be Undecided at the horizon.
JuliaResult julia_membership_indifferent(const RatMapL& phi, const TypeIIPoint& x, int period,
                                         int horizon = 64);

/// Case-1 witness: a ball D whose preimage splits into two disjoint balls
/// D0, D1 inside D, each mapping onto D bijectively.
struct BallCertificate {
  TypeIIPoint D, D0, D1;
  bool verified = false;
};

struct ClassificationReport {
  CaseKind kind = CaseKind::Simple;
  std::vector<FixedPointEntry> fixed_points;

  TypeIIPoint simple_point; // Simple
  PointL attractor;         // AttractingShift
  BallCertificate shift_certificate;

  RiveraData rivera; // IndifferentOrbit / OneRepelling / TwoRepelling
  CRatMap tangent_orbit; // tangent return map of phi^q at orbit.front()

  std::vector<TypeIIPoint> orbit2; // TwoRepelling: the second orbit O'
  int qprime = 0;
  CRatMap tangent_orbit2;

  ShiftModel model;           // case 1: 2-shift; case 2: Sigma_q
  bool renewal_shift = false; // case 2: J on the rigid line is a renewal shift

  int depth_bound = 32;
  int horizon = 64;
  bool exact = true;
  std::string notes;
};

ClassificationReport classify(const RatMapL& phi, int depth_bound = 32, int horizon = 64);

/// Description of a fixed Rivera domain for the residue check: either a ball
/// direction at a fixed point or the starlike domain of a RiveraData.
struct RiveraDomainDesc {
  bool starlike = false;
  Direction ball;  // !starlike
  RiveraData data; // starlike
};

struct ResidueCheck {
  int fixed_count = 0; // N: rigid fixed points inside U, with multiplicity
  std::vector<std::pair<TypeIIPoint, int>> boundary_eta; // fixed boundary points, eta
  bool ok = false;
};

/// Checks N = 2 + sum over fixed boundary points of (eta - 2), where eta is
/// the multiplicity of the U-direction as a fixed point of the tangent map.
ResidueCheck verify_residue_formula(const RatMapL& phi, const RiveraDomainDesc& U);

/// Multiplicity of p as a fixed point of the rational map T (root order of
/// T(z) - z, with the point at infinity carrying the complementary count).
int fixed_slot_multiplicity(const CRatMap& T, const CPoint& p);

/// Affine-conjugate a quadratic rational map with a fixed critical point to
/// the normal form z^2 + c; empty when no critical point is fixed.
std::optional<Scalar> quadratic_polynomial_normal_form(const CRatMap& T);

/// Piece-boundary track of a critical point: boundaries[l] is the boundary
/// of the level-l dynamical piece containing the point (outermost crossing
/// toward theta0). Stops early when the orbit leaves the level sets.
struct CriticalTrack {
  bool escaped = false; // left L_l before the level budget
  int escape_level = -1;
  std::vector<TypeIIPoint> boundaries;
};

CriticalTrack track_critical_piece(const RatMapL& phi, const RiveraData& rd, const PointL& crit,
                                   int levels);

}  // namespace qdl
