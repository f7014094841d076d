#pragma once

#include "qdl/classifier.hpp"

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qdl {

/// Raised when a requested grid entry needs an orbit point that has left the
/// level sets within the configured budget.
struct DepthExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A dynamical piece, stored combinatorially: its single boundary point plus
/// the finite set of directions at the boundary that the piece does NOT
/// contain (the direction of the fixed Rivera domain is always among them).
/// A point z lies in the piece iff z is the boundary or the direction of z at
/// the boundary is not excluded.
struct Piece {
  Rat level;              // in N0/2
  TypeIIPoint boundary;
  std::vector<Slot> excluded;
  int id = -1;
  int image = -1;         // the piece this one is a preimage component of
  int parent = -1;        // containing piece one full level up
  int parent_half = -1;   // containing piece one half level up
  int degree = 1;         // local degree of phi at the boundary
  bool closed_ball = true;
};

/// The piece forest of a map with a repelling orbit in H: the level-0 balls
/// B_0..B_{q-1}, the half-level seed B_{1/2} in the special direction D_0,
/// and preimage components expanded on demand.
class PieceForest {
public:
  RatMapL phi;
  RiveraData rd;
  std::vector<Slot> u;        // direction of U_0 at each orbit point
  Slot dir0;                  // the direction D_0 at xi_0
  TypeIIPoint theta_half;     // preimage of theta_0 inside D_0
  PointL omega;               // active critical point
  PointL omega_prime;         // the other critical point
  std::vector<Piece> pieces;
  std::vector<int> level0, level_half;

  /// Preimage components of a piece (one level deeper); expands lazily.
  const std::vector<int>& children(int id);

  /// Piece containing the point at the given level, or empty if the point is
  /// not a level-`level` point. Level in N0/2.
  std::optional<int> piece_of(const PointL& z, const Rat& level);
  std::optional<int> piece_of(const TypeIIPoint& x, const Rat& level);

  bool member(int id, const PointL& z) const;
  bool member(int id, const TypeIIPoint& x) const;

  /// Piece of the active critical point at the given level (cached).
  int omega_piece(const Rat& level);

  /// Ids of all materialized pieces at a level (complete after build_pieces
  /// up to its max_level).
  std::vector<int> level_ids(const Rat& level) const;

private:
  friend PieceForest build_pieces(const RatMapL&, const ClassificationReport&, const Rat&);
  friend class GridBuilder;

  std::vector<char> expanded_;
  std::vector<std::vector<int>> kids_;
  std::vector<std::pair<PointL, int>> crits_;
  // piece cache along the active critical orbit, keyed by (n, 2*level)
  std::map<std::pair<int, long long>, std::optional<int>> omega_cache_;
  std::vector<PointL> omega_orbit_;

  std::optional<int> orbit_piece(int n, long long m2);
  const PointL& omega_at(int n);
  int add_piece(Piece p);
};

/// Builds the level-0 and half-level seeds from the classification data
/// (case 3 or 4) and eagerly expands all pieces of level <= max_level.
PieceForest build_pieces(const RatMapL& phi, const ClassificationReport& report,
                         const Rat& max_level);

/// The active critical point: the one not trapped in a wandering Fatou ball
/// attached to the boundary of B_0; ties broken by smaller valuation of the
/// center.
PointL active_critical_point(const RatMapL& phi, const ClassificationReport& report,
                             int horizon = 64);

struct MarkedGrid {
  int columns = 0;                        // entries for n = 0..columns
  Rat depth;                              // depths m = 0, 1/2, ..., depth
  std::vector<std::vector<int>> entries;  // entries[n][2m] in {1, 2}

  enum class Flag { None, Periodic, Preperiodic, Recurrent };
  Flag flag = Flag::None;
  int period = 0;
  int preperiod = 0;

  bool marked(int n, int m2) const {
    return n >= 0 && n < static_cast<int>(entries.size()) && m2 >= 0 &&
           m2 < static_cast<int>(entries[n].size()) && entries[n][m2] == 2;
  }
  /// Twice the depth of column n (largest marked 2m), or -1 with no mark.
  int column_depth2(int n) const;
};

/// Exact hyperbolic distances dist(boundary P_{m-1/2}(zeta_n), boundary
/// P_m(zeta_n)), keyed by (n, 2m); absent entries mean equal boundaries.
struct DistanceTable {
  std::map<std::pair<int, int>, Rat> entries;
  Rat at(int n, int m2) const;
};

MarkedGrid marked_grid(PieceForest& f, const PointL& zeta, int columns, const Rat& depth);
MarkedGrid marked_grid(PieceForest& f, const TypeIIPoint& zeta, int columns, const Rat& depth);
DistanceTable distance_table(PieceForest& f, const PointL& zeta, int columns, const Rat& depth);
DistanceTable distance_table(PieceForest& f, const TypeIIPoint& zeta, int columns,
                             const Rat& depth);

void detect_flags(MarkedGrid& g);

struct GridViolation {
  std::string rule;  // "Ma", "Mb", or "weak-third"
  int n = 0;
  int k = 0;
  Rat level;
};

/// Checks the two marked-grid rules of `g` against the critical grid.
std::vector<GridViolation> check_grid_rules(const MarkedGrid& g, const MarkedGrid& critical);

/// The weak third rule: if the critical grid is unmarked at (j, l0-j) for
/// j = 1..k-1, marked at (k, l0-k+1/2), and g is marked at (n, l0), then g
/// must be unmarked at (n+k, l0-k+1/2).
std::vector<GridViolation> check_weak_third_rule(const MarkedGrid& critical, const MarkedGrid& g);

enum class YoccozOutcome { Converges, Diverges, Undecided };

struct YoccozResult {
  YoccozOutcome outcome = YoccozOutcome::Undecided;
  std::vector<Rat> partial_sums;  // S_l over half levels
  int generations = 0;            // divergence: verified child generations
  std::string certificate;
};

/// Convergence of S(zeta): converges iff the grid is eventually periodic;
/// divergence certified either by the child-generation bookkeeping of a
/// recurrent non-periodic critical grid (constant contribution per
/// generation) or by bounded-depth columns with persistent boundary
/// splittings (finitely many positive distance values).
YoccozResult yoccoz_test(const MarkedGrid& g, const DistanceTable& dt);

enum class EndKind { RigidPoint, PeriodicClosedBall, BallMinusDirections };

struct EndClass {
  EndKind kind = EndKind::RigidPoint;
  int period = 0;
};

/// Classifies the end described by a grid and its distance geometry:
/// stabilized boundaries give a ball minus infinitely many directions,
/// divergent sums give a rigid point, and eventually periodic grids give an
/// eventually periodic closed ball.
EndClass classify_end(const MarkedGrid& g, const DistanceTable& dt);

/// Text dump: rows are depths in descending order, '.' = 1 and 'X' = 2.
std::string dump_grid(const MarkedGrid& g);

}  // namespace qdl
