#pragma once

#include "qdl/lamination.hpp"

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qdl {

/// Raised when the lifting preconditions fail; the message names a witness.
struct NotLiftable : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Chord system of a level: classes of the lamination drawn inside the unit
/// disk, plus the reflected classes of the mirror-limb center lamination
/// drawn outside. Only non-trivial classes appear.
struct GeoLamination {
  int level = 0;
  std::vector<std::vector<Rat>> inside, outside;  // sorted angle lists
};

/// Assembles the chord system from the level restriction of a lamination in
/// the p/q-limb and the center lamination of the (q-p)/q-limb (reflected by
/// angle negation). The supports must coincide after reflection.
GeoLamination make_geo(const LevelLamination& lam, const LevelLamination& mirror);

struct TreeVertex {
  int id = -1;
  bool is_gamma = false;
  std::vector<Rat> angles;                 // Gamma: union of class angles
  std::vector<std::pair<Rat, Rat>> arcs;   // Y: open arcs (hi may exceed 1)
};

/// The dual tree of a level chord system: Gamma-vertices are the connected
/// chord components, Y-vertices the complementary regions, edges join a
/// region to each component meeting its boundary.
struct LevelTree {
  int level = 0;
  GeoLamination geo;
  std::vector<Rat> marked;                 // all class angles, sorted
  std::vector<std::pair<Rat, Rat>> arcs;   // arcs between consecutive marks
  std::vector<TreeVertex> verts;
  std::vector<std::pair<int, int>> edges;
  std::vector<std::vector<int>> adj;
  std::vector<int> angle_comp;             // marked index -> Gamma vertex
  std::vector<int> arc_face;               // arc index -> Y vertex
  int v0 = -1, vinf = -1;                  // vertices containing 0 and infinity

  int vertex_at_angle(const Rat& t) const;  // Gamma vertex of a marked angle
  int arc_of(const Rat& t) const;           // arc with t in [lo, hi)
  int face_at(const Rat& t) const;          // Y vertex of that arc
};

LevelTree build_tree(const GeoLamination& geo);
LevelTree build_tree(const LevelLamination& lam, const LevelLamination& mirror);

/// Vertex path between a and b (inclusive).
std::vector<int> tree_path(const LevelTree& t, int a, int b);

/// pi: each fine vertex to the unique coarse vertex containing it.
std::vector<int> project(const LevelTree& fine, const LevelTree& coarse);

/// iota: each coarse vertex to the fine vertex sharing its boundary.
std::vector<int> include(const LevelTree& coarse, const LevelTree& fine);

/// m2: doubling on vertices, one level down.
std::vector<int> doubling(const LevelTree& fine, const LevelTree& coarse);

/// Involution, critical interval and critical value interval of the degree-2
/// branched map m2 between consecutive trees.
struct BranchedData {
  std::vector<int> gamma;  // involution on fine vertices (antipodal shift)
  std::vector<int> J;      // critical interval in the fine tree
  std::vector<int> I;      // critical value interval in the coarse tree
};
BranchedData branched_structure(const LevelTree& fine, const LevelTree& coarse);

/// Generic lifting input: subtree A of A' with branched map phi landing in A,
/// likewise T in T', plus the base isomorphism h on A (-1 outside A).
struct LiftProblem {
  std::vector<std::vector<int>> adjA, adjT;
  std::vector<char> inA, inT;
  std::vector<int> phi, m;          // vertex maps A' -> A, T' -> T
  std::vector<int> gammaA, gammaT;  // involutions
  std::vector<int> h;               // base iso on A, -1 elsewhere
};

/// Extends h to a tree isomorphism h' of the ambient trees conjugating the
/// branched maps; throws NotLiftable with a witness on failure.
std::vector<int> lift_isomorphism(const LiftProblem& pr);

/// Coherent tower of trees through level L with all transition tables.
struct TreeTower {
  int p = 0, q = 0;
  std::vector<LevelTree> trees;            // levels 0..L
  std::vector<std::vector<int>> pi;        // pi[l]: tree l+1 -> tree l
  std::vector<std::vector<int>> iota;      // iota[l]: tree l -> tree l+1
  std::vector<std::vector<int>> m2;        // m2[l]: tree l+1 -> tree l
  std::vector<BranchedData> branched;      // between l+1 and l
};
TreeTower inverse_limit_truncation(int p, int q, const Rat& theta, Flavor flavor,
                                   int L);

/// DOT export: Gamma-vertices filled, Y-vertices hollow.
std::string dot_export(const LevelTree& t);

/// SVG rendering of the chord system on the unit disk.
std::string svg_export(const GeoLamination& g);

}  // namespace qdl
