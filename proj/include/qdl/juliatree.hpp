#pragma once

#include "qdl/classifier.hpp"
#include "qdl/lamtree.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace qdl {

/// Raised when no candidate angle reproduces the map-side tower; carries the
/// first failing level and a witness. A hard failure, not an expected result.
struct NoConjugacy : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct BerkVertex {
  int id = -1;
  TypeIIPoint x;
  enum class Tag { Orbit, Theta, Other } tag = Tag::Other;
};

/// The level-l tree: convex hull of the l-th preimages of the repelling
/// orbit, with the grand orbits of theta_0 and of the escaping-critical
/// projection marked as extra vertices.
struct BerkLevelTree {
  int level = 0;
  std::vector<BerkVertex> verts;
  std::vector<std::pair<int, int>> edges;
  std::vector<std::vector<int>> adj;
  int theta0 = -1;
  std::vector<int> orbit;  // xi_0 .. xi_{q-1}
  int w = -1;              // deepest vertex whose ball holds the critical point
  int v = -1;              // phi(w at level l+1); -1 at the top level

  int find(const TypeIIPoint& x) const;  // vertex id, or -1
};

/// Vertex path between a and b (inclusive).
std::vector<int> berk_path(const BerkLevelTree& t, int a, int b);

/// The full tower with transition tables; levels share nested vertex sets.
struct JuliaTower {
  RatMapL phi;
  RiveraData rd;
  PointL omega, omega_prime;  // active / other critical point
  int L = 0;
  std::vector<BerkLevelTree> levels;
  std::vector<std::vector<int>> fmap;   // phi: level l+1 -> level l
  std::vector<std::vector<int>> up;     // inclusion: level l -> level l+1
  std::vector<std::vector<int>> gamma;  // fiber involution on level l+1

  bool omega_escapes = false, omega_prime_escapes = false;
  std::vector<TypeIIPoint> orbit0;      // projected escaping orbit O_0
};

JuliaTower build_julia_tower(const RatMapL& phi, const ClassificationReport& report,
                             int L, int horizon = 64);
BerkLevelTree build_julia_tree(const RatMapL& phi, const ClassificationReport& report,
                               int level);

/// Quotient of a tree by the components of a flagged vertex set; the induced
/// map (when given) must be constant on classes.
struct Quotient {
  std::vector<int> cls;                // vertex -> class
  int classes = 0;
  std::vector<std::vector<int>> adj;   // quotient adjacency
};
Quotient quotient_tree(const std::vector<std::vector<int>>& adj,
                       const std::vector<char>& flagged);

/// The collapsed tower: per level, vertex classes of the relation "same
/// component of an iterated preimage of the hull of O_0", with the induced
/// branched dynamics. Trivial (identity classes) when no critical point
/// escapes or O_0 is a single point.
struct CollapsedTower {
  bool trivial = true;
  int L = 0, q = 0;
  std::vector<std::vector<int>> cls;             // per level: vertex -> class
  std::vector<std::vector<std::vector<int>>> adj;
  std::vector<std::vector<int>> psi;             // level l+1 -> l
  std::vector<std::vector<int>> up;              // level l -> l+1
  std::vector<std::vector<int>> gamma;           // involution on level l+1
  std::vector<std::vector<int>> kind;            // 0 theta-orbit, 1 orbit, 2 other
  std::vector<int> theta0, w, v;                 // class ids per level (v may be -1)
  std::vector<int> orbit;                        // level-0 classes of xi_0..xi_{q-1}
};
CollapsedTower collapse(const JuliaTower& tw);

/// Lemma-style postcritical filter at one level of the collapsed tower: the
/// classes x with w never strictly inside [theta0, psi^k(x)[.
std::vector<int> postcritical_subtree(const CollapsedTower& ct, int level);

/// Abstract map-side tower fed to the conjugacy engine.
struct SideTower {
  int L = 0, q = 0;
  std::vector<std::vector<std::vector<int>>> adj;
  std::vector<std::vector<int>> up, psi, gamma, kind;
  std::vector<int> root;    // theta-center vertex per level
  std::vector<int> orbit0;  // level-0 region vertices in dynamical order
  std::vector<int> vmark;   // critical value vertex per level, -1 when unmarked
};
SideTower side_of(const CollapsedTower& ct);
SideTower side_of(const TreeTower& tw);

struct ConjugacyReport {
  int L = 0, p = 0, q = 0;
  bool prefixed = false;
  Rat theta;
  Flavor flavor = Flavor::Plus;
  std::vector<std::vector<std::pair<Rat, Rat>>> arcs;  // admissible closed arcs per level
  std::vector<std::vector<Rat>> exact;                 // admissible prefixed angles per level
  TreeTower lam;                                       // tower at the witness angle
  std::vector<std::vector<int>> h;                     // h[l]: side vertex -> lam vertex
  std::vector<int> vimg;                               // h_l(vmark_l), -1 when unmarked
  std::string summary;
};

/// Finds all angles theta in the closed characteristic interval of p/q whose
/// lamination tree tower is branched-equivariantly isomorphic to the side
/// tower through level L, together with one witness isomorphism tower.
ConjugacyReport conjugacy_engine(const SideTower& side, int p, int q, int L);

ConjugacyReport conjugacy_search(const CollapsedTower& ct, int p, int q);

}  // namespace qdl
