#include "qdl/lamtree.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace qdl {

namespace {

Rat dbl(const Rat& t) { return angle_mod1(t + t); }

// index of the cyclic gap of the sorted angle list c containing t
int gap_index(const std::vector<Rat>& c, const Rat& t) {
  int lo = -1;
  for (size_t i = 0; i < c.size(); ++i)
    if (c[i] <= t) lo = static_cast<int>(i);
  return lo < 0 ? static_cast<int>(c.size()) - 1 : lo;
}

// index of the unique gap longer than 1/2, or -1 when none exists
int long_gap(const std::vector<Rat>& c) {
  for (size_t i = 0; i < c.size(); ++i) {
    Rat hi = i + 1 < c.size() ? c[i + 1] : c[0] + Rat(1);
    if (hi - c[i] > Rat(1, 2)) return static_cast<int>(i);
  }
  return -1;
}

struct UF {
  std::vector<int> par;
  explicit UF(int n) : par(n) {
    for (int i = 0; i < n; ++i) par[i] = i;
  }
  int find(int x) { return par[x] == x ? x : par[x] = find(par[x]); }
  void unite(int a, int b) { par[find(a)] = find(b); }
};

std::vector<std::vector<Rat>> nontrivial(const LevelLamination& lam) {
  std::vector<std::vector<Rat>> out;
  for (size_t c = 0; c < lam.classes.size(); ++c)
    if (lam.classes[c].size() >= 2) {
      std::vector<Rat> a = lam.class_angles(c);
      std::sort(a.begin(), a.end());
      out.push_back(std::move(a));
    }
  return out;
}

// the unique Y-vertex whose region contains the disk center (0) or the
// outer point (infinity): its arcs sit in the long gap of every class on
// the given sheet; when some class has no long gap the center degenerates
// onto that class and the result is its Gamma-vertex
int center_vertex(const LevelTree& t, const std::vector<std::vector<Rat>>& sheet) {
  for (const auto& c : sheet)
    if (long_gap(c) < 0) return t.vertex_at_angle(c[0]);
  for (size_t a = 0; a < t.arcs.size(); ++a) {
    Rat mid = (t.arcs[a].first + t.arcs[a].second) / Rat(2);
    mid = angle_mod1(mid);
    bool ok = true;
    for (const auto& c : sheet)
      if (gap_index(c, mid) != long_gap(c)) {
        ok = false;
        break;
      }
    if (ok) return t.arc_face[a];
  }
  throw std::logic_error("no region contains the sheet center");
}

std::vector<int> bfs_parent(const std::vector<std::vector<int>>& adj, int from) {
  std::vector<int> par(adj.size(), -2);
  std::deque<int> q{from};
  par[from] = -1;
  while (!q.empty()) {
    int v = q.front();
    q.pop_front();
    for (int w : adj[v])
      if (par[w] == -2) {
        par[w] = v;
        q.push_back(w);
      }
  }
  return par;
}

}  // namespace

GeoLamination make_geo(const LevelLamination& lam, const LevelLamination& mirror) {
  GeoLamination g;
  g.level = lam.level;
  g.inside = nontrivial(lam);

  std::vector<Rat> refl_support;
  for (const Rat& t : mirror.support) refl_support.push_back(angle_mod1(-t));
  std::sort(refl_support.begin(), refl_support.end());
  if (refl_support != lam.support)
    throw std::invalid_argument("mirror support does not reflect onto the support");

  for (auto& c : nontrivial(mirror)) {
    for (Rat& t : c) t = angle_mod1(-t);
    std::sort(c.begin(), c.end());
    g.outside.push_back(std::move(c));
  }
  return g;
}

int LevelTree::vertex_at_angle(const Rat& t) const {
  Rat u = angle_mod1(t);
  for (size_t i = 0; i < marked.size(); ++i)
    if (marked[i] == u) return angle_comp[i];
  return -1;
}

int LevelTree::arc_of(const Rat& t) const {
  Rat u = angle_mod1(t);
  // arcs are taken half-open [lo, hi); the last one wraps past 1
  for (size_t a = 0; a < arcs.size(); ++a)
    if (arcs[a].first <= u && u < arcs[a].second) return static_cast<int>(a);
  return static_cast<int>(arcs.size()) - 1;
}

int LevelTree::face_at(const Rat& t) const { return arc_face[arc_of(t)]; }

LevelTree build_tree(const GeoLamination& geo) {
  LevelTree t;
  t.level = geo.level;
  t.geo = geo;

  std::vector<std::vector<Rat>> all = geo.inside;
  all.insert(all.end(), geo.outside.begin(), geo.outside.end());
  const int nc = static_cast<int>(all.size());

  std::set<Rat> mset;
  for (const auto& c : all) mset.insert(c.begin(), c.end());
  t.marked.assign(mset.begin(), mset.end());
  const int nm = static_cast<int>(t.marked.size());
  for (int i = 0; i < nm; ++i) {
    Rat hi = i + 1 < nm ? t.marked[i + 1] : t.marked[0] + Rat(1);
    t.arcs.emplace_back(t.marked[i], hi);
  }

  // Gamma-vertices: chord components, classes glued along shared angles
  UF comp(nc);
  std::map<Rat, int> first_class;
  for (int c = 0; c < nc; ++c)
    for (const Rat& a : all[c]) {
      auto [it, fresh] = first_class.emplace(a, c);
      if (!fresh) comp.unite(c, it->second);
    }

  // Y-vertices: arcs glued when they bound the same region on either sheet;
  // two arcs see the same region of a sheet iff they sit in the same gap of
  // every class of that sheet
  UF face(nm);
  for (int sheet = 0; sheet < 2; ++sheet) {
    const auto& cls = sheet == 0 ? geo.inside : geo.outside;
    std::map<std::vector<int>, int> seen;
    for (int a = 0; a < nm; ++a) {
      Rat mid = angle_mod1((t.arcs[a].first + t.arcs[a].second) / Rat(2));
      std::vector<int> key;
      for (const auto& c : cls) key.push_back(gap_index(c, mid));
      auto [it, fresh] = seen.emplace(std::move(key), a);
      if (!fresh) face.unite(a, it->second);
    }
  }

  std::map<int, int> comp_id, face_id;
  for (int c = 0; c < nc; ++c) {
    int r = comp.find(c);
    if (comp_id.count(r)) continue;
    comp_id[r] = static_cast<int>(t.verts.size());
    TreeVertex v;
    v.id = comp_id[r];
    v.is_gamma = true;
    t.verts.push_back(std::move(v));
  }
  for (int c = 0; c < nc; ++c) {
    TreeVertex& v = t.verts[comp_id[comp.find(c)]];
    v.angles.insert(v.angles.end(), all[c].begin(), all[c].end());
  }
  for (auto& v : t.verts) {
    std::sort(v.angles.begin(), v.angles.end());
    v.angles.erase(std::unique(v.angles.begin(), v.angles.end()), v.angles.end());
  }

  for (int a = 0; a < nm; ++a) {
    int r = face.find(a);
    if (face_id.count(r)) continue;
    face_id[r] = static_cast<int>(t.verts.size());
    TreeVertex v;
    v.id = face_id[r];
    t.verts.push_back(std::move(v));
  }
  t.arc_face.assign(nm, -1);
  for (int a = 0; a < nm; ++a) {
    int id = face_id[face.find(a)];
    t.arc_face[a] = id;
    t.verts[id].arcs.push_back(t.arcs[a]);
  }

  t.angle_comp.assign(nm, -1);
  for (int c = 0; c < nc; ++c)
    for (const Rat& a : all[c]) {
      int i = static_cast<int>(std::lower_bound(t.marked.begin(), t.marked.end(), a) -
                               t.marked.begin());
      t.angle_comp[i] = comp_id[comp.find(c)];
    }

  // edges: a region touches the component of each of its arc endpoints
  std::set<std::pair<int, int>> es;
  for (int a = 0; a < nm; ++a) {
    int y = t.arc_face[a];
    es.emplace(y, t.angle_comp[a]);
    es.emplace(y, t.angle_comp[(a + 1) % nm]);
  }
  t.adj.assign(t.verts.size(), {});
  for (const auto& [y, g] : es) {
    t.edges.emplace_back(g, y);
    t.adj[g].push_back(y);
    t.adj[y].push_back(g);
  }

  // the dual graph of an unlinked chord system must be a tree
  std::vector<int> par = bfs_parent(t.adj, 0);
  for (int v = 0; v < static_cast<int>(t.verts.size()); ++v)
    if (par[v] == -2) throw std::logic_error("dual graph is disconnected");
  if (t.edges.size() + 1 != t.verts.size())
    throw std::logic_error("dual graph has a cycle");

  t.v0 = center_vertex(t, geo.inside);
  t.vinf = center_vertex(t, geo.outside);
  return t;
}

LevelTree build_tree(const LevelLamination& lam, const LevelLamination& mirror) {
  return build_tree(make_geo(lam, mirror));
}

std::vector<int> tree_path(const LevelTree& t, int a, int b) {
  std::vector<int> par = bfs_parent(t.adj, a);
  std::vector<int> path;
  for (int v = b; v != -1; v = par[v]) path.push_back(v);
  std::reverse(path.begin(), path.end());
  return path;
}

std::vector<int> project(const LevelTree& fine, const LevelTree& coarse) {
  std::vector<int> out(fine.verts.size(), -1);
  for (const auto& v : fine.verts) {
    // an angle of the vertex locates it: still marked below means the same
    // component persists, otherwise the vertex sits inside a coarse region
    Rat probe = v.is_gamma ? v.angles[0] : v.arcs[0].first;
    int g = coarse.vertex_at_angle(probe);
    out[v.id] = v.is_gamma && g >= 0 ? g : coarse.face_at(probe);
  }
  return out;
}

std::vector<int> include(const LevelTree& coarse, const LevelTree& fine) {
  std::vector<int> out(coarse.verts.size(), -1);
  for (const auto& v : coarse.verts) {
    if (v.is_gamma) {
      out[v.id] = fine.vertex_at_angle(v.angles[0]);
    } else {
      // the fine region bordering the same boundary arc just past an
      // endpoint of the coarse region
      out[v.id] = fine.face_at(v.arcs[0].first);
    }
    if (out[v.id] < 0) throw std::logic_error("inclusion lost a vertex");
  }
  return out;
}

std::vector<int> doubling(const LevelTree& fine, const LevelTree& coarse) {
  std::vector<int> out(fine.verts.size(), -1);
  for (const auto& v : fine.verts) {
    if (v.is_gamma) {
      out[v.id] = coarse.vertex_at_angle(dbl(v.angles[0]));
    } else {
      // sample the arc interior so the image avoids the coarse marks
      const auto& [a, b] = v.arcs[0];
      Rat step = (b - a) / Rat(2);
      Rat s = a + step;
      for (int j = 0; j < 64 && coarse.vertex_at_angle(dbl(s)) >= 0; ++j) {
        step = step / Rat(2);
        s = a + step;
      }
      out[v.id] = coarse.face_at(dbl(s));
    }
    if (out[v.id] < 0) throw std::logic_error("doubling lost a vertex");
  }
  return out;
}

BranchedData branched_structure(const LevelTree& fine, const LevelTree& coarse) {
  BranchedData bd;
  bd.gamma.assign(fine.verts.size(), -1);
  // the deck involution of doubling is the antipodal rotation t -> t + 1/2
  for (const auto& v : fine.verts) {
    if (v.is_gamma) {
      bd.gamma[v.id] = fine.vertex_at_angle(angle_mod1(v.angles[0] + Rat(1, 2)));
    } else {
      bd.gamma[v.id] = fine.face_at(angle_mod1(v.arcs[0].first + Rat(1, 2)));
    }
    if (bd.gamma[v.id] < 0) throw std::logic_error("involution lost a vertex");
  }
  for (const auto& v : fine.verts)
    if (bd.gamma[bd.gamma[v.id]] != v.id)
      throw std::logic_error("involution is not an involution");

  std::vector<int> m2 = doubling(fine, coarse);
  bd.I = tree_path(coarse, m2[fine.v0], m2[fine.vinf]);
  std::set<int> iset(bd.I.begin(), bd.I.end());
  for (const auto& v : fine.verts)
    if (iset.count(m2[v.id])) bd.J.push_back(v.id);
  return bd;
}

std::vector<int> lift_isomorphism(const LiftProblem& pr) {
  const int nA = static_cast<int>(pr.adjA.size());
  const int nT = static_cast<int>(pr.adjT.size());

  // the base iso must already conjugate the branched maps on the subtree
  for (int v = 0; v < nA; ++v) {
    if (!pr.inA[v]) continue;
    int hv = pr.h[v];
    if (hv < 0 || !pr.inT[hv])
      throw NotLiftable("base iso undefined or escaping at vertex " + std::to_string(v));
    if (pr.h[pr.phi[v]] != pr.m[hv])
      throw NotLiftable("base iso does not conjugate at vertex " + std::to_string(v));
  }

  std::vector<int> h = pr.h;
  std::vector<char> used(nT, 0);
  for (int v = 0; v < nA; ++v)
    if (h[v] >= 0) used[h[v]] = 1;

  // assign v -> y, force the involution pairing, recurse over frontier edges
  struct Solver {
    const LiftProblem& pr;
    std::vector<int>& h;
    std::vector<char>& used;
    std::string fail;

    bool assign(int v, int y, std::vector<std::pair<int, int>>& undo) {
      for (int k = 0; k < 2; ++k, v = pr.gammaA[v], y = pr.gammaT[y]) {
        if (h[v] == y) continue;
        if (h[v] >= 0 || used[y]) {
          fail = "involution clash at vertex " + std::to_string(v);
          return false;
        }
        h[v] = y;
        used[y] = 1;
        undo.emplace_back(v, y);
      }
      return true;
    }

    bool extend() {
      for (int u = 0; u < static_cast<int>(pr.adjA.size()); ++u) {
        if (h[u] < 0) continue;
        for (int v : pr.adjA[u]) {
          if (h[v] >= 0) continue;
          // candidates: unused neighbours of h(u) over the right base vertex
          std::vector<int> cand;
          for (int y : pr.adjT[h[u]])
            if (!used[y] && pr.m[y] == h[pr.phi[v]]) cand.push_back(y);
          if (cand.empty()) {
            fail = "no lift for vertex " + std::to_string(v) + " over " +
                   std::to_string(pr.phi[v]);
            return false;
          }
          for (int y : cand) {
            std::vector<std::pair<int, int>> undo;
            if (assign(v, y, undo) && extend()) return true;
            for (auto [w, z] : undo) {
              h[w] = -1;
              used[z] = 0;
            }
          }
          return false;
        }
      }
      return true;
    }
  } solver{pr, h, used, ""};

  if (!solver.extend()) throw NotLiftable(solver.fail);

  // sanity: bijective, edge preserving, conjugating
  std::set<int> img(h.begin(), h.end());
  if (static_cast<int>(img.size()) != nA || nA != nT || img.count(-1))
    throw NotLiftable("lift is not a bijection");
  for (int v = 0; v < nA; ++v) {
    for (int w : pr.adjA[v])
      if (std::find(pr.adjT[h[v]].begin(), pr.adjT[h[v]].end(), h[w]) ==
          pr.adjT[h[v]].end())
        throw NotLiftable("lift breaks the edge " + std::to_string(v) + "-" +
                          std::to_string(w));
    if (h[pr.phi[v]] != pr.m[h[v]])
      throw NotLiftable("lift does not conjugate at vertex " + std::to_string(v));
  }
  return h;
}

TreeTower inverse_limit_truncation(int p, int q, const Rat& theta, Flavor flavor,
                                   int L) {
  TreeTower tw;
  tw.p = p;
  tw.q = q;
  Rat mtheta = angle_mod1(characteristic_interval(q - p, q).second);
  for (int lv = 0; lv <= L; ++lv) {
    LevelLamination lam = build_lamination(p, q, theta, flavor, lv);
    LevelLamination mirror = build_lamination(q - p, q, mtheta, Flavor::Plus, lv);
    tw.trees.push_back(build_tree(lam, mirror));
  }
  for (int lv = 0; lv + 1 <= L; ++lv) {
    tw.pi.push_back(project(tw.trees[lv + 1], tw.trees[lv]));
    tw.iota.push_back(include(tw.trees[lv], tw.trees[lv + 1]));
    tw.m2.push_back(doubling(tw.trees[lv + 1], tw.trees[lv]));
    tw.branched.push_back(branched_structure(tw.trees[lv + 1], tw.trees[lv]));
  }
  return tw;
}

std::string dot_export(const LevelTree& t) {
  std::ostringstream os;
  os << "graph level" << t.level << " {\n";
  for (const auto& v : t.verts) {
    os << "  v" << v.id << " [shape=circle, style=" << (v.is_gamma ? "filled" : "solid")
       << ", label=\"";
    if (v.is_gamma) {
      for (size_t i = 0; i < v.angles.size(); ++i)
        os << (i ? " " : "") << v.angles[i].str();
    } else {
      for (size_t i = 0; i < v.arcs.size(); ++i)
        os << (i ? " " : "") << "(" << v.arcs[i].first.str() << ","
           << angle_mod1(v.arcs[i].second).str() << ")";
    }
    os << "\"];\n";
  }
  for (const auto& [a, b] : t.edges) os << "  v" << a << " -- v" << b << ";\n";
  os << "}\n";
  return os.str();
}

std::string svg_export(const GeoLamination& g) {
  const double pi = 3.14159265358979323846;
  const double cx = 300, cy = 300, r = 280;
  auto px = [&](const Rat& t, double rad) {
    double a = 2 * pi * std::stod(t.num().str()) / std::stod(t.den().str());
    return std::pair<double, double>{cx + rad * std::cos(a), cy - rad * std::sin(a)};
  };
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"600\" height=\"600\">\n"
     << "<circle cx=\"" << cx << "\" cy=\"" << cy << "\" r=\"" << r
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int sheet = 0; sheet < 2; ++sheet) {
    const auto& cls = sheet == 0 ? g.inside : g.outside;
    double rad = sheet == 0 ? r : r + 12;
    const char* col = sheet == 0 ? "blue" : "red";
    for (const auto& c : cls)
      for (size_t i = 0; i < c.size(); ++i) {
        auto [x1, y1] = px(c[i], rad);
        auto [x2, y2] = px(c[(i + 1) % c.size()], rad);
        os << "<line x1=\"" << x1 << "\" y1=\"" << y1 << "\" x2=\"" << x2
           << "\" y2=\"" << y2 << "\" stroke=\"" << col << "\"/>\n";
      }
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace qdl
