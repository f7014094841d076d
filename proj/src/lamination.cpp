#include "qdl/lamination.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

namespace qdl {

Rat angle_mod1(const Rat& t) { return t - Rat(t.floor()); }

static Rat dbl(const Rat& t) { return angle_mod1(t + t); }

std::vector<Rat> rotation_orbit(int p, int q) {
  if (q < 2 || p < 1 || p >= q || std::gcd(p, q) != 1)
    throw std::invalid_argument("rotation_orbit: need coprime 1 <= p < q");
  BigInt den = (BigInt(1) << q) - 1;
  for (BigInt k = 1; k < den; ++k) {
    std::vector<Rat> orbit;
    BigInt r = k;
    bool simple = true;
    for (int i = 0; i < q; ++i) {
      Rat t(r, den);
      if (std::find(orbit.begin(), orbit.end(), t) != orbit.end()) {
        simple = false;
        break;
      }
      orbit.push_back(t);
      r = (r * 2) % den;
    }
    if (!simple) continue;
    std::sort(orbit.begin(), orbit.end());
    bool rotates = true;
    for (int j = 0; j < q && rotates; ++j)
      rotates = dbl(orbit[j]) == orbit[(j + p) % q];
    if (rotates) return orbit;
  }
  throw std::logic_error("rotation_orbit: no orbit found");
}

std::pair<Rat, Rat> characteristic_interval(int p, int q) {
  if (q == 2) return {Rat(1, 3), Rat(2, 3)};  // tie: take the arc missing 0
  std::vector<Rat> a = rotation_orbit(p, q);
  int best = -1;
  Rat best_len;
  bool tie = false;
  for (int j = 0; j < q; ++j) {
    Rat hi = j + 1 < q ? a[j + 1] : a[0] + Rat(1);
    Rat len = hi - a[j];
    if (best < 0 || len < best_len) {
      best = j;
      best_len = len;
      tie = false;
    } else if (len == best_len) {
      tie = true;
    }
  }
  if (tie) throw std::logic_error("characteristic_interval: length tie");
  Rat hi = best + 1 < q ? a[best + 1] : a[0] + Rat(1);
  return {a[best], hi};
}

std::vector<int> itinerary(const Rat& theta, int eps, const Rat& t, int depth) {
  std::vector<int> word;
  Rat base = angle_mod1(theta / Rat(2));
  Rat half(1, 2);
  Rat x = angle_mod1(t);
  for (int k = 0; k < depth; ++k) {
    Rat d = angle_mod1(x - base);
    int i;
    if (eps > 0)
      i = d < half ? 1 : 0;  // I_1^+ = [theta/2, theta/2 + 1/2[
    else
      i = (!d.is_zero() && d <= half) ? 1 : 0;  // I_1^- = ]theta/2, theta/2 + 1/2]
    word.push_back(i);
    x = dbl(x);
  }
  return word;
}

int LevelLamination::index_of(const Rat& t) const {
  auto it = std::lower_bound(support.begin(), support.end(), t);
  if (it == support.end() || !(*it == t)) return -1;
  return static_cast<int>(it - support.begin());
}

int LevelLamination::class_of_index(int i) const {
  for (size_t c = 0; c < classes.size(); ++c)
    if (std::find(classes[c].begin(), classes[c].end(), i) != classes[c].end())
      return static_cast<int>(c);
  return -1;
}

int LevelLamination::class_of(const Rat& t) const {
  int i = index_of(angle_mod1(t));
  return i < 0 ? -1 : class_of_index(i);
}

std::vector<Rat> LevelLamination::class_angles(int c) const {
  std::vector<Rat> out;
  for (int i : classes[c]) out.push_back(support[i]);
  return out;
}

namespace {

// membership of t in the closed arc [lo, hi] (hi may exceed 1)
bool in_closed_arc(const Rat& lo, const Rat& hi, const Rat& t) {
  Rat u = angle_mod1(t);
  if (u < lo) u += Rat(1);
  return u <= hi;
}

struct UnionFind {
  std::vector<int> up;
  explicit UnionFind(int n) : up(n) { std::iota(up.begin(), up.end(), 0); }
  int find(int x) { return up[x] == x ? x : up[x] = find(up[x]); }
  void join(int a, int b) { up[find(a)] = find(b); }
};

std::vector<std::vector<int>> partition_by_itinerary(
    const std::vector<Rat>& support, const Rat& theta, int eps, int depth) {
  std::map<std::vector<int>, std::vector<int>> groups;
  for (size_t i = 0; i < support.size(); ++i)
    groups[itinerary(theta, eps, support[i], depth)].push_back(
        static_cast<int>(i));
  std::vector<std::vector<int>> out;
  for (auto& [w, g] : groups) out.push_back(g);
  return out;
}

// cyclic gap of cls (sorted angles) containing t; -1 when t is in cls
int gap_index(const std::vector<Rat>& cls, const Rat& t) {
  for (size_t j = 0; j < cls.size(); ++j)
    if (cls[j] == t) return -1;
  int n = static_cast<int>(cls.size());
  for (int j = 0; j + 1 < n; ++j)
    if (cls[j] < t && t < cls[j + 1]) return j;
  return n - 1;  // wrapping gap ]cls[n-1], cls[0] + 1[
}

}  // namespace

LevelLamination build_lamination(int p, int q, const Rat& theta, Flavor flavor,
                                 int level) {
  if (level < 0) throw std::invalid_argument("build_lamination: level < 0");
  std::vector<Rat> a0 = rotation_orbit(p, q);
  auto [lo, hi] = characteristic_interval(p, q);
  Rat th = angle_mod1(theta);
  if (!in_closed_arc(lo, hi, th))
    throw std::invalid_argument(
        "build_lamination: angle outside the closed characteristic interval");

  LevelLamination lam;
  lam.p = p;
  lam.q = q;
  lam.level = level;
  lam.theta = th;
  lam.flavor = flavor;
  std::set<Rat> sup;
  BigInt two_l = BigInt(1) << level;
  for (const Rat& a : a0)
    for (BigInt k = 0; k < two_l; ++k) sup.insert((a + Rat(k)) / Rat(two_l));
  lam.support.assign(sup.begin(), sup.end());

  int depth = level + q;
  if (flavor == Flavor::Join) {
    UnionFind uf(static_cast<int>(lam.support.size()));
    for (int eps : {+1, -1})
      for (const auto& g : partition_by_itinerary(lam.support, th, eps, depth))
        for (size_t i = 1; i < g.size(); ++i) uf.join(g[0], g[i]);
    std::map<int, std::vector<int>> groups;
    for (size_t i = 0; i < lam.support.size(); ++i)
      groups[uf.find(static_cast<int>(i))].push_back(static_cast<int>(i));
    for (auto& [r, g] : groups) lam.classes.push_back(g);
  } else {
    lam.classes = partition_by_itinerary(lam.support, th,
                                         flavor == Flavor::Plus ? +1 : -1, depth);
  }

  std::string err = check_axioms(lam);
  if (!err.empty()) throw AxiomViolation("build_lamination: " + err);
  return lam;
}

std::string check_axioms(const LevelLamination& lam) {
  const auto& sup = lam.support;
  size_t covered = 0;
  for (const auto& c : lam.classes) covered += c.size();
  if (covered != sup.size()) return "classes do not partition the support";

  // class angle sets, sorted
  std::vector<std::vector<Rat>> cls;
  for (const auto& c : lam.classes) {
    std::vector<Rat> v;
    for (int i : c) v.push_back(sup[i]);
    std::sort(v.begin(), v.end());
    cls.push_back(v);
  }

  // invariant: the doubled class is again a class
  std::vector<int> image(cls.size(), -1);
  for (size_t c = 0; c < cls.size(); ++c) {
    std::set<Rat> img;
    for (const Rat& t : cls[c]) img.insert(dbl(t));
    int ic = lam.class_of(*img.begin());
    if (ic < 0) return "image angle left the support";
    std::vector<Rat> want(img.begin(), img.end());
    if (lam.class_angles(ic) != want) return "image of a class is not a class";
    image[c] = ic;
  }

  // unlinked: every other class sits inside one complementary arc
  for (size_t a = 0; a < cls.size(); ++a) {
    if (cls[a].size() < 2) continue;
    for (size_t b = 0; b < cls.size(); ++b) {
      if (a == b || cls[b].size() < 2) continue;
      int g = gap_index(cls[a], cls[b][0]);
      for (size_t j = 1; j < cls[b].size(); ++j)
        if (gap_index(cls[a], cls[b][j]) != g) return "linked classes";
    }
  }

  // consecutive preserving: gaps map onto gaps of the image class
  for (size_t c = 0; c < cls.size(); ++c) {
    if (cls[c].size() < 2) continue;
    std::vector<Rat> img = lam.class_angles(image[c]);
    std::sort(img.begin(), img.end());
    if (img.size() < 2) continue;  // complement of a point: nothing to check
    int n = static_cast<int>(cls[c].size());
    int m = static_cast<int>(img.size());
    for (int j = 0; j < n; ++j) {
      Rat u = dbl(cls[c][j]);
      Rat v = dbl(cls[c][(j + 1) % n]);
      int ju = static_cast<int>(std::find(img.begin(), img.end(), u) - img.begin());
      if (ju == m || !(img[(ju + 1) % m] == v))
        return "consecutive pair does not map to a gap";
    }
  }

  // alpha-supported: a fixed non-trivial class absorbing every other one
  int fixed = -1;
  for (size_t c = 0; c < cls.size(); ++c)
    if (cls[c].size() >= 2 && image[c] == static_cast<int>(c)) {
      if (fixed >= 0) return "two fixed classes";
      fixed = static_cast<int>(c);
    }
  if (fixed < 0) return "no fixed class";
  for (size_t c = 0; c < cls.size(); ++c) {
    if (cls[c].size() < 2) continue;
    int x = static_cast<int>(c);
    for (int k = 0; k <= lam.level + lam.q && x != fixed; ++k) x = image[x];
    if (x != fixed) return "class never reaches the fixed class";
  }
  return "";
}

namespace {

struct Arc {
  Rat lo, hi;  // closed [lo, hi], lo in [0,1), hi <= lo + 1
};

std::vector<Arc> intersect(const std::vector<Arc>& xs, const Arc& b) {
  std::vector<Arc> out;
  for (const Arc& a : xs)
    for (int k = -1; k <= 1; ++k) {
      Rat blo = b.lo + Rat(k), bhi = b.hi + Rat(k);
      Rat lo = std::max(a.lo, blo), hi = std::min(a.hi, bhi);
      if (lo <= hi) out.push_back({lo, hi});
    }
  return out;
}

bool same_partition(const LevelLamination& a, const LevelLamination& b) {
  if (a.support != b.support) return false;
  auto key = [](const LevelLamination& l) {
    std::set<std::vector<int>> k;
    for (auto c : l.classes) {
      std::sort(c.begin(), c.end());
      k.insert(c);
    }
    return k;
  };
  return key(a) == key(b);
}

bool reproduces(const std::vector<LevelLamination>& target, const Rat& theta,
                Flavor flavor) {
  try {
    for (const auto& t : target)
      if (!same_partition(t, build_lamination(t.p, t.q, theta, flavor, t.level)))
        return false;
  } catch (const std::exception&) {
    return false;
  }
  return true;
}

}  // namespace

MatchResult match_lamination(const std::vector<LevelLamination>& target) {
  if (target.empty()) throw NoMatch("empty target");
  int p = target[0].p, q = target[0].q;
  for (const auto& t : target) {
    std::string err = check_axioms(t);
    if (!err.empty()) throw NoMatch("target is not a lamination: " + err);
  }
  const LevelLamination& top = target.back();

  auto [cl, ch] = characteristic_interval(p, q);
  std::vector<Arc> arcs{{angle_mod1(cl), ch - cl + angle_mod1(cl)}};
  int two_to_one = -1;
  for (size_t c = 0; c < top.classes.size(); ++c) {
    std::vector<Rat> a = top.class_angles(c);
    if (a.size() < 2) continue;
    std::sort(a.begin(), a.end());
    int n = static_cast<int>(a.size());
    int lg = -1;
    for (int j = 0; j < n; ++j) {
      Rat hi = j + 1 < n ? a[j + 1] : a[0] + Rat(1);
      if (hi - a[j] > Rat(1, 2)) lg = j;
    }
    if (lg < 0) {
      two_to_one = static_cast<int>(c);
      continue;
    }
    // both diameter endpoints must lie in the long gap ]t, s[:
    // theta in ]2t, 2s - 1[
    Rat t = a[lg], s = lg + 1 < n ? a[lg + 1] : a[0] + Rat(1);
    Rat lo = angle_mod1(t + t);
    arcs = intersect(arcs, {lo, lo + (s - t) + (s - t) - Rat(1)});
    if (arcs.empty()) throw NoMatch("empty angle interval");
  }

  MatchResult r;
  if (two_to_one >= 0) {
    std::set<Rat> img;
    for (const Rat& t : top.class_angles(two_to_one)) img.insert(dbl(t));
    std::vector<Rat> a(img.begin(), img.end());
    if (img.size() * 2 != top.classes[two_to_one].size() ||
        !reproduces(target, a[0], Flavor::Join))
      throw NoMatch("two-to-one class does not pin an angle");
    r.prefixed = true;
    r.thetas = a;
    r.lo = r.hi = a[0];
    r.flavor = Flavor::Join;
    return r;
  }

  // several disjoint arcs may remain (symmetric laminations); keep them all
  for (const Arc& a : arcs) {
    Rat mid = (a.lo + a.hi) / Rat(2);
    for (Flavor f : {Flavor::Plus, Flavor::Minus})
      if (reproduces(target, mid, f)) {
        if (r.arcs.empty() || a.hi - a.lo > r.hi - r.lo) {
          r.lo = a.lo;
          r.hi = a.hi;
          r.flavor = f;
        }
        r.arcs.emplace_back(a.lo, a.hi);
        break;
      }
  }
  if (r.arcs.empty()) throw NoMatch("no admissible angle reproduces the target");
  return r;
}

std::string dump_lamination(const LevelLamination& lam) {
  std::vector<std::vector<Rat>> cls;
  for (size_t c = 0; c < lam.classes.size(); ++c) {
    std::vector<Rat> a = lam.class_angles(c);
    if (a.size() < 2) continue;
    std::sort(a.begin(), a.end());
    cls.push_back(a);
  }
  std::sort(cls.begin(), cls.end());
  std::string out;
  for (const auto& a : cls) {
    for (size_t j = 0; j < a.size(); ++j) {
      if (j) out += " ";
      out += a[j].num().str() + "/" + a[j].den().str();
    }
    out += "\n";
  }
  return out;
}

}  // namespace qdl
