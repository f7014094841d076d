#include "qdl/report.hpp"

#include "qdl/parse.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

namespace qdl {

using Json = nlohmann::ordered_json;

std::string rat_str(const Rat& r) { return r.num().str() + "/" + r.den().str(); }

std::string flavor_name(Flavor f) {
  switch (f) {
    case Flavor::Plus: return "plus";
    case Flavor::Minus: return "minus";
    case Flavor::Join: return "join";
  }
  return "?";
}

namespace {

std::string fixed_kind_name(FixedKind k) {
  switch (k) {
    case FixedKind::Attracting: return "attracting";
    case FixedKind::Indifferent: return "indifferent";
    case FixedKind::Repelling: return "repelling";
  }
  return "?";
}

Json points_json(const std::vector<TypeIIPoint>& xs) {
  Json a = Json::array();
  for (const auto& x : xs) a.push_back(x.str());
  return a;
}

Json model_json(const ShiftModel& m) {
  Json j;
  j["q"] = m.q;
  j["symbols"] = m.symbols;
  Json tr = Json::array();
  for (const auto& t : m.transitions) tr.push_back(Json::array({t.from, t.to}));
  j["transitions"] = tr;
  j["factor_map"] = m.factor_map;
  return j;
}

void write_file(const std::string& dir, const std::string& name,
                const std::string& body) {
  std::ofstream os(std::filesystem::path(dir) / name, std::ios::binary);
  os << body;
}

}  // namespace

std::string classification_json(const std::string& map_text,
                                const ClassificationReport& rep,
                                const SessionConfig& cfg) {
  Json j;
  j["schema"] = "report/1";
  j["command"] = "classify";
  j["map"] = map_text;
  j["backend"] = cfg.backend == Backend::Exact ? "exact" : "float";
  j["precision"] = rat_str(Rat(cfg.prec));
  j["case"] = case_name(rep.kind);
  j["exact"] = rep.exact;

  Json fps = Json::array();
  for (const auto& f : rep.fixed_points) {
    Json e;
    e["point"] = f.point.str();
    e["multiplicity"] = f.multiplicity;
    e["multiplier"] = f.multiplier.str();
    e["kind"] = fixed_kind_name(f.kind);
    fps.push_back(e);
  }
  j["fixed_points"] = fps;

  switch (rep.kind) {
    case CaseKind::Simple:
      j["simple_point"] = rep.simple_point.str();
      break;
    case CaseKind::AttractingShift:
      j["attractor"] = rep.attractor.str();
      j["certificate"] = Json{{"D", rep.shift_certificate.D.str()},
                              {"D0", rep.shift_certificate.D0.str()},
                              {"D1", rep.shift_certificate.D1.str()},
                              {"verified", rep.shift_certificate.verified}};
      j["model"] = model_json(rep.model);
      break;
    default:
      j["q"] = rep.rivera.q;
      j["theta0"] = rep.rivera.theta0.str();
      j["orbit"] = points_json(rep.rivera.orbit);
      j["skeleton"] = points_json(rep.rivera.skeleton);
      j["tangent_map"] = rep.tangent_orbit.str();
      if (rep.kind == CaseKind::TwoRepelling) {
        j["qprime"] = rep.qprime;
        j["orbit2"] = points_json(rep.orbit2);
        j["tangent_map2"] = rep.tangent_orbit2.str();
      }
      if (rep.kind == CaseKind::IndifferentOrbit) {
        j["model"] = model_json(rep.model);
        j["renewal_shift"] = rep.renewal_shift;
      }
      break;
  }
  if (!rep.notes.empty()) j["notes"] = rep.notes;
  return j.dump(2) + "\n";
}

std::string classification_summary(const ClassificationReport& rep) {
  std::ostringstream os;
  os << "case: " << case_name(rep.kind) << "\n";
  switch (rep.kind) {
    case CaseKind::Simple:
      os << "fixed point of local degree two at " << rep.simple_point.str() << "\n";
      break;
    case CaseKind::AttractingShift:
      os << "attracting rigid point " << rep.attractor.str()
         << "; Julia dynamics conjugate to the full 2-shift\n";
      break;
    case CaseKind::IndifferentOrbit:
      os << "indifferent Julia orbit, period " << rep.rivera.q << ", center "
         << rep.rivera.theta0.str() << "\n";
      break;
    default:
      os << "repelling boundary orbit of period " << rep.rivera.q << " around "
         << rep.rivera.theta0.str() << "\n"
         << "tangent return map: " << rep.tangent_orbit.str() << "\n";
      if (rep.kind == CaseKind::TwoRepelling)
        os << "second orbit of period " << rep.qprime << " with tangent map "
           << rep.tangent_orbit2.str() << "\n";
      break;
  }
  if (!rep.notes.empty()) os << rep.notes << "\n";
  return os.str();
}

std::string lamination_json(int p, int q, const Rat& theta, Flavor flavor,
                            const TreeTower& tower) {
  Json j;
  j["schema"] = "report/1";
  j["command"] = "lamination";
  j["p"] = p;
  j["q"] = q;
  j["theta"] = rat_str(theta);
  j["flavor"] = flavor_name(flavor);
  int L = static_cast<int>(tower.trees.size()) - 1;
  j["level"] = L;
  Json lv = Json::array();
  for (int l = 0; l <= L; ++l) {
    const LevelTree& t = tower.trees[l];
    Json e;
    e["level"] = l;
    int gam = 0;
    for (const auto& v : t.verts) gam += v.is_gamma;
    e["gamma_vertices"] = gam;
    e["region_vertices"] = static_cast<int>(t.verts.size()) - gam;
    Json cls = Json::array();
    for (const auto& v : t.verts)
      if (v.is_gamma) {
        Json angs = Json::array();
        for (const Rat& a : v.angles) angs.push_back(rat_str(a));
        cls.push_back(angs);
      }
    e["classes"] = cls;
    lv.push_back(e);
  }
  j["levels"] = lv;
  return j.dump(2) + "\n";
}

std::string conjugacy_json(const std::string& map_text, const CaseKind kind,
                           const ConjugacyReport& cr) {
  Json j;
  j["schema"] = "report/1";
  j["command"] = "conjugacy";
  j["map"] = map_text;
  j["case"] = case_name(kind);
  j["p"] = cr.p;
  j["q"] = cr.q;
  j["level"] = cr.L;
  j["summary"] = cr.summary;
  j["prefixed"] = cr.prefixed;
  j["theta"] = rat_str(cr.theta);
  j["flavor"] = flavor_name(cr.flavor);
  Json arcs = Json::array();
  for (const auto& lvl : cr.arcs) {
    Json a = Json::array();
    for (const auto& [lo, hi] : lvl)
      a.push_back(Json::array({rat_str(lo), rat_str(hi)}));
    arcs.push_back(a);
  }
  j["arcs"] = arcs;
  Json ex = Json::array();
  for (const auto& lvl : cr.exact) {
    Json a = Json::array();
    for (const Rat& t : lvl) a.push_back(rat_str(t));
    ex.push_back(a);
  }
  j["exact_angles"] = ex;
  j["pairing"] = cr.h;
  j["critical_value_images"] = cr.vimg;
  return j.dump(2) + "\n";
}

namespace {

int cmd_classify(const std::string& map_text, const SessionConfig& cfg,
                 std::ostream& out) {
  RatMapL phi = parse_map(map_text, cfg.backend, Rat(cfg.prec));
  ClassificationReport rep = classify(phi, cfg.depth, cfg.horizon);
  std::string json = classification_json(map_text, rep, cfg);
  std::string summary = classification_summary(rep);
  out << summary;
  if (!cfg.out.empty()) {
    std::filesystem::create_directories(cfg.out);
    write_file(cfg.out, "report.json", json);
    write_file(cfg.out, "report.txt", summary);
  } else {
    out << json;
  }
  return 0;
}

int cmd_lamination(int p, int q, const Rat& theta, Flavor flavor,
                   const SessionConfig& cfg, std::ostream& out, std::ostream& err) {
  if (q < 2 || p <= 0 || p >= q) {
    err << "usage error: need 0 < p < q with q >= 2\n";
    return 2;
  }
  auto [lo, hi] = characteristic_interval(p, q);
  Rat u = angle_mod1(theta);
  if (u < lo) u = u + Rat(1);
  if (u < lo || hi < u) {
    err << "usage error: theta " << rat_str(theta)
        << " lies outside the closed characteristic interval [" << rat_str(angle_mod1(lo))
        << ", " << rat_str(angle_mod1(hi)) << "] of " << p << "/" << q << "\n";
    return 2;
  }
  TreeTower tower = inverse_limit_truncation(p, q, angle_mod1(theta), flavor, cfg.level);
  out << lamination_json(p, q, angle_mod1(theta), flavor, tower);
  if (!cfg.out.empty()) {
    std::filesystem::create_directories(cfg.out);
    write_file(cfg.out, "lamination.json",
               lamination_json(p, q, angle_mod1(theta), flavor, tower));
    std::string classes;
    for (int l = 0; l <= cfg.level; ++l)
      classes += "level " + std::to_string(l) + "\n" +
                 dump_lamination(build_lamination(p, q, angle_mod1(theta), flavor, l));
    write_file(cfg.out, "classes.txt", classes);
    write_file(cfg.out, "tree.dot", dot_export(tower.trees[cfg.level]));
    write_file(cfg.out, "disk.svg", svg_export(tower.trees[cfg.level].geo));
  }
  return 0;
}

int cmd_conjugacy(const std::string& map_text, int p, const SessionConfig& cfg,
                  std::ostream& out, std::ostream& err) {
  RatMapL phi = parse_map(map_text, cfg.backend, Rat(cfg.prec));
  ClassificationReport rep = classify(phi, cfg.depth, cfg.horizon);
  if (rep.kind != CaseKind::OneRepelling && rep.kind != CaseKind::TwoRepelling) {
    err << "refused: the map classifies as " << case_name(rep.kind)
        << "; it has no repelling boundary orbit in hyperbolic space, so there"
           " is no level tower to conjugate\n";
    return 2;
  }
  JuliaTower tw = build_julia_tower(phi, rep, cfg.level, cfg.horizon);
  CollapsedTower ct = collapse(tw);
  ConjugacyReport cr = conjugacy_search(ct, p, rep.rivera.q);
  out << cr.summary << "\n";
  std::string json = conjugacy_json(map_text, rep.kind, cr);
  if (!cfg.out.empty()) {
    std::filesystem::create_directories(cfg.out);
    write_file(cfg.out, "conjugacy.json", json);
  } else {
    out << json;
  }
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"quadratic dynamics over the Puiseux field"};
  app.require_subcommand(1);

  SessionConfig cfg;
  std::string backend = "exact";
  app.add_option("--backend", backend, "exact or float")
      ->check(CLI::IsMember({"exact", "float"}));
  app.add_option("--prec", cfg.prec, "series precision (exponent cutoff)");
  app.add_option("--depth", cfg.depth, "classifier search depth");
  app.add_option("--horizon", cfg.horizon, "orbit horizon");
  app.add_option("--level", cfg.level, "tower / lamination depth");
  app.add_option("--out", cfg.out, "artifact output directory");

  std::string map_text, theta_text, flavor_text = "plus";
  int p = 1, q = 2;

  CLI::App* classify_cmd = app.add_subcommand("classify", "classify a map");
  classify_cmd->fallthrough();
  classify_cmd->add_option("map", map_text, "map expression in z and t")->required();

  CLI::App* lam_cmd = app.add_subcommand("lamination", "lamination tower and pictures");
  lam_cmd->fallthrough();
  lam_cmd->add_option("p", p, "rotation numerator")->required();
  lam_cmd->add_option("q", q, "rotation denominator")->required();
  lam_cmd->add_option("theta", theta_text, "angle num/den in the characteristic interval")
      ->required();
  lam_cmd->add_option("--flavor", flavor_text, "plus, minus or join")
      ->check(CLI::IsMember({"plus", "minus", "join"}));

  CLI::App* conj_cmd = app.add_subcommand("conjugacy", "finite-level conjugacy search");
  conj_cmd->fallthrough();
  conj_cmd->add_option("map", map_text, "map expression in z and t")->required();
  conj_cmd->add_option("--p", p, "rotation numerator (default 1)");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }
  cfg.backend = backend == "float" ? Backend::Float : Backend::Exact;

  try {
    if (classify_cmd->parsed()) return cmd_classify(map_text, cfg, out);
    if (lam_cmd->parsed()) {
      Flavor fl = flavor_text == "minus" ? Flavor::Minus
                  : flavor_text == "join" ? Flavor::Join
                                          : Flavor::Plus;
      return cmd_lamination(p, q, Rat::parse(theta_text), fl, cfg, out, err);
    }
    return cmd_conjugacy(map_text, p, cfg, out, err);
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace qdl
