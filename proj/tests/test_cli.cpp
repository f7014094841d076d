#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "qdl/report.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace qdl;

namespace {

struct RunResult {
  int code;
  std::string out, err;
};

RunResult run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

}  // namespace

TEST_CASE("classify: indifferent example names the Gauss point") {
  RunResult r = run({"classify", "z + 1 + t/z"});
  CHECK(r.code == 0);
  CHECK(r.out.find("IndifferentOrbit") != std::string::npos);
  CHECK(r.out.find("x_{0, 0}") != std::string::npos);
  CHECK(r.err.empty());
}

TEST_CASE("classify: the squaring map is the simple case") {
  RunResult r = run({"classify", "z^2"});
  CHECK(r.code == 0);
  CHECK(r.out.find("\"case\": \"Simple\"") != std::string::npos);
}

TEST_CASE("classify: repelling example prints the tangent map") {
  // "--" keeps the leading minus of the map text out of option parsing
  RunResult r = run({"classify", "--", "-t - (1+t^2)/z + t/z^2"});
  CHECK(r.code == 0);
  CHECK(r.out.find("OneRepelling") != std::string::npos);
  CHECK(r.out.find("tangent return map") != std::string::npos);
  CHECK(r.out.find("\"tangent_map\"") != std::string::npos);
}

TEST_CASE("reports are byte-deterministic and keep rationals exact") {
  RunResult a = run({"classify", "z + 1 + t/z"});
  RunResult b = run({"classify", "z + 1 + t/z"});
  CHECK(a.out == b.out);
  CHECK(a.out.find("\"precision\": \"64/1\"") != std::string::npos);
  // no floating-point literals leak into the exact report
  CHECK(a.out.find("e-") == std::string::npos);
}

TEST_CASE("lamination: artifacts land in the output directory") {
  auto dir = std::filesystem::temp_directory_path() / "qdl_cli_lam";
  std::filesystem::remove_all(dir);
  RunResult r = run({"lamination", "1", "3", "2/7", "--level", "2", "--out", dir.string()});
  CHECK(r.code == 0);
  CHECK(r.out.find("\"command\": \"lamination\"") != std::string::npos);
  for (const char* f : {"lamination.json", "classes.txt", "tree.dot", "disk.svg"})
    CHECK(std::filesystem::exists(dir / f));
  CHECK(slurp(dir / "disk.svg").find("<svg") != std::string::npos);
  CHECK(slurp(dir / "tree.dot").find("graph") != std::string::npos);
}

TEST_CASE("lamination: the level-0 tree is starlike") {
  auto dir = std::filesystem::temp_directory_path() / "qdl_cli_lam0";
  std::filesystem::remove_all(dir);
  RunResult r = run({"lamination", "1", "3", "2/7", "--level", "0", "--out", dir.string()});
  CHECK(r.code == 0);
  std::string dot = slurp(dir / "tree.dot");
  size_t edges = 0;
  for (size_t at = dot.find("--"); at != std::string::npos; at = dot.find("--", at + 2))
    ++edges;
  CHECK(edges == 3);
}

TEST_CASE("lamination: an angle outside the interval is a usage error") {
  RunResult r = run({"lamination", "1", "3", "1/9", "--level", "1"});
  CHECK(r.code == 2);
  CHECK(r.err.find("usage error") != std::string::npos);
  CHECK(r.err.find("1/7") != std::string::npos);
}

TEST_CASE("conjugacy: refuses maps without a repelling boundary orbit") {
  RunResult r = run({"conjugacy", "z + 1 + t/z", "--level", "1"});
  CHECK(r.code == 2);
  CHECK(r.err.find("refused") != std::string::npos);
  CHECK(r.err.find("IndifferentOrbit") != std::string::npos);
}

TEST_CASE("conjugacy: level zero yields the base isomorphism only") {
  RunResult r = run({"conjugacy", "t - (1 + t^2)/z + t/z^2", "--level", "0"});
  CHECK(r.code == 0);
  CHECK(r.out.find("verified through level 0") != std::string::npos);
  CHECK(r.out.find("\"case\": \"TwoRepelling\"") != std::string::npos);
}

TEST_CASE("bad input is reported with a position") {
  RunResult r = run({"classify", "z + "});
  CHECK(r.code == 2);
  CHECK(r.err.find("parse error") != std::string::npos);
  CHECK(r.err.find("position") != std::string::npos);

  RunResult s = run({});
  CHECK(s.code != 0);
}
