#pragma once

#include "qdl/classifier.hpp"
#include "qdl/juliatree.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace qdl {

struct SessionConfig {
  Backend backend = Backend::Exact;
  int prec = 64;        // series precision (exponent cutoff)
  int depth = 32;       // classifier search depth
  int horizon = 64;     // orbit horizon for semi-decidable checks
  int level = 3;        // tower / lamination depth
  std::string out;      // artifact directory; empty = stdout only
};

/// Rational as "num/den", the denominator always spelled out.
std::string rat_str(const Rat& r);

std::string flavor_name(Flavor f);

/// Versioned, byte-deterministic JSON reports (schema "report/1").
std::string classification_json(const std::string& map_text,
                                const ClassificationReport& rep,
                                const SessionConfig& cfg);
std::string classification_summary(const ClassificationReport& rep);

std::string lamination_json(int p, int q, const Rat& theta, Flavor flavor,
                            const TreeTower& tower);

std::string conjugacy_json(const std::string& map_text, const CaseKind kind,
                           const ConjugacyReport& cr);

/// The command-line front end, callable in-process; returns the exit code.
/// Subcommands: classify, lamination, conjugacy.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace qdl
