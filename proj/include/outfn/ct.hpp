#pragma once

#include <optional>
#include <string>
#include <vector>

#include "outfn/folds.hpp"
#include "outfn/nielsen.hpp"
#include "outfn/strata.hpp"

namespace outfn {

enum class Verdict { pass, fail, inconclusive };
std::string to_string(Verdict v);

struct Check {
  Verdict verdict = Verdict::pass;
  std::vector<std::string> witnesses;
  std::vector<std::string> notes;

  void fail(std::string w) {
    verdict = Verdict::fail;
    witnesses.push_back(std::move(w));
  }
  void unsure(std::string n) {
    if (verdict == Verdict::pass) verdict = Verdict::inconclusive;
    notes.push_back(std::move(n));
  }
  bool ok() const { return verdict == Verdict::pass; }
};

struct RttReport {
  int height = 0;
  Check i, ii, iii;
  bool ok() const { return i.ok() && ii.ok() && iii.ok(); }
};

// One report per EG stratum.
std::vector<RttReport> verify_rtt(const GraphMap& f, const Filtration& filt);

enum class TermKind { edge, nielsen, exceptional, zero_path };
std::string to_string(TermKind k);

struct SplittingTerm {
  TermKind kind = TermKind::edge;
  Path path;
  int height = 0;
};

// Exceptional paths and taken zero-stratum paths, derived once per map.
struct SplitContext {
  const GraphMap* f = nullptr;
  const Filtration* filt = nullptr;
  const NielsenCatalog* catalog = nullptr;
  std::vector<StratumReport> strata;
  // Linear edges oriented so that f(E) = E w^d, with w root-free.
  struct Linear {
    Dir edge;
    Path w;
    int d = 0;
  };
  std::vector<Linear> linear;
  std::vector<std::vector<Dir>> taken;  // both orientations
  int taken_depth = 0;

  SplitContext(const GraphMap& f, const Filtration& filt, const NielsenCatalog& cat, int taken_depth = 6);
  bool is_taken(const std::vector<Dir>& w) const;
};

struct SplitResult {
  bool ok = false;
  std::vector<SplittingTerm> terms;
  std::size_t obstruction = 0;  // furthest position reached on failure
};

SplitResult complete_splitting(const SplitContext& ctx, const Path& sigma);
// Terms of a circuit read from some junction; the first term starts there.
SplitResult complete_splitting(const SplitContext& ctx, const Circuit& c);

// f^i_#(sigma) is the concatenation of the f^i_#(terms) with no cancellation
// at junctions, for 1 <= i <= iterations.
bool verify_splitting(const GraphMap& f, const std::vector<SplittingTerm>& terms, int iterations = 5);

struct IterateSplit {
  std::optional<int> k;  // nothing past kmax
  Path image;
  SplitResult split;
};
IterateSplit iterate_until_split(const SplitContext& ctx, const Path& sigma, int kmax);

struct PrincipalVertex {
  int vertex = 0;
  bool periodic = false;
  bool principal = false;
  std::vector<Dir> periodic_dirs;
  std::string reason;
};
std::vector<PrincipalVertex> principal_vertices(const GraphMap& f, const Filtration& filt,
                                                const NielsenCatalog& cat);
// Non-fixed oriented edges with fixed initial direction at a principal vertex.
std::vector<Dir> principal_directions(const GraphMap& f, const std::vector<PrincipalVertex>& pv);

// Terminal map of a state is a homeomorphism onto the subgraph `target`.
bool is_homeomorphism_onto(const MapState& s, const Graph& cod, const std::vector<int>& target);

struct CtReport {
  std::vector<RttReport> rtt;
  Check rotationless, completely_split, filtration, vertices, periodic_edges, zero_strata, linear_edges,
      neg_nielsen, eg_nielsen;
  std::vector<PrincipalVertex> principal;
  std::vector<Dir> principal_dirs;

  std::vector<std::pair<std::string, const Check*>> axioms() const;
  bool is_rtt() const;
  bool is_ct() const;
  bool conclusive() const;
};

struct CtOptions {
  std::size_t length_cap = 0;  // 0: default_length_cap
  int period_cap = kDefaultPeriodCap;
  int kmax = 6;
  int fold_budget = 64;
};

CtReport verify_ct(const GraphMap& f, const Filtration& filt, const NielsenCatalog& cat, const CtOptions& opt = {});
CtReport verify_ct(const GraphMap& f, const Filtration& filt, const CtOptions& opt = {});

}  // namespace outfn
