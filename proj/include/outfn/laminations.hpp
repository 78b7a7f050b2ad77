#pragma once

#include <optional>
#include <string>
#include <vector>

#include "outfn/ct.hpp"

namespace outfn {

struct Tile {
  Dir edge;
  int k = 0;
  Path path;  // f^k_#(edge)
};
Tile tile(const GraphMap& f, Dir edge, int k);
// Tiles of every oriented edge of H_r.
std::vector<Tile> tiles(const GraphMap& f, const Filtration& filt, int r, int k);

// Least p with m^p positive; nothing when m is not primitive.
std::optional<int> positivity_exponent(const IMatrix& m);
// Every (k+p)-tile of height r contains every k-tile, in some orientation.
bool tiles_nest(const GraphMap& f, const Filtration& filt, int r, int k, int p);

struct NonattractingSystem {
  int stratum = 0;
  std::vector<int> Z;  // sorted edge ids
  Path rho_hat;        // trivial at a vertex of H_r when there is no iNp
  int rho_period = 1;
  Immersion K;
  int rho_from = -1, rho_to = -1;  // K vertices at the ends of the rho edge

  struct Component {
    std::vector<int> vertices;
    int edges = 0;
    int rank = 0;
    bool contractible = true;
  };
  std::vector<Component> components;    // of K
  std::vector<Component> z_components;  // of Z
  std::vector<int> excluded;            // strata known to be attracted
  std::vector<int> cap_bounded;         // strata kept in Z because kmax ran out
  std::vector<int> undecided;           // strata the splitting engine could not settle
  std::vector<std::string> notes;

  bool conclusive() const { return undecided.empty(); }
  bool in_Z(int edge) const;
  bool attracted_edge(int edge, const Filtration& filt) const;
};

NonattractingSystem build_nonattracting(const SplitContext& ctx, int r, int kmax = 20);

// Concatenation of Z edges and copies of rho_hat or its inverse.
bool in_groupoid(const NonattractingSystem& ns, const Graph& g, const Path& p);
bool in_groupoid(const NonattractingSystem& ns, const Graph& g, const Circuit& c);

enum class Attraction { attracted, not_attracted, inconclusive };
std::string to_string(Attraction a);

struct AttractionResult {
  Attraction verdict = Attraction::inconclusive;
  int k = -1;  // iterate that decided it
  std::string witness;
};
AttractionResult weak_attraction_test(const SplitContext& ctx, const NonattractingSystem& ns, const Circuit& c,
                                      int kmax = 20);

enum class CertVerdict { certified, not_certified, inconclusive };
std::string to_string(CertVerdict v);

struct CertOptions {
  int max_power = 6;
  int kmax = 20;
  CtOptions ct;
};
struct FullIrreducibility {
  CertVerdict verdict = CertVerdict::inconclusive;
  int power = 0;  // power whose CT passed
  std::vector<std::string> reasons;
};
FullIrreducibility full_irreducibility_certificate(const GraphMap& f, const Filtration& filt,
                                                   const NonattractingSystem& ns, const CertOptions& opt = {});

struct Inclusion {
  bool included = false;
  int k = -1;
  Dir edge;
  std::string witness;
  std::vector<std::string> notes;
};
// Lambda_r inside Lambda_s, decided by splitting terms of f^k_#(E), E in H_s.
Inclusion lamination_inclusion(const SplitContext& ctx, int r, int s, int kmax);

struct SingularRay {
  Dir edge;
  int depth = 0;
  Path prefix;                      // f^depth_#(edge)
  std::vector<std::size_t> lengths; // |f^i_#(edge)| for i <= depth
  bool nested = true;               // each iterate a proper initial segment of the next
};
std::vector<SingularRay> singular_rays(const GraphMap& f, const Filtration& filt, const NielsenCatalog& cat,
                                       int depth);

struct SingularLine {
  std::size_t left = 0, right = 0;  // rays R and R' of the line R^-1 alpha R'
  Path alpha;                       // trivial or a Nielsen path
  Path window;
};
struct SingularLines {
  bool refused = false;
  std::string witness;  // a periodic circuit when refused
  std::vector<SingularRay> rays;
  std::vector<SingularLine> lines;
  std::vector<std::string> notes;
};
// Probes circuits up to 2|E| for a periodic class first unless waived.
SingularLines singular_lines(const GraphMap& f, const Filtration& filt, const NielsenCatalog& cat, int depth,
                             bool require_no_periodic_class = true);
// A periodic circuit of length <= max_len and period <= period_cap, if any.
std::optional<Circuit> periodic_circuit(const GraphMap& f, std::size_t max_len, int period_cap = kDefaultPeriodCap);

// h = identity on Z and f on H_r, for G = Z u H_r with a closed iNp rho.
struct TopStratumModel {
  GraphMap h;
  Filtration filt;
  std::vector<int> H;
  Path rho;
  IMatrix M;
  PF pf;
};
TopStratumModel top_stratum_model(const GraphMap& f, const Filtration& filt, const NonattractingSystem& ns);

struct TranslationLength {
  bool ok = false;
  int K = 0;
  double value = 0;
  std::vector<long long> counts;  // H edges among the terms other than rho copies
  int rho_terms = 0;
  std::vector<std::string> terms;
  std::string reason;
};
// Needs h^K_#(sigma) to split into edges and copies of rho^{+-1}.
TranslationLength translation_length_limit(const TopStratumModel& m, const Circuit& sigma, int K);
// Smallest admissible K up to kmax.
TranslationLength translation_length_limit_search(const TopStratumModel& m, const Circuit& sigma, int kmax = 20);
// Exact check counts(b) = counts(a) M^(b.K - a.K).
bool k_stable(const TopStratumModel& m, const TranslationLength& a, const TranslationLength& b);

}  // namespace outfn
