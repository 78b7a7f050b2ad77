#pragma once

#include <optional>
#include <string>
#include <vector>

#include "outfn/graph_map.hpp"

namespace outfn {

using IMatrix = std::vector<std::vector<long long>>;

// Strata listed bottom first; heights are 1-based.
struct Filtration {
  std::vector<std::vector<int>> strata;
  std::vector<int> height_of;  // edge -> height

  int size() const { return static_cast<int>(strata.size()); }
  const std::vector<int>& stratum(int r) const { return strata[r - 1]; }
  // Edges of G_r.
  std::vector<int> prefix(int r) const;
  int height(Dir d) const { return height_of[d.edge]; }
  int height(const Path& p) const;
};

// Maximal refinement into irreducible and zero strata, ordered so that f
// preserves every G_r.
Filtration compute_filtration(const GraphMap& f);
// A declared filtration, checked for invariance and for strata that are
// irreducible or zero. Throws StructuralError.
Filtration declared_filtration(const GraphMap& f, const std::vector<std::vector<int>>& strata);

IMatrix transition_matrix(const GraphMap& f, const std::vector<int>& edges);
bool is_irreducible(const IMatrix& m);
bool is_zero(const IMatrix& m);
bool is_permutation(const IMatrix& m);
// Gcd of cycle lengths of an irreducible matrix.
int period(const IMatrix& m);

struct PF {
  double lambda = 1;
  double lower = 1, upper = 1;  // Collatz-Wielandt bracket
  std::vector<double> vec;      // M v = lambda v, unit sum
  int iterations = 0;
};
// Throws StructuralError on a reducible matrix.
PF pf(const IMatrix& m, double tol = 1e-12);

enum class StratumKind { eg, neg_fixed, neg_nonfixed, neg_linear, zero };
std::string to_string(StratumKind k);

// f(E) = E' . u with E' the next edge of the stratum, u of lower height.
struct NegEdge {
  Dir edge;
  Path u;
};

struct StratumReport {
  int height = 0;
  std::vector<int> edges;
  StratumKind kind = StratumKind::zero;
  IMatrix matrix;
  bool irreducible = false;
  std::optional<PF> pf;
  int period = 0;
  bool aperiodic = false;
  bool periodic = false;           // NEG with every u trivial
  bool needs_subdivision = false;  // NEG without a normal form before subdividing
  std::vector<NegEdge> neg;
  int enveloped_by = 0;  // zero strata: height of the enveloping EG stratum
};

std::vector<StratumReport> classify_strata(const GraphMap& f, const Filtration& filt, int nielsen_cap = 12);

// Orients and orders the edges of a NEG stratum so that f(E_i) = E_{i+1} u_i.
std::optional<std::vector<NegEdge>> neg_normal_form(const GraphMap& f, const Filtration& filt, int r);

// Subdivides each edge of the NEG stratum r into two, after which every new
// edge, suitably oriented, has image beginning with an edge of its stratum.
struct NegSubdivision {
  GraphMap map;
  Filtration filt;
  std::vector<int> new_strata;  // heights of the strata replacing r
};
NegSubdivision subdivide_neg(const GraphMap& f, const Filtration& filt, int r);

// Smallest k <= cap with f^k_#(p) = p, or nothing (also on blowup).
std::optional<int> nielsen_period(const GraphMap& f, const Path& p, int cap);

}  // namespace outfn
