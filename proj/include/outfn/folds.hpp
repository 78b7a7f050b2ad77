#pragma once

#include <string>
#include <vector>

#include "outfn/graph_map.hpp"

namespace outfn {

enum class FoldClass { partial, full_improper, full_proper };
std::string to_string(FoldClass c);

// A graph together with a map into a fixed codomain.
struct MapState {
  Graph g;
  std::vector<int> vimg;
  std::vector<Path> img;
  std::vector<int> height;  // optional per-edge tag carried through folds
};

struct FoldStep {
  Dir e1, e2;                 // the folded turn, in `before`
  std::size_t segment = 0;    // image length of the identified segments
  FoldClass cls = FoldClass::partial;
  int over = -1, under = -1;  // proper fold: edge `over` folds properly over `under`
  MapState before, after;
  std::vector<Path> quotient;  // before edges -> paths in after.g
};

struct FoldError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Factorization {
  std::vector<FoldStep> steps;
  MapState terminal;
  std::vector<Path> to_terminal;  // original edges -> paths in terminal.g
  bool isomorphism = false;       // terminal immersion is a graph isomorphism up to subdivision
  int bcc = 0;
  std::vector<Path> recompose(const Graph& cod) const;
};

// Folds until the remaining map is an immersion. Throws FoldError with the
// partial factorization when the step budget runs out.
Factorization stallings_factorize(const MapState& start, const Graph& cod, int budget = 100000);
Factorization stallings_factorize(const GraphMap& f, int budget = 100000);

MapState state_of(const GraphMap& f);
// The fold of a turn with degenerate image; throws FoldError("not foldable").
FoldStep fold_turn(const MapState& s, const Graph& cod, Dir e1, Dir e2);
FoldStep classify_fold(const GraphMap& f, Dir e1, Dir e2);
bool is_immersion(const MapState& s, const Graph& cod);

// Bounded cancellation constant: the smaller of the fold-sum bound and the
// fiber bound.
int bcc(const GraphMap& f);
// Largest height reached at a domain vertex by the image of a path joining
// two points of one fiber of the universal cover map. A sound cancellation
// bound for homotopy equivalences; -1 when the subdivided domain has more
// than max_points points.
int fiber_bcc(const GraphMap& f, std::size_t max_points = 4000);
// Largest cancellation into the start of f_#(beta) from f_#(eps) over all
// paths eps with eps.beta a path; eps may end inside an edge.
std::size_t max_left_cancellation(const GraphMap& f, const Path& beta);
bool is_homotopy_equivalence(const GraphMap& f);

// Generalized fold: identifies the initial subpath of `edge` whose image is
// f_#(sigma) with the path sigma, which must avoid the interior of `edge`.
struct GeneralizedFold {
  MapState after;                // map K -> codomain
  std::vector<Path> quotient;    // old edges -> paths in K
  int remnant = -1;              // the surviving piece of `edge` in K
};
GeneralizedFold generalized_fold(const MapState& s, const Graph& cod, Dir edge, const Path& sigma);

}  // namespace outfn
