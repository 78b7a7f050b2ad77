#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "outfn/graph.hpp"

namespace outfn {

// Raised when an iterate outgrows the configured edge budget.
struct BlowupError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kBlowup = 1000000;

struct GraphMap {
  std::shared_ptr<const MarkedGraph> dom, cod;
  std::vector<int> vmap;
  std::vector<Path> img;

  const Graph& G() const { return *dom; }
  const Graph& H() const { return *cod; }
  bool self() const { return dom == cod; }

  Path image(Dir d) const;
  Path map_path(const Path& p) const;
  Circuit map_circuit(const Circuit& c) const;
  Dir df(Dir d) const { return image(d).e.front(); }
  int map_vertex(int v) const { return vmap[v]; }

  // Throws StructuralError on incoherent or degenerate data.
  void validate() const;
  // Rose-level images of the generators (defined up to one common conjugation).
  std::vector<FWord> outer_class() const;
};

GraphMap identity_map(std::shared_ptr<const MarkedGraph> g);
GraphMap compose(const GraphMap& g, const GraphMap& f);  // g after f
GraphMap power(const GraphMap& f, int k);

// f^k_# applied to a path; throws BlowupError past the edge budget.
Path iterate(const GraphMap& f, Path p, int k, std::size_t budget = kBlowup);

bool is_legal_turn(const GraphMap& f, Dir a, Dir b);
// Illegal turns taken by a path (junction indices).
std::vector<std::size_t> illegal_turns(const GraphMap& f, const Path& p);

// Subpath of f_#(beta) that survives in f_#(gamma) for every path gamma
// containing beta. The cuts are exact: extensions may end inside edges.
struct DoubleSharp {
  Path path;
  Path image;                    // f_#(beta)
  std::size_t from = 0, to = 0;  // survivor occupies image[from, to)
  int bcc = 0;                   // recorded bound on either cut
};
DoubleSharp double_sharp(const GraphMap& f, const Path& beta, int bcc_value);
DoubleSharp double_sharp(const GraphMap& f, const Path& beta);

}  // namespace outfn
