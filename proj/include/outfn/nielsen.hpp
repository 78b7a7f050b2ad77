#pragma once

#include <optional>
#include <string>
#include <vector>

#include "outfn/strata.hpp"

namespace outfn {

enum class NielsenKind { fixed_edge, periodic_edge, eg, neg_linear, exceptional };
std::string to_string(NielsenKind k);

struct NielsenPath {
  Path path;
  int period = 1;
  int height = 0;
  NielsenKind kind = NielsenKind::fixed_edge;
  bool indivisible = true;
  bool closed = false;
  std::size_t split = 0;  // EG height: path = path[0, split) . path[split, end) at the illegal turn
};

struct NielsenCatalog {
  std::vector<NielsenPath> paths;  // one orientation per {rho, rho^-1}, sorted
  std::size_t length_cap = 0;
  int period_cap = 0;
  // Per height: true when caps may have cut the search short.
  std::vector<bool> inconclusive;
  std::vector<std::string> notes;

  std::vector<NielsenPath> at_height(int r) const;
  bool conclusive(int r) const { return r >= 1 && r <= static_cast<int>(inconclusive.size()) && !inconclusive[r - 1]; }
  // The entry equal to p or its reverse.
  std::optional<NielsenPath> find(const Graph& g, const Path& p) const;
};

std::size_t default_length_cap(const GraphMap& f);
inline constexpr int kDefaultPeriodCap = 4;

// Indivisible periodic Nielsen paths of height r with endpoints at vertices.
NielsenCatalog nielsen_search(const GraphMap& f, const Filtration& filt, int r, std::size_t length_cap,
                              int period_cap = kDefaultPeriodCap);
// Every height.
NielsenCatalog nielsen_catalog(const GraphMap& f, const Filtration& filt, std::size_t length_cap,
                              int period_cap = kDefaultPeriodCap);

// Shortest closed w with u = w^n, and n.
std::pair<Path, int> path_root(const Graph& g, const Path& u);

// No split at an interior vertex into two periodic Nielsen paths of period <= cap.
bool is_indivisible(const GraphMap& f, const Path& p, int period_cap);
// r-legal: height <= r and every height-r turn taken is legal.
bool is_r_legal(const GraphMap& f, const Filtration& filt, int r, const Path& p);

struct UniquenessCheck {
  bool ok = true;
  std::vector<Path> witnesses;
};
UniquenessCheck eg_uniqueness_check(const NielsenCatalog& cat, int r);

enum class Geometry { geometric, nongeometric, no_inp, inconclusive };
std::string to_string(Geometry g);
Geometry classify_geometry(const GraphMap& f, const Filtration& filt, int r, const NielsenCatalog& cat);

}  // namespace outfn
