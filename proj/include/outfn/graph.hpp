#pragma once

#include <compare>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "outfn/free_group.hpp"

namespace outfn {

struct StructuralError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An oriented edge; as a direction it is based at its initial vertex.
struct Dir {
  int edge = -1;
  bool rev = false;
  auto operator<=>(const Dir&) const = default;
};

inline Dir bar(Dir d) { return {d.edge, !d.rev}; }

struct Graph {
  std::vector<std::string> vnames;
  std::vector<std::string> enames;
  std::vector<int> src, dst;

  int add_vertex(const std::string& name);
  int add_edge(const std::string& name, int from, int to);

  int nv() const { return static_cast<int>(vnames.size()); }
  int ne() const { return static_cast<int>(enames.size()); }
  int init(Dir d) const { return d.rev ? dst[d.edge] : src[d.edge]; }
  int term(Dir d) const { return d.rev ? src[d.edge] : dst[d.edge]; }

  std::optional<int> find_vertex(const std::string& name) const;
  std::optional<int> find_edge(const std::string& name) const;

  // Directions at v in (edge, rev) order.
  std::vector<Dir> directions_at(int v) const;
  int valence(int v) const { return static_cast<int>(directions_at(v).size()); }
  bool connected() const;

  std::string dir_name(Dir d) const;

 private:
  std::map<std::string, int> vindex_, eindex_;
};

// A reduced edge path. Trivial paths keep their basepoint.
struct Path {
  int base = -1;
  std::vector<Dir> e;

  bool trivial() const { return e.empty(); }
  std::size_t size() const { return e.size(); }
  bool operator==(const Path& o) const {
    return e == o.e && (!e.empty() || base == o.base);
  }
};

int path_start(const Graph& g, const Path& p);
int path_end(const Graph& g, const Path& p);
Path reverse(const Graph& g, const Path& p);
Path single(const Graph& g, Dir d);
Path trivial_at(int v);

// Free reduction of a composable word; throws StructuralError otherwise.
Path tighten(const Graph& g, const std::vector<Dir>& word, int base = -1);
Path concat(const Graph& g, const Path& p, const Path& q);
bool composable(const Graph& g, const std::vector<Dir>& word);
bool is_reduced(const std::vector<Dir>& word);
Path subpath(const Graph& g, const Path& p, std::size_t from, std::size_t to);
std::optional<std::size_t> find_subpath(const Path& hay, const Path& needle, std::size_t from = 0);
// Size of cancellation when tightening p·q.
std::size_t cancellation(const Path& p, const Path& q);

struct Circuit {
  std::vector<Dir> e;
  bool operator==(const Circuit&) const = default;
};

// Cyclically reduced representative in canonical rotation.
Circuit cyclic_tighten(const Graph& g, const std::vector<Dir>& word);
Circuit canonical_rotation(std::vector<Dir> e);
Circuit reverse(const Circuit& c);
// The circuit read as a closed path starting at position i.
Path as_path(const Graph& g, const Circuit& c, std::size_t i = 0);

std::string to_string(const Graph& g, const std::vector<Dir>& w);
std::string to_string(const Graph& g, const Path& p);
std::string to_string(const Graph& g, const Circuit& c);
// Parses "a b^-1 c" (whitespace separated) into oriented edges.
std::vector<Dir> parse_word(const Graph& g, const std::string& text);

struct MarkedGraph : Graph {
  int rank = 0;
  int basepoint = 0;
  std::vector<std::string> gens;
  std::vector<Path> marking;       // rose generator -> loop at basepoint
  std::vector<FWord> inverse;      // edge -> rose word

  // Fills in the marking (if absent) and its homotopy inverse, then checks
  // the structural invariants. Throws StructuralError.
  void finalize();
  FWord to_rose(const std::vector<Dir>& w) const;
  Path from_rose(const FWord& w) const;
};

// A subgraph given by an edge set.
struct CoreSubgraph {
  std::vector<int> edges;
  struct Component {
    std::vector<int> edges;
    std::vector<int> vertices;
    bool contractible = false;
  };
  std::vector<Component> components(const Graph& g) const;
  bool is_core(const Graph& g) const;
  std::vector<int> vertices(const Graph& g) const;
  bool contains_vertex(const Graph& g, int v) const;
};

// Core of an edge set: repeatedly strip valence-1 vertices.
std::vector<int> core_edges(const Graph& g, std::vector<int> edges);

// A graph with an edge-to-edge map into an ambient graph.
struct Immersion {
  int nv = 0;
  std::vector<int> vimg;
  struct E {
    int from, to;
    Dir img;
  };
  std::vector<E> edges;
  std::vector<bool> original;  // per vertex: not an interior subdivision point

  int add_vertex(int img, bool orig = true);
  void add_edge(int from, int to, Dir img);
  // Adds a subdivided arc realising path p between vertices a and b.
  void add_path(const Graph& g, int a, int b, const Path& p);

  static Immersion from_subgraph(const Graph& g, const std::vector<int>& edges);
  // Stallings graph of loops at a basepoint of g.
  static Immersion from_loops(const Graph& g, int base, const std::vector<Path>& loops);

  void fold(const Graph& g);
  bool is_immersion(const Graph& g) const;
  // Unique lift of p starting at vertex s; the end vertex or nothing.
  std::optional<int> lift(const Graph& g, int s, const std::vector<Dir>& p) const;
  bool carries(const Graph& g, const Circuit& c) const;
  int rank_of_component_containing(int v) const;
  std::vector<std::vector<int>> component_vertices() const;
};

bool carries_class(const Graph& g, const Immersion& sub, const Circuit& c);

}  // namespace outfn
