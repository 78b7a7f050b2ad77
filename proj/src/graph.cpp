#include "outfn/graph.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <queue>
#include <set>
#include <sstream>

namespace outfn {

int Graph::add_vertex(const std::string& name) {
  if (vindex_.count(name)) throw StructuralError("duplicate vertex " + name);
  vindex_[name] = nv();
  vnames.push_back(name);
  return nv() - 1;
}

int Graph::add_edge(const std::string& name, int from, int to) {
  if (eindex_.count(name)) throw StructuralError("duplicate edge " + name);
  if (from < 0 || from >= nv() || to < 0 || to >= nv())
    throw StructuralError("edge " + name + " has an unknown endpoint");
  eindex_[name] = ne();
  enames.push_back(name);
  src.push_back(from);
  dst.push_back(to);
  return ne() - 1;
}

std::optional<int> Graph::find_vertex(const std::string& name) const {
  auto it = vindex_.find(name);
  if (it == vindex_.end()) return std::nullopt;
  return it->second;
}

std::optional<int> Graph::find_edge(const std::string& name) const {
  auto it = eindex_.find(name);
  if (it == eindex_.end()) return std::nullopt;
  return it->second;
}

std::vector<Dir> Graph::directions_at(int v) const {
  std::vector<Dir> out;
  for (int e = 0; e < ne(); ++e) {
    if (src[e] == v) out.push_back({e, false});
    if (dst[e] == v) out.push_back({e, true});
  }
  return out;
}

bool Graph::connected() const {
  if (nv() == 0) return false;
  std::vector<int> parent(nv());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
  for (int e = 0; e < ne(); ++e) parent[find(src[e])] = find(dst[e]);
  for (int v = 1; v < nv(); ++v)
    if (find(v) != find(0)) return false;
  return true;
}

std::string Graph::dir_name(Dir d) const { return enames[d.edge] + (d.rev ? "^-1" : ""); }

int path_start(const Graph& g, const Path& p) { return p.e.empty() ? p.base : g.init(p.e.front()); }
int path_end(const Graph& g, const Path& p) { return p.e.empty() ? p.base : g.term(p.e.back()); }

Path reverse(const Graph& g, const Path& p) {
  Path r;
  r.base = path_end(g, p);
  for (auto it = p.e.rbegin(); it != p.e.rend(); ++it) r.e.push_back(bar(*it));
  return r;
}

Path single(const Graph& g, Dir d) { return Path{g.init(d), {d}}; }
Path trivial_at(int v) { return Path{v, {}}; }

bool composable(const Graph& g, const std::vector<Dir>& word) {
  for (std::size_t i = 0; i + 1 < word.size(); ++i)
    if (g.term(word[i]) != g.init(word[i + 1])) return false;
  return true;
}

bool is_reduced(const std::vector<Dir>& word) {
  for (std::size_t i = 0; i + 1 < word.size(); ++i)
    if (word[i + 1] == bar(word[i])) return false;
  return true;
}

Path tighten(const Graph& g, const std::vector<Dir>& word, int base) {
  if (!composable(g, word)) throw StructuralError("non-composable edge sequence");
  Path p;
  p.base = word.empty() ? base : g.init(word.front());
  for (Dir d : word) {
    if (!p.e.empty() && p.e.back() == bar(d))
      p.e.pop_back();
    else
      p.e.push_back(d);
  }
  if (!p.e.empty()) p.base = g.init(p.e.front());
  return p;
}

Path concat(const Graph& g, const Path& p, const Path& q) {
  if (path_end(g, p) != path_start(g, q)) throw StructuralError("concatenating paths with mismatched endpoints");
  std::vector<Dir> w = p.e;
  w.insert(w.end(), q.e.begin(), q.e.end());
  return tighten(g, w, path_start(g, p));
}

Path subpath(const Graph& g, const Path& p, std::size_t from, std::size_t to) {
  Path s;
  if (from >= to) {
    s.base = from == 0 ? path_start(g, p) : g.term(p.e[from - 1]);
    return s;
  }
  s.e.assign(p.e.begin() + from, p.e.begin() + to);
  s.base = g.init(s.e.front());
  return s;
}

std::optional<std::size_t> find_subpath(const Path& hay, const Path& needle, std::size_t from) {
  if (needle.e.empty() || needle.e.size() > hay.e.size()) return std::nullopt;
  auto it = std::search(hay.e.begin() + std::min(from, hay.e.size()), hay.e.end(), needle.e.begin(), needle.e.end());
  if (it == hay.e.end()) return std::nullopt;
  return static_cast<std::size_t>(it - hay.e.begin());
}

std::size_t cancellation(const Path& p, const Path& q) {
  std::size_t c = 0;
  while (c < p.e.size() && c < q.e.size() && q.e[c] == bar(p.e[p.e.size() - 1 - c])) ++c;
  return c;
}

Circuit canonical_rotation(std::vector<Dir> e) {
  if (e.empty()) return {};
  std::vector<Dir> best = e;
  for (std::size_t i = 1; i < e.size(); ++i) {
    std::rotate(e.begin(), e.begin() + 1, e.end());
    if (e < best) best = e;
  }
  return Circuit{best};
}

Circuit cyclic_tighten(const Graph& g, const std::vector<Dir>& word) {
  Path p = tighten(g, word);
  if (p.trivial()) throw StructuralError("trivial class");
  if (path_start(g, p) != path_end(g, p)) throw StructuralError("word is not closed");
  std::size_t i = 0, j = p.e.size();
  while (j - i >= 2 && p.e[i] == bar(p.e[j - 1])) {
    ++i;
    --j;
  }
  return canonical_rotation(std::vector<Dir>(p.e.begin() + i, p.e.begin() + j));
}

Circuit reverse(const Circuit& c) {
  std::vector<Dir> r;
  for (auto it = c.e.rbegin(); it != c.e.rend(); ++it) r.push_back(bar(*it));
  return canonical_rotation(r);
}

Path as_path(const Graph& g, const Circuit& c, std::size_t i) {
  Path p;
  for (std::size_t k = 0; k < c.e.size(); ++k) p.e.push_back(c.e[(i + k) % c.e.size()]);
  p.base = p.e.empty() ? -1 : g.init(p.e.front());
  return p;
}

std::string to_string(const Graph& g, const std::vector<Dir>& w) {
  std::string s;
  for (Dir d : w) {
    if (!s.empty()) s += ' ';
    s += g.dir_name(d);
  }
  return s;
}

std::string to_string(const Graph& g, const Path& p) {
  if (p.trivial()) return "(" + (p.base >= 0 ? g.vnames[p.base] : std::string("?")) + ")";
  return to_string(g, p.e);
}

std::string to_string(const Graph& g, const Circuit& c) { return "[" + to_string(g, c.e) + "]"; }

std::vector<Dir> parse_word(const Graph& g, const std::string& text) {
  std::istringstream in(text);
  std::vector<Dir> w;
  std::string tok;
  while (in >> tok) {
    bool rev = false;
    if (tok.size() > 3 && tok.compare(tok.size() - 3, 3, "^-1") == 0) {
      rev = true;
      tok.resize(tok.size() - 3);
    }
    auto e = g.find_edge(tok);
    if (!e) throw StructuralError("unknown edge " + tok);
    w.push_back({*e, rev});
  }
  return w;
}

namespace {

// BFS spanning tree from root: parent direction into each vertex.
std::vector<std::optional<Dir>> spanning_tree(const Graph& g, int root, std::vector<bool>& in_tree) {
  std::vector<std::optional<Dir>> into(g.nv());
  std::vector<bool> seen(g.nv(), false);
  in_tree.assign(g.ne(), false);
  std::queue<int> q;
  q.push(root);
  seen[root] = true;
  while (!q.empty()) {
    int v = q.front();
    q.pop();
    for (Dir d : g.directions_at(v)) {
      int w = g.term(d);
      if (seen[w]) continue;
      seen[w] = true;
      into[w] = d;
      in_tree[d.edge] = true;
      q.push(w);
    }
  }
  return into;
}

std::vector<Dir> tree_path(const Graph& g, const std::vector<std::optional<Dir>>& into, int root, int v) {
  std::vector<Dir> w;
  while (v != root) {
    Dir d = *into[v];
    w.push_back(d);
    v = g.init(d);
  }
  std::reverse(w.begin(), w.end());
  return w;
}

}  // namespace

void MarkedGraph::finalize() {
  if (!connected()) throw StructuralError("graph is not connected");
  for (int v = 0; v < nv(); ++v)
    if (valence(v) == 1) throw StructuralError("vertex " + vnames[v] + " has valence 1");
  rank = ne() - nv() + 1;
  if (rank < 1) throw StructuralError("graph has rank 0");

  if (marking.empty()) {
    std::vector<bool> in_tree;
    auto into = spanning_tree(*this, basepoint, in_tree);
    gens.clear();
    for (int e = 0; e < ne(); ++e) {
      if (in_tree[e]) continue;
      std::vector<Dir> w = tree_path(*this, into, basepoint, src[e]);
      w.push_back({e, false});
      Path back = reverse(*this, Path{basepoint, tree_path(*this, into, basepoint, dst[e])});
      w.insert(w.end(), back.e.begin(), back.e.end());
      gens.push_back(enames[e]);
      marking.push_back(tighten(*this, w, basepoint));
    }
  } else {
    basepoint = path_start(*this, marking.front());
    for (std::size_t i = 0; i < marking.size(); ++i) {
      const Path& m = marking[i];
      if (m.trivial()) throw StructuralError("marking of " + gens[i] + " is trivial");
      if (path_start(*this, m) != basepoint || path_end(*this, m) != basepoint)
        throw StructuralError("marking of " + gens[i] + " is not a loop at the common basepoint");
    }
  }
  if (static_cast<int>(marking.size()) != rank)
    throw StructuralError("marking has " + std::to_string(marking.size()) + " generators but rank is " +
                          std::to_string(rank));

  std::vector<bool> in_tree;
  spanning_tree(*this, basepoint, in_tree);
  std::vector<int> letter(ne(), 0);
  int k = 0;
  for (int e = 0; e < ne(); ++e)
    if (!in_tree[e]) letter[e] = ++k;
  std::vector<FWord> images;
  for (const Path& m : marking) {
    FWord w;
    for (Dir d : m.e)
      if (letter[d.edge]) w.push_back(d.rev ? -letter[d.edge] : letter[d.edge]);
    images.push_back(freduce(w));
  }
  auto inv = finvert(images, rank);
  if (!inv) throw StructuralError("marking is not a homotopy equivalence");
  inverse.assign(ne(), {});
  for (int e = 0; e < ne(); ++e)
    if (letter[e]) inverse[e] = (*inv)[letter[e] - 1];

  for (int i = 0; i < rank; ++i)
    if (!fconjugate(to_rose(marking[i].e), FWord{i + 1}))
      throw StructuralError("marking round trip fails on " + gens[i]);
}

FWord MarkedGraph::to_rose(const std::vector<Dir>& w) const {
  FWord out;
  for (Dir d : w) {
    const FWord& im = inverse[d.edge];
    if (!d.rev)
      out.insert(out.end(), im.begin(), im.end());
    else {
      FWord r = finverse(im);
      out.insert(out.end(), r.begin(), r.end());
    }
  }
  return freduce(out);
}

Path MarkedGraph::from_rose(const FWord& w) const {
  std::vector<Dir> out;
  for (int x : w) {
    Path p = marking[std::abs(x) - 1];
    if (x < 0) p = reverse(*this, p);
    out.insert(out.end(), p.e.begin(), p.e.end());
  }
  return tighten(*this, out, basepoint);
}

std::vector<int> CoreSubgraph::vertices(const Graph& g) const {
  std::set<int> vs;
  for (int e : edges) {
    vs.insert(g.src[e]);
    vs.insert(g.dst[e]);
  }
  return {vs.begin(), vs.end()};
}

bool CoreSubgraph::contains_vertex(const Graph& g, int v) const {
  for (int e : edges)
    if (g.src[e] == v || g.dst[e] == v) return true;
  return false;
}

std::vector<CoreSubgraph::Component> CoreSubgraph::components(const Graph& g) const {
  std::vector<int> parent(g.nv());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
  for (int e : edges) parent[find(g.src[e])] = find(g.dst[e]);
  std::map<int, Component> byroot;
  for (int e : edges) byroot[find(g.src[e])].edges.push_back(e);
  for (int v : vertices(g)) byroot[find(v)].vertices.push_back(v);
  std::vector<Component> out;
  for (auto& [r, c] : byroot) {
    std::sort(c.edges.begin(), c.edges.end());
    c.contractible = c.edges.size() + 1 == c.vertices.size();
    out.push_back(c);
  }
  std::sort(out.begin(), out.end(), [](const Component& a, const Component& b) { return a.edges < b.edges; });
  return out;
}

bool CoreSubgraph::is_core(const Graph& g) const {
  std::map<int, int> deg;
  for (int e : edges) {
    ++deg[g.src[e]];
    ++deg[g.dst[e]];
  }
  for (auto& [v, d] : deg)
    if (d == 1) return false;
  return true;
}

std::vector<int> core_edges(const Graph& g, std::vector<int> edges) {
  for (bool changed = true; changed;) {
    changed = false;
    std::map<int, int> deg;
    for (int e : edges) {
      ++deg[g.src[e]];
      ++deg[g.dst[e]];
    }
    std::vector<int> keep;
    for (int e : edges) {
      if (deg[g.src[e]] == 1 || deg[g.dst[e]] == 1)
        changed = true;
      else
        keep.push_back(e);
    }
    edges = keep;
  }
  std::sort(edges.begin(), edges.end());
  return edges;
}

int Immersion::add_vertex(int img, bool orig) {
  vimg.push_back(img);
  original.push_back(orig);
  return nv++;
}

void Immersion::add_edge(int from, int to, Dir img) { edges.push_back({from, to, img}); }

void Immersion::add_path(const Graph& g, int a, int b, const Path& p) {
  int cur = a;
  for (std::size_t i = 0; i < p.e.size(); ++i) {
    int next = (i + 1 == p.e.size()) ? b : add_vertex(g.term(p.e[i]), false);
    add_edge(cur, next, p.e[i]);
    cur = next;
  }
}

Immersion Immersion::from_subgraph(const Graph& g, const std::vector<int>& es) {
  Immersion im;
  std::map<int, int> id;
  auto vid = [&](int v) {
    auto it = id.find(v);
    if (it != id.end()) return it->second;
    return id[v] = im.add_vertex(v);
  };
  for (int e : es) im.add_edge(vid(g.src[e]), vid(g.dst[e]), {e, false});
  return im;
}

Immersion Immersion::from_loops(const Graph& g, int base, const std::vector<Path>& loops) {
  Immersion im;
  int b = im.add_vertex(base);
  for (const Path& p : loops) {
    if (p.trivial()) continue;
    if (path_start(g, p) != base || path_end(g, p) != base) throw StructuralError("loop not based at basepoint");
    im.add_path(g, b, b, p);
  }
  for (int v = 0; v < im.nv; ++v) im.original[v] = true;
  im.fold(g);
  return im;
}

void Immersion::fold(const Graph&) {
  std::vector<bool> alive(edges.size(), true);
  for (bool changed = true; changed;) {
    changed = false;
    // outward image at each vertex
    std::map<std::pair<int, Dir>, std::pair<std::size_t, int>> seen;
    for (std::size_t i = 0; i < edges.size() && !changed; ++i) {
      if (!alive[i]) continue;
      for (int end = 0; end < 2 && !changed; ++end) {
        int u = end == 0 ? edges[i].from : edges[i].to;
        Dir out = end == 0 ? edges[i].img : bar(edges[i].img);
        auto key = std::make_pair(u, out);
        auto it = seen.find(key);
        if (it == seen.end()) {
          seen[key] = {i, end};
          continue;
        }
        auto [j, endj] = it->second;
        int vi = end == 0 ? edges[i].to : edges[i].from;
        int vj = endj == 0 ? edges[j].to : edges[j].from;
        alive[i] = false;
        if (vi != vj) {
          int keep = std::min(vi, vj), drop = std::max(vi, vj);
          for (auto& e : edges) {
            if (e.from == drop) e.from = keep;
            if (e.to == drop) e.to = keep;
          }
          original[keep] = original[keep] || original[drop];
        }
        changed = true;
      }
    }
  }
  std::vector<E> kept;
  for (std::size_t i = 0; i < edges.size(); ++i)
    if (alive[i]) kept.push_back(edges[i]);
  edges = kept;
}

bool Immersion::is_immersion(const Graph&) const {
  std::set<std::pair<int, Dir>> seen;
  for (const auto& e : edges) {
    if (!seen.insert({e.from, e.img}).second) return false;
    if (!seen.insert({e.to, bar(e.img)}).second) return false;
  }
  return true;
}

std::optional<int> Immersion::lift(const Graph&, int s, const std::vector<Dir>& p) const {
  int cur = s;
  for (Dir d : p) {
    std::optional<int> next;
    for (const auto& e : edges) {
      if (e.from == cur && e.img == d) {
        next = e.to;
        break;
      }
      if (e.to == cur && bar(e.img) == d) {
        next = e.from;
        break;
      }
    }
    if (!next) return std::nullopt;
    cur = *next;
  }
  return cur;
}

bool Immersion::carries(const Graph& g, const Circuit& c) const {
  if (c.e.empty()) return false;
  int v0 = g.init(c.e.front());
  for (int s = 0; s < nv; ++s) {
    if (vimg[s] != v0) continue;
    auto t = lift(g, s, c.e);
    if (t && *t == s) return true;
  }
  return false;
}

std::vector<std::vector<int>> Immersion::component_vertices() const {
  std::vector<int> parent(nv);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
  for (const auto& e : edges) parent[find(e.from)] = find(e.to);
  std::map<int, std::vector<int>> comps;
  for (int v = 0; v < nv; ++v) comps[find(v)].push_back(v);
  std::vector<std::vector<int>> out;
  for (auto& [r, vs] : comps) out.push_back(vs);
  return out;
}

int Immersion::rank_of_component_containing(int v) const {
  for (const auto& comp : component_vertices()) {
    if (std::find(comp.begin(), comp.end(), v) == comp.end()) continue;
    std::set<int> vs(comp.begin(), comp.end());
    int ecount = 0;
    for (const auto& e : edges)
      if (vs.count(e.from)) ++ecount;
    return ecount - static_cast<int>(comp.size()) + 1;
  }
  return 0;
}

bool carries_class(const Graph& g, const Immersion& sub, const Circuit& c) { return sub.carries(g, c); }

}  // namespace outfn
