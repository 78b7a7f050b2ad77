#include "outfn/strata.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

namespace outfn {

namespace {

// Edge j occurs in f(E_i).
std::vector<std::set<int>> transition_digraph(const GraphMap& f) {
  std::vector<std::set<int>> out(f.G().ne());
  for (int e = 0; e < f.G().ne(); ++e)
    for (Dir d : f.img[e].e) out[e].insert(d.edge);
  return out;
}

std::vector<std::vector<int>> sccs(const std::vector<std::set<int>>& adj) {
  int n = static_cast<int>(adj.size()), counter = 0;
  std::vector<int> index(n, -1), low(n, 0), stack;
  std::vector<bool> on(n, false);
  std::vector<std::vector<int>> out;
  auto visit = [&](auto&& self, int v) -> void {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on[v] = true;
    for (int w : adj[v]) {
      if (index[w] < 0) {
        self(self, w);
        low[v] = std::min(low[v], low[w]);
      } else if (on[w]) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] == index[v]) {
      std::vector<int> c;
      int w;
      do {
        w = stack.back();
        stack.pop_back();
        on[w] = false;
        c.push_back(w);
      } while (w != v);
      std::sort(c.begin(), c.end());
      out.push_back(c);
    }
  };
  for (int v = 0; v < n; ++v)
    if (index[v] < 0) visit(visit, v);
  return out;
}

struct Groups {
  std::vector<std::vector<int>> members;
  std::vector<int> of;
};

// Group -> groups it maps over, excluding itself.
std::vector<std::set<int>> condensed(const Groups& g, const std::vector<std::set<int>>& adj) {
  std::vector<std::set<int>> out(g.members.size());
  for (std::size_t a = 0; a < g.members.size(); ++a)
    for (int e : g.members[a])
      for (int x : adj[e])
        if (g.of[x] != static_cast<int>(a)) out[a].insert(g.of[x]);
  return out;
}

bool acyclic(const std::vector<std::set<int>>& dag) {
  std::vector<int> indeg(dag.size(), 0);
  for (const auto& s : dag)
    for (int b : s) ++indeg[b];
  std::vector<int> ready;
  for (std::size_t i = 0; i < dag.size(); ++i)
    if (!indeg[i]) ready.push_back(static_cast<int>(i));
  std::size_t seen = 0;
  while (!ready.empty()) {
    int a = ready.back();
    ready.pop_back();
    ++seen;
    for (int b : dag[a])
      if (--indeg[b] == 0) ready.push_back(b);
  }
  return seen == dag.size();
}

Groups make_groups(std::vector<std::vector<int>> members, int ne) {
  Groups g;
  std::sort(members.begin(), members.end());
  g.members = std::move(members);
  g.of.assign(ne, -1);
  for (std::size_t i = 0; i < g.members.size(); ++i)
    for (int e : g.members[i]) g.of[e] = static_cast<int>(i);
  return g;
}

Filtration from_strata(std::vector<std::vector<int>> strata, int ne) {
  Filtration F;
  F.strata = std::move(strata);
  F.height_of.assign(ne, 0);
  for (std::size_t r = 0; r < F.strata.size(); ++r)
    for (int e : F.strata[r]) F.height_of[e] = static_cast<int>(r) + 1;
  return F;
}

// Union-find on edges sharing a vertex.
std::vector<std::vector<int>> vertex_components(const Graph& g, const std::vector<int>& edges) {
  std::vector<int> parent(g.nv());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (int e : edges) parent[find(g.src[e])] = find(g.dst[e]);
  std::map<int, std::vector<int>> by;
  for (int e : edges) by[find(g.src[e])].push_back(e);
  std::vector<std::vector<int>> out;
  for (auto& [k, v] : by) out.push_back(v);
  return out;
}

bool maps_into_itself(const std::vector<int>& edges, const std::vector<std::set<int>>& adj) {
  std::set<int> s(edges.begin(), edges.end());
  for (int e : edges)
    for (int x : adj[e])
      if (s.count(x)) return true;
  return false;
}

}  // namespace

std::vector<int> Filtration::prefix(int r) const {
  std::vector<int> out;
  for (int i = 1; i <= r; ++i) out.insert(out.end(), stratum(i).begin(), stratum(i).end());
  std::sort(out.begin(), out.end());
  return out;
}

int Filtration::height(const Path& p) const {
  int h = 0;
  for (Dir d : p.e) h = std::max(h, height_of[d.edge]);
  return h;
}

IMatrix transition_matrix(const GraphMap& f, const std::vector<int>& edges) {
  std::map<int, std::size_t> pos;
  for (std::size_t i = 0; i < edges.size(); ++i) pos[edges[i]] = i;
  IMatrix m(edges.size(), std::vector<long long>(edges.size(), 0));
  for (std::size_t i = 0; i < edges.size(); ++i)
    for (Dir d : f.img[edges[i]].e) {
      auto it = pos.find(d.edge);
      if (it != pos.end()) ++m[i][it->second];
    }
  return m;
}

bool is_irreducible(const IMatrix& m) {
  std::size_t n = m.size();
  if (n == 0) return false;
  std::vector<std::set<int>> adj(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (m[i][j] > 0) adj[i].insert(static_cast<int>(j));
  auto comps = sccs(adj);
  return comps.size() == 1 && (n > 1 || m[0][0] > 0);
}

bool is_zero(const IMatrix& m) {
  for (const auto& row : m)
    for (long long x : row)
      if (x) return false;
  return true;
}

bool is_permutation(const IMatrix& m) {
  std::size_t n = m.size();
  std::vector<int> col(n, 0);
  for (const auto& row : m) {
    long long s = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (row[j] < 0 || row[j] > 1) return false;
      s += row[j];
      col[j] += static_cast<int>(row[j]);
    }
    if (s != 1) return false;
  }
  return std::all_of(col.begin(), col.end(), [](int c) { return c == 1; });
}

int period(const IMatrix& m) {
  if (!is_irreducible(m)) throw StructuralError("period needs an irreducible matrix");
  std::size_t n = m.size();
  std::vector<int> level(n, -1);
  level[0] = 0;
  std::vector<std::size_t> queue{0};
  for (std::size_t q = 0; q < queue.size(); ++q)
    for (std::size_t j = 0; j < n; ++j)
      if (m[queue[q]][j] > 0 && level[j] < 0) {
        level[j] = level[queue[q]] + 1;
        queue.push_back(j);
      }
  int g = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (m[i][j] > 0) g = std::gcd(g, std::abs(level[i] + 1 - level[j]));
  return g;
}

PF pf(const IMatrix& m, double tol) {
  if (!is_irreducible(m)) throw StructuralError("Perron-Frobenius data needs an irreducible matrix");
  std::size_t n = m.size();
  std::vector<double> x(n, 1.0 / static_cast<double>(n)), mx(n);
  PF out;
  for (int it = 1;; ++it) {
    for (std::size_t i = 0; i < n; ++i) {
      mx[i] = 0;
      for (std::size_t j = 0; j < n; ++j) mx[i] += static_cast<double>(m[i][j]) * x[j];
    }
    double lo = INFINITY, hi = 0;
    for (std::size_t i = 0; i < n; ++i) {
      lo = std::min(lo, mx[i] / x[i]);
      hi = std::max(hi, mx[i] / x[i]);
    }
    out.lower = lo;
    out.upper = hi;
    out.iterations = it;
    if (hi - lo <= tol * hi || it >= 1000000) break;
    // M + I is primitive with the same eigenvector
    double s = 0;
    for (std::size_t i = 0; i < n; ++i) s += x[i] = mx[i] + x[i];
    for (double& v : x) v /= s;
  }
  out.lambda = (out.lower + out.upper) / 2;
  out.vec = x;
  return out;
}

Filtration compute_filtration(const GraphMap& f) {
  const Graph& g = f.G();
  auto adj = transition_digraph(f);
  auto comps = sccs(adj);

  std::vector<std::vector<int>> members;
  std::vector<int> zero_edges;
  for (auto& c : comps) {
    if (c.size() == 1 && !adj[c[0]].count(c[0]))
      zero_edges.push_back(c[0]);
    else
      members.push_back(c);
  }
  // zero edges are grouped into connected pieces where that keeps the
  // order acyclic and the stratum zero
  std::vector<std::vector<int>> singles;
  for (auto& piece : vertex_components(g, zero_edges)) {
    bool ok = piece.size() > 1 && !maps_into_itself(piece, adj);
    if (ok) {
      auto trial = members;
      trial.push_back(piece);
      std::set<int> taken;
      for (auto& m : trial) taken.insert(m.begin(), m.end());
      for (int e : zero_edges)
        if (!taken.count(e)) trial.push_back({e});
      ok = acyclic(condensed(make_groups(trial, g.ne()), adj));
    }
    if (ok)
      members.push_back(piece);
    else
      for (int e : piece) singles.push_back({e});
  }
  for (auto& s : singles) members.push_back(s);

  Groups G = make_groups(members, g.ne());
  auto dag = condensed(G, adj);
  std::size_t n = G.members.size();
  std::vector<int> above(n, 0);
  for (const auto& s : dag)
    for (int b : s) ++above[b];
  auto is_zero_group = [&](std::size_t a) { return !maps_into_itself(G.members[a], adj); };
  // built from the top: zero strata go directly under what maps over them,
  // irreducible strata with smaller edges end up lower
  std::vector<bool> placed(n, false);
  std::vector<std::vector<int>> top_down;
  for (std::size_t k = 0; k < n; ++k) {
    int pick = -1;
    for (std::size_t a = 0; a < n; ++a) {
      if (placed[a] || above[a]) continue;
      if (pick < 0) {
        pick = static_cast<int>(a);
        continue;
      }
      bool za = is_zero_group(a), zp = is_zero_group(pick);
      if (za != zp) {
        if (za) pick = static_cast<int>(a);
      } else if (za ? G.members[a][0] < G.members[pick][0] : G.members[a][0] > G.members[pick][0]) {
        pick = static_cast<int>(a);
      }
    }
    placed[pick] = true;
    top_down.push_back(G.members[pick]);
    for (int b : dag[pick]) --above[b];
  }
  std::reverse(top_down.begin(), top_down.end());
  return from_strata(top_down, g.ne());
}

Filtration declared_filtration(const GraphMap& f, const std::vector<std::vector<int>>& strata) {
  int ne = f.G().ne();
  std::vector<int> count(ne, 0);
  for (const auto& s : strata) {
    if (s.empty()) throw StructuralError("declared stratum is empty");
    for (int e : s) {
      if (e < 0 || e >= ne) throw StructuralError("declared stratum names an unknown edge");
      ++count[e];
    }
  }
  for (int e = 0; e < ne; ++e)
    if (count[e] != 1)
      throw StructuralError("edge " + f.G().enames[e] + " appears " + std::to_string(count[e]) +
                            " times in the declared filtration");
  Filtration F = from_strata(strata, ne);
  for (int e = 0; e < ne; ++e)
    for (Dir d : f.img[e].e)
      if (F.height_of[d.edge] > F.height_of[e])
        throw StructuralError("filtration is not invariant: image of " + f.G().enames[e] + " crosses " +
                              f.G().enames[d.edge]);
  for (int r = 1; r <= F.size(); ++r) {
    IMatrix m = transition_matrix(f, F.stratum(r));
    if (!is_zero(m) && !is_irreducible(m))
      throw StructuralError("declared stratum " + std::to_string(r) + " is neither irreducible nor zero");
  }
  return F;
}

std::string to_string(StratumKind k) {
  switch (k) {
    case StratumKind::eg: return "EG";
    case StratumKind::neg_fixed: return "NEG-fixed";
    case StratumKind::neg_nonfixed: return "NEG-nonfixed";
    case StratumKind::neg_linear: return "NEG-linear";
    case StratumKind::zero: return "zero";
  }
  return "?";
}

std::optional<int> nielsen_period(const GraphMap& f, const Path& p, int cap) {
  Path q = p;
  try {
    for (int k = 1; k <= cap; ++k) {
      q = f.map_path(q);
      if (q == p) return k;
    }
  } catch (const BlowupError&) {
  }
  return std::nullopt;
}

std::optional<std::vector<NegEdge>> neg_normal_form(const GraphMap& f, const Filtration& filt, int r) {
  const auto& S = filt.stratum(r);
  for (bool rev : {false, true}) {
    Dir start{S.front(), rev}, cur = start;
    std::vector<NegEdge> out;
    bool ok = true;
    do {
      Path im = f.image(cur);
      if (filt.height(im.e.front()) != r) {
        ok = false;
        break;
      }
      out.push_back({cur, subpath(f.H(), im, 1, im.size())});
      cur = im.e.front();
      if (cur.edge == start.edge && cur != start) ok = false;
    } while (ok && cur != start && out.size() <= S.size());
    if (ok && cur == start && out.size() == S.size()) return out;
  }
  return std::nullopt;
}

NegSubdivision subdivide_neg(const GraphMap& f, const Filtration& filt, int r) {
  const Graph& g = f.G();
  std::set<int> S(filt.stratum(r).begin(), filt.stratum(r).end());
  auto ng = std::make_shared<MarkedGraph>();
  for (int v = 0; v < g.nv(); ++v) ng->add_vertex(g.vnames[v]);
  std::vector<int> first(g.ne()), mid(g.ne(), -1);
  for (int e = 0; e < g.ne(); ++e) {
    if (!S.count(e)) {
      first[e] = ng->add_edge(g.enames[e], g.src[e], g.dst[e]);
      continue;
    }
    mid[e] = ng->add_vertex(g.enames[e] + ".m");
    first[e] = ng->add_edge(g.enames[e] + ".1", g.src[e], mid[e]);
    ng->add_edge(g.enames[e] + ".2", mid[e], g.dst[e]);
  }
  auto sub = [&](Dir d, std::vector<Dir>& out) {
    if (!S.count(d.edge)) {
      out.push_back({first[d.edge], d.rev});
    } else if (!d.rev) {
      out.push_back({first[d.edge], false});
      out.push_back({first[d.edge] + 1, false});
    } else {
      out.push_back({first[d.edge] + 1, true});
      out.push_back({first[d.edge], true});
    }
  };
  const MarkedGraph& mg = *f.dom;
  ng->gens = mg.gens;
  for (const Path& m : mg.marking) {
    std::vector<Dir> w;
    for (Dir d : m.e) sub(d, w);
    ng->marking.push_back(Path{mg.basepoint, w});
  }
  ng->finalize();

  GraphMap h;
  h.dom = h.cod = ng;
  h.vmap.assign(ng->nv(), -1);
  h.img.assign(ng->ne(), Path{});
  for (int v = 0; v < g.nv(); ++v) h.vmap[v] = f.vmap[v];
  for (int e = 0; e < g.ne(); ++e) {
    const Path& im = f.img[e];
    if (!S.count(e)) {
      std::vector<Dir> w;
      for (Dir d : im.e) sub(d, w);
      h.img[first[e]] = tighten(*ng, w);
      continue;
    }
    std::size_t at = 0;
    while (!S.count(im.e[at].edge)) ++at;
    Dir over = im.e[at];
    std::vector<Dir> a, b;
    for (std::size_t i = 0; i < at; ++i) sub(im.e[i], a);
    std::vector<Dir> halves;
    sub(over, halves);
    a.push_back(halves[0]);
    b.push_back(halves[1]);
    for (std::size_t i = at + 1; i < im.size(); ++i) sub(im.e[i], b);
    h.img[first[e]] = tighten(*ng, a);
    h.img[first[e] + 1] = tighten(*ng, b);
    h.vmap[mid[e]] = mid[over.edge];
  }
  h.validate();

  // the new edges of the stratum split into permutation cycles
  std::vector<int> new_edges;
  for (int e : S) new_edges.push_back(first[e]), new_edges.push_back(first[e] + 1);
  std::vector<std::set<int>> adj(ng->ne());
  for (int e = 0; e < ng->ne(); ++e)
    for (Dir d : h.img[e].e) adj[e].insert(d.edge);
  std::set<int> in_new(new_edges.begin(), new_edges.end());
  std::vector<std::set<int>> local(ng->ne());
  for (int e : new_edges)
    for (int x : adj[e])
      if (in_new.count(x)) local[e].insert(x);
  std::vector<std::vector<int>> cycles;
  for (auto& c : sccs(local))
    if (in_new.count(c[0])) cycles.push_back(c);
  std::sort(cycles.begin(), cycles.end());

  std::vector<std::vector<int>> strata;
  NegSubdivision out{h, {}, {}};
  for (int i = 1; i <= filt.size(); ++i) {
    if (i != r) {
      std::vector<int> s;
      for (int e : filt.stratum(i)) s.push_back(first[e]);
      strata.push_back(s);
      continue;
    }
    for (auto& c : cycles) {
      strata.push_back(c);
      out.new_strata.push_back(static_cast<int>(strata.size()));
    }
  }
  out.filt = from_strata(strata, ng->ne());
  return out;
}

std::vector<StratumReport> classify_strata(const GraphMap& f, const Filtration& filt, int nielsen_cap) {
  const Graph& g = f.G();
  std::vector<StratumReport> out;
  for (int r = 1; r <= filt.size(); ++r) {
    StratumReport s;
    s.height = r;
    s.edges = filt.stratum(r);
    s.matrix = transition_matrix(f, s.edges);
    s.irreducible = is_irreducible(s.matrix);
    if (is_zero(s.matrix)) {
      s.kind = StratumKind::zero;
    } else if (!s.irreducible) {
      throw StructuralError("stratum " + std::to_string(r) + " is neither irreducible nor zero");
    } else {
      s.pf = pf(s.matrix);
      s.period = period(s.matrix);
      s.aperiodic = s.period == 1;
      if (!is_permutation(s.matrix)) {
        s.kind = StratumKind::eg;
      } else if (auto nf = neg_normal_form(f, filt, r)) {
        s.neg = *nf;
        s.periodic = std::all_of(nf->begin(), nf->end(), [](const NegEdge& x) { return x.u.trivial(); });
        bool linear = std::all_of(nf->begin(), nf->end(), [&](const NegEdge& x) {
          return !x.u.trivial() && path_start(g, x.u) == path_end(g, x.u) && nielsen_period(f, x.u, nielsen_cap);
        });
        if (s.periodic && s.edges.size() == 1)
          s.kind = StratumKind::neg_fixed;
        else if (linear)
          s.kind = StratumKind::neg_linear;
        else
          s.kind = StratumKind::neg_nonfixed;
      } else {
        s.needs_subdivision = true;
        s.kind = StratumKind::neg_nonfixed;
      }
    }
    out.push_back(std::move(s));
  }

  // enveloping of zero strata
  for (int r = 1; r <= filt.size(); ++r) {
    if (out[r - 1].kind != StratumKind::eg) continue;
    int u = r - 1;
    while (u >= 1 && out[u - 1].kind == StratumKind::zero) --u;
    if (u == r - 1) continue;
    CoreSubgraph Gr{filt.prefix(r)};
    bool ok = true;
    for (const auto& c : Gr.components(g)) ok = ok && !c.contractible;
    CoreSubgraph below{filt.prefix(r - 1)};
    auto comps = below.components(g);
    std::vector<int> valence(g.nv(), 0);
    for (int e : Gr.edges) ++valence[g.src[e]], ++valence[g.dst[e]];
    for (int i = u + 1; ok && i < r; ++i) {
      std::vector<int> hi = filt.stratum(i);
      std::sort(hi.begin(), hi.end());
      bool is_comp = false;
      for (const auto& c : comps) {
        std::vector<int> ce = c.edges;
        std::sort(ce.begin(), ce.end());
        if (ce == hi) is_comp = true;
      }
      ok = is_comp;
      for (int e : hi) ok = ok && valence[g.src[e]] >= 2 && valence[g.dst[e]] >= 2;
    }
    if (ok)
      for (int i = u + 1; i < r; ++i) out[i - 1].enveloped_by = r;
  }
  return out;
}

}  // namespace outfn
