#include "outfn/ct.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <set>

namespace outfn {

namespace {

Path make_path(const Graph& g, const std::vector<Dir>& w) { return Path{g.init(w.front()), w}; }

Path image_in(const MapState& s, const Graph& cod, Dir d) {
  const Path& p = s.img[d.edge];
  return d.rev ? reverse(cod, p) : p;
}

std::string turn_name(const Graph& g, Dir a, Dir b) {
  return "{" + g.dir_name(a) + ", " + g.dir_name(b) + "}";
}

std::vector<int> vertices_of(const Graph& g, const std::vector<int>& edges) {
  std::set<int> vs;
  for (int e : edges) {
    vs.insert(g.src[e]);
    vs.insert(g.dst[e]);
  }
  return {vs.begin(), vs.end()};
}

struct UnionFind {
  std::vector<int> p;
  explicit UnionFind(int n) : p(n) { std::iota(p.begin(), p.end(), 0); }
  int find(int x) { return p[x] == x ? x : p[x] = find(p[x]); }
  bool join(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    p[std::max(a, b)] = std::min(a, b);
    return true;
  }
};

// Stallings graph of f restricted to a subgraph: vertex identifications and
// whether some loop dies.
struct FoldedRestriction {
  std::vector<int> rep;  // original vertex -> class, -1 when absent
  bool rank_drop = false;
};

FoldedRestriction fold_restriction(const GraphMap& f, const std::vector<int>& edges) {
  const Graph& g = f.G();
  const Graph& h = f.H();
  struct Arc {
    int a, b;
    Dir img;
  };
  int n = g.nv();
  std::vector<int> vimg(f.vmap.begin(), f.vmap.end());
  std::vector<Arc> arcs;
  for (int e : edges) {
    const Path& p = f.img[e];
    int prev = g.src[e];
    for (std::size_t i = 0; i < p.size(); ++i) {
      int next = g.dst[e];
      if (i + 1 < p.size()) {
        next = n++;
        vimg.push_back(h.term(p.e[i]));
      }
      arcs.push_back({prev, next, p.e[i]});
      prev = next;
    }
  }
  UnionFind uf(n);
  std::vector<bool> alive(arcs.size(), true);
  for (bool changed = true; changed;) {
    changed = false;
    std::map<std::pair<int, Dir>, std::pair<std::size_t, int>> seen;
    for (std::size_t i = 0; i < arcs.size(); ++i) {
      if (!alive[i]) continue;
      for (int end = 0; end < 2; ++end) {
        int u = uf.find(end == 0 ? arcs[i].a : arcs[i].b);
        Dir out = end == 0 ? arcs[i].img : bar(arcs[i].img);
        auto [it, fresh] = seen.insert({{u, out}, {i, end}});
        if (fresh) continue;
        auto [j, endj] = it->second;
        int vi = end == 0 ? arcs[i].b : arcs[i].a;
        int vj = endj == 0 ? arcs[j].b : arcs[j].a;
        uf.join(vi, vj);
        alive[i] = false;
        changed = true;
        break;
      }
      if (changed) break;
    }
  }
  FoldedRestriction out;
  out.rep.assign(g.nv(), -1);
  auto verts = vertices_of(g, edges);
  for (int v : verts) out.rep[v] = uf.find(v);
  // rank before and after
  std::set<int> classes;
  std::size_t kept = 0;
  for (std::size_t i = 0; i < arcs.size(); ++i)
    if (alive[i]) {
      ++kept;
      classes.insert(uf.find(arcs[i].a));
      classes.insert(uf.find(arcs[i].b));
    }
  auto count_components = [](int nv, const std::vector<std::pair<int, int>>& es) {
    UnionFind c(nv);
    int comps = nv;
    for (auto [a, b] : es)
      if (c.join(a, b)) --comps;
    return comps;
  };
  std::vector<std::pair<int, int>> before;
  for (int e : edges) before.push_back({g.src[e], g.dst[e]});
  std::map<int, int> idx;
  for (int v : verts) idx.emplace(v, static_cast<int>(idx.size()));
  for (auto& [a, b] : before) a = idx[a], b = idx[b];
  long rank_before = static_cast<long>(edges.size()) - static_cast<long>(verts.size()) +
                     count_components(static_cast<int>(verts.size()), before);
  std::map<int, int> cidx;
  for (int c : classes) cidx.emplace(c, static_cast<int>(cidx.size()));
  std::vector<std::pair<int, int>> after;
  for (std::size_t i = 0; i < arcs.size(); ++i)
    if (alive[i]) after.push_back({cidx[uf.find(arcs[i].a)], cidx[uf.find(arcs[i].b)]});
  long rank_after = static_cast<long>(kept) - static_cast<long>(classes.size()) +
                    count_components(static_cast<int>(classes.size()), after);
  out.rank_drop = rank_after < rank_before;
  return out;
}

// A reduced path in the subgraph from x to some y != x with trivial image.
std::optional<Path> collapsing_path(const GraphMap& f, const std::vector<int>& edges, int x,
                                    const std::set<int>& ends, std::size_t max_len, std::size_t node_cap) {
  const Graph& g = f.G();
  std::set<int> allowed(edges.begin(), edges.end());
  std::size_t nodes = 0;
  std::optional<Path> found;
  std::vector<Dir> word;
  std::function<void(int)> dfs = [&](int v) {
    if (found || ++nodes > node_cap) return;
    if (!word.empty() && v != x && ends.count(v)) {
      Path p = make_path(g, word);
      if (f.map_path(p).trivial()) {
        found = p;
        return;
      }
    }
    if (word.size() >= max_len) return;
    for (Dir d : g.directions_at(v)) {
      if (!allowed.count(d.edge) || (!word.empty() && d == bar(word.back()))) continue;
      word.push_back(d);
      dfs(g.term(d));
      word.pop_back();
    }
  };
  dfs(x);
  return found;
}

// Df on all directions as a functional graph; periodic directions lie on cycles.
std::vector<int> cycle_lengths(const std::vector<int>& next) {
  int n = static_cast<int>(next.size());
  std::vector<int> len(n, 0);
  for (int s = 0; s < n; ++s) {
    int x = next[s];
    for (int l = 1; l <= n; ++l, x = next[x])
      if (x == s) {
        len[s] = l;
        break;
      }
  }
  return len;
}

int dir_index(Dir d) { return 2 * d.edge + (d.rev ? 1 : 0); }
Dir index_dir(int i) { return {i / 2, (i % 2) != 0}; }

}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::pass:
      return "pass";
    case Verdict::fail:
      return "fail";
    case Verdict::inconclusive:
      return "inconclusive";
  }
  return "?";
}

std::string to_string(TermKind k) {
  switch (k) {
    case TermKind::edge:
      return "edge";
    case TermKind::nielsen:
      return "nielsen";
    case TermKind::exceptional:
      return "exceptional";
    case TermKind::zero_path:
      return "zero-path";
  }
  return "?";
}

std::vector<RttReport> verify_rtt(const GraphMap& f, const Filtration& filt) {
  const Graph& g = f.G();
  std::vector<RttReport> out;
  for (int r = 1; r <= filt.size(); ++r) {
    IMatrix m = transition_matrix(f, filt.stratum(r));
    if (is_zero(m) || is_permutation(m)) continue;
    RttReport rep;
    rep.height = r;
    const auto& hr = filt.stratum(r);

    for (int e : hr)
      for (bool rev : {false, true}) {
        Dir d{e, rev};
        Dir img = f.df(d);
        if (filt.height(img) != r)
          rep.i.fail("direction " + g.dir_name(d) + " maps to " + g.dir_name(img) + " of height " +
                     std::to_string(filt.height(img)));
      }

    std::set<int> hv;
    for (int v : vertices_of(g, hr)) hv.insert(v);
    CoreSubgraph low{filt.prefix(r - 1)};
    for (const auto& comp : low.components(g)) {
      std::vector<int> ends;
      for (int v : comp.vertices)
        if (hv.count(v)) ends.push_back(v);
      if (ends.empty()) continue;
      auto folded = fold_restriction(f, comp.edges);
      std::optional<std::string> witness;
      for (std::size_t i = 0; i < ends.size() && !witness; ++i)
        for (std::size_t j = i + 1; j < ends.size() && !witness; ++j) {
          if (folded.rep[ends[i]] != folded.rep[ends[j]]) continue;
          auto p = collapsing_path(f, comp.edges, ends[i], {ends[j]}, 3 * g.ne(), 200000);
          witness = p ? "connecting path " + to_string(g, *p) + " has trivial image"
                      : "vertices " + g.vnames[ends[i]] + " and " + g.vnames[ends[j]] +
                            " are joined by a connecting path with trivial image";
        }
      if (!witness && folded.rank_drop)
        witness = "a loop in the component of " + g.vnames[ends.front()] + " has trivial image";
      if (witness) rep.ii.fail(*witness);
    }

    for (int e : hr) {
      const Path& p = f.img[e];
      for (std::size_t i = 0; i + 1 < p.size(); ++i) {
        Dir a = bar(p.e[i]), b = p.e[i + 1];
        if (filt.height(a) == r && filt.height(b) == r && !is_legal_turn(f, a, b))
          rep.iii.fail("f(" + g.enames[e] + ") = " + to_string(g, p) + " takes the illegal turn " +
                       turn_name(g, a, b));
      }
    }
    out.push_back(rep);
  }
  return out;
}

SplitContext::SplitContext(const GraphMap& map, const Filtration& fl, const NielsenCatalog& cat, int depth)
    : f(&map), filt(&fl), catalog(&cat), taken_depth(depth) {
  const Graph& g = map.G();
  strata = classify_strata(map, fl);
  for (const auto& s : strata) {
    if (s.kind != StratumKind::neg_linear || s.neg.size() != 1) continue;
    auto [w, n] = path_root(g, s.neg.front().u);
    linear.push_back({s.neg.front().edge, w, n});
  }
  std::set<std::vector<Dir>> seen;
  for (const auto& s : strata) {
    if (s.kind == StratumKind::zero) continue;
    for (int e : s.edges) {
      Path p = single(g, {e, false});
      for (int k = 1; k <= depth; ++k) {
        try {
          p = iterate(map, p, 1);
        } catch (const BlowupError&) {
          break;
        }
        for (std::size_t i = 0; i < p.size();) {
          int h = fl.height(p.e[i]);
          if (strata[h - 1].kind != StratumKind::zero) {
            ++i;
            continue;
          }
          std::size_t j = i;
          while (j < p.size() && fl.height(p.e[j]) == h) ++j;
          std::vector<Dir> run(p.e.begin() + i, p.e.begin() + j);
          if (seen.insert(run).second) {
            taken.push_back(run);
            std::vector<Dir> back;
            for (auto it = run.rbegin(); it != run.rend(); ++it) back.push_back(bar(*it));
            if (seen.insert(back).second) taken.push_back(back);
          }
          i = j;
        }
      }
    }
  }
}

bool SplitContext::is_taken(const std::vector<Dir>& w) const {
  return std::find(taken.begin(), taken.end(), w) != taken.end();
}

namespace {

struct Candidate {
  std::size_t len;
  TermKind kind;
  int height;
};

std::vector<Candidate> candidates(const SplitContext& ctx, const std::vector<Dir>& s, std::size_t p) {
  const Graph& g = ctx.f->G();
  const Filtration& filt = *ctx.filt;
  std::vector<Candidate> out;
  auto matches = [&](const std::vector<Dir>& w, std::size_t at) {
    return at + w.size() <= s.size() && std::equal(w.begin(), w.end(), s.begin() + at);
  };
  for (const auto& np : ctx.catalog->paths) {
    Path back = reverse(g, np.path);
    if (matches(np.path.e, p) || matches(back.e, p)) out.push_back({np.path.size(), TermKind::nielsen, np.height});
  }
  for (const auto& li : ctx.linear) {
    if (s[p] != li.edge) continue;
    Path wb = reverse(g, li.w);
    for (const Path* piece : {static_cast<const Path*>(&li.w), static_cast<const Path*>(&wb)}) {
      std::size_t q = p + 1;
      for (int count = 0;; ++count) {
        if (q < s.size())
          for (const auto& lj : ctx.linear) {
            if (s[q] != bar(lj.edge)) continue;
            if (!(lj.w == li.w || lj.w == wb)) continue;
            if (count == 0 && piece != &li.w) continue;
            int h = std::max(filt.height(li.edge), filt.height(lj.edge));
            out.push_back({q + 1 - p, TermKind::exceptional, h});
          }
        if (!matches(piece->e, q)) break;
        q += piece->size();
      }
    }
  }
  int h = filt.height(s[p]);
  if (ctx.strata[h - 1].kind == StratumKind::zero) {
    if (p == 0 || filt.height(s[p - 1]) != h) {
      std::size_t q = p;
      while (q < s.size() && filt.height(s[q]) == h) ++q;
      if (ctx.is_taken({s.begin() + p, s.begin() + q})) out.push_back({q - p, TermKind::zero_path, h});
    }
  } else {
    out.push_back({1, TermKind::edge, h});
  }
  std::stable_sort(out.begin(), out.end(), [](const Candidate& a, const Candidate& b) { return a.len > b.len; });
  return out;
}

SplitResult split_word(const SplitContext& ctx, const std::vector<Dir>& s) {
  const Graph& g = ctx.f->G();
  SplitResult res;
  std::vector<bool> dead(s.size() + 1, false);
  std::vector<SplittingTerm> stack;
  std::function<bool(std::size_t)> go = [&](std::size_t p) -> bool {
    res.obstruction = std::max(res.obstruction, p);
    if (p == s.size()) return true;
    if (dead[p]) return false;
    if (p > 0 && !is_legal_turn(*ctx.f, bar(s[p - 1]), s[p])) {
      dead[p] = true;
      return false;
    }
    for (const auto& c : candidates(ctx, s, p)) {
      std::vector<Dir> w(s.begin() + p, s.begin() + p + c.len);
      stack.push_back({c.kind, make_path(g, w), c.height});
      if (go(p + c.len)) return true;
      stack.pop_back();
    }
    dead[p] = true;
    return false;
  };
  if (!s.empty() && go(0)) {
    res.ok = true;
    res.terms = stack;
    res.obstruction = s.size();
  }
  return res;
}

}  // namespace

SplitResult complete_splitting(const SplitContext& ctx, const Path& sigma) {
  if (sigma.trivial()) return {};
  return split_word(ctx, sigma.e);
}

SplitResult complete_splitting(const SplitContext& ctx, const Circuit& c) {
  SplitResult best;
  const std::size_t n = c.e.size();
  const Filtration& filt = *ctx.filt;
  for (std::size_t s = 0; s < n; ++s) {
    Dir prev = c.e[(s + n - 1) % n], cur = c.e[s];
    int h = filt.height(cur);
    if (ctx.strata[h - 1].kind == StratumKind::zero && filt.height(prev) == h && n > 1) continue;
    std::vector<Dir> w(c.e.begin() + s, c.e.end());
    w.insert(w.end(), c.e.begin(), c.e.begin() + s);
    SplitResult r = split_word(ctx, w);
    if (!r.ok) {
      best.obstruction = std::max(best.obstruction, r.obstruction);
      continue;
    }
    if (r.terms.size() > 1 && !is_legal_turn(*ctx.f, bar(prev), cur)) continue;
    return r;
  }
  return best;
}

bool verify_splitting(const GraphMap& f, const std::vector<SplittingTerm>& terms, int iterations) {
  std::vector<Path> cur;
  for (const auto& t : terms) cur.push_back(t.path);
  for (int i = 1; i <= iterations; ++i) {
    try {
      for (Path& p : cur) p = iterate(f, p, 1);
    } catch (const BlowupError&) {
      return false;
    }
    for (std::size_t j = 0; j + 1 < cur.size(); ++j)
      if (cur[j].trivial() || cancellation(cur[j], cur[j + 1]) > 0) return false;
    if (!cur.empty() && cur.back().trivial()) return false;
  }
  return true;
}

IterateSplit iterate_until_split(const SplitContext& ctx, const Path& sigma, int kmax) {
  IterateSplit out;
  Path p = sigma;
  for (int k = 0; k <= kmax; ++k) {
    if (k > 0) {
      try {
        p = iterate(*ctx.f, p, 1);
      } catch (const BlowupError&) {
        break;
      }
    }
    SplitResult r = complete_splitting(ctx, p);
    out.image = p;
    out.split = r;
    if (r.ok) {
      out.k = k;
      return out;
    }
  }
  return out;
}

std::vector<PrincipalVertex> principal_vertices(const GraphMap& f, const Filtration& filt,
                                                const NielsenCatalog& cat) {
  const Graph& g = f.G();
  std::vector<int> vnext(f.vmap.begin(), f.vmap.end());
  auto vper = cycle_lengths(vnext);
  std::vector<int> dnext(2 * g.ne());
  for (int i = 0; i < 2 * g.ne(); ++i) dnext[i] = dir_index(f.df(index_dir(i)));
  auto dper = cycle_lengths(dnext);

  // periodic edges: f^k(E) = E as an edge path
  std::vector<bool> pedge(g.ne(), false);
  for (int e = 0; e < g.ne(); ++e) {
    Dir d{e, false};
    for (int k = 0; k < 2 * g.ne(); ++k) {
      Path im = f.image(d);
      if (im.size() != 1) break;
      d = im.e.front();
      if (d.edge == e) {
        pedge[e] = true;
        break;
      }
    }
  }

  std::vector<PrincipalVertex> out;
  std::vector<std::vector<Dir>> pdirs(g.nv());
  for (int v = 0; v < g.nv(); ++v)
    for (Dir d : g.directions_at(v))
      if (dper[dir_index(d)]) pdirs[v].push_back(d);

  for (int v = 0; v < g.nv(); ++v) {
    PrincipalVertex pv;
    pv.vertex = v;
    pv.periodic = vper[v] > 0;
    pv.periodic_dirs = pdirs[v];
    if (!pv.periodic) {
      pv.reason = "not periodic";
      out.push_back(pv);
      continue;
    }
    // circle of periodic edges through vertices with two periodic directions
    bool circle = false;
    if (pdirs[v].size() == 2 && pedge[pdirs[v][0].edge] && pedge[pdirs[v][1].edge]) {
      circle = true;
      Dir d = pdirs[v][0];
      for (int steps = 0; steps <= 2 * g.ne(); ++steps) {
        int w = g.term(d);
        if (w == v) break;
        if (pdirs[w].size() != 2 || !pedge[pdirs[w][0].edge] || !pedge[pdirs[w][1].edge]) {
          circle = false;
          break;
        }
        d = pdirs[w][0] == bar(d) ? pdirs[w][1] : pdirs[w][0];
        if (steps == 2 * g.ne()) circle = false;
      }
    }
    if (circle) {
      pv.reason = "on a circle of periodic edges";
      out.push_back(pv);
      continue;
    }
    bool alone = true;
    for (Dir d : g.directions_at(v))
      if (pedge[d.edge]) alone = false;
    for (const auto& np : cat.paths) {
      int a = path_start(g, np.path), b = path_end(g, np.path);
      if ((a == v || b == v) && a != b) alone = false;
    }
    bool eg_pair = false;
    if (pdirs[v].size() == 2) {
      int h0 = filt.height(pdirs[v][0]), h1 = filt.height(pdirs[v][1]);
      if (h0 == h1) {
        IMatrix m = transition_matrix(f, filt.stratum(h0));
        eg_pair = !is_zero(m) && !is_permutation(m);
      }
    }
    if (alone && eg_pair) {
      pv.reason = "alone in its Nielsen class with two periodic directions in one EG stratum";
      out.push_back(pv);
      continue;
    }
    pv.principal = true;
    pv.reason = pdirs[v].size() >= 3  ? "at least three periodic directions"
                : !alone              ? "Nielsen equivalent to another periodic point"
                                      : "periodic directions not confined to one EG stratum";
    out.push_back(pv);
  }
  return out;
}

std::vector<Dir> principal_directions(const GraphMap& f, const std::vector<PrincipalVertex>& pv) {
  const Graph& g = f.G();
  std::vector<Dir> out;
  for (const auto& p : pv) {
    if (!p.principal) continue;
    for (Dir d : g.directions_at(p.vertex))
      if (f.df(d) == d && f.image(d) != single(g, d)) out.push_back(d);
  }
  return out;
}

bool is_homeomorphism_onto(const MapState& s, const Graph& cod, const std::vector<int>& target) {
  std::vector<int> cover(cod.ne(), 0);
  std::vector<int> vcover(cod.nv(), 0);
  for (int e = 0; e < s.g.ne(); ++e) {
    const Path& p = s.img[e];
    if (p.trivial()) return false;
    for (std::size_t i = 0; i < p.size(); ++i) {
      ++cover[p.e[i].edge];
      if (i > 0) ++vcover[cod.init(p.e[i])];
    }
  }
  for (int v = 0; v < s.g.nv(); ++v) ++vcover[s.vimg[v]];
  std::set<int> tset(target.begin(), target.end());
  for (int e = 0; e < cod.ne(); ++e)
    if (cover[e] != (tset.count(e) ? 1 : 0)) return false;
  for (int v : vertices_of(cod, target))
    if (vcover[v] != 1) return false;
  return true;
}

namespace {

// Phase 2: fold pairs of lower edges until none remain.
std::optional<MapState> fold_lower(MapState s, const Graph& cod, int r, int budget) {
  for (int step = 0;; ++step) {
    std::optional<std::pair<Dir, Dir>> turn;
    for (int v = 0; v < s.g.nv() && !turn; ++v) {
      auto dirs = s.g.directions_at(v);
      for (std::size_t i = 0; i < dirs.size() && !turn; ++i)
        for (std::size_t j = i + 1; j < dirs.size() && !turn; ++j) {
          if (s.height[dirs[i].edge] >= r || s.height[dirs[j].edge] >= r) continue;
          if (image_in(s, cod, dirs[i]).e.front() == image_in(s, cod, dirs[j]).e.front())
            turn = std::make_pair(dirs[i], dirs[j]);
        }
    }
    if (!turn) return s;
    if (step >= budget) return std::nullopt;
    s = fold_turn(s, cod, turn->first, turn->second).after;
  }
}

Path push_forward(const Graph& k, const std::vector<Path>& quotient, const Path& p) {
  std::vector<Dir> w;
  for (Dir d : p.e) {
    Path q = d.rev ? reverse(k, quotient[d.edge]) : quotient[d.edge];
    w.insert(w.end(), q.e.begin(), q.e.end());
  }
  return tighten(k, w);
}

// Restriction of f to a subgraph, as a map into the whole graph.
MapState restrict_state(const GraphMap& f, const Filtration& filt, const std::vector<int>& edges,
                        std::vector<int>& vnew, std::vector<int>& enew) {
  const Graph& g = f.G();
  MapState s;
  vnew.assign(g.nv(), -1);
  enew.assign(g.ne(), -1);
  for (int v : vertices_of(g, edges)) {
    vnew[v] = s.g.add_vertex(g.vnames[v]);
    s.vimg.push_back(f.vmap[v]);
  }
  for (int e : edges) {
    enew[e] = s.g.add_edge(g.enames[e], vnew[g.src[e]], vnew[g.dst[e]]);
    s.img.push_back(f.img[e]);
    s.height.push_back(filt.height_of[e]);
  }
  return s;
}

Path relabel(const Graph& k, const std::vector<int>& enew, const Path& p) {
  std::vector<Dir> w;
  for (Dir d : p.e) w.push_back({enew[d.edge], d.rev});
  return make_path(k, w);
}

// Proper extended folds along rho, then lower folds, ending in a
// homeomorphism onto the component.
Verdict eg_nielsen_decomposition(const GraphMap& f, const Filtration& filt, int r, const NielsenPath& np,
                                 int budget, std::string& detail) {
  const Graph& g = f.G();
  std::vector<int> gr = filt.prefix(r);
  CoreSubgraph sub{gr};
  std::vector<int> comp;
  for (const auto& c : sub.components(g))
    if (std::find(c.edges.begin(), c.edges.end(), filt.stratum(r).front()) != c.edges.end()) comp = c.edges;
  std::vector<int> vnew, enew;
  MapState s = restrict_state(f, filt, comp, vnew, enew);
  Path alpha = relabel(s.g, enew, subpath(g, np.path, 0, np.split));
  Path beta = relabel(s.g, enew, subpath(g, np.path, np.split, np.path.size()));
  for (int stage = 0; stage <= budget; ++stage) {
    if (auto t = fold_lower(s, g, r, budget); t && is_homeomorphism_onto(*t, g, comp)) {
      detail = std::to_string(stage) + " proper extended folds";
      return Verdict::pass;
    }
    if (alpha.trivial() || beta.trivial()) break;
    Dir e1 = bar(alpha.e.back()), e2 = beta.e.front();
    Path i1 = image_in(s, g, e1), i2 = image_in(s, g, e2);
    std::size_t c = 0;
    while (c < i1.size() && c < i2.size() && i1.e[c] == i2.e[c]) ++c;
    if (c == 0 || i1.size() == i2.size() || (c < i1.size() && c < i2.size())) {
      detail = "fold at the illegal turn is not proper after " + std::to_string(stage) + " steps";
      break;
    }
    bool over_alpha = c == i1.size();
    Path abar = reverse(s.g, alpha);
    const Path& side = over_alpha ? abar : beta;
    Dir under = over_alpha ? e2 : e1;
    std::size_t len = 1;
    while (len < side.size() && s.height[side.e[len].edge] < r) ++len;
    Path sigma = subpath(s.g, side, 0, len);
    GeneralizedFold gf;
    try {
      gf = generalized_fold(s, g, under, sigma);
    } catch (const FoldError& e) {
      detail = e.what();
      break;
    }
    Path a2 = push_forward(gf.after.g, gf.quotient, alpha);
    Path b2 = push_forward(gf.after.g, gf.quotient, beta);
    std::size_t cut = cancellation(a2, b2);
    if (cut >= a2.size() || cut >= b2.size()) {
      detail = "pushed-forward path degenerates";
      break;
    }
    s = gf.after;
    alpha = subpath(s.g, a2, 0, a2.size() - cut);
    beta = subpath(s.g, b2, cut, b2.size());
  }
  if (detail.empty()) detail = "fold budget exhausted";
  return Verdict::inconclusive;
}

std::set<int> as_set(const std::vector<int>& v) { return {v.begin(), v.end()}; }

}  // namespace

std::vector<std::pair<std::string, const Check*>> CtReport::axioms() const {
  return {{"Rotationless", &rotationless},     {"Completely Split", &completely_split},
          {"Filtration", &filtration},         {"Vertices", &vertices},
          {"Periodic Edges", &periodic_edges}, {"Zero Strata", &zero_strata},
          {"Linear Edges", &linear_edges},     {"NEG Nielsen Paths", &neg_nielsen},
          {"EG Nielsen Paths", &eg_nielsen}};
}

bool CtReport::is_rtt() const {
  return std::all_of(rtt.begin(), rtt.end(), [](const RttReport& r) { return r.ok(); });
}

bool CtReport::is_ct() const {
  if (!is_rtt()) return false;
  for (const auto& [name, c] : axioms())
    if (!c->ok()) return false;
  return true;
}

bool CtReport::conclusive() const {
  for (const auto& r : rtt)
    for (const Check* c : {&r.i, &r.ii, &r.iii})
      if (c->verdict == Verdict::inconclusive) return false;
  for (const auto& [name, c] : axioms())
    if (c->verdict == Verdict::inconclusive) return false;
  return true;
}

CtReport verify_ct(const GraphMap& f, const Filtration& filt, const CtOptions& opt) {
  std::size_t len = opt.length_cap ? opt.length_cap : default_length_cap(f);
  NielsenCatalog cat = nielsen_catalog(f, filt, len, opt.period_cap);
  return verify_ct(f, filt, cat, opt);
}

CtReport verify_ct(const GraphMap& f, const Filtration& filt, const NielsenCatalog& cat, const CtOptions& opt) {
  const Graph& g = f.G();
  CtReport rep;
  rep.rtt = verify_rtt(f, filt);
  rep.principal = principal_vertices(f, filt, cat);
  rep.principal_dirs = principal_directions(f, rep.principal);
  SplitContext ctx(f, filt, cat, opt.kmax);
  const auto& strata = ctx.strata;
  auto is_principal = [&](int v) { return rep.principal[v].principal; };
  auto kind = [&](int h) { return strata[h - 1].kind; };
  for (int r = 1; r <= filt.size(); ++r)
    if (!cat.conclusive(r) && kind(r) != StratumKind::zero)
      for (Check* c : {&rep.rotationless, &rep.vertices, &rep.periodic_edges})
        c->unsure("Nielsen search at height " + std::to_string(r) + " hit its caps");

  // Rotationless
  rep.rotationless.notes.push_back("checked on vertices and directions; the boundary definition is not examined");
  for (const auto& pv : rep.principal) {
    if (!pv.principal) continue;
    if (f.vmap[pv.vertex] != pv.vertex) rep.rotationless.fail("principal vertex " + g.vnames[pv.vertex] + " is not fixed");
    for (Dir d : pv.periodic_dirs)
      if (f.df(d) != d)
        rep.rotationless.fail("periodic direction " + g.dir_name(d) + " at principal vertex " + g.vnames[pv.vertex] +
                              " is not fixed");
  }

  // Completely Split
  for (const auto& s : strata) {
    if (s.kind == StratumKind::zero) continue;
    for (int e : s.edges) {
      auto r = complete_splitting(ctx, f.img[e]);
      if (!r.ok)
        rep.completely_split.fail("f(" + g.enames[e] + ") = " + to_string(g, f.img[e]) +
                                  " has no complete splitting (stuck at position " + std::to_string(r.obstruction) +
                                  ")");
    }
  }
  for (std::size_t i = 0; i < ctx.taken.size(); i += 2) {
    Path tau = make_path(g, ctx.taken[i]);
    Path im = f.map_path(tau);
    if (im.trivial() || !complete_splitting(ctx, im).ok)
      rep.completely_split.fail("taken path " + to_string(g, tau) + " has image " + to_string(g, im) +
                                " without a complete splitting");
  }
  if (!ctx.taken.empty())
    rep.completely_split.notes.push_back("taken paths collected up to iterate " + std::to_string(opt.kmax));

  // Filtration
  rep.filtration.notes.push_back("reduced: checked against invariant subgraphs only");
  for (int i = 1; i <= filt.size(); ++i) {
    auto core = as_set(core_edges(g, filt.prefix(i)));
    bool found = false;
    for (int j = 0; j <= i && !found; ++j) found = as_set(filt.prefix(j)) == core;
    if (!found) rep.filtration.fail("core(G_" + std::to_string(i) + ") is not a filtration element");
    const auto& h = filt.stratum(i);
    if (h.size() > 12 || h.size() < 2) continue;
    auto low = filt.prefix(i - 1);
    auto core_low = as_set(core_edges(g, low));
    for (unsigned mask = 1; mask + 1 < (1u << h.size()); ++mask) {
      std::set<int> sub;
      for (std::size_t b = 0; b < h.size(); ++b)
        if (mask >> b & 1u) sub.insert(h[b]);
      bool inv = true;
      for (int e : sub)
        for (Dir d : f.img[e].e)
          if (filt.height(d) == i && !sub.count(d.edge)) inv = false;
      if (!inv) continue;
      std::vector<int> mid = low;
      mid.insert(mid.end(), sub.begin(), sub.end());
      auto cm = as_set(core_edges(g, mid));
      if (cm != core_low && cm != core) {
        std::string w;
        for (int e : sub) w += (w.empty() ? "" : " ") + g.enames[e];
        rep.filtration.fail("invariant core subgraph strictly between G_" + std::to_string(i - 1) + " and G_" +
                            std::to_string(i) + " adds {" + w + "}");
      }
    }
  }

  // Vertices
  rep.vertices.notes.push_back("Nielsen paths are edge paths, so their endpoints are vertices");
  for (const auto& s : strata) {
    if ((s.kind != StratumKind::neg_nonfixed && s.kind != StratumKind::neg_linear) || s.periodic) continue;
    for (const auto& ne : s.neg) {
      int v = g.term(ne.edge);
      if (!is_principal(v))
        rep.vertices.fail("terminal vertex " + g.vnames[v] + " of nonfixed NEG edge " + g.dir_name(ne.edge) +
                          " is not principal");
    }
  }

  // Periodic Edges
  for (const auto& s : strata) {
    if (!s.periodic && s.kind != StratumKind::neg_fixed) continue;
    for (int e : s.edges) {
      Dir d{e, false};
      if (f.image(d) != single(g, d)) {
        rep.periodic_edges.fail("periodic edge " + g.enames[e] + " is not fixed");
        continue;
      }
      for (int v : {g.src[e], g.dst[e]})
        if (!is_principal(v)) rep.periodic_edges.fail("endpoint " + g.vnames[v] + " of fixed edge " + g.enames[e] + " is not principal");
      if (s.edges.size() == 1 && g.src[e] != g.dst[e]) {
        auto low = filt.prefix(s.height - 1);
        if (as_set(core_edges(g, low)) != as_set(low))
          rep.periodic_edges.fail("fixed edge " + g.enames[e] + " sits over a non-core G_" + std::to_string(s.height - 1));
        CoreSubgraph cs{low};
        for (int v : {g.src[e], g.dst[e]})
          if (!cs.contains_vertex(g, v))
            rep.periodic_edges.fail("endpoint " + g.vnames[v] + " of fixed edge " + g.enames[e] + " is outside G_" +
                                    std::to_string(s.height - 1));
      }
    }
  }

  // Zero Strata
  for (const auto& s : strata) {
    if (s.kind != StratumKind::zero) continue;
    if (!s.enveloped_by) {
      rep.zero_strata.fail("zero stratum H_" + std::to_string(s.height) + " is not enveloped");
      continue;
    }
    int r = s.enveloped_by;
    std::set<int> hr = as_set(filt.stratum(r)), hi = as_set(s.edges);
    for (int e : s.edges) {
      bool taken = false;
      for (const auto& t : ctx.taken)
        for (Dir d : t) taken = taken || d.edge == e;
      if (!taken) rep.zero_strata.unsure("edge " + g.enames[e] + " not seen in iterates of H_" + std::to_string(r));
    }
    for (int v : vertices_of(g, s.edges)) {
      bool in_hr = false, link_ok = true;
      for (Dir d : g.directions_at(v)) {
        in_hr = in_hr || hr.count(d.edge);
        link_ok = link_ok && (hr.count(d.edge) || hi.count(d.edge));
      }
      if (!in_hr) rep.zero_strata.fail("vertex " + g.vnames[v] + " of H_" + std::to_string(s.height) + " is not in H_" + std::to_string(r));
      if (!link_ok) rep.zero_strata.fail("link of " + g.vnames[v] + " leaves H_" + std::to_string(s.height) + " and H_" + std::to_string(r));
    }
  }

  // Linear Edges
  for (std::size_t i = 0; i < ctx.linear.size(); ++i) {
    const auto& li = ctx.linear[i];
    if (f.map_path(li.w) != li.w)
      rep.linear_edges.fail("axis " + to_string(g, li.w) + " of linear edge " + g.dir_name(li.edge) + " is not fixed");
    Circuit ci = cyclic_tighten(g, li.w.e);
    for (std::size_t j = i + 1; j < ctx.linear.size(); ++j) {
      const auto& lj = ctx.linear[j];
      Circuit cj = cyclic_tighten(g, lj.w.e);
      if (!(ci == cj || ci == reverse(cj))) continue;
      int dj = lj.d;
      if (lj.w == reverse(g, li.w))
        dj = -dj;
      else if (!(lj.w == li.w)) {
        rep.linear_edges.fail("linear edges " + g.dir_name(li.edge) + " and " + g.dir_name(lj.edge) +
                              " have freely homotopic but distinct axes");
        continue;
      }
      if (dj == li.d)
        rep.linear_edges.fail("linear edges " + g.dir_name(li.edge) + " and " + g.dir_name(lj.edge) +
                              " share axis and exponent");
    }
  }

  // NEG Nielsen Paths
  rep.neg_nielsen.notes.push_back("fixed edges are exempt; other paths searched up to length 6 from the stratum edge");
  for (const auto& s : strata) {
    if ((s.kind != StratumKind::neg_nonfixed && s.kind != StratumKind::neg_linear) || s.edges.size() != 1) continue;
    int e = s.edges.front();
    auto lin = std::find_if(ctx.linear.begin(), ctx.linear.end(), [&](const auto& l) { return l.edge.edge == e; });
    auto allowed = [&](const Path& p) {
      if (lin == ctx.linear.end() || p.size() < 2) return false;
      Path q = p;
      if (q.e.front() != lin->edge) q = reverse(g, q);
      if (q.e.front() != lin->edge || q.e.back() != bar(lin->edge)) return false;
      Path mid = subpath(g, q, 1, q.size() - 1);
      if (mid.trivial() || mid.size() % lin->w.size()) return false;
      Path wb = reverse(g, lin->w);
      for (const Path* piece : {static_cast<const Path*>(&lin->w), static_cast<const Path*>(&wb)}) {
        bool ok = true;
        for (std::size_t k = 0; k < mid.size() && ok; ++k) ok = mid.e[k] == piece->e[k % piece->size()];
        if (ok) return true;
      }
      return false;
    };
    std::set<std::vector<Dir>> reported;
    auto consider = [&](const Path& p) {
      if (allowed(p)) return;
      Path c = reverse(g, p);
      if (c.e < p.e) c = p;
      if (reported.insert(c.e).second)
        rep.neg_nielsen.fail("indivisible Nielsen path " + to_string(g, p) + " of NEG height " + std::to_string(s.height));
    };
    for (const auto& np : cat.at_height(s.height)) consider(np.path);
    std::size_t nodes = 0;
    std::vector<Dir> word;
    std::function<void()> dfs = [&]() {
      if (++nodes > 200000) return;
      if (word.size() >= 2) {
        Path p = make_path(g, word);
        if (nielsen_period(f, p, opt.period_cap) && is_indivisible(f, p, opt.period_cap)) consider(p);
      }
      if (word.size() >= 6) return;
      for (Dir d : g.directions_at(g.term(word.back()))) {
        if (d == bar(word.back()) || filt.height(d) > s.height) continue;
        word.push_back(d);
        dfs();
        word.pop_back();
      }
    };
    for (bool rev : {false, true}) {
      word = {Dir{e, rev}};
      dfs();
    }
    if (nodes > 200000) rep.neg_nielsen.unsure("search at height " + std::to_string(s.height) + " truncated");
  }

  // EG Nielsen Paths
  for (const auto& s : strata) {
    if (s.kind != StratumKind::eg) continue;
    if (!cat.conclusive(s.height)) rep.eg_nielsen.unsure("Nielsen search at height " + std::to_string(s.height) + " hit its caps");
    for (const auto& np : cat.at_height(s.height)) {
      if (np.kind != NielsenKind::eg) continue;
      if (np.period != 1) {
        rep.eg_nielsen.notes.push_back(to_string(g, np.path) + " has period " + std::to_string(np.period) +
                                       " and is not a Nielsen path");
        continue;
      }
      std::string detail;
      Verdict v = eg_nielsen_decomposition(f, filt, s.height, np, opt.fold_budget, detail);
      if (v == Verdict::pass)
        rep.eg_nielsen.notes.push_back(to_string(g, np.path) + ": " + detail);
      else
        rep.eg_nielsen.unsure(to_string(g, np.path) + ": " + detail);
    }
  }
  return rep;
}

}  // namespace outfn
