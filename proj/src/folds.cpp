#include "outfn/folds.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace outfn {

std::string to_string(FoldClass c) {
  switch (c) {
    case FoldClass::partial:
      return "partial";
    case FoldClass::full_improper:
      return "full-improper";
    case FoldClass::full_proper:
      return "full-proper";
  }
  return "?";
}

namespace {

Path image_of(const MapState& s, const Graph& cod, Dir d) {
  const Path& p = s.img[d.edge];
  return d.rev ? reverse(cod, p) : p;
}

// Mutable copy of a MapState used while performing one operation.
struct Work {
  struct V {
    std::string name;
    int img;
    bool alive = true;
  };
  struct E {
    std::string name;
    int src, dst;
    Path img;
    int height;
    bool alive = true;
  };
  std::vector<V> vs;
  std::vector<E> es;
  // old edge -> forward sequence of work-edge pieces
  std::vector<std::vector<Dir>> pieces;
  std::set<std::string> names;

  explicit Work(const MapState& s) {
    for (int v = 0; v < s.g.nv(); ++v) {
      vs.push_back({s.g.vnames[v], s.vimg[v]});
      names.insert("v:" + s.g.vnames[v]);
    }
    for (int e = 0; e < s.g.ne(); ++e) {
      es.push_back({s.g.enames[e], s.g.src[e], s.g.dst[e], s.img[e], s.height.empty() ? 0 : s.height[e]});
      pieces.push_back({{e, false}});
      names.insert("e:" + s.g.enames[e]);
    }
  }

  std::string fresh(const std::string& kind, std::string base) {
    while (names.count(kind + base)) base += "'";
    names.insert(kind + base);
    return base;
  }

  // Splits work edge e at the given image positions; returns forward pieces.
  std::vector<int> split(const Graph& cod, int e, std::vector<std::size_t> cuts) {
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    E old = es[e];
    es[e].alive = false;
    std::vector<int> out;
    std::size_t prev = 0;
    int from = old.src;
    for (std::size_t i = 0; i <= cuts.size(); ++i) {
      std::size_t upto = i < cuts.size() ? cuts[i] : old.img.size();
      int to = old.dst;
      if (i < cuts.size()) {
        int im = cod.term(old.img.e[upto - 1]);
        vs.push_back({fresh("v:", old.name + ":" + std::to_string(i + 1)), im});
        to = static_cast<int>(vs.size()) - 1;
      }
      es.push_back({fresh("e:", old.name + "." + std::to_string(i + 1)), from, to, subpath(cod, old.img, prev, upto),
                    old.height});
      out.push_back(static_cast<int>(es.size()) - 1);
      from = to;
      prev = upto;
    }
    for (auto& seq : pieces) {
      std::vector<Dir> next;
      for (Dir d : seq) {
        if (d.edge != e) {
          next.push_back(d);
          continue;
        }
        if (!d.rev)
          for (int p : out) next.push_back({p, false});
        else
          for (auto it = out.rbegin(); it != out.rend(); ++it) next.push_back({*it, true});
      }
      seq = next;
    }
    return out;
  }

  int init(Dir d) const { return d.rev ? es[d.edge].dst : es[d.edge].src; }
  int term(Dir d) const { return d.rev ? es[d.edge].src : es[d.edge].dst; }

  void merge_vertex(int drop, int keep) {
    if (drop == keep) return;
    for (auto& e : es) {
      if (!e.alive) continue;
      if (e.src == drop) e.src = keep;
      if (e.dst == drop) e.dst = keep;
    }
    vs[drop].alive = false;
  }

  // Replaces work edge e (forward) by the given work path in all pieces.
  void substitute(int e, const std::vector<Dir>& by) {
    es[e].alive = false;
    for (auto& seq : pieces) {
      std::vector<Dir> next;
      for (Dir d : seq) {
        if (d.edge != e) {
          next.push_back(d);
          continue;
        }
        if (!d.rev)
          next.insert(next.end(), by.begin(), by.end());
        else
          for (auto it = by.rbegin(); it != by.rend(); ++it) next.push_back(bar(*it));
      }
      seq = next;
    }
  }

  std::pair<MapState, std::vector<Path>> finish() const {
    MapState s;
    std::vector<int> vid(vs.size(), -1), eid(es.size(), -1);
    for (std::size_t v = 0; v < vs.size(); ++v) {
      if (!vs[v].alive) continue;
      vid[v] = s.g.add_vertex(vs[v].name);
      s.vimg.push_back(vs[v].img);
    }
    for (std::size_t e = 0; e < es.size(); ++e) {
      if (!es[e].alive) continue;
      eid[e] = s.g.add_edge(es[e].name, vid[es[e].src], vid[es[e].dst]);
      s.img.push_back(es[e].img);
      s.height.push_back(es[e].height);
    }
    std::vector<Path> quotient;
    for (std::size_t old = 0; old < pieces.size(); ++old) {
      std::vector<Dir> w;
      for (Dir d : pieces[old]) w.push_back({eid[d.edge], d.rev});
      int base = w.empty() ? -1 : s.g.init(w.front());
      quotient.push_back(tighten(s.g, w, base));
    }
    return {s, quotient};
  }
};

std::size_t common_prefix(const Path& a, const Path& b) {
  std::size_t n = 0;
  while (n < a.e.size() && n < b.e.size() && a.e[n] == b.e[n]) ++n;
  return n;
}

// Cut position in forward orientation for an initial segment of length l of d.
std::size_t forward_cut(const Path& forward_img, Dir d, std::size_t l) {
  return d.rev ? forward_img.size() - l : l;
}

}  // namespace

MapState state_of(const GraphMap& f) {
  MapState s;
  s.g = f.G();
  s.vimg = f.vmap;
  s.img = f.img;
  s.height.assign(f.G().ne(), 0);
  return s;
}

FoldStep fold_turn(const MapState& s, const Graph& cod, Dir e1, Dir e2) {
  if (e1 == e2 || s.g.init(e1) != s.g.init(e2)) throw FoldError("not foldable: not a nondegenerate turn");
  Path i1 = image_of(s, cod, e1), i2 = image_of(s, cod, e2);
  if (i1.e.empty() || i2.e.empty() || i1.e.front() != i2.e.front())
    throw FoldError("not foldable: turn has nondegenerate image");
  FoldStep step;
  step.e1 = e1;
  step.e2 = e2;
  step.before = s;
  const std::size_t l = common_prefix(i1, i2);
  step.segment = l;
  const bool whole1 = l == i1.size(), whole2 = l == i2.size();
  if (!whole1 && !whole2)
    step.cls = FoldClass::partial;
  else if (whole1 && whole2)
    step.cls = FoldClass::full_improper;
  else {
    step.cls = FoldClass::full_proper;
    step.over = whole1 ? e2.edge : e1.edge;
    step.under = whole1 ? e1.edge : e2.edge;
  }

  Work w(s);
  Dir a1 = e1, a2 = e2;
  if (e1.edge == e2.edge) {
    // A loop folded against itself; both ends are partial.
    const Path& im = s.img[e1.edge];
    auto p = w.split(cod, e1.edge, {l, im.size() - l});
    a1 = e1.rev ? Dir{p.back(), true} : Dir{p.front(), false};
    a2 = e2.rev ? Dir{p.back(), true} : Dir{p.front(), false};
  } else {
    if (!whole1) {
      auto p = w.split(cod, e1.edge, {forward_cut(s.img[e1.edge], e1, l)});
      a1 = e1.rev ? Dir{p.back(), true} : Dir{p.front(), false};
    }
    if (!whole2) {
      auto p = w.split(cod, e2.edge, {forward_cut(s.img[e2.edge], e2, l)});
      a2 = e2.rev ? Dir{p.back(), true} : Dir{p.front(), false};
    }
  }
  int t1 = w.term(a1), t2 = w.term(a2);
  Dir to = a2.rev ? bar(a1) : a1;
  w.substitute(a2.edge, {to});
  if (t1 != t2) w.merge_vertex(t2, t1);
  auto [after, q] = w.finish();
  step.after = after;
  step.quotient = q;
  return step;
}

FoldStep classify_fold(const GraphMap& f, Dir e1, Dir e2) { return fold_turn(state_of(f), f.H(), e1, e2); }

namespace {

std::optional<std::pair<Dir, Dir>> first_foldable(const MapState& s, const Graph& cod) {
  for (int v = 0; v < s.g.nv(); ++v) {
    auto dirs = s.g.directions_at(v);
    for (std::size_t i = 0; i < dirs.size(); ++i)
      for (std::size_t j = i + 1; j < dirs.size(); ++j)
        if (image_of(s, cod, dirs[i]).e.front() == image_of(s, cod, dirs[j]).e.front())
          return std::make_pair(dirs[i], dirs[j]);
  }
  return std::nullopt;
}

// An immersion of a graph is a homotopy equivalence iff, after full
// subdivision and pruning of hanging trees, it is bijective.
bool terminal_isomorphism(const MapState& s, const Graph& cod) {
  Immersion im;
  for (int v = 0; v < s.g.nv(); ++v) im.add_vertex(s.vimg[v]);
  for (int e = 0; e < s.g.ne(); ++e) im.add_path(cod, s.g.src[e], s.g.dst[e], s.img[e]);
  std::vector<bool> alive(im.edges.size(), true);
  for (bool changed = true; changed;) {
    changed = false;
    std::vector<int> deg(im.nv, 0);
    for (std::size_t i = 0; i < im.edges.size(); ++i)
      if (alive[i]) {
        ++deg[im.edges[i].from];
        ++deg[im.edges[i].to];
      }
    for (std::size_t i = 0; i < im.edges.size(); ++i)
      if (alive[i] && (deg[im.edges[i].from] == 1 || deg[im.edges[i].to] == 1)) {
        alive[i] = false;
        changed = true;
      }
  }
  std::vector<int> cover(cod.ne(), 0);
  std::set<int> verts;
  std::vector<int> vcover(cod.nv(), 0);
  for (std::size_t i = 0; i < im.edges.size(); ++i) {
    if (!alive[i]) continue;
    ++cover[im.edges[i].img.edge];
    verts.insert(im.edges[i].from);
    verts.insert(im.edges[i].to);
  }
  for (int v : verts) ++vcover[im.vimg[v]];
  for (int c : cover)
    if (c != 1) return false;
  for (int c : vcover)
    if (c != 1) return false;
  return true;
}

}  // namespace

bool is_immersion(const MapState& s, const Graph& cod) { return !first_foldable(s, cod).has_value(); }

std::vector<Path> Factorization::recompose(const Graph& cod) const {
  std::vector<Path> out;
  for (const Path& p : to_terminal) {
    std::vector<Dir> w;
    for (Dir d : p.e) {
      Path im = image_of(terminal, cod, d);
      w.insert(w.end(), im.e.begin(), im.e.end());
    }
    out.push_back(tighten(cod, w, p.trivial() ? terminal.vimg[p.base] : -1));
  }
  return out;
}

Factorization stallings_factorize(const MapState& start, const Graph& cod, int budget) {
  Factorization fz;
  MapState cur = start;
  if (cur.height.size() != static_cast<std::size_t>(cur.g.ne())) cur.height.assign(cur.g.ne(), 0);
  for (int e = 0; e < cur.g.ne(); ++e) {
    if (cur.img[e].trivial()) throw FoldError("edge " + cur.g.enames[e] + " has a trivial image");
    fz.to_terminal.push_back(single(cur.g, {e, false}));
  }
  std::size_t complexity = 0;
  for (const Path& p : cur.img) complexity += p.size();
  while (auto turn = first_foldable(cur, cod)) {
    if (static_cast<int>(fz.steps.size()) >= budget) {
      fz.terminal = cur;
      throw FoldError("fold budget exceeded after " + std::to_string(fz.steps.size()) + " steps");
    }
    FoldStep step = fold_turn(cur, cod, turn->first, turn->second);
    std::size_t next = 0;
    for (const Path& p : step.after.img) next += p.size();
    if (next >= complexity) throw FoldError("fold failed to reduce total image length");
    complexity = next;
    for (Path& p : fz.to_terminal) {
      std::vector<Dir> w;
      for (Dir d : p.e) {
        Path q = step.quotient[d.edge];
        if (d.rev) q = reverse(step.after.g, q);
        w.insert(w.end(), q.e.begin(), q.e.end());
      }
      p = tighten(step.after.g, w, -1);
    }
    fz.bcc += static_cast<int>(step.segment);
    cur = step.after;
    fz.steps.push_back(std::move(step));
  }
  fz.terminal = cur;
  fz.isomorphism = terminal_isomorphism(cur, cod);
  return fz;
}

Factorization stallings_factorize(const GraphMap& f, int budget) { return stallings_factorize(state_of(f), f.H(), budget); }

namespace {

// Spanning-tree coordinates: loops at the root vertex as words in the
// non-tree edges.
struct TreeCoords {
  std::vector<Path> theta;  // root -> v inside the tree
  std::vector<int> letter;  // edge -> letter (1-based), 0 on tree edges
  std::vector<int> edge_of; // letter -> edge
  int rank = 0;

  explicit TreeCoords(const Graph& g) : theta(g.nv()), letter(g.ne(), 0), edge_of(1, -1) {
    std::vector<bool> seen(g.nv(), false), tree(g.ne(), false);
    std::vector<int> queue{0};
    seen[0] = true;
    theta[0] = trivial_at(0);
    for (std::size_t i = 0; i < queue.size(); ++i) {
      int v = queue[i];
      for (Dir d : g.directions_at(v)) {
        int w = g.term(d);
        if (seen[w]) continue;
        seen[w] = true;
        tree[d.edge] = true;
        theta[w] = theta[v];
        theta[w].e.push_back(d);
        queue.push_back(w);
      }
    }
    for (int e = 0; e < g.ne(); ++e)
      if (!tree[e]) {
        letter[e] = ++rank;
        edge_of.push_back(e);
      }
  }

  void append(FWord& out, const std::vector<Dir>& w) const {
    for (Dir d : w)
      if (letter[d.edge]) out.push_back(d.rev ? -letter[d.edge] : letter[d.edge]);
  }

  void append_loop(const Graph& g, std::vector<Dir>& out, int x) const {
    int e = edge_of[std::abs(x)];
    const auto& to = theta[g.src[e]].e;
    const auto& back = theta[g.dst[e]].e;
    if (x > 0) {
      out.insert(out.end(), to.begin(), to.end());
      out.push_back({e, false});
      for (auto it = back.rbegin(); it != back.rend(); ++it) out.push_back(bar(*it));
    } else {
      out.insert(out.end(), back.begin(), back.end());
      out.push_back({e, true});
      for (auto it = to.rbegin(); it != to.rend(); ++it) out.push_back(bar(*it));
    }
  }
};

// Segment k of an edge of the subdivided domain, traversed backwards when
// rev is set.
struct Seg {
  int edge, k;
  bool rev;
  bool operator==(const Seg&) const = default;
};

// A point of the subdivided domain: a vertex (edge < 0) or the interior
// subdivision point at offset `off` of an edge.
struct Pt {
  int edge, off, vertex;
};

// Geodesics in the universal cover joining points of one fiber of a lifted
// homotopy equivalence. Each point of the subdivided domain has exactly one
// lift in each fiber over its image, so these are determined by the points.
class Fibers {
 public:
  explicit Fibers(const GraphMap& f) : f_(f), tg_(f.G()), th_(f.H()), fiber_(f.H().nv()) {
    if (tg_.rank != th_.rank) throw FoldError("not a homotopy equivalence");
    std::vector<FWord> alpha;
    for (int x = 1; x <= tg_.rank; ++x) {
      std::vector<Dir> loop;
      tg_.append_loop(f.G(), loop, x);
      FWord a;
      th_.append(a, image_word(loop));
      alpha.push_back(freduce(a));
    }
    auto inv = finvert(alpha, tg_.rank);
    if (!inv) throw FoldError("not a homotopy equivalence");
    inv_ = *inv;
    for (int v = 0; v < f.G().nv(); ++v) fiber_[f.vmap[v]].push_back({-1, 0, v});
    for (int e = 0; e < f.G().ne(); ++e)
      for (std::size_t i = 1; i < f.img[e].size(); ++i)
        fiber_[f.H().init(f.img[e].e[i])].push_back({e, static_cast<int>(i), -1});
    for (const auto& fb : fiber_) points_ += fb.size();
  }

  const std::vector<std::vector<Pt>>& fibers() const { return fiber_; }
  std::size_t points() const { return points_; }
  int len(int e) const { return static_cast<int>(f_.img[e].size()); }

  Dir image(const Seg& s) const {
    Dir d = f_.img[s.edge].e[s.k];
    return s.rev ? bar(d) : d;
  }
  bool ends_at_vertex(const Seg& s) const { return s.rev ? s.k == 0 : s.k + 1 == len(s.edge); }

  void expand(std::vector<Seg>& out, Dir d) const {
    if (!d.rev)
      for (int k = 0; k < len(d.edge); ++k) out.push_back({d.edge, k, false});
    else
      for (int k = len(d.edge) - 1; k >= 0; --k) out.push_back({d.edge, k, true});
  }

  // The reduced path from u to the lift of v in the fiber of u.
  std::vector<Seg> geodesic(const Pt& u, const Pt& v) const {
    const Graph& G = f_.G();
    std::vector<Seg> head, tail;
    int a = u.vertex, b = v.vertex;
    if (u.edge >= 0) {
      a = G.dst[u.edge];
      for (int k = u.off; k < len(u.edge); ++k) head.push_back({u.edge, k, false});
    }
    if (v.edge >= 0) {
      b = G.src[v.edge];
      for (int k = 0; k < v.off; ++k) tail.push_back({v.edge, k, false});
    }
    // f(theta_a) s^-1 p^-1 f(theta_b)^-1, read in the tree coordinates of H
    std::vector<Dir> loop = image_word(tg_.theta[a].e);
    for (auto it = head.rbegin(); it != head.rend(); ++it) loop.push_back(bar(image(*it)));
    for (auto it = tail.rbegin(); it != tail.rend(); ++it) loop.push_back(bar(image(*it)));
    for (Dir d : image_word(reverse(G, tg_.theta[b]).e)) loop.push_back(d);
    FWord m;
    th_.append(m, loop);
    FWord w = fapply(inv_, freduce(m));
    std::vector<Dir> pi;
    for (auto it = tg_.theta[a].e.rbegin(); it != tg_.theta[a].e.rend(); ++it) pi.push_back(bar(*it));
    for (int x : w) tg_.append_loop(G, pi, x);
    pi.insert(pi.end(), tg_.theta[b].e.begin(), tg_.theta[b].e.end());
    std::vector<Seg> sigma;
    auto push = [&](const Seg& s) {
      if (!sigma.empty() && sigma.back().edge == s.edge && sigma.back().k == s.k && sigma.back().rev != s.rev)
        sigma.pop_back();
      else
        sigma.push_back(s);
    };
    for (const Seg& s : head) push(s);
    std::vector<Seg> ex;
    for (Dir d : pi) {
      ex.clear();
      expand(ex, d);
      for (const Seg& s : ex) push(s);
    }
    for (const Seg& s : tail) push(s);
    return sigma;
  }

 private:
  std::vector<Dir> image_word(const std::vector<Dir>& w) const {
    std::vector<Dir> out;
    for (Dir d : w) {
      Path im = f_.image(d);
      out.insert(out.end(), im.e.begin(), im.e.end());
    }
    return out;
  }

  const GraphMap& f_;
  TreeCoords tg_, th_;
  std::vector<FWord> inv_;
  std::vector<std::vector<Pt>> fiber_;
  std::size_t points_ = 0;
};

}  // namespace

int fiber_bcc(const GraphMap& f, std::size_t max_points) {
  Fibers fib(f);
  if (fib.points() > max_points) return -1;
  int best = 0;
  for (const auto& fb : fib.fibers())
    for (std::size_t i = 0; i < fb.size(); ++i)
      for (std::size_t j = i + 1; j < fb.size(); ++j) {
        std::vector<Seg> sigma = fib.geodesic(fb[i], fb[j]);
        // height of the image walk at each domain vertex along sigma
        std::vector<Dir> stack;
        for (std::size_t t = 0; t + 1 < sigma.size(); ++t) {
          Dir d = fib.image(sigma[t]);
          if (!stack.empty() && stack.back() == bar(d))
            stack.pop_back();
          else
            stack.push_back(d);
          if (fib.ends_at_vertex(sigma[t])) best = std::max(best, static_cast<int>(stack.size()));
        }
      }
  return best;
}

std::size_t max_left_cancellation(const GraphMap& f, const Path& beta) {
  if (beta.trivial()) return 0;
  const Graph& G = f.G();
  Fibers fib(f);
  std::vector<Seg> walk;
  for (Dir d : beta.e) fib.expand(walk, d);
  const std::size_t n = walk.size();
  // heights of the image walk from either end
  std::vector<std::size_t> pre(n + 1, 0), suf(n + 1, 0);
  std::vector<Dir> stack;
  for (std::size_t t = 0; t < n; ++t) {
    Dir d = fib.image(walk[t]);
    if (!stack.empty() && stack.back() == bar(d))
      stack.pop_back();
    else
      stack.push_back(d);
    pre[t + 1] = stack.size();
  }
  const std::size_t plen = stack.size();
  stack.clear();
  for (std::size_t t = n; t-- > 0;) {
    Dir d = bar(fib.image(walk[t]));
    if (!stack.empty() && stack.back() == bar(d))
      stack.pop_back();
    else
      stack.push_back(d);
    suf[t] = stack.size();
  }
  std::vector<std::size_t> cand;
  for (std::size_t t = 1; t <= n; ++t)
    if (pre[t] > 0 && pre[t] + suf[t] == plen) cand.push_back(t);
  std::stable_sort(cand.begin(), cand.end(), [&](std::size_t x, std::size_t y) { return pre[x] > pre[y]; });
  for (std::size_t t : cand) {
    Pt y{-1, 0, -1};
    int w;
    if (t == n) {
      y.vertex = path_end(G, beta);
      w = f.vmap[y.vertex];
    } else {
      const Seg& s = walk[t];
      bool at_start = s.rev ? s.k + 1 == fib.len(s.edge) : s.k == 0;
      if (at_start)
        y.vertex = G.init({s.edge, s.rev});
      else {
        y.edge = s.edge;
        y.off = s.rev ? s.k + 1 : s.k;
      }
      w = f.H().init(fib.image(s));
    }
    std::vector<Seg> back;
    for (std::size_t i = t; i-- > 0;) back.push_back({walk[i].edge, walk[i].k, !walk[i].rev});
    for (const Pt& u : fib.fibers()[w]) {
      std::vector<Seg> sigma = fib.geodesic(y, u);
      if (sigma.size() > back.size() && std::equal(back.begin(), back.end(), sigma.begin())) return pre[t];
    }
  }
  return 0;
}

int bcc(const GraphMap& f) {
  Factorization fz = stallings_factorize(f);
  if (!fz.isomorphism) throw FoldError("not a homotopy equivalence");
  int fb = fiber_bcc(f);
  return fb < 0 ? fz.bcc : std::min(fb, fz.bcc);
}

bool is_homotopy_equivalence(const GraphMap& f) {
  try {
    return stallings_factorize(f).isomorphism;
  } catch (const FoldError&) {
    return false;
  }
}

GeneralizedFold generalized_fold(const MapState& s, const Graph& cod, Dir edge, const Path& sigma) {
  if (sigma.trivial()) throw FoldError("generalized fold needs a nontrivial sigma");
  if (path_start(s.g, sigma) != s.g.init(edge)) throw FoldError("sigma must start at the folded edge");
  for (Dir d : sigma.e)
    if (d.edge == edge.edge) throw FoldError("sigma crosses the folded edge");
  std::vector<Dir> w;
  for (Dir d : sigma.e) {
    Path im = image_of(s, cod, d);
    w.insert(w.end(), im.e.begin(), im.e.end());
  }
  Path q = tighten(cod, w);
  Path full = image_of(s, cod, edge);
  if (q.size() >= full.size() || !std::equal(q.e.begin(), q.e.end(), full.e.begin()))
    throw FoldError("f#(sigma) is not a proper initial segment of the edge image");

  Work wk(s);
  auto p = wk.split(cod, edge.edge, {forward_cut(s.img[edge.edge], edge, q.size())});
  Dir mu = edge.rev ? Dir{p.back(), true} : Dir{p.front(), false};
  Dir rest = edge.rev ? Dir{p.front(), true} : Dir{p.back(), false};
  int mid = wk.term(mu);
  int target = s.g.term(sigma.e.back());
  std::vector<Dir> by = sigma.e;  // old ids equal work ids for untouched edges
  if (mu.rev) {
    std::reverse(by.begin(), by.end());
    for (Dir& d : by) d = bar(d);
  }
  wk.substitute(mu.edge, by);
  wk.merge_vertex(mid, target);
  auto [after, quot] = wk.finish();
  GeneralizedFold g;
  g.after = after;
  g.quotient = quot;
  // locate the remnant edge in the compacted graph
  int count = 0;
  for (std::size_t e = 0; e < wk.es.size(); ++e) {
    if (!wk.es[e].alive) continue;
    if (static_cast<int>(e) == rest.edge) g.remnant = count;
    ++count;
  }
  return g;
}

}  // namespace outfn
