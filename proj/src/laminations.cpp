#include "outfn/laminations.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <set>

namespace outfn {

namespace {

bool contains_either(const Graph& g, const Path& hay, const Path& needle) {
  return find_subpath(hay, needle).has_value() || find_subpath(hay, reverse(g, needle)).has_value();
}

IMatrix multiply(const IMatrix& a, const IMatrix& b) {
  const std::size_t n = a.size();
  IMatrix c(n, std::vector<long long>(n, 0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k)
      if (a[i][k] != 0)
        for (std::size_t j = 0; j < n; ++j) c[i][j] += a[i][k] * b[k][j];
  return c;
}

bool positive(const IMatrix& m) {
  for (const auto& row : m)
    for (long long x : row)
      if (x <= 0) return false;
  return true;
}

std::vector<NonattractingSystem::Component> k_components(const Immersion& k) {
  std::vector<NonattractingSystem::Component> out;
  for (const auto& vs : k.component_vertices()) {
    NonattractingSystem::Component c;
    c.vertices = vs;
    std::set<int> in(vs.begin(), vs.end());
    for (const auto& e : k.edges)
      if (in.count(e.from)) ++c.edges;
    c.rank = c.edges - static_cast<int>(vs.size()) + 1;
    c.contractible = c.rank == 0;
    out.push_back(c);
  }
  return out;
}

std::vector<NonattractingSystem::Component> z_components(const Graph& g, const std::vector<int>& z) {
  std::vector<NonattractingSystem::Component> out;
  for (const auto& c : CoreSubgraph{z}.components(g)) {
    NonattractingSystem::Component o;
    o.vertices = c.vertices;
    o.edges = static_cast<int>(c.edges.size());
    o.rank = o.edges - static_cast<int>(c.vertices.size()) + 1;
    o.contractible = c.contractible;
    out.push_back(o);
  }
  return out;
}

}  // namespace

Tile tile(const GraphMap& f, Dir edge, int k) { return {edge, k, iterate(f, single(f.G(), edge), k)}; }

std::vector<Tile> tiles(const GraphMap& f, const Filtration& filt, int r, int k) {
  std::vector<Tile> out;
  for (int e : filt.stratum(r))
    for (bool rev : {false, true}) out.push_back(tile(f, {e, rev}, k));
  return out;
}

std::optional<int> positivity_exponent(const IMatrix& m) {
  if (m.empty()) return std::nullopt;
  const long long n = static_cast<long long>(m.size());
  IMatrix p = m;
  // Wielandt: a primitive matrix has m^p > 0 for some p <= (n-1)^2 + 1.
  for (long long k = 1; k <= (n - 1) * (n - 1) + 1; ++k) {
    if (positive(p)) return static_cast<int>(k);
    p = multiply(p, m);
    for (auto& row : p)
      for (long long& x : row) x = std::min<long long>(x, 1);
  }
  return std::nullopt;
}

bool tiles_nest(const GraphMap& f, const Filtration& filt, int r, int k, int p) {
  auto small = tiles(f, filt, r, k);
  auto big = tiles(f, filt, r, k + p);
  for (const auto& b : big)
    for (const auto& s : small)
      if (!contains_either(f.G(), b.path, s.path)) return false;
  return true;
}

bool NonattractingSystem::in_Z(int edge) const { return std::binary_search(Z.begin(), Z.end(), edge); }

bool NonattractingSystem::attracted_edge(int edge, const Filtration& filt) const {
  return std::find(excluded.begin(), excluded.end(), filt.height_of[edge]) != excluded.end();
}

NonattractingSystem build_nonattracting(const SplitContext& ctx, int r, int kmax) {
  const GraphMap& f = *ctx.f;
  const Filtration& filt = *ctx.filt;
  const Graph& g = f.G();
  const auto& strata = ctx.strata;
  if (r < 1 || r > filt.size() || strata[r - 1].kind != StratumKind::eg)
    throw StructuralError("the nonattracting system needs an EG stratum");

  NonattractingSystem ns;
  ns.stratum = r;
  // 1 attracted, 2 in Z, 0 open
  std::vector<int> status(filt.size() + 1, 0);
  status[r] = 1;
  auto zero_status = [&](int h) {
    int env = strata[h - 1].enveloped_by;
    return env == 0 ? 0 : status[env];
  };
  // A term that is never attracted, given what is decided so far.
  auto inert = [&](const SplittingTerm& t, int own) {
    switch (t.kind) {
      case TermKind::nielsen:
      case TermKind::exceptional: return true;
      case TermKind::zero_path: return zero_status(t.height) == 2;
      case TermKind::edge: return t.height != own && status[t.height] == 2;
    }
    return false;
  };

  for (int h = 1; h <= filt.size(); ++h) {
    if (h == r || strata[h - 1].kind == StratumKind::zero) continue;
    if (h < r) {
      status[h] = 2;
      continue;
    }
    bool failed = false, closed = true;
    for (int e : filt.stratum(h)) {
      // f(E) splits into H_h edges and inert terms: no iterate reaches H_r.
      SplitResult one = complete_splitting(ctx, f.img[e]);
      if (!one.ok) {
        closed = false;
        continue;
      }
      for (const auto& t : one.terms)
        if (!(t.kind == TermKind::edge && t.height == h) && !inert(t, h)) closed = false;
    }
    if (closed) {
      status[h] = 2;
      continue;
    }
    for (int e : filt.stratum(h)) {
      Path p = single(g, {e, false});
      for (int k = 0; k <= kmax && status[h] != 1; ++k) {
        if (k > 0) {
          try {
            p = iterate(f, p, 1);
          } catch (const BlowupError&) {
            failed = true;
            break;
          }
        }
        SplitResult s = complete_splitting(ctx, p);
        if (!s.ok) {
          failed = true;
          continue;
        }
        for (const auto& t : s.terms)
          if (t.kind == TermKind::edge && t.height != h && status[t.height] == 1) status[h] = 1;
      }
      if (status[h] == 1) break;
    }
    if (status[h] == 1) continue;
    if (failed) {
      ns.undecided.push_back(h);
    } else {
      status[h] = 2;
      ns.cap_bounded.push_back(h);
    }
  }
  for (int h = 1; h <= filt.size(); ++h) {
    if (strata[h - 1].kind != StratumKind::zero) continue;
    status[h] = zero_status(h);
    if (status[h] == 0) ns.undecided.push_back(h);
  }
  std::sort(ns.undecided.begin(), ns.undecided.end());
  for (int h = 1; h <= filt.size(); ++h) {
    if (status[h] == 1) ns.excluded.push_back(h);
    if (status[h] == 2)
      for (int e : filt.stratum(h)) ns.Z.push_back(e);
  }
  std::sort(ns.Z.begin(), ns.Z.end());

  std::vector<NielsenPath> inps;
  for (const auto& np : ctx.catalog->at_height(r))
    if (np.kind == NielsenKind::eg) inps.push_back(np);
  std::sort(inps.begin(), inps.end(), [](const NielsenPath& a, const NielsenPath& b) {
    return std::make_pair(a.period, a.path.size()) < std::make_pair(b.period, b.path.size());
  });
  if (!ctx.catalog->conclusive(r)) ns.notes.push_back("Nielsen search at this height is conditional on its caps");
  if (inps.size() > 1) ns.notes.push_back("several indivisible Nielsen paths at this height; using the shortest");
  if (inps.empty()) {
    int v = g.nv();
    for (int e : filt.stratum(r)) v = std::min({v, g.src[e], g.dst[e]});
    ns.rho_hat = trivial_at(v);
  } else {
    ns.rho_hat = inps.front().path;
    ns.rho_period = inps.front().period;
    if (ns.rho_period > 1)
      ns.notes.push_back("rho_hat has period " + std::to_string(ns.rho_period) + "; it is a Nielsen path for f^" +
                         std::to_string(ns.rho_period));
  }

  ns.K = Immersion::from_subgraph(g, ns.Z);
  if (!ns.rho_hat.trivial()) {
    auto k_vertex = [&](int v) {
      for (int i = 0; i < ns.K.nv; ++i)
        if (ns.K.original[i] && ns.K.vimg[i] == v) return i;
      return ns.K.add_vertex(v);
    };
    int a = path_start(g, ns.rho_hat), b = path_end(g, ns.rho_hat);
    ns.rho_from = k_vertex(a);
    ns.rho_to = a == b ? ns.rho_from : k_vertex(b);
    ns.K.add_path(g, ns.rho_from, ns.rho_to, ns.rho_hat);
    if (!ns.K.is_immersion(g)) ns.notes.push_back("K -> G is not an immersion");
  }
  ns.components = k_components(ns.K);
  ns.z_components = z_components(g, ns.Z);
  return ns;
}

bool in_groupoid(const NonattractingSystem& ns, const Graph& g, const Path& p) {
  const int s = path_start(g, p), t = path_end(g, p);
  for (int v = 0; v < ns.K.nv; ++v) {
    if (!ns.K.original[v] || ns.K.vimg[v] != s) continue;
    auto end = ns.K.lift(g, v, p.e);
    if (end && ns.K.original[*end] && ns.K.vimg[*end] == t) return true;
  }
  return false;
}

bool in_groupoid(const NonattractingSystem& ns, const Graph& g, const Circuit& c) { return ns.K.carries(g, c); }

std::string to_string(Attraction a) {
  switch (a) {
    case Attraction::attracted: return "attracted";
    case Attraction::not_attracted: return "not-attracted";
    case Attraction::inconclusive: return "inconclusive";
  }
  return "?";
}

AttractionResult weak_attraction_test(const SplitContext& ctx, const NonattractingSystem& ns, const Circuit& c,
                                      int kmax) {
  const GraphMap& f = *ctx.f;
  const Graph& g = f.G();
  AttractionResult out;
  Circuit cur = cyclic_tighten(g, c.e);
  if (cur.e.empty()) {
    out.witness = "trivial circuit";
    return out;
  }
  for (int k = 0; k <= kmax; ++k) {
    if (k > 0) {
      cur = f.map_circuit(cur);
      if (cur.e.size() > kBlowup) {
        out.witness = "iterate exceeds edge budget at k=" + std::to_string(k);
        return out;
      }
    }
    if (in_groupoid(ns, g, cur)) {
      out.verdict = Attraction::not_attracted;
      out.k = k;
      out.witness = to_string(g, cur);
      return out;
    }
    SplitResult s = complete_splitting(ctx, cur);
    if (!s.ok) continue;
    for (const auto& t : s.terms)
      if (t.kind == TermKind::edge && ns.attracted_edge(t.path.e.front().edge, *ctx.filt)) {
        out.verdict = Attraction::attracted;
        out.k = k;
        out.witness = "term " + to_string(g, t.path);
        return out;
      }
  }
  out.witness = "undecided through k=" + std::to_string(kmax);
  return out;
}

std::string to_string(CertVerdict v) {
  switch (v) {
    case CertVerdict::certified: return "certified";
    case CertVerdict::not_certified: return "not-certified";
    case CertVerdict::inconclusive: return "inconclusive";
  }
  return "?";
}

namespace {

// Not-certified or inconclusive reasons from Z alone; empty when Z passes.
std::optional<CertVerdict> z_obstruction(const Graph& g, const Filtration& filt, const NonattractingSystem& ns,
                                         std::vector<std::string>& reasons) {
  if (ns.stratum != filt.size()) {
    reasons.push_back("the lamination's stratum is not the top stratum");
    return CertVerdict::not_certified;
  }
  for (const auto& c : ns.z_components)
    if (!c.contractible) {
      std::string w;
      for (int e : ns.Z) {
        if (std::find(c.vertices.begin(), c.vertices.end(), g.src[e]) == c.vertices.end()) continue;
        if (!w.empty()) w += " ";
        w += g.enames[e];
      }
      reasons.push_back("noncontractible component of Z: {" + w + "}");
      return CertVerdict::not_certified;
    }
  if (!ns.conclusive()) {
    reasons.push_back("Z has undecided strata");
    return CertVerdict::inconclusive;
  }
  return std::nullopt;
}

}  // namespace

FullIrreducibility full_irreducibility_certificate(const GraphMap& f, const Filtration& filt,
                                                   const NonattractingSystem& ns, const CertOptions& opt) {
  FullIrreducibility out;
  if (auto v = z_obstruction(f.G(), filt, ns, out.reasons)) {
    out.verdict = *v;
    return out;
  }
  for (int p = 1; p <= opt.max_power; ++p) {
    GraphMap fp = p == 1 ? f : power(f, p);
    Filtration fl = p == 1 ? filt : compute_filtration(fp);
    std::size_t cap = opt.ct.length_cap ? opt.ct.length_cap : default_length_cap(fp);
    NielsenCatalog cat = nielsen_catalog(fp, fl, cap, opt.ct.period_cap);
    CtReport rep = verify_ct(fp, fl, cat, opt.ct);
    if (!rep.is_ct()) continue;
    SplitContext ctx(fp, fl, cat);
    if (ctx.strata.back().kind != StratumKind::eg) {
      out.reasons.push_back("top stratum of f^" + std::to_string(p) + " is not EG");
      out.verdict = CertVerdict::not_certified;
      return out;
    }
    NonattractingSystem nsp = build_nonattracting(ctx, fl.size(), opt.kmax);
    std::vector<std::string> why;
    if (auto v = z_obstruction(fp.G(), fl, nsp, why)) {
      out.verdict = *v;
      for (auto& w : why) out.reasons.push_back("f^" + std::to_string(p) + ": " + w);
      return out;
    }
    out.verdict = CertVerdict::certified;
    out.power = p;
    out.reasons.push_back("f^" + std::to_string(p) + " is a CT; Z is contractible and H_r is the top stratum");
    return out;
  }
  out.reasons.push_back("no power up to " + std::to_string(opt.max_power) + " passes the CT checklist");
  return out;
}

Inclusion lamination_inclusion(const SplitContext& ctx, int r, int s, int kmax) {
  const GraphMap& f = *ctx.f;
  const Filtration& filt = *ctx.filt;
  if (ctx.strata[r - 1].kind != StratumKind::eg || ctx.strata[s - 1].kind != StratumKind::eg)
    throw StructuralError("lamination inclusion compares EG strata");
  Inclusion out;
  for (int e : filt.stratum(s)) {
    Path p = single(f.G(), {e, false});
    for (int k = 0; k <= kmax; ++k) {
      if (k > 0) {
        try {
          p = iterate(f, p, 1);
        } catch (const BlowupError&) {
          out.notes.push_back("blowup at k=" + std::to_string(k));
          break;
        }
      }
      SplitResult sp = complete_splitting(ctx, p);
      if (!sp.ok) {
        out.notes.push_back("no complete splitting of f^" + std::to_string(k) + "_#(" + f.G().enames[e] + ")");
        continue;
      }
      for (const auto& t : sp.terms)
        if (t.kind == TermKind::edge && t.height == r) {
          out.included = true;
          out.k = k;
          out.edge = {e, false};
          out.witness = "f^" + std::to_string(k) + "_#(" + f.G().enames[e] + ") has term " + to_string(f.G(), t.path);
          return out;
        }
    }
  }
  return out;
}

std::vector<SingularRay> singular_rays(const GraphMap& f, const Filtration& filt, const NielsenCatalog& cat,
                                       int depth) {
  std::vector<SingularRay> out;
  for (Dir d : principal_directions(f, principal_vertices(f, filt, cat))) {
    SingularRay ray;
    ray.edge = d;
    ray.depth = depth;
    Path p = single(f.G(), d);
    ray.lengths.push_back(p.size());
    for (int i = 0; i < depth; ++i) {
      Path q = iterate(f, p, 1);
      if (q.size() <= p.size() || !std::equal(p.e.begin(), p.e.end(), q.e.begin())) ray.nested = false;
      p = std::move(q);
      ray.lengths.push_back(p.size());
    }
    ray.prefix = p;
    out.push_back(ray);
  }
  return out;
}

std::optional<Circuit> periodic_circuit(const GraphMap& f, std::size_t max_len, int period_cap) {
  const Graph& g = f.G();
  std::vector<Dir> all;
  for (int e = 0; e < g.ne(); ++e)
    for (bool rev : {false, true}) all.push_back({e, rev});
  std::optional<Circuit> found;
  std::vector<Dir> w;
  std::function<void()> dfs = [&]() {
    if (found) return;
    if (!w.empty() && g.term(w.back()) == g.init(w.front()) && (w.size() == 1 || w.back() != bar(w.front()))) {
      Circuit c = canonical_rotation(w);
      if (c.e == w) {
        Circuit cur = c;
        for (int p = 1; p <= period_cap; ++p) {
          cur = f.map_circuit(cur);
          if (cur == c) {
            found = c;
            return;
          }
        }
      }
    }
    if (w.size() == max_len) return;
    for (Dir d : all) {
      if (!w.empty() && (g.init(d) != g.term(w.back()) || d == bar(w.back()))) continue;
      w.push_back(d);
      dfs();
      w.pop_back();
      if (found) return;
    }
  };
  dfs();
  return found;
}

SingularLines singular_lines(const GraphMap& f, const Filtration& filt, const NielsenCatalog& cat, int depth,
                             bool require_no_periodic_class) {
  const Graph& g = f.G();
  SingularLines out;
  const std::size_t probe = 2 * static_cast<std::size_t>(g.ne());
  if (auto c = periodic_circuit(f, probe, cat.period_cap > 0 ? cat.period_cap : kDefaultPeriodCap)) {
    if (require_no_periodic_class) {
      out.refused = true;
      out.witness = to_string(g, *c);
      return out;
    }
    out.notes.push_back("periodic class " + to_string(g, *c) + " present; standing assumption waived");
  }
  out.rays = singular_rays(f, filt, cat, depth);
  std::vector<Path> connectors;
  for (const auto& np : cat.paths) {
    if (np.period != 1) continue;
    connectors.push_back(np.path);
    connectors.push_back(reverse(g, np.path));
  }
  for (std::size_t i = 0; i < out.rays.size(); ++i)
    for (std::size_t j = 0; j < out.rays.size(); ++j) {
      if (i == j) continue;
      Dir a = out.rays[i].edge, b = out.rays[j].edge;
      auto emit = [&](const Path& alpha) {
        SingularLine l{i, j, alpha, {}};
        std::vector<Dir> w = reverse(g, out.rays[i].prefix).e;
        w.insert(w.end(), alpha.e.begin(), alpha.e.end());
        w.insert(w.end(), out.rays[j].prefix.e.begin(), out.rays[j].prefix.e.end());
        l.window = Path{g.term(out.rays[i].prefix.e.back()), w};
        out.lines.push_back(l);
      };
      if (g.init(a) == g.init(b) && a != b) emit(trivial_at(g.init(a)));
      for (const Path& alpha : connectors) {
        if (path_start(g, alpha) != g.init(a) || path_end(g, alpha) != g.init(b)) continue;
        if (alpha.e.front() == a || bar(alpha.e.back()) == b) continue;
        emit(alpha);
      }
    }
  return out;
}

TopStratumModel top_stratum_model(const GraphMap& f, const Filtration& filt, const NonattractingSystem& ns) {
  const Graph& g = f.G();
  const int r = ns.stratum;
  TopStratumModel m;
  m.H = filt.stratum(r);
  if (ns.Z.size() + m.H.size() != static_cast<std::size_t>(g.ne()))
    throw StructuralError("the model needs G = Z u H_r");
  if (ns.rho_hat.trivial() || path_start(g, ns.rho_hat) != path_end(g, ns.rho_hat))
    throw StructuralError("the model needs a closed indivisible Nielsen path");
  m.rho = ns.rho_hat;
  m.h = f;
  std::vector<bool> touches_h(g.nv(), false);
  for (int e : m.H) touches_h[g.src[e]] = touches_h[g.dst[e]] = true;
  for (int e : ns.Z) {
    m.h.img[e] = single(g, {e, false});
    for (int v : {g.src[e], g.dst[e]})
      if (touches_h[v] && f.vmap[v] != v) throw StructuralError("f moves a vertex of Z n H_r");
  }
  for (int v = 0; v < g.nv(); ++v)
    if (!touches_h[v]) m.h.vmap[v] = v;
  m.h.validate();
  std::vector<std::vector<int>> strata;
  for (int e : ns.Z) strata.push_back({e});
  strata.push_back(m.H);
  m.filt = declared_filtration(m.h, strata);
  m.M = transition_matrix(m.h, m.H);
  m.pf = pf(m.M);
  return m;
}

TranslationLength translation_length_limit(const TopStratumModel& m, const Circuit& sigma, int K) {
  const GraphMap& h = m.h;
  const Graph& g = h.G();
  TranslationLength out;
  out.K = K;
  Circuit c = cyclic_tighten(g, sigma.e);
  for (int i = 0; i < K; ++i) {
    c = h.map_circuit(c);
    if (c.e.size() > kBlowup) {
      out.reason = "iterate exceeds edge budget";
      return out;
    }
  }
  const std::size_t n = c.e.size();
  if (n == 0) {
    out.reason = "trivial circuit";
    return out;
  }
  const Path rho = m.rho, rbar = reverse(g, m.rho);
  std::map<int, std::size_t> hindex;
  for (std::size_t i = 0; i < m.H.size(); ++i) hindex[m.H[i]] = i;

  // Whole circuit a single rho copy.
  auto rotation = [&](std::size_t s) {
    std::vector<Dir> w(c.e.begin() + s, c.e.end());
    w.insert(w.end(), c.e.begin(), c.e.begin() + s);
    return w;
  };
  for (std::size_t s = 0; s < n; ++s) {
    auto w = rotation(s);
    if (w == rho.e || w == rbar.e) {
      out.ok = true;
      out.rho_terms = 1;
      out.counts.assign(m.H.size(), 0);
      out.terms.push_back(to_string(g, Path{g.init(w.front()), w}));
      return out;
    }
  }
  for (std::size_t s = 0; s < n; ++s) {
    auto w = rotation(s);
    if (!is_legal_turn(h, bar(w.back()), w.front())) continue;
    std::vector<std::size_t> ends;  // term boundaries
    std::vector<bool> dead(n + 1, false);
    std::vector<int> is_rho;
    std::function<bool(std::size_t)> go = [&](std::size_t p) {
      if (p == n) return true;
      if (dead[p]) return false;
      if (p > 0 && !is_legal_turn(h, bar(w[p - 1]), w[p])) return false;
      for (const Path* q : {&rho, &rbar}) {
        if (p + q->size() > n || !std::equal(q->e.begin(), q->e.end(), w.begin() + p)) continue;
        is_rho.push_back(1);
        ends.push_back(p + q->size());
        if (go(p + q->size())) return true;
        is_rho.pop_back();
        ends.pop_back();
      }
      is_rho.push_back(0);
      ends.push_back(p + 1);
      if (go(p + 1)) return true;
      is_rho.pop_back();
      ends.pop_back();
      dead[p] = true;
      return false;
    };
    if (!go(0)) continue;
    out.ok = true;
    out.counts.assign(m.H.size(), 0);
    std::size_t at = 0;
    for (std::size_t t = 0; t < ends.size(); ++t) {
      std::vector<Dir> piece(w.begin() + at, w.begin() + ends[t]);
      out.terms.push_back(to_string(g, Path{g.init(piece.front()), piece}));
      if (is_rho[t]) {
        ++out.rho_terms;
      } else {
        auto it = hindex.find(piece.front().edge);
        if (it != hindex.end()) ++out.counts[it->second];
      }
      at = ends[t];
    }
    double sum = 0;
    for (std::size_t i = 0; i < m.H.size(); ++i) sum += static_cast<double>(out.counts[i]) * m.pf.vec[i];
    out.value = sum / std::pow(m.pf.lambda, K);
    return out;
  }
  out.reason = "h^" + std::to_string(K) + "_#(sigma) does not split into edges and copies of rho";
  return out;
}

TranslationLength translation_length_limit_search(const TopStratumModel& m, const Circuit& sigma, int kmax) {
  TranslationLength last;
  for (int K = 0; K <= kmax; ++K) {
    last = translation_length_limit(m, sigma, K);
    if (last.ok || last.reason == "iterate exceeds edge budget") return last;
  }
  return last;
}

bool k_stable(const TopStratumModel& m, const TranslationLength& a, const TranslationLength& b) {
  if (!a.ok || !b.ok) return false;
  const TranslationLength& lo = a.K <= b.K ? a : b;
  const TranslationLength& hi = a.K <= b.K ? b : a;
  std::vector<long long> v = lo.counts;
  for (int i = lo.K; i < hi.K; ++i) {
    std::vector<long long> next(v.size(), 0);
    for (std::size_t r = 0; r < v.size(); ++r)
      for (std::size_t c = 0; c < v.size(); ++c) next[c] += v[r] * m.M[r][c];
    v = std::move(next);
  }
  return v == hi.counts;
}

}  // namespace outfn
