#include "outfn/nielsen.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "outfn/folds.hpp"

namespace outfn {

namespace {

Path make_path(const Graph& g, const std::vector<Dir>& w) { return Path{g.init(w.front()), w}; }

std::vector<Dir> reversed(const std::vector<Dir>& w) {
  std::vector<Dir> out;
  for (auto it = w.rbegin(); it != w.rend(); ++it) out.push_back(bar(*it));
  return out;
}

bool is_prefix(const std::vector<Dir>& p, const std::vector<Dir>& w) {
  return p.size() <= w.size() && std::equal(p.begin(), p.end(), w.begin());
}

// The orientation that compares smaller.
Path canonical(const Graph& g, const Path& p) {
  Path r = reverse(g, p);
  return r.e < p.e ? r : p;
}

struct Search {
  const GraphMap& f;
  const Filtration& filt;
  int r;
  std::size_t cap;
  GraphMap fk;
  bool hit_cap = false;
  std::set<std::pair<std::vector<Dir>, std::vector<Dir>>> seen;
  std::vector<std::pair<std::vector<Dir>, std::vector<Dir>>> found;

  std::vector<Dir> extensions(const std::vector<Dir>& x) const {
    const Graph& g = f.G();
    std::vector<Dir> out;
    for (Dir d : g.directions_at(g.term(x.back()))) {
      if (d == bar(x.back()) || filt.height(d) > r) continue;
      if (filt.height(d) == r && filt.height(x.back()) == r && !is_legal_turn(f, bar(x.back()), d)) continue;
      out.push_back(d);
    }
    return out;
  }

  std::vector<Dir> sure_image(const std::vector<Dir>& x) const {
    std::size_t last = 0;
    for (std::size_t i = 0; i < x.size(); ++i)
      if (filt.height(x[i]) == r) last = i;
    std::vector<Dir> head(x.begin(), x.begin() + last + 1);
    return fk.map_path(make_path(f.G(), head)).e;
  }

  void run(Dir d1, Dir d2) {
    std::vector<std::pair<std::vector<Dir>, std::vector<Dir>>> work{{{d1}, {d2}}};
    while (!work.empty()) {
      auto [P, Q] = work.back();
      work.pop_back();
      if (P.size() + Q.size() > cap) {
        hit_cap = true;
        continue;
      }
      if (!seen.insert({P, Q}).second) continue;
      std::vector<Dir> rho = reversed(P);
      rho.insert(rho.end(), Q.begin(), Q.end());
      Path rp = make_path(f.G(), rho);
      if (fk.map_path(rp) == rp) found.push_back({P, Q});

      std::vector<Dir> A = sure_image(P), B = sure_image(Q);
      std::size_t m = 0;
      while (m < A.size() && m < B.size() && A[m] == B[m]) ++m;
      bool grow_p = false, grow_q = false;
      if (m < A.size() && m < B.size()) {
        std::vector<Dir> Pn(A.begin() + m, A.end()), Qn(B.begin() + m, B.end());
        if (!is_prefix(P, Pn) && !is_prefix(Pn, P)) continue;
        if (!is_prefix(Q, Qn) && !is_prefix(Qn, Q)) continue;
        std::vector<Dir> P2 = Pn.size() > P.size() ? Pn : P, Q2 = Qn.size() > Q.size() ? Qn : Q;
        if (P2 != P || Q2 != Q) {
          work.push_back({P2, Q2});
          continue;
        }
        grow_p = grow_q = true;
      } else {
        grow_p = m == A.size();
        grow_q = m == B.size();
      }
      if (grow_p)
        for (Dir d : extensions(P)) {
          auto P2 = P;
          P2.push_back(d);
          work.push_back({P2, Q});
        }
      if (grow_q)
        for (Dir d : extensions(Q)) {
          auto Q2 = Q;
          Q2.push_back(d);
          work.push_back({P, Q2});
        }
    }
  }
};

// Longest r-legal half an iNp of period k can have when G_{r-1} is empty,
// from |c| <= bcc(f^k) and PF lengths; nothing if no bound applies.
std::optional<double> half_length_bound(const GraphMap& f, const Filtration& filt, int r, int k) {
  if (!filt.prefix(r - 1).empty()) return std::nullopt;
  PF p = pf(transition_matrix(f, filt.stratum(r)));
  double vmax = *std::max_element(p.vec.begin(), p.vec.end());
  double vmin = *std::min_element(p.vec.begin(), p.vec.end());
  double grow = std::pow(p.lower, k) - 1;
  if (grow <= 0) return std::nullopt;
  int b;
  try {
    b = bcc(power(f, k));
  } catch (const std::exception&) {
    return std::nullopt;
  }
  return b * vmax / (grow * vmin);
}

void add(NielsenCatalog& cat, const GraphMap& f, Path p, int height, NielsenKind kind, int period,
         std::size_t split) {
  const Graph& g = f.G();
  Path c = canonical(g, p);
  if (c.e != p.e && split) split = p.size() - split;
  for (const auto& x : cat.paths)
    if (x.path == c) return;
  NielsenPath np;
  np.path = c;
  np.period = period;
  np.height = height;
  np.kind = kind;
  np.closed = path_start(g, c) == path_end(g, c);
  np.split = split;
  np.indivisible = true;
  cat.paths.push_back(np);
}

void search_eg(NielsenCatalog& cat, const GraphMap& f, const Filtration& filt, int r) {
  const Graph& g = f.G();
  bool inconclusive = false;
  for (int k = 1; k <= cat.period_cap; ++k) {
    GraphMap fk;
    try {
      fk = power(f, k);
    } catch (const BlowupError&) {
      inconclusive = true;
      cat.notes.push_back("height " + std::to_string(r) + ": f^" + std::to_string(k) + " exceeds the edge budget");
      break;
    }
    Search s{f, filt, r, cat.length_cap, std::move(fk), false, {}, {}};
    for (int v = 0; v < g.nv(); ++v) {
      if (s.fk.vmap[v] != v) continue;
      std::vector<Dir> dirs;
      for (Dir d : g.directions_at(v))
        if (filt.height(d) == r) dirs.push_back(d);
      for (std::size_t i = 0; i < dirs.size(); ++i)
        for (std::size_t j = i + 1; j < dirs.size(); ++j)
          if (s.fk.df(dirs[i]) == s.fk.df(dirs[j])) s.run(dirs[i], dirs[j]);
    }
    for (auto& [P, Q] : s.found) {
      std::vector<Dir> rho = reversed(P);
      rho.insert(rho.end(), Q.begin(), Q.end());
      Path rp = make_path(g, rho);
      auto period = nielsen_period(f, rp, cat.period_cap);
      if (!period || !is_indivisible(f, rp, cat.period_cap)) continue;
      add(cat, f, rp, r, NielsenKind::eg, *period, P.size());
    }
    if (s.hit_cap) {
      auto bound = half_length_bound(f, filt, r, k);
      if (!bound || 2 * *bound > static_cast<double>(cat.length_cap)) inconclusive = true;
    }
  }
  cat.inconclusive[r - 1] = inconclusive;
  if (inconclusive) cat.notes.push_back("height " + std::to_string(r) + ": length cap reached");
}

void search_neg(NielsenCatalog& cat, const GraphMap& f, const Filtration& filt, int r) {
  const Graph& g = f.G();
  auto nf = neg_normal_form(f, filt, r);
  if (!nf) {
    cat.inconclusive[r - 1] = true;
    cat.notes.push_back("height " + std::to_string(r) + ": NEG stratum needs subdivision");
    return;
  }
  bool periodic = std::all_of(nf->begin(), nf->end(), [](const NegEdge& x) { return x.u.trivial(); });
  if (periodic) {
    int n = static_cast<int>(nf->size());
    if (n > cat.period_cap) {
      cat.inconclusive[r - 1] = true;
      return;
    }
    for (const NegEdge& x : *nf)
      add(cat, f, single(g, x.edge), r, n == 1 ? NielsenKind::fixed_edge : NielsenKind::periodic_edge, n, 0);
    return;
  }
  if (nf->size() != 1) return;
  const NegEdge& top = nf->front();
  if (path_start(g, top.u) != path_end(g, top.u) || !nielsen_period(f, top.u, cat.period_cap)) return;
  Path w = path_root(g, top.u).first;
  Path wbar = reverse(g, w);
  // partners: linear edges at or below r over w or its reverse
  std::vector<std::pair<Dir, Path>> partners;
  for (int h = 1; h <= r; ++h) {
    if (filt.stratum(h).size() != 1) continue;
    auto other = neg_normal_form(f, filt, h);
    if (!other || other->size() != 1 || other->front().u.trivial()) continue;
    Path wo = path_root(g, other->front().u).first;
    if (wo == w || wo == wbar) partners.push_back({other->front().edge, w});
  }
  for (const auto& [partner, ww] : partners) {
    for (int p = -static_cast<int>(cat.length_cap); p <= static_cast<int>(cat.length_cap); ++p) {
      if (p == 0 && partner == top.edge) continue;
      std::size_t len = 2 + static_cast<std::size_t>(std::abs(p)) * ww.size();
      if (len > cat.length_cap) continue;
      std::vector<Dir> word{top.edge};
      Path piece = p > 0 ? ww : reverse(g, ww);
      for (int i = 0; i < std::abs(p); ++i) word.insert(word.end(), piece.e.begin(), piece.e.end());
      word.push_back(bar(partner));
      if (!composable(g, word) || !is_reduced(word)) continue;
      Path cand = make_path(g, word);
      auto period = nielsen_period(f, cand, cat.period_cap);
      if (!period || !is_indivisible(f, cand, cat.period_cap)) continue;
      add(cat, f, cand, r, partner == top.edge ? NielsenKind::neg_linear : NielsenKind::exceptional, *period, 0);
    }
  }
}

void finish(NielsenCatalog& cat) {
  std::sort(cat.paths.begin(), cat.paths.end(), [](const NielsenPath& a, const NielsenPath& b) {
    if (a.height != b.height) return a.height < b.height;
    if (a.path.size() != b.path.size()) return a.path.size() < b.path.size();
    return a.path.e < b.path.e;
  });
}

void search_height(NielsenCatalog& cat, const GraphMap& f, const Filtration& filt, int r) {
  IMatrix m = transition_matrix(f, filt.stratum(r));
  if (is_zero(m)) return;
  if (is_permutation(m))
    search_neg(cat, f, filt, r);
  else
    search_eg(cat, f, filt, r);
}

}  // namespace

std::string to_string(NielsenKind k) {
  switch (k) {
    case NielsenKind::fixed_edge: return "fixed-edge";
    case NielsenKind::periodic_edge: return "periodic-edge";
    case NielsenKind::eg: return "eg";
    case NielsenKind::neg_linear: return "neg-linear";
    case NielsenKind::exceptional: return "exceptional";
  }
  return "?";
}

std::string to_string(Geometry g) {
  switch (g) {
    case Geometry::geometric: return "geometric";
    case Geometry::nongeometric: return "nongeometric";
    case Geometry::no_inp: return "no-iNp";
    case Geometry::inconclusive: return "inconclusive";
  }
  return "?";
}

std::vector<NielsenPath> NielsenCatalog::at_height(int r) const {
  std::vector<NielsenPath> out;
  for (const auto& p : paths)
    if (p.height == r) out.push_back(p);
  return out;
}

std::optional<NielsenPath> NielsenCatalog::find(const Graph& g, const Path& p) const {
  Path c = canonical(g, p);
  for (const auto& x : paths)
    if (x.path == c) return x;
  return std::nullopt;
}

std::pair<Path, int> path_root(const Graph& g, const Path& u) {
  std::size_t n = u.size();
  for (std::size_t d = 1; d <= n; ++d) {
    if (n % d) continue;
    bool ok = true;
    for (std::size_t i = d; i < n && ok; ++i) ok = u.e[i] == u.e[i - d];
    if (ok) return {subpath(g, u, 0, d), static_cast<int>(n / d)};
  }
  return {u, 1};
}

std::size_t default_length_cap(const GraphMap& f) { return 4 * static_cast<std::size_t>(f.G().ne()); }

bool is_indivisible(const GraphMap& f, const Path& p, int period_cap) {
  for (std::size_t i = 1; i < p.size(); ++i)
    if (nielsen_period(f, subpath(f.G(), p, 0, i), period_cap) &&
        nielsen_period(f, subpath(f.G(), p, i, p.size()), period_cap))
      return false;
  return true;
}

bool is_r_legal(const GraphMap& f, const Filtration& filt, int r, const Path& p) {
  if (filt.height(p) > r) return false;
  for (std::size_t i = 0; i + 1 < p.size(); ++i)
    if (filt.height(p.e[i]) == r && filt.height(p.e[i + 1]) == r && !is_legal_turn(f, bar(p.e[i]), p.e[i + 1]))
      return false;
  return true;
}

NielsenCatalog nielsen_search(const GraphMap& f, const Filtration& filt, int r, std::size_t length_cap,
                              int period_cap) {
  NielsenCatalog cat;
  cat.length_cap = length_cap;
  cat.period_cap = period_cap;
  cat.inconclusive.assign(filt.size(), false);
  search_height(cat, f, filt, r);
  finish(cat);
  return cat;
}

NielsenCatalog nielsen_catalog(const GraphMap& f, const Filtration& filt, std::size_t length_cap, int period_cap) {
  NielsenCatalog cat;
  cat.length_cap = length_cap;
  cat.period_cap = period_cap;
  cat.inconclusive.assign(filt.size(), false);
  for (int r = 1; r <= filt.size(); ++r) search_height(cat, f, filt, r);
  finish(cat);
  return cat;
}

UniquenessCheck eg_uniqueness_check(const NielsenCatalog& cat, int r) {
  UniquenessCheck out;
  for (const auto& p : cat.paths)
    if (p.height == r && p.kind == NielsenKind::eg && p.indivisible) out.witnesses.push_back(p.path);
  out.ok = out.witnesses.size() <= 1;
  if (out.ok) out.witnesses.clear();
  return out;
}

Geometry classify_geometry(const GraphMap& f, const Filtration& filt, int r, const NielsenCatalog& cat) {
  const Graph& g = f.G();
  std::vector<NielsenPath> eg;
  for (const auto& p : cat.at_height(r))
    if (p.kind == NielsenKind::eg) eg.push_back(p);
  if (eg.empty()) return cat.conclusive(r) ? Geometry::no_inp : Geometry::inconclusive;
  if (eg.size() > 1) return Geometry::inconclusive;
  const Path& rho = eg.front().path;
  std::map<int, int> crossings;
  for (int e : filt.stratum(r)) crossings[e] = 0;
  for (Dir d : rho.e)
    if (crossings.count(d.edge)) ++crossings[d.edge];
  bool all_two = true, some_one = false;
  for (auto& [e, n] : crossings) {
    all_two = all_two && n == 2;
    some_one = some_one || n == 1;
  }
  int base = path_start(g, rho);
  bool off_lower = true;
  for (int e : filt.prefix(r - 1)) off_lower = off_lower && g.src[e] != base && g.dst[e] != base;
  if (eg.front().closed && off_lower && all_two) return Geometry::geometric;
  if (!eg.front().closed && some_one) return Geometry::nongeometric;
  return Geometry::inconclusive;
}

}  // namespace outfn
