#include "outfn/pingpong.hpp"

#include <algorithm>
#include <future>
#include <set>
#include <stdexcept>

#include "outfn/folds.hpp"

namespace outfn {

namespace {

std::size_t total_image(const GraphMap& f) {
  std::size_t n = 0;
  for (const Path& p : f.img) n += p.size();
  return n;
}

bool contains(const Path& hay, const Path& needle) {
  return needle.trivial() || find_subpath(hay, needle).has_value();
}

// Random reduced walk of length len from v whose first edge is not `avoid`.
std::vector<Dir> walk(const Graph& g, std::mt19937_64& rng, int v, std::size_t len, std::optional<Dir> avoid) {
  std::vector<Dir> out;
  for (std::size_t i = 0; i < len; ++i) {
    std::vector<Dir> ok;
    for (Dir d : g.directions_at(v)) {
      if (out.empty() && avoid && d == *avoid) continue;
      if (!out.empty() && d == bar(out.back())) continue;
      ok.push_back(d);
    }
    if (ok.empty()) break;
    Dir d = ok[rng() % ok.size()];
    out.push_back(d);
    v = g.term(d);
  }
  return out;
}

// Random reduced path eps . beta . eps' with both extensions of length <= 6.
Path random_extension(const Graph& g, const Path& beta, std::mt19937_64& rng) {
  auto left = walk(g, rng, path_start(g, beta), rng() % 7, beta.e.front());
  auto right = walk(g, rng, path_end(g, beta), rng() % 7, bar(beta.e.back()));
  std::vector<Dir> w;
  for (auto it = left.rbegin(); it != left.rend(); ++it) w.push_back(bar(*it));
  w.insert(w.end(), beta.e.begin(), beta.e.end());
  w.insert(w.end(), right.begin(), right.end());
  return Path{g.init(w.front()), w};
}

// Top EG stratum, or 0.
int top_eg(const GraphMap& f, const Filtration& filt) {
  int r = 0;
  for (const auto& s : classify_strata(f, filt))
    if (s.kind == StratumKind::eg) r = std::max(r, s.height);
  return r;
}

// y_i = c x_i c^-1 for one c.
bool is_inner(const std::vector<FWord>& y) {
  const int n = static_cast<int>(y.size());
  if (n == 0) return true;
  if (n == 1) return y[0] == FWord{1} || fconjugate(y[0], FWord{1});
  // y_0 = u x_1 u^-1 with u reduced, and c = u x_1^t.
  const FWord& w = y[0];
  if (w.size() % 2 == 0) return false;
  std::size_t h = w.size() / 2;
  if (w[h] != 1) return false;
  FWord u(w.begin(), w.begin() + h);
  if (fmul(fmul(u, FWord{1}), finverse(u)) != w) return false;
  int bound = static_cast<int>(y[1].size() + u.size()) + 1;
  for (int t = -bound; t <= bound; ++t) {
    FWord c = u;
    for (int i = 0; i < std::abs(t); ++i) c = fmul(c, FWord{t > 0 ? 1 : -1});
    bool ok = true;
    for (int i = 0; i < n && ok; ++i) ok = fmul(fmul(c, FWord{i + 1}), finverse(c)) == y[i];
    if (ok) return true;
  }
  return false;
}

bool same_outer(const std::vector<FWord>& a, const std::vector<FWord>& b) {
  auto binv = finvert(b, static_cast<int>(b.size()));
  if (!binv || a.size() != b.size()) return false;
  std::vector<FWord> y;
  for (const FWord& w : *binv) y.push_back(fapply(a, w));
  return is_inner(y);
}

std::vector<FWord> outer_power(const std::vector<FWord>& a, int k) {
  std::vector<FWord> out;
  for (std::size_t i = 0; i < a.size(); ++i) out.push_back(FWord{static_cast<int>(i) + 1});
  for (int j = 0; j < k; ++j)
    for (FWord& w : out) w = fapply(a, w);
  return out;
}

// Marking-change map dom -> cod through the rose.
GraphMap rose_change(std::shared_ptr<const MarkedGraph> dom, std::shared_ptr<const MarkedGraph> cod) {
  GraphMap h;
  h.dom = dom;
  h.cod = cod;
  h.vmap.assign(dom->nv(), cod->basepoint);
  for (int e = 0; e < dom->ne(); ++e) {
    Path p = cod->from_rose(dom->inverse[e]);
    if (p.trivial())
      throw StructuralError("marking change sends edge " + dom->enames[e] + " to a trivial path");
    h.img.push_back(p);
  }
  h.validate();
  return h;
}

}  // namespace

BufferConstant buffer_constant(const GraphMap& f, const Filtration& filt, int r, std::uint64_t seed, int windows,
                               int depth) {
  BufferConstant out;
  out.depth = depth;
  out.bcc = bcc(f);
  if (out.bcc == 0) return out;
  const auto& H = filt.stratum(r);
  auto in_H = [&](Dir d) { return filt.height(d) == r; };
  std::vector<GraphMap> powers{f};
  for (int k = 2; k <= depth; ++k) powers.push_back(compose(f, powers.back()));

  for (int mult : {1, 2, 4, 8}) {
    const int C = mult * (out.bcc + 1);
    std::mt19937_64 rng(seed);
    bool pass = true;
    int checked = 0;
    for (int w = 0; w < windows && pass; ++w) {
      // A tile with enough H_r edges for tau1, tau2, tau3.
      Dir e{H[rng() % H.size()], static_cast<bool>(rng() % 2)};
      Path t = single(f.G(), e);
      auto count = [&](const Path& p) { return std::count_if(p.e.begin(), p.e.end(), in_H); };
      while (count(t) < 2 * C + 3) t = f.map_path(t);
      std::vector<std::size_t> hpos;
      for (std::size_t i = 0; i < t.size(); ++i)
        if (in_H(t.e[i])) hpos.push_back(i);
      // tau2 spans H_r positions a..b with C H_r edges on either side.
      std::size_t lo = C, hi = hpos.size() - 1 - C;
      std::size_t a = lo + rng() % (hi - lo + 1);
      std::size_t b = a + rng() % (hi - a + 1);
      std::size_t s = hpos[a - C] - (hpos[a - C] > 0 ? rng() % (hpos[a - C] + 1) : 0);
      std::size_t end = hpos[b + C] + 1;
      end += rng() % (t.size() - end + 1);
      Path tau = subpath(f.G(), t, s, end);
      Path tau2 = subpath(f.G(), t, hpos[a], hpos[b] + 1);
      for (int k = 1; k <= depth && pass; ++k) {
        Path inner = iterate(f, tau2, k);
        Path sharp = double_sharp(powers[k - 1], tau, 0).path;
        pass = contains(sharp, inner);
      }
      ++checked;
    }
    if (pass) {
      out.C = C;
      out.windows = checked;
      return out;
    }
  }
  throw std::logic_error("buffer constant failed verification on a leaf window");
}

std::vector<std::size_t> disjoint_copies(const Path& hay, const Path& needle) {
  std::vector<std::size_t> out;
  if (needle.trivial()) return out;
  std::size_t from = 0;
  while (auto p = find_subpath(hay, needle, from)) {
    out.push_back(*p);
    from = *p + needle.size();
  }
  return out;
}

FindingEg finding_eg(const GraphMap& f, const Path& beta, int kmax, std::size_t exact_limit,
                     bool continue_after_hit) {
  FindingEg out;
  const Graph& g = f.G();
  Path rbeta = reverse(g, beta);
  Path upper = beta, lower = beta;
  std::optional<GraphMap> pk = identity_map(f.dom);
  bool upper_ok = true, certified = true, exact_run = true;
  for (int k = 1; k <= kmax; ++k) {
    if (upper_ok) {
      try {
        upper = f.map_path(upper);
      } catch (const BlowupError&) {
        upper_ok = false;
      }
    }
    if (pk) {
      pk = compose(f, *pk);
      if (total_image(*pk) > exact_limit) pk.reset();
    }
    bool exact = pk.has_value();
    Path s = exact ? double_sharp(*pk, beta, 0).path : double_sharp(f, lower, 0).path;
    lower = s;
    if (exact && exact_run) out.exact_through = k;
    exact_run = exact_run && exact;
    auto copies = disjoint_copies(s, beta);
    out.copies.push_back(static_cast<int>(copies.size()));
    out.exact_at.push_back(exact);
    if (copies.size() >= 3) {
      if (!out.k) {
        out.k = k;
        out.survivor = s;
        out.exact = exact;
        out.positions.assign(copies.begin(), copies.begin() + 3);
        out.reversed = disjoint_copies(s, rbeta);
      }
      if (!continue_after_hit) break;
      continue;
    }
    bool miss = exact || (upper_ok && disjoint_copies(upper, beta).size() < 3);
    certified = certified && miss;
    if (certified && !out.k) out.certified_miss_through = k;
  }
  if (!out.k) out.reversed = disjoint_copies(lower, rbeta);
  return out;
}

NeighborhoodCheck check_attracting_neighborhood(const GraphMap& f, const Path& beta, int k, std::uint64_t seed,
                                                int trials, int levels) {
  NeighborhoodCheck out;
  const Graph& g = f.G();
  GraphMap fk = power(f, k);
  out.nested.push_back(beta);
  for (int j = 1; j <= levels; ++j) {
    const Path& prev = out.nested.back();
    Path s = double_sharp(fk, prev, 0).path;
    auto c = disjoint_copies(s, prev);
    if (c.size() < 3) {
      out.ok = false;
      out.failure = "level " + std::to_string(j) + ": fewer than three copies of beta_" + std::to_string(j - 1);
      return out;
    }
    out.nested.push_back(subpath(g, s, c[0], c[2] + prev.size()));
  }
  std::mt19937_64 rng(seed);
  for (int t = 0; t < trials; ++t) {
    Path sigma = random_extension(g, beta, rng);
    Path it = sigma;
    for (int j = 1; j <= levels; ++j) {
      it = iterate(fk, it, 1);
      if (!contains(it, out.nested[j])) {
        out.ok = false;
        out.failure = "f^" + std::to_string(j * k) + "_#(" + to_string(g, sigma) + ") misses beta_" +
                      std::to_string(j);
        return out;
      }
    }
    ++out.trials;
  }
  return out;
}

PingPongSetup make_pingpong_setup(const GraphMap& g_phi, const GraphMap& g_psi) {
  if (!g_phi.self() || !g_psi.self()) throw StructuralError("ping-pong maps must be self-maps");
  if (g_phi.dom->rank != g_psi.dom->rank) throw StructuralError("ping-pong maps have different ranks");
  PingPongSetup s{g_phi, g_psi, rose_change(g_phi.dom, g_psi.dom), rose_change(g_psi.dom, g_phi.dom)};
  for (const auto& [a, b] : {std::pair{&s.h_psi, &s.h_phi}, std::pair{&s.h_phi, &s.h_psi}}) {
    GraphMap rt = compose(*b, *a);
    auto cls = rt.outer_class();
    for (std::size_t i = 0; i < cls.size(); ++i)
      if (cls[i] != FWord{static_cast<int>(i) + 1})
        throw StructuralError("marking round trip moves generator " + a->dom->gens[i]);
  }
  return s;
}

GraphMap pingpong_composite(const PingPongSetup& s, int m, int n) {
  GraphMap x = compose(power(s.g_phi, n), s.h_phi);
  x = compose(s.h_psi, x);
  return compose(power(s.g_psi, m), x);
}

std::vector<Path> tile_betas(const GraphMap& f, const Filtration& filt, std::size_t lo, std::size_t hi,
                             std::size_t max_count) {
  std::vector<Path> out;
  int r = top_eg(f, filt);
  if (r == 0) return out;
  std::set<std::vector<Dir>> seen;
  for (int e : filt.stratum(r)) {
    Path t = single(f.G(), {e, false});
    while (t.size() < 4 * hi) t = f.map_path(t);
    for (std::size_t len = lo; len <= hi; ++len)
      for (std::size_t i = 0; i + len <= t.size() && out.size() < max_count; ++i) {
        Path p = subpath(f.G(), t, i, i + len);
        if (seen.insert(p.e).second) out.push_back(p);
      }
  }
  return out;
}

PingPongReport pingpong_search(const PingPongSetup& s, int m_max, const std::vector<Path>& betas,
                               std::uint64_t seed, NaPair na, int neighborhood_trials) {
  PingPongReport out;
  if (m_max <= 0) return out;
  const auto phi = s.g_phi.outer_class(), psi = s.g_psi.outer_class();
  struct Cell {
    std::optional<PingPongHit> hit;
    std::vector<std::string> notes;
  };
  auto run = [&](int m, int n) {
    Cell c;
    GraphMap x = pingpong_composite(s, m, n);
    bool outer_ok = same_outer(x.outer_class(), [&] {
      auto a = outer_power(phi, n);
      auto b = outer_power(psi, m);
      std::vector<FWord> y;
      for (const FWord& w : a) y.push_back(fapply(b, w));
      return y;
    }());
    for (const Path& beta : betas) {
      FindingEg fe = finding_eg(x, beta, 1, std::max<std::size_t>(1000, 4 * total_image(x)));
      if (!fe.k) {
        if (fe.reversed.size() >= 3)
          c.notes.push_back("only reversed copies of " + to_string(x.G(), beta));
        continue;
      }
      PingPongHit h;
      h.m = m;
      h.n = n;
      h.beta = beta;
      h.positions = fe.positions;
      h.reversed = fe.reversed;
      h.outer_ok = outer_ok;
      auto nc = check_attracting_neighborhood(x, beta, 1, seed, neighborhood_trials, 2);
      h.neighborhood_ok = nc.ok;
      if (!nc.ok) c.notes.push_back(nc.failure);
      if (na.phi && na.psi) {
        std::mt19937_64 rng(seed + 1000 * m + n);
        const Graph& g = x.G();
        const int rank = x.dom->rank;
        for (int t = 0; t < 20; ++t) {
          FWord rw;
          for (int i = 0, len = 2 + static_cast<int>(rng() % 5); i < len; ++i)
            rw.push_back((1 + static_cast<int>(rng() % rank)) * (rng() % 2 ? 1 : -1));
          rw = fcyclic(freduce(rw));
          if (rw.empty()) continue;
          Circuit cc = cyclic_tighten(g, x.dom->from_rose(rw).e);
          if (na.psi->K.carries(g, cc)) continue;
          Circuit back = s.h_phi.map_circuit(cc);
          if (!back.e.empty() && na.phi->K.carries(s.h_phi.H(), back)) continue;
          ++h.na_checked;
          Circuit it = cc;
          Path rbeta = reverse(g, beta);
          try {
            for (int j = 0; j < 4; ++j) {
              it = x.map_circuit(it);
              if (it.e.size() > 200000) break;
              // Windows of the circuit, read cyclically.
              Path twice{g.init(it.e.front()), it.e};
              twice.e.insert(twice.e.end(), it.e.begin(), it.e.end());
              if (find_subpath(twice, beta) || find_subpath(twice, rbeta)) {
                ++h.na_consistent;
                break;
              }
            }
          } catch (const BlowupError&) {
          }
        }
      }
      c.hit = h;
      break;
    }
    return c;
  };
  std::vector<std::pair<int, int>> cells;
  for (int m = 1; m <= m_max; ++m)
    for (int n = 1; n <= m_max; ++n) cells.push_back({m, n});
  std::vector<std::future<Cell>> futs;
  for (auto [m, n] : cells) futs.push_back(std::async(std::launch::async, run, m, n));
  for (std::size_t i = 0; i < cells.size(); ++i) {
    Cell c = futs[i].get();
    if (c.hit)
      out.hits.push_back(*c.hit);
    else
      out.misses.push_back(cells[i]);
    for (auto& note : c.notes)
      out.notes.push_back("(" + std::to_string(cells[i].first) + "," + std::to_string(cells[i].second) + ") " + note);
  }
  return out;
}

}  // namespace outfn
