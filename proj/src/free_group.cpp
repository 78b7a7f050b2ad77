#include "outfn/free_group.hpp"

#include <algorithm>
#include <cstdlib>

namespace outfn {

FWord freduce(const FWord& w) {
  FWord out;
  for (int x : w) {
    if (!out.empty() && out.back() == -x)
      out.pop_back();
    else
      out.push_back(x);
  }
  return out;
}

FWord finverse(const FWord& w) {
  FWord out(w.rbegin(), w.rend());
  for (int& x : out) x = -x;
  return out;
}

FWord fmul(const FWord& a, const FWord& b) {
  FWord w = a;
  w.insert(w.end(), b.begin(), b.end());
  return freduce(w);
}

FWord fcyclic(const FWord& w) {
  FWord r = freduce(w);
  std::size_t i = 0, j = r.size();
  while (j - i >= 2 && r[i] == -r[j - 1]) {
    ++i;
    --j;
  }
  return FWord(r.begin() + i, r.begin() + j);
}

bool fconjugate(const FWord& a, const FWord& b) {
  FWord x = fcyclic(a), y = fcyclic(b);
  if (x.size() != y.size()) return false;
  if (x.empty()) return true;
  FWord xx = x;
  xx.insert(xx.end(), x.begin(), x.end());
  return std::search(xx.begin(), xx.end(), y.begin(), y.end()) != xx.end();
}

FWord fapply(const std::vector<FWord>& images, const FWord& w) {
  FWord out;
  for (int x : w) {
    const FWord& im = images[std::abs(x) - 1];
    if (x > 0)
      out.insert(out.end(), im.begin(), im.end());
    else {
      FWord inv = finverse(im);
      out.insert(out.end(), inv.begin(), inv.end());
    }
  }
  return freduce(out);
}

namespace {

// Labelled graph for folding; every edge carries a positive letter and a
// group element g such that loop products at vertex 0 are preserved.
struct TrackEdge {
  int src, dst, label;
  FWord g;
  bool alive = true;
};

}  // namespace

std::optional<std::vector<FWord>> finvert(const std::vector<FWord>& images, int n) {
  if (static_cast<int>(images.size()) != n) return std::nullopt;
  std::vector<TrackEdge> edges;
  int nv = 1;
  for (int i = 0; i < n; ++i) {
    FWord w = freduce(images[i]);
    if (w.empty()) return std::nullopt;
    int prev = 0;
    for (std::size_t k = 0; k < w.size(); ++k) {
      int next = (k + 1 == w.size()) ? 0 : nv++;
      TrackEdge e{prev, next, w[k], {}};
      if (k + 1 == w.size()) e.g = {i + 1};
      if (e.label < 0) {
        std::swap(e.src, e.dst);
        e.label = -e.label;
        e.g = finverse(e.g);
      }
      edges.push_back(e);
      prev = next;
    }
  }

  auto gauge = [&](int w, const FWord& c) {
    FWord ci = finverse(c);
    for (auto& e : edges) {
      if (!e.alive) continue;
      if (e.src == w) e.g = fmul(ci, e.g);
      if (e.dst == w) e.g = fmul(e.g, c);
    }
  };

  for (bool changed = true; changed;) {
    changed = false;
    for (int u = 0; u < nv && !changed; ++u) {
      for (std::size_t a = 0; a < edges.size() && !changed; ++a) {
        if (!edges[a].alive) continue;
        for (int enda = 0; enda < 2 && !changed; ++enda) {
          const int ua = enda == 0 ? edges[a].src : edges[a].dst;
          if (ua != u) continue;
          const int la = enda == 0 ? edges[a].label : -edges[a].label;
          for (std::size_t b = a; b < edges.size() && !changed; ++b) {
            if (!edges[b].alive) continue;
            for (int endb = 0; endb < 2 && !changed; ++endb) {
              if (b == a && endb <= enda) continue;
              const int ub = endb == 0 ? edges[b].src : edges[b].dst;
              if (ub != u) continue;
              const int lb = endb == 0 ? edges[b].label : -edges[b].label;
              if (la != lb) continue;
              // Edge ends with the same outward letter at u.
              std::size_t e1 = a, e2 = b;
              int v1 = enda == 0 ? edges[a].dst : edges[a].src;
              int v2 = endb == 0 ? edges[b].dst : edges[b].src;
              FWord t1 = enda == 0 ? edges[a].g : finverse(edges[a].g);
              FWord t2 = endb == 0 ? edges[b].g : finverse(edges[b].g);
              if (v1 == v2) {
                if (t1 != t2) return std::nullopt;
                edges[e2].alive = false;
                changed = true;
                continue;
              }
              if (v2 == 0) {
                std::swap(e1, e2);
                std::swap(v1, v2);
                std::swap(t1, t2);
              }
              gauge(v2, fmul(finverse(t2), t1));
              edges[e2].alive = false;
              for (auto& e : edges) {
                if (!e.alive) continue;
                if (e.src == v2) e.src = v1;
                if (e.dst == v2) e.dst = v1;
              }
              changed = true;
            }
          }
        }
      }
    }
  }

  // Strip hanging trees away from the base vertex.
  for (bool changed = true; changed;) {
    changed = false;
    std::vector<int> deg(nv, 0);
    for (auto& e : edges)
      if (e.alive) {
        ++deg[e.src];
        ++deg[e.dst];
      }
    for (auto& e : edges) {
      if (!e.alive) continue;
      if ((e.src != 0 && deg[e.src] == 1) || (e.dst != 0 && deg[e.dst] == 1)) {
        e.alive = false;
        changed = true;
      }
    }
  }

  std::vector<std::optional<FWord>> inv(n);
  for (auto& e : edges) {
    if (!e.alive) continue;
    if (e.src != 0 || e.dst != 0) return std::nullopt;
    if (inv[e.label - 1]) return std::nullopt;
    inv[e.label - 1] = e.g;
  }
  std::vector<FWord> out;
  for (auto& w : inv) {
    if (!w) return std::nullopt;
    out.push_back(*w);
  }
  return out;
}

std::string fword_string(const FWord& w, const std::vector<std::string>& names) {
  std::string s;
  for (int x : w) {
    if (!s.empty()) s += ' ';
    s += names[std::abs(x) - 1];
    if (x < 0) s += "^-1";
  }
  return s;
}

}  // namespace outfn
