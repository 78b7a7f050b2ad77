#pragma once

#include <random>
#include <set>
#include <string>
#include <vector>

#include "outfn/graph_map.hpp"
#include "outfn/io.hpp"

namespace testsupport {

using namespace outfn;

inline GraphMap golden() { return rose_map({"a", "b"}, {"b", "a b"}); }
inline GraphMap golden_sq() { return rose_map({"a", "b"}, {"a b", "b a b"}); }
inline GraphMap reducible() { return rose_map({"c", "a", "b"}, {"c", "b", "a c b"}); }
// Takes the illegal turn {a^-1, b^-1} inside the image of a.
inline GraphMap adversarial() { return rose_map({"a", "b"}, {"a b^-1", "a"}); }
inline GraphMap linear_map() { return rose_map({"c", "e"}, {"c", "e c"}); }
inline GraphMap identity2() { return rose_map({"a", "b"}, {"a", "b"}); }

inline GraphMap from_text(const std::string& text) { return *parse_map_text(text).map; }

// A zero stratum {z} enveloped by the EG stratum {a, d, b} over the fixed loop c.
inline GraphMap enveloped() {
  return from_text(
      "vertex v\nvertex p\nvertex q\n"
      "edge c v v\nedge z p q\nedge a v p\nedge d p q\nedge b q v\n"
      "map\nc -> c\nz -> c\na -> a z b\nd -> a d b\nb -> b^-1 d^-1 a^-1\n");
}

inline Path P(const GraphMap& f, const std::string& w) { return tighten(f.G(), parse_word(f.G(), w)); }
inline std::string S(const GraphMap& f, const Path& p) { return to_string(f.G(), p); }

// All reduced paths of length 1..L in g.
inline std::vector<Path> all_paths(const Graph& g, std::size_t L) {
  std::vector<Path> out;
  std::vector<Dir> cur;
  auto rec = [&](auto&& self) -> void {
    if (!cur.empty()) out.push_back(Path{g.init(cur.front()), cur});
    if (cur.size() == L) return;
    for (int e = 0; e < g.ne(); ++e)
      for (bool r : {false, true}) {
        Dir d{e, r};
        if (!cur.empty() && (g.term(cur.back()) != g.init(d) || d == bar(cur.back()))) continue;
        cur.push_back(d);
        self(self);
        cur.pop_back();
      }
  };
  rec(rec);
  return out;
}

inline Path random_path(const Graph& g, std::mt19937_64& rng, std::size_t len, int start = -1) {
  Path p;
  int v = start >= 0 ? start : static_cast<int>(rng() % g.nv());
  p.base = v;
  for (std::size_t i = 0; i < len; ++i) {
    auto dirs = g.directions_at(v);
    std::vector<Dir> ok;
    for (Dir d : dirs)
      if (p.e.empty() || d != bar(p.e.back())) ok.push_back(d);
    if (ok.empty()) break;
    Dir d = ok[rng() % ok.size()];
    p.e.push_back(d);
    v = g.term(d);
  }
  return p;
}

// Random positive automorphism of the rank-n rose: a product of
// transvections x_i -> x_i x_j.
inline GraphMap random_positive_auto(int n, std::mt19937_64& rng, int steps) {
  std::vector<std::string> names;
  for (int i = 0; i < n; ++i) names.push_back(std::string(1, static_cast<char>('a' + i)));
  std::vector<std::vector<int>> img(n);
  for (int i = 0; i < n; ++i) img[i] = {i};
  for (int s = 0; s < steps; ++s) {
    int i = static_cast<int>(rng() % n), j = static_cast<int>(rng() % n);
    if (i == j) continue;
    // precompose: x_i -> x_i x_j
    img[i].insert(img[i].end(), img[j].begin(), img[j].end());
  }
  std::vector<std::string> words;
  for (auto& w : img) {
    std::string s;
    for (int x : w) s += (s.empty() ? "" : " ") + names[x];
    words.push_back(s);
  }
  return rose_map(names, words);
}

}  // namespace testsupport
