#include "doctest.h"
#include "support.hpp"

using namespace outfn;
using namespace testsupport;

namespace {

std::shared_ptr<const MarkedGraph> rose(int n) {
  std::vector<std::string> gens, imgs;
  for (int i = 0; i < n; ++i) {
    gens.push_back(std::string(1, static_cast<char>('a' + i)));
    imgs.push_back(gens.back());
  }
  return rose_map(gens, imgs).dom;
}

std::vector<Dir> W(const Graph& g, const std::string& s) { return parse_word(g, s); }

// Oracle: depth-first search over every lift, without assuming uniqueness.
bool brute_carries(const Graph& g, const Immersion& im, const Circuit& c) {
  for (int s = 0; s < im.nv; ++s) {
    std::vector<std::pair<int, std::size_t>> stack{{s, 0}};
    while (!stack.empty()) {
      auto [v, i] = stack.back();
      stack.pop_back();
      if (i == c.e.size()) {
        if (v == s) return true;
        continue;
      }
      for (const auto& e : im.edges) {
        if (e.from == v && e.img == c.e[i]) stack.push_back({e.to, i + 1});
        if (e.to == v && bar(e.img) == c.e[i]) stack.push_back({e.from, i + 1});
      }
    }
  }
  (void)g;
  return false;
}

}  // namespace

TEST_CASE("tighten examples") {
  auto g = rose(2);
  CHECK(to_string(*g, tighten(*g, W(*g, "a a^-1 b"))) == "b");
  Path t = tighten(*g, W(*g, "b a a^-1 b^-1"));
  CHECK(t.trivial());
  CHECK(t.base == 0);
  CHECK(to_string(*g, tighten(*g, W(*g, "a b a"))) == "a b a");
}

TEST_CASE("tighten rejects non-composable words") {
  auto f = parse_map_text("vertex u\nvertex v\nedge a u v\nedge b u v\nedge c u v\n");
  CHECK_THROWS_AS(tighten(*f.graph, W(*f.graph, "a a")), StructuralError);
}

TEST_CASE("cyclic_tighten examples") {
  auto g = rose(2);
  CHECK(to_string(*g, cyclic_tighten(*g, W(*g, "a^-1 b a"))) == "[b]");
  CHECK(to_string(*g, cyclic_tighten(*g, W(*g, "a b"))) == "[a b]");
  CHECK(cyclic_tighten(*g, W(*g, "b a b^-1 a")) == canonical_rotation(W(*g, "b a b^-1 a")));
  CHECK(to_string(*g, cyclic_tighten(*g, W(*g, "b a b^-1 a"))) == "[a b a b^-1]");
  CHECK_THROWS_AS(cyclic_tighten(*g, W(*g, "a b b^-1 a^-1")), StructuralError);
}

TEST_CASE("tighten properties on random words") {
  std::mt19937_64 rng(7);
  auto g = rose(3);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<Dir> w;
    std::size_t len = rng() % 201;
    for (std::size_t i = 0; i < len; ++i) w.push_back({static_cast<int>(rng() % 3), static_cast<bool>(rng() % 2)});
    Path p = tighten(*g, w, 0);
    CHECK(tighten(*g, p.e, 0) == p);
    CHECK(is_reduced(p.e));
    std::vector<Dir> ww = w;
    for (auto it = w.rbegin(); it != w.rend(); ++it) ww.push_back(bar(*it));
    CHECK(tighten(*g, ww, 0).trivial());
    if (!p.trivial()) {
      std::vector<Dir> red = p.e;
      Path once = tighten(*g, red, 0);
      if (!once.trivial()) {
        Circuit c = [&] {
          try {
            return cyclic_tighten(*g, red);
          } catch (const StructuralError&) {
            return Circuit{};
          }
        }();
        for (std::size_t r = 0; r < red.size() && !c.e.empty(); ++r) {
          std::vector<Dir> rot(red.begin() + r, red.end());
          rot.insert(rot.end(), red.begin(), red.begin() + r);
          CHECK(cyclic_tighten(*g, rot) == c);
        }
      }
    }
  }
}

TEST_CASE("marking round trip on a theta graph") {
  auto f = parse_map_text(
      "vertex u\nvertex v\nedge x u v\nedge y u v\nedge z u v\n"
      "marking s = x y^-1\nmarking t = y z^-1\n");
  const MarkedGraph& g = *f.graph;
  CHECK(g.rank == 2);
  for (int i = 0; i < g.rank; ++i) CHECK(fconjugate(g.to_rose(g.marking[i].e), FWord{i + 1}));
  // every loop at the basepoint survives the round trip exactly
  auto p = tighten(g, W(g, "x z^-1 x y^-1"));
  CHECK(g.from_rose(g.to_rose(p.e)) == p);
}

TEST_CASE("marking must be a homotopy equivalence") {
  CHECK_THROWS_AS(parse_map_text("vertex v\nedge a v v\nedge b v v\nmarking s = a\nmarking t = a a\n"),
                  StructuralError);
  CHECK_THROWS_AS(parse_map_text("vertex u\nvertex v\nedge a u v\nedge b u u\n"), StructuralError);
}

TEST_CASE("free group inversion") {
  std::vector<FWord> phi{{2}, {1, 2}};  // a -> b, b -> ab
  auto inv = finvert(phi, 2);
  REQUIRE(inv);
  for (int i = 0; i < 2; ++i) CHECK(fapply(phi, (*inv)[i]) == FWord{i + 1});
  CHECK_FALSE(finvert({{1, 1}, {2}}, 2));
  CHECK_FALSE(finvert({{1, 2, -1, -2}, {2}}, 2));

  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    GraphMap f = random_positive_auto(3, rng, 8);
    auto cls = f.outer_class();
    auto w = finvert(cls, 3);
    REQUIRE(w);
    for (int i = 0; i < 3; ++i) {
      CHECK(fapply(cls, (*w)[i]) == FWord{i + 1});
      CHECK(fapply(*w, cls[i]) == FWord{i + 1});
    }
  }
}

TEST_CASE("carries_class examples and oracle") {
  auto g = rose(3);  // edges a, b, c
  int c = *g->find_edge("c");
  Immersion loop_c = Immersion::from_subgraph(*g, {c});
  CHECK(carries_class(*g, loop_c, cyclic_tighten(*g, W(*g, "c"))));
  CHECK_FALSE(carries_class(*g, loop_c, cyclic_tighten(*g, W(*g, "a b"))));
  Immersion whole = Immersion::from_subgraph(*g, {0, 1, 2});
  CHECK(carries_class(*g, whole, cyclic_tighten(*g, W(*g, "a b^-1 c"))));

  // a folded subgroup graph: <a b, b a^-1 c>
  Immersion sub = Immersion::from_loops(*g, 0, {tighten(*g, W(*g, "a b")), tighten(*g, W(*g, "b a^-1 c"))});
  CHECK(sub.is_immersion(*g));
  for (std::size_t L = 1; L <= 8; ++L) {
    for (const Path& p : all_paths(*g, L)) {
      if (p.e.size() != L || p.e.front() == bar(p.e.back())) continue;
      Circuit cc{p.e};
      CHECK(carries_class(*g, sub, cc) == brute_carries(*g, sub, cc));
    }
  }
}

TEST_CASE("core subgraph components") {
  auto f = parse_map_text("vertex u\nvertex v\nvertex w\nedge x u v\nedge y v w\nedge z w u\nedge l u u\n");
  CoreSubgraph s{{0, 1}};
  auto comps = s.components(*f.graph);
  REQUIRE(comps.size() == 1);
  CHECK(comps[0].contractible);
  CHECK_FALSE(s.is_core(*f.graph));
  CoreSubgraph t{{3}};
  CHECK_FALSE(t.components(*f.graph)[0].contractible);
  CHECK(t.is_core(*f.graph));
  CHECK(core_edges(*f.graph, {0, 1, 3}) == std::vector<int>{3});
}
