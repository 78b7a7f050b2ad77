#include <set>

#include "doctest.h"
#include "outfn/nielsen.hpp"
#include "support.hpp"

using namespace outfn;
using namespace testsupport;

namespace {

// Oracle: every path of length <= L fixed by some f^k, k <= K, then those
// with no interior split into two such paths.
std::set<std::vector<Dir>> brute_indivisible(const GraphMap& f, std::size_t L, int K) {
  const Graph& g = f.G();
  std::set<std::vector<Dir>> fixed;
  for (const Path& p : all_paths(g, L))
    if (nielsen_period(f, p, K)) fixed.insert(p.e);
  std::set<std::vector<Dir>> out;
  for (const auto& w : fixed) {
    bool split = false;
    for (std::size_t i = 1; i < w.size() && !split; ++i)
      split = fixed.count({w.begin(), w.begin() + i}) && fixed.count({w.begin() + i, w.end()});
    if (!split) out.insert(w);
  }
  return out;
}

std::set<std::vector<Dir>> both_orientations(const GraphMap& f, const NielsenCatalog& cat) {
  std::set<std::vector<Dir>> out;
  for (const auto& p : cat.paths) {
    out.insert(p.path.e);
    out.insert(reverse(f.G(), p.path).e);
  }
  return out;
}

}  // namespace

TEST_CASE("Nielsen search examples") {
  GraphMap c = rose_map({"c", "a", "b"}, {"c", "b", "a c b"});
  auto cat = nielsen_catalog(c, compute_filtration(c), 12, 4);
  auto fixed = cat.at_height(1);
  REQUIRE(fixed.size() == 1);
  CHECK(S(c, fixed[0].path) == "c");
  CHECK(fixed[0].period == 1);
  CHECK(fixed[0].kind == NielsenKind::fixed_edge);

  GraphMap lin = linear_map();
  auto lc = nielsen_catalog(lin, compute_filtration(lin), 8, 4);
  CHECK(lc.find(lin.G(), P(lin, "e c e^-1")).has_value());
  CHECK(lc.find(lin.G(), P(lin, "e c^-1 c^-1 e^-1")).has_value());
  CHECK_FALSE(lc.find(lin.G(), P(lin, "c c")).has_value());

  GraphMap g = golden();
  auto gc = nielsen_catalog(g, compute_filtration(g), 12, 4);
  REQUIRE(gc.paths.size() == 1);
  CHECK(gc.paths[0].period == 2);
  CHECK(gc.paths[0].closed);
  CHECK(gc.paths[0].kind == NielsenKind::eg);
  CHECK(gc.conclusive(1));
}

TEST_CASE("Nielsen search matches enumeration on rank-two maps") {
  for (const GraphMap& f : {golden(), golden_sq(), linear_map()}) {
    auto cat = nielsen_catalog(f, compute_filtration(f), 12, 4);
    CHECK(both_orientations(f, cat) == brute_indivisible(f, 12, 4));
    for (const auto& p : cat.paths) {
      CHECK(nielsen_period(f, p.path, p.period) == p.period);
      CHECK(is_indivisible(f, p.path, 4));
    }
  }
}

TEST_CASE("EG Nielsen paths split at one illegal turn") {
  for (const GraphMap& f : {golden(), golden_sq()}) {
    Filtration F = compute_filtration(f);
    auto cat = nielsen_catalog(f, F, 12, 4);
    for (const auto& p : cat.at_height(1)) {
      REQUIRE(p.kind == NielsenKind::eg);
      Path left = subpath(f.G(), p.path, 0, p.split);
      Path right = subpath(f.G(), p.path, p.split, p.path.size());
      CHECK(is_r_legal(f, F, 1, left));
      CHECK(is_r_legal(f, F, 1, right));
      CHECK_FALSE(is_r_legal(f, F, 1, p.path));
      CHECK(p.path.e.front().edge != p.path.e.back().edge);
    }
  }
}

TEST_CASE("uniqueness and geometry") {
  NielsenCatalog empty;
  CHECK(eg_uniqueness_check(empty, 1).ok);
  GraphMap g = golden_sq();
  Filtration F = compute_filtration(g);
  auto cat = nielsen_catalog(g, F, 12, 4);
  CHECK(eg_uniqueness_check(cat, 1).ok);
  CHECK(classify_geometry(g, F, 1, cat) == Geometry::geometric);

  NielsenCatalog two = cat;
  NielsenPath extra = two.paths.front();
  extra.path = P(g, "a b a^-1 b^-1 a b a^-1 b^-1");
  two.paths.push_back(extra);
  auto u = eg_uniqueness_check(two, 1);
  CHECK_FALSE(u.ok);
  CHECK(u.witnesses.size() == 2);

  NielsenCatalog none;
  none.inconclusive.assign(1, false);
  CHECK(classify_geometry(g, F, 1, none) == Geometry::no_inp);
  none.inconclusive[0] = true;
  CHECK(classify_geometry(g, F, 1, none) == Geometry::inconclusive);

  NielsenCatalog open = cat;
  open.paths.front().path = P(g, "a b^-1");
  open.paths.front().closed = false;
  CHECK(classify_geometry(g, F, 1, open) == Geometry::nongeometric);
}
