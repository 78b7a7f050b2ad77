#include <cmath>

#include "doctest.h"
#include "outfn/laminations.hpp"
#include "support.hpp"

using namespace outfn;
using namespace testsupport;

namespace {

struct Setup {
  GraphMap f;
  Filtration filt;
  NielsenCatalog cat;
  SplitContext ctx;
  explicit Setup(GraphMap m, std::size_t cap = 0)
      : f(std::move(m)),
        filt(compute_filtration(f)),
        cat(nielsen_catalog(f, filt, cap ? cap : default_length_cap(f))),
        ctx(f, filt, cat) {}
  int height(const std::string& e) const { return filt.height_of[*f.G().find_edge(e)]; }
  int top() const { return filt.size(); }
};

std::vector<std::string> edge_names(const Graph& g, const std::vector<int>& es) {
  std::vector<std::string> out;
  for (int e : es) out.push_back(g.enames[e]);
  return out;
}

Circuit C(const GraphMap& f, const std::string& w) { return cyclic_tighten(f.G(), parse_word(f.G(), w)); }

// The linear edge e over the fixed loop c sits under the EG stratum {a, b}.
GraphMap linear_under_eg() { return rose_map({"c", "e", "a", "b"}, {"c", "e c", "b", "a e b"}); }

// The fixed arc z joins the two vertices of an EG stratum.
GraphMap arc_under_eg() {
  return from_text(
      "vertex v\nvertex w\nedge z v w\nedge a v w\nedge b w v\n"
      "map\nz -> z\na -> a b z\nb -> b a b\n");
}

// Two EG strata {a, b} < {c, d}; the top images cross a, or only the
// Nielsen path a b a^-1 b^-1 of the bottom stratum.
GraphMap two_eg(bool through_edge) {
  return rose_map({"a", "b", "c", "d"},
                  {"a b", "b a b", "d", through_edge ? "c a d" : "c a b a^-1 b^-1 d"});
}

GraphMap split3() { return rose_map({"c", "a", "b"}, {"c", "a b", "b a b"}); }

}  // namespace

TEST_CASE("nonattracting subgraph and rho") {
  Setup g(golden());
  auto ns = build_nonattracting(g.ctx, 1);
  CHECK(ns.Z.empty());
  CHECK(ns.conclusive());
  CHECK(ns.rho_hat.size() == 4);
  CHECK(ns.rho_period == 2);
  CHECK(g.cat.find(g.f.G(), ns.rho_hat).has_value());

  Setup sq(golden_sq());
  auto nsq = build_nonattracting(sq.ctx, 1);
  CHECK(nsq.Z.empty());
  CHECK(nsq.rho_period == 1);

  Setup r(reducible());
  int top = r.height("a");
  auto nr = build_nonattracting(r.ctx, top);
  CHECK(edge_names(r.f.G(), nr.Z) == std::vector<std::string>{"c"});
  CHECK(nr.rho_hat.size() == 6);
  REQUIRE(nr.z_components.size() == 1);
  CHECK_FALSE(nr.z_components[0].contractible);
  CHECK(nr.K.is_immersion(r.f.G()));
  CHECK(nr.K.carries(r.f.G(), C(r.f, "c")));

  Setup lin(linear_under_eg(), 8);
  auto nl = build_nonattracting(lin.ctx, lin.height("a"));
  CHECK(edge_names(lin.f.G(), nl.Z) == std::vector<std::string>{"c", "e"});
  CHECK(nl.K.carries(lin.f.G(), C(lin.f, "e c e^-1")));
  CHECK(nl.K.carries(lin.f.G(), C(lin.f, "c")));
}

TEST_CASE("groupoid membership") {
  Setup r(reducible());
  auto ns = build_nonattracting(r.ctx, r.height("a"));
  const Graph& g = r.f.G();
  CHECK(in_groupoid(ns, g, P(r.f, "c")));
  Path rc = concat(g, concat(g, ns.rho_hat, P(r.f, "c")), reverse(g, ns.rho_hat));
  CHECK(rc.size() == 13);
  CHECK(in_groupoid(ns, g, rc));
  CHECK_FALSE(in_groupoid(ns, g, P(r.f, "a b")));
  CHECK_FALSE(in_groupoid(ns, g, P(r.f, "c a")));
  CHECK(in_groupoid(ns, g, C(r.f, "c")));
  CHECK_FALSE(in_groupoid(ns, g, C(r.f, "a b")));
}

TEST_CASE("weak attraction") {
  Setup g(golden());
  auto ns = build_nonattracting(g.ctx, 1);
  CHECK(weak_attraction_test(g.ctx, ns, C(g.f, "a b")).verdict == Attraction::attracted);
  CHECK(weak_attraction_test(g.ctx, ns, C(g.f, "a b^-1")).verdict == Attraction::attracted);
  auto comm = weak_attraction_test(g.ctx, ns, C(g.f, "a b a^-1 b^-1"));
  CHECK(comm.verdict == Attraction::not_attracted);

  Setup r(reducible());
  auto nr = build_nonattracting(r.ctx, r.height("a"));
  CHECK(weak_attraction_test(r.ctx, nr, C(r.f, "c")).verdict == Attraction::not_attracted);
  CHECK(weak_attraction_test(r.ctx, nr, C(r.f, "a b")).verdict == Attraction::attracted);
  CHECK(to_string(Attraction::not_attracted) == "not-attracted");
}

TEST_CASE("full irreducibility certificate") {
  Setup g(golden());
  auto ns = build_nonattracting(g.ctx, 1);
  auto cert = full_irreducibility_certificate(g.f, g.filt, ns);
  CHECK(cert.verdict == CertVerdict::certified);
  CHECK(cert.power == 2);

  Setup r(reducible());
  auto nr = build_nonattracting(r.ctx, r.height("a"));
  auto refused = full_irreducibility_certificate(r.f, r.filt, nr);
  CHECK(refused.verdict == CertVerdict::not_certified);
  REQUIRE_FALSE(refused.reasons.empty());
  CHECK(refused.reasons[0].find("{c}") != std::string::npos);

  Setup arc(arc_under_eg());
  auto na = build_nonattracting(arc.ctx, arc.height("a"));
  CHECK(edge_names(arc.f.G(), na.Z) == std::vector<std::string>{"z"});
  REQUIRE(na.z_components.size() == 1);
  CHECK(na.z_components[0].contractible);
  CHECK(full_irreducibility_certificate(arc.f, arc.filt, na).verdict != CertVerdict::not_certified);
}

TEST_CASE("lamination inclusion") {
  Setup g(golden_sq());
  auto self = lamination_inclusion(g.ctx, 1, 1, 5);
  CHECK(self.included);
  CHECK(self.k == 0);

  for (bool through : {true, false}) {
    GraphMap f = two_eg(through);
    REQUIRE(finvert(f.outer_class(), 4).has_value());
    Setup s(f, 8);
    int lo = s.height("a"), hi = s.height("c");
    REQUIRE(lo < hi);
    auto inc = lamination_inclusion(s.ctx, lo, hi, 6);
    CHECK(inc.included == through);
  }
}

TEST_CASE("tiles and positivity") {
  CHECK(positivity_exponent({{0, 1}, {1, 1}}) == 2);
  CHECK(positivity_exponent({{1, 1}, {1, 2}}) == 1);
  CHECK_FALSE(positivity_exponent({{0, 1}, {1, 0}}));
  GraphMap f = golden();
  Filtration filt = compute_filtration(f);
  auto t = tile(f, {0, false}, 4);
  CHECK(t.path == iterate(f, single(f.G(), {0, false}), 4));
  CHECK(tiles(f, filt, 1, 2).size() == 4);
  for (int k = 0; k <= 5; ++k) CHECK(tiles_nest(f, filt, 1, k, 2));
  CHECK(tiles_nest(golden_sq(), compute_filtration(golden_sq()), 1, 3, 1));
}

TEST_CASE("singular rays and lines") {
  Setup sq(golden_sq());
  auto r0 = singular_rays(sq.f, sq.filt, sq.cat, 0);
  REQUIRE(r0.size() == 3);
  for (const auto& r : r0) CHECK(r.prefix == single(sq.f.G(), r.edge));
  auto rays = singular_rays(sq.f, sq.filt, sq.cat, 4);
  for (const auto& r : rays) {
    CHECK(r.nested);
    CHECK(r.lengths.size() == 5);
  }

  auto refused = singular_lines(sq.f, sq.filt, sq.cat, 3);
  CHECK(refused.refused);
  CHECK(refused.witness.find("a b a^-1 b^-1") != std::string::npos);

  auto lines = singular_lines(sq.f, sq.filt, sq.cat, 3, false);
  CHECK_FALSE(lines.refused);
  CHECK_FALSE(lines.lines.empty());
  Dir a{*sq.f.G().find_edge("a"), false}, b{*sq.f.G().find_edge("b"), false};
  bool ab = false;
  for (const auto& l : lines.lines) {
    CHECK(is_reduced(l.window.e));
    if (lines.rays[l.left].edge == a && lines.rays[l.right].edge == b && l.alpha.trivial()) ab = true;
  }
  CHECK(ab);
}

TEST_CASE("translation length limit") {
  Setup s(split3());
  auto ns = build_nonattracting(s.ctx, s.height("a"));
  auto m = top_stratum_model(s.f, s.filt, ns);
  CHECK(std::abs(m.pf.lambda - (3 + std::sqrt(5.0)) / 2) < 1e-9);
  auto at = [&](const std::string& w) { return translation_length_limit_search(m, C(s.f, w)); };
  int ea = *s.f.G().find_edge("a"), eb = *s.f.G().find_edge("b");
  auto hs = [&](int e) { return std::find(m.H.begin(), m.H.end(), e) - m.H.begin(); };
  auto a = at("a"), b = at("b");
  REQUIRE(a.ok);
  REQUIRE(b.ok);
  CHECK(a.K == 0);
  CHECK(std::abs(a.value - m.pf.vec[hs(ea)]) < 1e-12);
  CHECK(std::abs(b.value - m.pf.vec[hs(eb)]) < 1e-12);
  auto rho = at(to_string(s.f.G(), m.rho));
  REQUIRE(rho.ok);
  CHECK(rho.value == 0);
  auto crho = at("c " + to_string(s.f.G(), m.rho));
  REQUIRE(crho.ok);
  CHECK(crho.value == 0);
  auto mixed = at("a b^-1 c");
  REQUIRE(mixed.ok);
  CHECK(mixed.K == 1);
  auto later = translation_length_limit(m, C(s.f, "a b^-1 c"), 3);
  REQUIRE(later.ok);
  CHECK(k_stable(m, mixed, later));
  CHECK(std::abs(mixed.value - later.value) < 1e-12);
}

TEST_CASE("property: Z is invariant and the groupoid is closed") {
  std::mt19937_64 rng(5);
  for (GraphMap f : {reducible(), linear_under_eg(), split3()}) {
    Setup s(f, 8);
    auto ns = build_nonattracting(s.ctx, s.top());
    const Graph& g = f.G();
    GraphMap fp = power(f, ns.rho_period);
    for (int e : ns.Z) CHECK(in_groupoid(ns, g, f.map_path(single(g, {e, false}))));
    // Random composable words in Z edges and rho^{+-1}.
    std::vector<Path> pieces;
    for (int e : ns.Z) {
      pieces.push_back(single(g, {e, false}));
      pieces.push_back(single(g, {e, true}));
    }
    if (!ns.rho_hat.trivial()) {
      pieces.push_back(ns.rho_hat);
      pieces.push_back(reverse(g, ns.rho_hat));
    }
    for (int t = 0; t < 60; ++t) {
      Path w = trivial_at(path_start(g, pieces[0]));
      for (int i = 0, n = 1 + static_cast<int>(rng() % 5); i < n; ++i) {
        std::vector<Path> ok;
        for (const auto& p : pieces)
          if (path_start(g, p) == path_end(g, w)) ok.push_back(p);
        w = concat(g, w, ok[rng() % ok.size()]);
      }
      if (w.trivial()) continue;
      CHECK(in_groupoid(ns, g, w));
      CHECK(in_groupoid(ns, g, fp.map_path(w)));
    }
  }
}

TEST_CASE("property: attraction and groupoid membership exclude each other") {
  std::mt19937_64 rng(9);
  int attracted = 0, not_attracted = 0;
  for (GraphMap f : {reducible(), linear_under_eg(), golden_sq()}) {
    Setup s(f, 8);
    auto ns = build_nonattracting(s.ctx, s.top());
    for (const Path& p : all_paths(f.G(), 4)) {
      if (path_start(f.G(), p) != path_end(f.G(), p) || rng() % 3) continue;
      Circuit c = cyclic_tighten(f.G(), p.e);
      if (c.e.empty()) continue;
      auto v = weak_attraction_test(s.ctx, ns, c, 12);
      bool in = in_groupoid(ns, f.G(), c);
      if (v.verdict == Attraction::attracted) {
        ++attracted;
        CHECK_FALSE(in);
      }
      if (in) {
        ++not_attracted;
        CHECK(v.verdict == Attraction::not_attracted);
      }
    }
  }
  CHECK(attracted > 20);
  CHECK(not_attracted > 2);
}

TEST_CASE("property: translation length does not depend on K") {
  Setup s(split3());
  auto ns = build_nonattracting(s.ctx, s.height("a"));
  auto m = top_stratum_model(s.f, s.filt, ns);
  std::mt19937_64 rng(17);
  const std::vector<std::string> parts{"a", "b", "c", "a^-1", "b^-1", "c^-1", to_string(s.f.G(), m.rho)};
  int stable = 0;
  for (int t = 0; t < 40 && stable < 20; ++t) {
    std::string w;
    for (int i = 0, n = 2 + static_cast<int>(rng() % 4); i < n; ++i) w += parts[rng() % parts.size()] + " ";
    auto word = parse_word(s.f.G(), w);
    if (tighten(s.f.G(), word).trivial()) continue;
    Circuit c = cyclic_tighten(s.f.G(), word);
    auto a = translation_length_limit_search(m, c, 8);
    if (!a.ok) continue;
    auto b = translation_length_limit(m, c, a.K + 2);
    REQUIRE(b.ok);
    CHECK(k_stable(m, a, b));
    CHECK(std::abs(a.value - b.value) < 1e-9 * std::max(1.0, a.value));
    CHECK(a.value >= 0);
    ++stable;
  }
  CHECK(stable == 20);
}
