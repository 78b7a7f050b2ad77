#include <set>

#include "doctest.h"
#include "outfn/ct.hpp"
#include "support.hpp"

using namespace outfn;
using namespace testsupport;

namespace {

struct Setup {
  GraphMap f;
  Filtration filt;
  NielsenCatalog cat;
  SplitContext ctx;
  explicit Setup(GraphMap m)
      : f(std::move(m)),
        filt(compute_filtration(f)),
        cat(nielsen_catalog(f, filt, default_length_cap(f))),
        ctx(f, filt, cat) {}
};

std::vector<std::string> term_strings(const GraphMap& f, const SplitResult& r) {
  std::vector<std::string> out;
  for (const auto& t : r.terms) out.push_back(S(f, t.path));
  return out;
}

// Junction positions of a splitting.
std::set<std::size_t> junctions(const SplitResult& r) {
  std::set<std::size_t> out;
  std::size_t at = 0;
  for (std::size_t i = 0; i + 1 < r.terms.size(); ++i) out.insert(at += r.terms[i].path.size());
  return out;
}

// The cut at p is a splitting for the first `iterations` iterates.
bool cut_survives(const GraphMap& f, const Path& p, std::size_t at, int iterations) {
  Path a = subpath(f.G(), p, 0, at), b = subpath(f.G(), p, at, p.size());
  for (int i = 0; i < iterations; ++i) {
    a = f.map_path(a);
    b = f.map_path(b);
    if (cancellation(a, b) > 0) return false;
  }
  return true;
}

// w has two periodic directions, both in the single EG stratum, and no
// Nielsen path ends there.
GraphMap lonely_vertex() {
  return from_text(
      "vertex v\nvertex w\nedge a v v\nedge b v w\nedge d w v\n"
      "map\na -> a b d\nb -> a b\nd -> d a\n");
}

// Not a homotopy equivalence: t1^-1 t2 joins two vertices of the top
// stratum and has trivial image.
GraphMap collapsing_connector() {
  return from_text(
      "vertex x\nvertex y\nvertex z\n"
      "edge c z z\nedge t1 z x\nedge t2 z y\nedge a x y\nedge b y x\n"
      "map\nc -> c\nt1 -> t1\nt2 -> t1\na -> a b\nb -> a b a b\n");
}

void every_fail_has_witness(const CtReport& rep) {
  for (const auto& [name, c] : rep.axioms())
    if (c->verdict == Verdict::fail) CHECK_MESSAGE(!c->witnesses.empty(), name);
  for (const auto& r : rep.rtt)
    for (const Check* c : {&r.i, &r.ii, &r.iii})
      if (c->verdict == Verdict::fail) CHECK(!c->witnesses.empty());
}

}  // namespace

TEST_CASE("train track axioms on the golden maps and the adversarial variant") {
  for (const GraphMap& f : {golden(), golden_sq()}) {
    auto rtt = verify_rtt(f, compute_filtration(f));
    REQUIRE(rtt.size() == 1);
    CHECK(rtt[0].ok());
  }
  GraphMap adv = adversarial();
  auto rtt = verify_rtt(adv, compute_filtration(adv));
  REQUIRE(rtt.size() == 1);
  CHECK(rtt[0].i.ok());
  CHECK(rtt[0].iii.verdict == Verdict::fail);
  REQUIRE(rtt[0].iii.witnesses.size() == 1);
  CHECK(rtt[0].iii.witnesses[0].find("{a^-1, b^-1}") != std::string::npos);

  GraphMap id = identity2();
  CHECK(verify_rtt(id, compute_filtration(id)).empty());
}

TEST_CASE("connecting paths with trivial image break the second axiom") {
  GraphMap f = collapsing_connector();
  Filtration filt = declared_filtration(f, {{0}, {1}, {2}, {3, 4}});
  auto rtt = verify_rtt(f, filt);
  REQUIRE(rtt.size() == 1);
  CHECK(rtt[0].ii.verdict == Verdict::fail);
  REQUIRE(!rtt[0].ii.witnesses.empty());
  CHECK(rtt[0].ii.witnesses[0].find("t1^-1 t2") != std::string::npos);

  GraphMap r = reducible();
  auto ok = verify_rtt(r, compute_filtration(r));
  REQUIRE(ok.size() == 1);
  CHECK(ok[0].ok());
}

TEST_CASE("complete splitting examples") {
  Setup s(golden_sq());
  auto ab = complete_splitting(s.ctx, P(s.f, "a b"));
  REQUIRE(ab.ok);
  CHECK(term_strings(s.f, ab) == std::vector<std::string>{"a", "b"});
  CHECK(ab.terms[0].kind == TermKind::edge);

  auto bad = complete_splitting(s.ctx, P(s.f, "a b^-1"));
  CHECK_FALSE(bad.ok);
  CHECK(bad.obstruction == 1);

  auto rho = complete_splitting(s.ctx, P(s.f, "a b a^-1 b^-1"));
  REQUIRE(rho.ok);
  REQUIRE(rho.terms.size() == 1);
  CHECK(rho.terms[0].kind == TermKind::nielsen);

  Setup lin(linear_map());
  auto c = complete_splitting(lin.ctx, P(lin.f, "c"));
  REQUIRE(c.ok);
  CHECK(term_strings(lin.f, c) == std::vector<std::string>{"c"});
}

TEST_CASE("exceptional and zero-stratum terms") {
  Setup ex(rose_map({"c", "e", "g"}, {"c", "e c", "g c c"}));
  auto r = complete_splitting(ex.ctx, P(ex.f, "e c c c g^-1"));
  REQUIRE(r.ok);
  REQUIRE(r.terms.size() == 1);
  CHECK(r.terms[0].kind == TermKind::exceptional);
  CHECK(verify_splitting(ex.f, r.terms));
  auto twice = complete_splitting(ex.ctx, P(ex.f, "e c g^-1 e c^-1 g^-1"));
  REQUIRE(twice.ok);
  CHECK(twice.terms.size() == 2);

  Setup env(enveloped());
  Path fa = env.f.img[*env.f.G().find_edge("a")];
  auto z = complete_splitting(env.ctx, fa);
  REQUIRE(z.ok);
  CHECK(term_strings(env.f, z) == std::vector<std::string>{"a", "z", "b"});
  CHECK(z.terms[1].kind == TermKind::zero_path);
  int ze = *env.f.G().find_edge("z"), de = *env.f.G().find_edge("d");
  CHECK(env.ctx.is_taken({Dir{ze, false}}));
  CHECK(env.ctx.is_taken({Dir{ze, true}}));
  CHECK_FALSE(env.ctx.is_taken({Dir{de, true}, Dir{ze, false}}));
}

TEST_CASE("iterating until split") {
  Setup s(golden_sq());
  auto done = iterate_until_split(s.ctx, P(s.f, "a b"), 5);
  REQUIRE(done.k);
  CHECK(*done.k == 0);
  auto later = iterate_until_split(s.ctx, P(s.f, "a b^-1"), 5);
  REQUIRE(later.k);
  CHECK(*later.k == 1);
  CHECK(S(s.f, later.image) == "b^-1");

  Setup adv(adversarial());
  auto none = iterate_until_split(adv.ctx, P(adv.f, "a b^-1"), 0);
  CHECK_FALSE(none.k);
}

TEST_CASE("splittings survive iteration, persist, and refine every cut that survives") {
  std::mt19937_64 rng(11);
  std::vector<GraphMap> maps{golden_sq(), power(reducible(), 2), linear_map(), golden(),
                             rose_map({"c", "e", "g"}, {"c", "e c", "g c c"})};
  int split = 0;
  for (const GraphMap& f : maps) {
    Setup s(f);
    for (const auto& r : verify_rtt(f, s.filt)) REQUIRE(r.ok());
    for (int t = 0; t < 40; ++t) {
      Path p = random_path(f.G(), rng, 1 + rng() % 7);
      auto r = iterate_until_split(s.ctx, p, 4);
      if (!r.k) continue;
      ++split;
      CHECK(verify_splitting(f, r.split.terms));
      CHECK(complete_splitting(s.ctx, f.map_path(r.image)).ok);
      auto js = junctions(r.split);
      for (std::size_t at = 1; at < r.image.size(); ++at)
        if (cut_survives(f, r.image, at, 6)) CHECK(js.count(at));
    }
  }
  CHECK(split > 100);
}

TEST_CASE("principal vertices") {
  Setup sq(golden_sq());
  auto pv = principal_vertices(sq.f, sq.filt, sq.cat);
  REQUIRE(pv.size() == 1);
  CHECK(pv[0].principal);
  CHECK(pv[0].periodic_dirs.size() == 3);

  Setup circle(from_text("vertex v\nvertex w\nedge x v w\nedge y w v\nmap\nx -> x\ny -> y\n"));
  for (const auto& p : principal_vertices(circle.f, circle.filt, circle.cat)) {
    CHECK(p.periodic);
    CHECK_FALSE(p.principal);
  }

  Setup lonely(lonely_vertex());
  REQUIRE(lonely.cat.conclusive(1));
  auto lp = principal_vertices(lonely.f, lonely.filt, lonely.cat);
  int w = *lonely.f.G().find_vertex("w"), v = *lonely.f.G().find_vertex("v");
  CHECK(lp[w].periodic);
  CHECK(lp[w].periodic_dirs.size() == 2);
  CHECK_FALSE(lp[w].principal);
  CHECK(lp[v].principal);
}

TEST_CASE("CT verification") {
  CtReport sq = verify_ct(golden_sq(), compute_filtration(golden_sq()));
  CHECK(sq.is_ct());
  CHECK(sq.conclusive());
  CHECK(sq.principal_dirs.size() == 3);

  CtReport g = verify_ct(golden(), compute_filtration(golden()));
  CHECK(g.is_rtt());
  CHECK(g.rotationless.verdict == Verdict::fail);
  CHECK_FALSE(g.is_ct());

  CtReport adv = verify_ct(adversarial(), compute_filtration(adversarial()));
  CHECK(adv.completely_split.verdict == Verdict::fail);

  CtReport lin = verify_ct(linear_map(), compute_filtration(linear_map()));
  CHECK(lin.is_ct());

  GraphMap same = rose_map({"c", "e", "g"}, {"c", "e c", "g c"});
  CtReport twin = verify_ct(same, compute_filtration(same));
  CHECK(twin.linear_edges.verdict == Verdict::fail);

  GraphMap env = enveloped();
  CtReport z = verify_ct(env, compute_filtration(env));
  CHECK(z.zero_strata.ok());

  for (const auto& rep : {sq, g, adv, lin, twin, z}) every_fail_has_witness(rep);
}

TEST_CASE("homeomorphism test on map states") {
  GraphMap f = golden();
  MapState id = state_of(identity_map(f.dom));
  CHECK(is_homeomorphism_onto(id, f.H(), {0, 1}));
  CHECK_FALSE(is_homeomorphism_onto(state_of(f), f.H(), {0, 1}));
}
