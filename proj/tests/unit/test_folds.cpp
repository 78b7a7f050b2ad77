#include "doctest.h"
#include "outfn/folds.hpp"
#include "support.hpp"

using namespace outfn;
using namespace testsupport;

namespace {

std::size_t total(const MapState& s) {
  std::size_t n = 0;
  for (const Path& p : s.img) n += p.size();
  return n;
}

void check_factorization(const GraphMap& f) {
  Factorization fz = stallings_factorize(f);
  CHECK(fz.recompose(f.H()) == f.img);
  std::size_t prev = total(state_of(f));
  for (const FoldStep& st : fz.steps) {
    CHECK(total(st.after) < prev);
    prev = total(st.after);
  }
  CHECK(is_immersion(fz.terminal, f.H()));
  CHECK(fz.isomorphism);
}

}  // namespace

TEST_CASE("identity factorizes trivially") {
  Factorization fz = stallings_factorize(identity2());
  CHECK(fz.steps.empty());
  CHECK(fz.isomorphism);
  CHECK(fz.recompose(identity2().H()) == identity2().img);
}

TEST_CASE("golden and a transvection recompose") {
  check_factorization(golden());
  GraphMap t = rose_map({"a", "b"}, {"a b", "b"});
  check_factorization(t);
  Factorization fz = stallings_factorize(t);
  REQUIRE(fz.steps.size() == 1);
  // a is cut where its image reaches b; the tail is identified with b
  CHECK(fz.steps[0].cls == FoldClass::full_proper);
  CHECK(fz.steps[0].over == 0);
  CHECK(fz.steps[0].under == 1);
}

TEST_CASE("random positive automorphisms recompose") {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 20; ++i) check_factorization(random_positive_auto(1 + i % 3, rng, 2 + i % 7));
}

TEST_CASE("fold classification") {
  GraphMap imp = rose_map({"x", "y", "c"}, {"c", "c", "c"});
  FoldStep s1 = classify_fold(imp, {0, false}, {1, false});
  CHECK(s1.cls == FoldClass::full_improper);
  CHECK(to_string(s1.cls) == "full-improper");

  GraphMap prop = rose_map({"x", "y", "c", "d"}, {"c", "c d", "c", "d"});
  FoldStep s2 = classify_fold(prop, {0, false}, {1, false});
  CHECK(s2.cls == FoldClass::full_proper);
  CHECK(s2.over == 1);
  CHECK(s2.under == 0);
  CHECK(s2.segment == 1);

  GraphMap part = rose_map({"x", "y", "c", "d", "e"}, {"c d", "c e", "c", "d", "e"});
  FoldStep s3 = classify_fold(part, {0, false}, {1, false});
  CHECK(s3.cls == FoldClass::partial);
  CHECK(s3.after.g.ne() == 6);

  CHECK_THROWS_AS(classify_fold(golden(), {0, false}, {1, false}), FoldError);
}

TEST_CASE("fold quotients are consistent") {
  std::mt19937_64 rng(23);
  for (int i = 0; i < 10; ++i) {
    GraphMap f = random_positive_auto(3, rng, 6);
    for (const FoldStep& st : stallings_factorize(f).steps) {
      // each old edge image equals the image of its quotient path
      for (int e = 0; e < st.before.g.ne(); ++e) {
        std::vector<Dir> w;
        for (Dir d : st.quotient[e].e) {
          Path im = st.after.img[d.edge];
          if (d.rev) im = reverse(f.H(), im);
          w.insert(w.end(), im.e.begin(), im.e.end());
        }
        CHECK(tighten(f.H(), w) == st.before.img[e]);
      }
    }
  }
}

TEST_CASE("homotopy equivalence detection") {
  CHECK(is_homotopy_equivalence(golden()));
  CHECK(is_homotopy_equivalence(reducible()));
  CHECK_FALSE(is_homotopy_equivalence(rose_map({"a", "b"}, {"a b a^-1 b^-1", "b"})));
  CHECK_FALSE(is_homotopy_equivalence(rose_map({"a", "b", "c"}, {"a", "b", "a"})));
}

TEST_CASE("generalized fold identifies an initial segment with sigma") {
  // E = e maps to a b; sigma = the loop a; folding cuts e after a
  GraphMap f = rose_map({"a", "b", "e"}, {"a", "b", "a b"});
  MapState s = state_of(f);
  GeneralizedFold gf = generalized_fold(s, f.H(), {2, false}, P(f, "a"));
  REQUIRE(gf.remnant >= 0);
  CHECK(S(f, gf.after.img[gf.remnant]) == "b");
  std::vector<Dir> w;
  for (Dir d : gf.quotient[2].e) {
    Path im = gf.after.img[d.edge];
    if (d.rev) im = reverse(f.H(), im);
    w.insert(w.end(), im.e.begin(), im.e.end());
  }
  CHECK(S(f, tighten(f.H(), w)) == "a b");
}
