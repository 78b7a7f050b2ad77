#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <set>

#include "outfn/pingpong.hpp"
#include "support.hpp"

using namespace outfn;
using namespace testsupport;

namespace {

struct Result {
  bool pass = true;
  std::vector<std::string> details;
  void need(bool ok, const std::string& what) {
    if (!ok) pass = false;
    details.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
  }
  void note(const std::string& what) { details.push_back("     " + what); }
};

struct Criterion {
  int id;
  std::string name;
  double limit;  // seconds
  std::function<Result()> run;
};

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

std::vector<GraphMap> sample_maps(std::mt19937_64& rng) {
  return {golden(), golden_sq(), reducible(), random_positive_auto(3, rng, 5), random_positive_auto(3, rng, 6)};
}

Result pf_value() {
  Result r;
  PF p = pf({{0, 1}, {1, 1}});
  r.need(std::abs(p.lambda - 1.6180339887) < 1e-9, "lambda = " + fmt(p.lambda));
  r.need(!is_permutation({{0, 1}, {1, 1}}), "[[0,1],[1,1]] is not a permutation matrix, so EG");
  int perms = 0, ok = 0;
  for (int n = 1; n <= 5; ++n) {
    std::vector<int> s(n);
    std::iota(s.begin(), s.end(), 0);
    do {
      IMatrix m(n, std::vector<long long>(n, 0));
      for (int i = 0; i < n; ++i) m[i][s[i]] = 1;
      ++perms;
      bool cycle = is_irreducible(m);
      if (is_permutation(m) && (!cycle || pf(m).lambda == 1.0)) ++ok;
    } while (std::next_permutation(s.begin(), s.end()));
  }
  r.need(ok == perms, std::to_string(ok) + "/" + std::to_string(perms) + " permutation matrices decided NEG");
  return r;
}

Result fold_round_trip() {
  Result r;
  std::mt19937_64 rng(2);
  int ok = 0;
  for (int t = 0; t < 20; ++t) {
    GraphMap f = random_positive_auto(2 + t % 2, rng, 3 + t % 5);
    Factorization fz = stallings_factorize(f);
    if (fz.recompose(f.H()) == f.img) ++ok;
  }
  r.need(ok == 20, std::to_string(ok) + "/20 factorizations recompose exactly");
  return r;
}

Result bcc_soundness() {
  Result r;
  std::mt19937_64 rng(3);
  for (const GraphMap& f : sample_maps(rng)) {
    int B = bcc(f);
    std::size_t worst = 0;
    for (int t = 0; t < 1000; ++t) {
      Path p = random_path(f.G(), rng, 1 + rng() % 10);
      Path q = random_path(f.G(), rng, 1 + rng() % 10, path_end(f.G(), p));
      if (q.e.front() == bar(p.e.back())) continue;
      worst = std::max(worst, cancellation(f.map_path(p), f.map_path(q)));
    }
    r.need(worst <= static_cast<std::size_t>(B),
           "max cancellation " + std::to_string(worst) + " <= bcc " + std::to_string(B));
  }
  return r;
}

Result train_tracks() {
  Result r;
  for (const GraphMap& f : {golden(), golden_sq()}) {
    auto rtt = verify_rtt(f, compute_filtration(f));
    r.need(rtt.size() == 1 && rtt[0].ok(), "RTT-(i)-(iii) pass");
  }
  GraphMap adv = adversarial();
  auto rtt = verify_rtt(adv, compute_filtration(adv));
  bool fails = rtt.size() == 1 && rtt[0].iii.verdict == Verdict::fail && !rtt[0].iii.witnesses.empty();
  r.need(fails, "adversarial map fails RTT-(iii)" + (fails ? ": " + rtt[0].iii.witnesses[0] : std::string()));
  return r;
}

Result nielsen_oracle() {
  Result r;
  for (const GraphMap& f : {golden(), golden_sq(), linear_map()}) {
    auto cat = nielsen_catalog(f, compute_filtration(f), 12, 4);
    std::set<std::vector<Dir>> got;
    for (const auto& p : cat.paths) {
      got.insert(p.path.e);
      got.insert(reverse(f.G(), p.path).e);
    }
    std::set<std::vector<Dir>> fixed, want;
    for (const Path& p : all_paths(f.G(), 12))
      if (nielsen_period(f, p, 4)) fixed.insert(p.e);
    for (const auto& w : fixed) {
      bool split = false;
      for (std::size_t i = 1; i < w.size() && !split; ++i)
        split = fixed.count({w.begin(), w.begin() + i}) && fixed.count({w.begin() + i, w.end()});
      if (!split) want.insert(w);
    }
    r.need(got == want, std::to_string(cat.paths.size()) + " catalog entries match " + std::to_string(want.size()) +
                            " enumerated oriented paths");
  }
  return r;
}

struct Ctx {
  GraphMap f;
  Filtration filt;
  NielsenCatalog cat;
  SplitContext ctx;
  explicit Ctx(GraphMap m)
      : f(std::move(m)),
        filt(compute_filtration(f)),
        cat(nielsen_catalog(f, filt, default_length_cap(f))),
        ctx(f, filt, cat) {}
};

Result weak_attraction() {
  Result r;
  Ctx g(golden());
  auto ns = build_nonattracting(g.ctx, 1);
  std::set<std::vector<Dir>> seen;
  int total = 0, attracted = 0;
  std::vector<std::string> missed;
  for (const Path& p : all_paths(g.f.G(), 6)) {
    if (p.e.size() > 1 && p.e.back() == bar(p.e.front())) continue;
    Circuit c = canonical_rotation(p.e);
    if (!seen.insert(c.e).second) continue;
    ++total;
    auto v = weak_attraction_test(g.ctx, ns, c, 20);
    if (v.verdict == Attraction::attracted)
      ++attracted;
    else
      missed.push_back(to_string(g.f.G(), c) + " " + to_string(v.verdict));
  }
  r.need(attracted == total, "golden: " + std::to_string(attracted) + "/" + std::to_string(total) +
                                 " cyclically reduced circuits of length <= 6 attracted");
  for (const auto& m : missed) r.note(m + ": the commutator class is fixed up to inversion by every automorphism");
  Ctx red(reducible());
  auto nr = build_nonattracting(red.ctx, red.filt.height_of[*red.f.G().find_edge("a")]);
  auto C = [&](const std::string& w) { return cyclic_tighten(red.f.G(), parse_word(red.f.G(), w)); };
  r.need(weak_attraction_test(red.ctx, nr, C("c")).verdict == Attraction::not_attracted, "reducible: [c] not-attracted");
  r.need(weak_attraction_test(red.ctx, nr, C("a b")).verdict == Attraction::attracted, "reducible: [a b] attracted");
  return r;
}

Result certificate() {
  Result r;
  Ctx g(golden());
  auto cg = full_irreducibility_certificate(g.f, g.filt, build_nonattracting(g.ctx, 1));
  r.need(cg.verdict == CertVerdict::certified, "golden: " + to_string(cg.verdict));
  Ctx red(reducible());
  auto nr = build_nonattracting(red.ctx, red.filt.size());
  auto cr = full_irreducibility_certificate(red.f, red.filt, nr);
  r.need(cr.verdict == CertVerdict::not_certified,
         "reducible: " + to_string(cr.verdict) + (cr.reasons.empty() ? "" : " (" + cr.reasons[0] + ")"));
  return r;
}

Result double_sharp_check() {
  Result r;
  GraphMap g = golden();
  auto S = [&](const std::string& w) { return to_string(g.G(), double_sharp(g, P(g, w)).path); };
  // Extension oracle on golden, extensions of up to 6 edges.
  auto oracle = [&](const std::string& w) {
    Path beta = P(g, w), img = g.map_path(beta);
    std::size_t cl = 0, cr = 0;
    for (const Path& x : all_paths(g.G(), 6)) {
      if (x.e.back() != bar(beta.e.front())) cl = std::max(cl, cancellation(g.map_path(x), img));
      if (x.e.front() != bar(beta.e.back())) cr = std::max(cr, cancellation(img, g.map_path(x)));
    }
    return cl + cr >= img.size() ? std::string() : to_string(g.G(), subpath(g.G(), img, cl, img.size() - cr));
  };
  r.need(S("b") == "a", "f##(b) = " + S("b") + ", oracle " + oracle("b"));
  r.need(S("a b") == "a", "f##(a b) = " + S("a b") + " (expected a), oracle " + oracle("a b"));
  if (S("a b") != "a")
    r.note("the extension b^-1 cuts only the final b of f#(a b) = b a b; no reduced left extension cancels");
  std::mt19937_64 rng(8);
  auto maps = sample_maps(rng);
  std::vector<int> B;
  for (const auto& f : maps) B.push_back(bcc(f));
  int ok = 0;
  for (int t = 0; t < 500; ++t) {
    const GraphMap& f = maps[t % maps.size()];
    int b = B[t % maps.size()];
    Path beta = random_path(f.G(), rng, 1 + rng() % 8);
    Path img = f.map_path(beta);
    Path ds = double_sharp(f, beta, b).path;
    bool one = ds.trivial() || find_subpath(img, ds).has_value();
    GraphMap ff = compose(f, f);
    Path outer = double_sharp(f, ds, b).path, whole = double_sharp(ff, beta, 0).path;
    bool two = outer.trivial() || find_subpath(whole, outer).has_value();
    Path sigma = random_path(f.G(), rng, 3 + rng() % 20);
    std::size_t i = rng() % sigma.size(), j = i + 1 + rng() % (sigma.size() - i);
    Path in = double_sharp(f, subpath(f.G(), sigma, i, j), b).path;
    bool three = in.trivial() || find_subpath(f.map_path(sigma), in).has_value();
    if (one && two && three) ++ok;
  }
  r.need(ok == 500, std::to_string(ok) + "/500 random instances satisfy invariants (1)-(3)");
  return r;
}

Result finding() {
  Result r;
  GraphMap g = golden();
  auto a = finding_eg(g, P(g, "a"), 8);
  r.need(a.k.has_value(), "golden, beta = a: " + (a.k ? "hit at k = " + std::to_string(*a.k)
                                                         : std::string("no hit through k = 8")));
  if (!a.k)
    r.note("a lies on the periodic line through a b a^-1 b^-1; f^k_##(a) is trivial for k <= " +
           std::to_string(a.certified_miss_through));
  auto bab = finding_eg(g, P(g, "b a b"), 8);
  if (bab.k) {
    auto nc = check_attracting_neighborhood(g, P(g, "b a b"), *bab.k, 1);
    r.need(nc.ok && nc.trials == 50, "golden, beta = b a b: hit at k = " + std::to_string(*bab.k) +
                                         ", attracting neighborhood holds on " + std::to_string(nc.trials) +
                                         " extensions for j <= 3");
  } else {
    r.need(false, "golden, beta = b a b: no hit");
  }
  auto cross = finding_eg(g, P(g, "a b^-1"), 30);
  r.need(!cross.k && cross.certified_miss_through == 30,
         "golden, beta = a b^-1: certified miss through k = " + std::to_string(cross.certified_miss_through));
  std::mt19937_64 rng(9);
  std::vector<GraphMap> maps{golden(), golden_sq()};
  for (int i = 0; i < 3; ++i) maps.push_back(random_positive_auto(2, rng, 4));
  int hits = 0, mono = 0;
  for (int t = 0; t < 100; ++t) {
    const GraphMap& f = maps[t % maps.size()];
    Path beta = random_path(f.G(), rng, 2 + rng() % 3);
    auto res = finding_eg(f, beta, 7, 60, true);
    if (!res.k) continue;
    ++hits;
    bool ok = true;
    for (std::size_t k = *res.k; k < res.copies.size(); ++k) ok = ok && res.copies[k] >= 3;
    if (ok) ++mono;
  }
  r.need(hits > 0 && mono == hits, "monotone on " + std::to_string(mono) + "/" + std::to_string(hits) +
                                       " hits in 100 random trials");
  return r;
}

Result translation_length() {
  Result r;
  Ctx s(rose_map({"c", "a", "b"}, {"c", "a b", "b a b"}));
  auto ns = build_nonattracting(s.ctx, s.filt.height_of[*s.f.G().find_edge("a")]);
  auto m = top_stratum_model(s.f, s.filt, ns);
  const Graph& g = s.f.G();
  auto C = [&](const std::string& w) { return cyclic_tighten(g, parse_word(g, w)); };
  std::string rho = to_string(g, m.rho);
  for (const std::string& w : {rho, "c " + rho, rho + " " + rho}) {
    auto t = translation_length_limit_search(m, C(w));
    r.need(t.ok && t.value == 0, "[" + w + "] -> " + fmt(t.value));
  }
  for (std::size_t i = 0; i < m.H.size(); ++i) {
    std::string e = g.enames[m.H[i]];
    auto t = translation_length_limit_search(m, C(e));
    r.need(t.ok && std::abs(t.value - m.pf.vec[i]) < 1e-12, "[" + e + "] -> " + fmt(t.value) + " = v_" + e);
  }
  std::mt19937_64 rng(10);
  const std::vector<std::string> parts{"a", "b", "c", "a^-1", "b^-1", "c^-1", rho};
  int stable = 0, tried = 0;
  while (stable < 20 && tried < 200) {
    ++tried;
    std::string w;
    for (int i = 0, n = 2 + static_cast<int>(rng() % 4); i < n; ++i) w += parts[rng() % parts.size()] + " ";
    auto word = parse_word(g, w);
    if (tighten(g, word).trivial()) continue;
    Circuit c = cyclic_tighten(g, word);
    auto a = translation_length_limit_search(m, c, 8);
    if (!a.ok) continue;
    auto b = translation_length_limit(m, c, a.K + 2);
    if (b.ok && k_stable(m, a, b) && std::abs(a.value - b.value) < 1e-9 * std::max(1.0, a.value)) ++stable;
    else r.note("unstable: " + to_string(g, c));
  }
  r.need(stable == 20, std::to_string(stable) + "/20 mixed circuits agree at K and K + 2");
  return r;
}

Result splitting() {
  Result r;
  std::mt19937_64 rng(11);
  std::vector<GraphMap> maps{golden_sq(), power(reducible(), 2), linear_map(), golden(),
                             rose_map({"c", "e", "g"}, {"c", "e c", "g c c"})};
  int emitted = 0, ok = 0;
  for (int t = 0; t < 200; ++t) {
    Ctx s(maps[t % maps.size()]);
    Path p = random_path(s.f.G(), rng, 1 + rng() % 8);
    auto res = iterate_until_split(s.ctx, p, 4);
    if (!res.k) continue;
    ++emitted;
    if (verify_splitting(s.f, res.split.terms, 5)) ++ok;
  }
  r.need(emitted > 0 && ok == emitted,
         std::to_string(ok) + "/" + std::to_string(emitted) + " emitted splittings survive 5 iterations");
  return r;
}

}  // namespace

int main() {
  std::vector<Criterion> all{
      {1, "PF value and EG/NEG dichotomy", 1, pf_value},
      {2, "fold round trip", 10, fold_round_trip},
      {3, "bounded cancellation", 30, bcc_soundness},
      {4, "train track verification", 1, train_tracks},
      {5, "Nielsen search against enumeration", 120, nielsen_oracle},
      {6, "weak attraction", 60, weak_attraction},
      {7, "full irreducibility certificate", 60, certificate},
      {8, "double sharp", 60, double_sharp_check},
      {9, "finding three copies", 120, finding},
      {10, "translation length limit", 30, translation_length},
      {11, "splitting soundness", 60, splitting},
  };
  bool all_pass = true;
  for (const auto& c : all) {
    auto t0 = std::chrono::steady_clock::now();
    Result r;
    try {
      r = c.run();
    } catch (const std::exception& e) {
      r.need(false, std::string("exception: ") + e.what());
    }
    double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (dt > c.limit) r.need(false, "runtime " + fmt(dt) + " s exceeds " + fmt(c.limit) + " s");
    all_pass = all_pass && r.pass;
    std::printf("%s %2d %s (%.3f s)\n", r.pass ? "PASS" : "FAIL", c.id, c.name.c_str(), dt);
    for (const auto& d : r.details) std::printf("        %s\n", d.c_str());
    std::fflush(stdout);
  }
  return all_pass ? 0 : 1;
}
