#include <cstdint>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "outfn/io.hpp"
#include "outfn/pingpong.hpp"

using namespace outfn;
using json = nlohmann::json;

namespace {

struct Output {
  json result = json::object();
  json witnesses = json::array();
  json caps = json::object();
  std::string text;
  int code = 0;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw StructuralError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// FNV-1a over the concatenated inputs.
std::string digest(const std::vector<std::string>& texts) {
  std::uint64_t h = 1469598103934665603ull;
  for (const auto& t : texts)
    for (unsigned char c : t) {
      h ^= c;
      h *= 1099511628211ull;
    }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

GraphMap load_map(const std::string& text) {
  MapFile mf = parse_map_text(text);
  if (!mf.map) throw StructuralError("the file declares no map");
  return *mf.map;
}

Filtration load_filtration(const std::string& text, const GraphMap& f) {
  MapFile mf = parse_map_text(text);
  return mf.strata.empty() ? compute_filtration(f) : declared_filtration(f, mf.strata);
}

json check_json(const Check& c) {
  return {{"verdict", to_string(c.verdict)}, {"witnesses", c.witnesses}, {"notes", c.notes}};
}

json path_json(const Graph& g, const Path& p) { return to_string(g, p); }

std::vector<std::string> names(const Graph& g, const std::vector<int>& edges) {
  std::vector<std::string> out;
  for (int e : edges) out.push_back(g.enames[e]);
  return out;
}

json state_json(const MapState& s, const Graph& cod) {
  json edges = json::array();
  for (int e = 0; e < s.g.ne(); ++e)
    edges.push_back({{"edge", s.g.enames[e]},
                     {"from", s.g.vnames[s.g.src[e]]},
                     {"to", s.g.vnames[s.g.dst[e]]},
                     {"image", to_string(cod, s.img[e])}});
  return edges;
}

std::size_t length_cap(const GraphMap& f, std::size_t len) { return len ? len : default_length_cap(f); }

int top_stratum(const GraphMap& f, const Filtration& filt) {
  int r = 0;
  for (const auto& s : classify_strata(f, filt))
    if (s.kind == StratumKind::eg) r = std::max(r, s.height);
  if (r == 0) throw StructuralError("the map has no EG stratum");
  return r;
}

struct Context {
  GraphMap f;
  Filtration filt;
  NielsenCatalog cat;
  SplitContext ctx;
  Context(const std::string& text, std::size_t len, int period)
      : f(load_map(text)),
        filt(load_filtration(text, f)),
        cat(nielsen_catalog(f, filt, length_cap(f, len), period)),
        ctx(f, filt, cat) {}
};

json zsystem_json(const Graph& g, const NonattractingSystem& ns) {
  json comps = json::array();
  for (const auto& c : ns.z_components)
    comps.push_back({{"vertices", c.vertices.size()}, {"edges", c.edges}, {"rank", c.rank},
                     {"contractible", c.contractible}});
  json kcomps = json::array();
  for (const auto& c : ns.components)
    kcomps.push_back({{"vertices", c.vertices.size()}, {"edges", c.edges}, {"rank", c.rank},
                      {"contractible", c.contractible}});
  return {{"stratum", ns.stratum},
          {"Z", names(g, ns.Z)},
          {"rho_hat", path_json(g, ns.rho_hat)},
          {"rho_period", ns.rho_period},
          {"K_vertices", ns.K.nv},
          {"K_edges", ns.K.edges.size()},
          {"K_components", kcomps},
          {"Z_components", comps},
          {"excluded", ns.excluded},
          {"cap_bounded", ns.cap_bounded},
          {"undecided", ns.undecided},
          {"notes", ns.notes},
          {"conclusive", ns.conclusive()}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Outer automorphisms of free groups as graph maps"};
  app.require_subcommand(1);
  bool as_json = false;
  std::uint64_t seed = 1;
  app.add_flag("--json", as_json, "Machine-readable output");
  app.add_option("--seed", seed, "Seed for randomized checks");

  std::string file, file2, word, beta_from = "tiles";
  std::size_t len = 0;
  int period = kDefaultPeriodCap, kmax = 20, ct_kmax = 6, stratum = 0, depth = 4, mmax = 3, power = 6;
  bool allow_periodic = false;
  std::function<Output()> run;
  std::vector<std::string> inputs;
  std::string command;

  auto add = [&](const std::string& name, const std::string& help) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("file", file, "Graph and map file")->required()->check(CLI::ExistingFile);
    sub->add_flag("--json", as_json, "Machine-readable output");
    sub->add_option("--seed", seed, "Seed for randomized checks");
    return sub;
  };

  auto* fold = add("fold", "Stallings factorization");
  fold->callback([&] {
    command = "fold";
    run = [&] {
      Output o;
      GraphMap f = load_map(inputs[0]);
      Factorization fz = stallings_factorize(f);
      json steps = json::array();
      for (const auto& s : fz.steps)
        steps.push_back({{"turn", {s.before.g.dir_name(s.e1), s.before.g.dir_name(s.e2)}},
                         {"segment", s.segment},
                         {"class", to_string(s.cls)},
                         {"before", state_json(s.before, f.H())},
                         {"after", state_json(s.after, f.H())}});
      o.result = {{"steps", steps}, {"isomorphism", fz.isomorphism}, {"bcc", fz.bcc}};
      o.text = std::to_string(fz.steps.size()) + " folds, terminal map " +
               (fz.isomorphism ? "is" : "is not") + " an isomorphism, fold bcc " + std::to_string(fz.bcc);
      return o;
    };
  });

  auto* strata = add("strata", "Filtration and stratum classification");
  strata->callback([&] {
    command = "strata";
    run = [&] {
      Output o;
      GraphMap f = load_map(inputs[0]);
      Filtration filt = load_filtration(inputs[0], f);
      json arr = json::array();
      for (const auto& s : classify_strata(f, filt)) {
        json j = {{"height", s.height},
                  {"edges", names(f.G(), s.edges)},
                  {"kind", to_string(s.kind)},
                  {"matrix", s.matrix},
                  {"irreducible", s.irreducible},
                  {"period", s.period},
                  {"aperiodic", s.aperiodic},
                  {"needs_subdivision", s.needs_subdivision},
                  {"enveloped_by", s.enveloped_by}};
        if (s.pf) j["lambda"] = s.pf->lambda;
        arr.push_back(j);
        o.text += "H" + std::to_string(s.height) + " " + to_string(s.kind);
        for (int e : s.edges) o.text += " " + f.G().enames[e];
        if (s.pf && s.kind == StratumKind::eg) o.text += "  lambda " + std::to_string(s.pf->lambda);
        o.text += "\n";
      }
      o.result = {{"strata", arr}};
      return o;
    };
  });

  auto* ct = add("ct-verify", "Check the relative train track and CT axioms");
  ct->add_option("--kmax", ct_kmax, "Iterates for splitting checks");
  ct->add_option("--len", len, "Nielsen length cap (0: 4 times the edge count)");
  ct->add_option("--period", period, "Nielsen period cap");
  ct->callback([&] {
    command = "ct-verify";
    run = [&] {
      Output o;
      Context c(inputs[0], len, period);
      CtOptions opt;
      opt.length_cap = c.cat.length_cap;
      opt.period_cap = period;
      opt.kmax = ct_kmax;
      CtReport rep = verify_ct(c.f, c.filt, c.cat, opt);
      json axioms = json::object();
      for (const auto& [n, chk] : rep.axioms()) {
        axioms[n] = check_json(*chk);
        for (const auto& w : chk->witnesses) o.witnesses.push_back(n + ": " + w);
        o.text += n + ": " + to_string(chk->verdict) + "\n";
      }
      json rtt = json::array();
      for (const auto& r : rep.rtt) {
        rtt.push_back({{"height", r.height}, {"i", check_json(r.i)}, {"ii", check_json(r.ii)},
                       {"iii", check_json(r.iii)}});
        for (const auto* chk : {&r.i, &r.ii, &r.iii})
          for (const auto& w : chk->witnesses) o.witnesses.push_back("RTT H" + std::to_string(r.height) + ": " + w);
      }
      json dirs = json::array();
      for (Dir d : rep.principal_dirs) dirs.push_back(c.f.G().dir_name(d));
      o.result = {{"is_rtt", rep.is_rtt()}, {"is_ct", rep.is_ct()}, {"conclusive", rep.conclusive()},
                  {"rtt", rtt}, {"axioms", axioms}, {"principal_directions", dirs}};
      o.caps = {{"kmax", ct_kmax}, {"length_cap", c.cat.length_cap}, {"period_cap", period}};
      o.text += std::string("CT: ") + (rep.is_ct() ? "yes" : "no") + (rep.conclusive() ? "" : " (inconclusive)");
      o.code = rep.conclusive() ? 0 : 2;
      return o;
    };
  });

  auto* nielsen = add("nielsen", "Catalog of indivisible periodic Nielsen paths");
  nielsen->add_option("--len", len, "Length cap (0: 4 times the edge count)");
  nielsen->add_option("--period", period, "Period cap");
  nielsen->callback([&] {
    command = "nielsen";
    run = [&] {
      Output o;
      GraphMap f = load_map(inputs[0]);
      Filtration filt = load_filtration(inputs[0], f);
      NielsenCatalog cat = nielsen_catalog(f, filt, length_cap(f, len), period);
      json arr = json::array();
      for (const auto& p : cat.paths) {
        arr.push_back({{"path", path_json(f.G(), p.path)}, {"period", p.period}, {"height", p.height},
                       {"kind", to_string(p.kind)}, {"closed", p.closed}});
        o.text += "H" + std::to_string(p.height) + " " + to_string(p.kind) + " period " + std::to_string(p.period) +
                  ": " + to_string(f.G(), p.path) + "\n";
      }
      bool conclusive = true;
      for (int r = 1; r <= filt.size(); ++r) conclusive = conclusive && cat.conclusive(r);
      o.result = {{"paths", arr}, {"conclusive", conclusive}, {"notes", cat.notes}};
      o.caps = {{"length_cap", cat.length_cap}, {"period_cap", cat.period_cap}};
      o.code = conclusive ? 0 : 2;
      return o;
    };
  });

  auto* zs = add("zsystem", "Nonattracting subgraph, rho and the immersion K");
  zs->add_option("--stratum", stratum, "EG stratum (default: the top one)");
  zs->add_option("--kmax", kmax, "Iterates for attraction of lower strata");
  zs->callback([&] {
    command = "zsystem";
    run = [&] {
      Output o;
      Context c(inputs[0], len, period);
      int r = stratum ? stratum : top_stratum(c.f, c.filt);
      auto ns = build_nonattracting(c.ctx, r, kmax);
      o.result = zsystem_json(c.f.G(), ns);
      o.caps = {{"kmax", kmax}, {"length_cap", c.cat.length_cap}, {"period_cap", period}};
      o.text = "Z = {";
      for (std::size_t i = 0; i < ns.Z.size(); ++i) o.text += (i ? ", " : "") + c.f.G().enames[ns.Z[i]];
      o.text += "}, rho = " + (ns.rho_hat.trivial() ? std::string("trivial") : to_string(c.f.G(), ns.rho_hat));
      o.code = ns.conclusive() ? 0 : 2;
      return o;
    };
  });

  auto* at = add("attract", "Weak attraction of a conjugacy class");
  at->add_option("--class", word, "Circuit as an edge word")->required();
  at->add_option("--kmax", kmax, "Iterates");
  at->add_option("--stratum", stratum, "EG stratum (default: the top one)");
  at->callback([&] {
    command = "attract";
    run = [&] {
      Output o;
      Context c(inputs[0], len, period);
      int r = stratum ? stratum : top_stratum(c.f, c.filt);
      auto ns = build_nonattracting(c.ctx, r, kmax);
      Circuit circ = cyclic_tighten(c.f.G(), parse_word(c.f.G(), word));
      auto res = weak_attraction_test(c.ctx, ns, circ, kmax);
      o.result = {{"class", to_string(c.f.G(), circ)}, {"verdict", to_string(res.verdict)}, {"k", res.k}};
      if (!res.witness.empty()) o.witnesses.push_back(res.witness);
      o.caps = {{"kmax", kmax}, {"length_cap", c.cat.length_cap}};
      o.text = to_string(res.verdict);
      if (res.k >= 0) o.text += " at k = " + std::to_string(res.k);
      o.code = res.verdict == Attraction::inconclusive ? 2 : 0;
      return o;
    };
  });

  auto* cert = add("certify", "Full irreducibility certificate");
  cert->add_option("--power", power, "Largest power tried for the CT checklist");
  cert->add_option("--kmax", kmax, "Iterates for attraction of lower strata");
  cert->callback([&] {
    command = "certify";
    run = [&] {
      Output o;
      Context c(inputs[0], len, period);
      auto ns = build_nonattracting(c.ctx, top_stratum(c.f, c.filt), kmax);
      CertOptions opt;
      opt.max_power = power;
      opt.kmax = kmax;
      auto res = full_irreducibility_certificate(c.f, c.filt, ns, opt);
      o.result = {{"verdict", to_string(res.verdict)}, {"power", res.power}, {"zsystem", zsystem_json(c.f.G(), ns)}};
      for (const auto& r : res.reasons) o.witnesses.push_back(r);
      o.caps = {{"max_power", power}, {"kmax", kmax}, {"length_cap", c.cat.length_cap}};
      o.text = to_string(res.verdict);
      for (const auto& r : res.reasons) o.text += "\n  " + r;
      o.code = res.verdict == CertVerdict::inconclusive ? 2 : 0;
      return o;
    };
  });

  auto* sing = add("singular", "Singular rays and lines");
  sing->add_option("--depth", depth, "Iterates of each ray");
  sing->add_flag("--allow-periodic", allow_periodic, "Skip the periodic-class probe");
  sing->callback([&] {
    command = "singular";
    run = [&] {
      Output o;
      Context c(inputs[0], len, period);
      auto sl = singular_lines(c.f, c.filt, c.cat, depth, !allow_periodic);
      const Graph& g = c.f.G();
      json rays = json::array();
      for (const auto& r : sl.rays)
        rays.push_back({{"edge", g.dir_name(r.edge)}, {"prefix", path_json(g, r.prefix)},
                        {"lengths", r.lengths}, {"nested", r.nested}});
      json lines = json::array();
      for (const auto& l : sl.lines)
        lines.push_back({{"left", l.left}, {"right", l.right}, {"alpha", path_json(g, l.alpha)},
                         {"window", path_json(g, l.window)}});
      o.result = {{"refused", sl.refused}, {"rays", rays}, {"lines", lines}, {"notes", sl.notes}};
      if (sl.refused) o.witnesses.push_back(sl.witness);
      o.caps = {{"depth", depth}, {"length_cap", c.cat.length_cap}, {"period_cap", period}};
      o.text = sl.refused ? "refused: periodic class " + sl.witness
                          : std::to_string(sl.rays.size()) + " rays, " + std::to_string(sl.lines.size()) + " lines";
      return o;
    };
  });

  auto* feg = add("find-eg", "Least k with three copies of beta in f^k_##(beta)");
  feg->add_option("--beta", word, "Path as an edge word")->required();
  feg->add_option("--kmax", kmax, "Largest k");
  feg->callback([&] {
    command = "find-eg";
    run = [&] {
      Output o;
      GraphMap f = load_map(inputs[0]);
      Path beta = tighten(f.G(), parse_word(f.G(), word));
      if (beta.trivial()) throw StructuralError("beta must be nontrivial");
      auto r = finding_eg(f, beta, kmax);
      o.result = {{"beta", to_string(f.G(), beta)},
                  {"hit", r.k.has_value()},
                  {"copies", r.copies},
                  {"exact_through", r.exact_through},
                  {"certified_miss_through", r.certified_miss_through},
                  {"reversed", r.reversed}};
      if (r.k) {
        o.result["k"] = *r.k;
        o.result["positions"] = r.positions;
        o.result["exact"] = r.exact;
        o.witnesses.push_back(to_string(f.G(), r.survivor));
      }
      o.caps = {{"kmax", kmax}};
      o.text = r.k ? "hit at k = " + std::to_string(*r.k)
                   : "no hit; certified through k = " + std::to_string(r.certified_miss_through);
      o.code = r.k || r.certified_miss_through == kmax ? 0 : 2;
      return o;
    };
  });

  auto* pp = app.add_subcommand("pingpong", "Search psi^m phi^n for attracting windows");
  pp->add_option("file-phi", file, "Map file for phi")->required()->check(CLI::ExistingFile);
  pp->add_option("file-psi", file2, "Map file for psi")->required()->check(CLI::ExistingFile);
  pp->add_option("--mmax", mmax, "Largest m and n");
  pp->add_option("--beta-from", beta_from, "tiles or explicit:<word>");
  pp->add_flag("--json", as_json, "Machine-readable output");
  pp->add_option("--seed", seed, "Seed for randomized checks");
  pp->callback([&] {
    command = "pingpong";
    run = [&] {
      Output o;
      GraphMap phi = load_map(inputs[0]), psi = load_map(inputs[1]);
      Filtration fpsi = load_filtration(inputs[1], psi);
      auto s = make_pingpong_setup(phi, psi);
      std::vector<Path> betas;
      if (beta_from == "tiles") {
        betas = tile_betas(psi, fpsi);
      } else if (beta_from.rfind("explicit:", 0) == 0) {
        betas.push_back(tighten(psi.G(), parse_word(psi.G(), beta_from.substr(9))));
      } else {
        throw StructuralError("--beta-from must be tiles or explicit:<word>");
      }
      // Nonattracting systems when both maps carry one.
      std::optional<NonattractingSystem> na_phi, na_psi;
      try {
        Filtration fphi = load_filtration(inputs[0], phi);
        NielsenCatalog cphi = nielsen_catalog(phi, fphi, default_length_cap(phi));
        NielsenCatalog cpsi = nielsen_catalog(psi, fpsi, default_length_cap(psi));
        SplitContext xphi(phi, fphi, cphi), xpsi(psi, fpsi, cpsi);
        na_phi = build_nonattracting(xphi, top_stratum(phi, fphi));
        na_psi = build_nonattracting(xpsi, top_stratum(psi, fpsi));
      } catch (const StructuralError&) {
      }
      NaPair na;
      if (na_phi && na_psi) na = {&*na_phi, &*na_psi};
      auto rep = pingpong_search(s, mmax, betas, seed, na);
      json hits = json::array();
      for (const auto& h : rep.hits) {
        hits.push_back({{"m", h.m}, {"n", h.n}, {"beta", to_string(psi.G(), h.beta)}, {"positions", h.positions},
                        {"reversed", h.reversed}, {"neighborhood_ok", h.neighborhood_ok}, {"outer_ok", h.outer_ok},
                        {"na_checked", h.na_checked}, {"na_consistent", h.na_consistent}});
        o.text += "(" + std::to_string(h.m) + "," + std::to_string(h.n) + ") " + to_string(psi.G(), h.beta) + "\n";
      }
      o.result = {{"hits", hits}, {"misses", rep.misses}, {"betas", betas.size()}, {"notes", rep.notes}};
      o.caps = {{"mmax", mmax}, {"kmax", 1}};
      o.text += std::to_string(rep.hits.size()) + " hits, " + std::to_string(rep.misses.size()) + " misses";
      return o;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    inputs.push_back(read_file(file));
    if (command == "pingpong") inputs.push_back(read_file(file2));
    Output o = run();
    if (as_json) {
      json out = {{"command", command}, {"input_digest", digest(inputs)}, {"result", o.result},
                  {"witnesses", o.witnesses}, {"caps", o.caps}};
      std::cout << out.dump(2) << "\n";
    } else {
      std::cout << o.text << "\n";
    }
    return o.code;
  } catch (const std::exception& e) {
    if (as_json) {
      json out = {{"command", command}, {"input_digest", digest(inputs)}, {"error", e.what()}};
      std::cout << out.dump(2) << "\n";
    } else {
      std::cerr << "error: " << e.what() << "\n";
    }
    return 1;
  }
}
