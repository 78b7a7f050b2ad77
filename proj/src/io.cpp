#include "outfn/io.hpp"

#include <fstream>
#include <sstream>

namespace outfn {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(int line, const std::string& msg) {
  throw StructuralError("line " + std::to_string(line) + ": " + msg);
}

}  // namespace

MapFile parse_map_text(const std::string& text) {
  auto g = std::make_shared<MarkedGraph>();
  struct Pending {
    int line;
    std::string lhs, rhs;
  };
  std::vector<Pending> markings, images, vmaps, strata;
  bool in_map = false;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    auto hash = raw.find('#');
    std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string head;
    ls >> head;
    try {
      if (head == "vertex") {
        std::string id;
        if (!(ls >> id)) fail(lineno, "vertex needs an id");
        g->add_vertex(id);
      } else if (head == "edge") {
        std::string id, a, b;
        if (!(ls >> id >> a >> b)) fail(lineno, "edge needs <id> <from> <to>");
        auto va = g->find_vertex(a), vb = g->find_vertex(b);
        if (!va || !vb) fail(lineno, "edge " + id + " uses an undeclared vertex");
        g->add_edge(id, *va, *vb);
      } else if (head == "marking") {
        auto eq = line.find('=');
        if (eq == std::string::npos) fail(lineno, "marking needs '='");
        markings.push_back({lineno, trim(line.substr(7, eq - 7)), trim(line.substr(eq + 1))});
      } else if (head == "map") {
        in_map = true;
      } else if (head == "vmap") {
        auto arrow = line.find("->");
        if (arrow == std::string::npos) fail(lineno, "vmap needs '->'");
        vmaps.push_back({lineno, trim(line.substr(4, arrow - 4)), trim(line.substr(arrow + 2))});
      } else if (head == "stratum") {
        strata.push_back({lineno, "", trim(line.substr(7))});
      } else if (in_map && line.find("->") != std::string::npos) {
        auto arrow = line.find("->");
        images.push_back({lineno, trim(line.substr(0, arrow)), trim(line.substr(arrow + 2))});
      } else {
        fail(lineno, "unrecognised line: " + line);
      }
    } catch (const StructuralError& e) {
      std::string msg = e.what();
      if (msg.rfind("line ", 0) == 0) throw;
      fail(lineno, msg);
    }
  }

  for (const auto& m : markings) {
    try {
      g->gens.push_back(m.lhs);
      g->marking.push_back(tighten(*g, parse_word(*g, m.rhs)));
    } catch (const StructuralError& e) {
      fail(m.line, e.what());
    }
  }
  g->finalize();

  MapFile out;
  out.graph = g;
  if (!images.empty() || in_map) {
    GraphMap f;
    f.dom = f.cod = g;
    f.img.assign(g->ne(), Path{});
    f.vmap.assign(g->nv(), -1);
    std::vector<bool> seen(g->ne(), false);
    for (const auto& im : images) {
      auto e = g->find_edge(im.lhs);
      if (!e) fail(im.line, "unknown edge " + im.lhs);
      if (seen[*e]) fail(im.line, "edge " + im.lhs + " mapped twice");
      seen[*e] = true;
      try {
        auto w = parse_word(*g, im.rhs);
        if (!composable(*g, w)) fail(im.line, "image of " + im.lhs + " is not a path");
        f.img[*e] = tighten(*g, w);
        if (f.img[*e].size() != w.size()) fail(im.line, "image of " + im.lhs + " is not reduced");
      } catch (const StructuralError& err) {
        std::string msg = err.what();
        if (msg.rfind("line ", 0) == 0) throw;
        fail(im.line, msg);
      }
    }
    for (int e = 0; e < g->ne(); ++e)
      if (!seen[e]) throw StructuralError("edge " + g->enames[e] + " has no image");
    for (const auto& vm : vmaps) {
      auto a = g->find_vertex(vm.lhs), b = g->find_vertex(vm.rhs);
      if (!a || !b) fail(vm.line, "vmap uses an unknown vertex");
      f.vmap[*a] = *b;
    }
    for (int e = 0; e < g->ne(); ++e) {
      if (f.img[e].trivial()) throw StructuralError("edge " + g->enames[e] + " has a trivial image");
      int s = path_start(*g, f.img[e]), t = path_end(*g, f.img[e]);
      if (f.vmap[g->src[e]] < 0) f.vmap[g->src[e]] = s;
      if (f.vmap[g->dst[e]] < 0) f.vmap[g->dst[e]] = t;
    }
    f.validate();
    out.map = f;
  }
  for (const auto& s : strata) {
    std::vector<int> es;
    try {
      for (Dir d : parse_word(*g, s.rhs)) es.push_back(d.edge);
    } catch (const StructuralError& e) {
      fail(s.line, e.what());
    }
    out.strata.push_back(es);
  }
  return out;
}

MapFile load_map_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw StructuralError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_map_text(ss.str());
}

std::string write_map_text(const GraphMap& f) {
  const MarkedGraph& g = *f.dom;
  std::ostringstream out;
  for (int v = 0; v < g.nv(); ++v) out << "vertex " << g.vnames[v] << "\n";
  for (int e = 0; e < g.ne(); ++e) out << "edge " << g.enames[e] << " " << g.vnames[g.src[e]] << " " << g.vnames[g.dst[e]] << "\n";
  for (std::size_t i = 0; i < g.marking.size(); ++i) out << "marking " << g.gens[i] << " = " << to_string(g, g.marking[i].e) << "\n";
  out << "map\n";
  for (int e = 0; e < g.ne(); ++e) out << g.enames[e] << " -> " << to_string(*f.cod, f.img[e]) << "\n";
  for (int v = 0; v < g.nv(); ++v) out << "vmap " << g.vnames[v] << " -> " << f.cod->vnames[f.vmap[v]] << "\n";
  return out.str();
}

GraphMap rose_map(const std::vector<std::string>& gens, const std::vector<std::string>& images) {
  std::string text = "vertex v\n";
  for (const auto& x : gens) text += "edge " + x + " v v\n";
  text += "map\n";
  for (std::size_t i = 0; i < gens.size(); ++i) text += gens[i] + " -> " + images[i] + "\n";
  return *parse_map_text(text).map;
}

}  // namespace outfn
