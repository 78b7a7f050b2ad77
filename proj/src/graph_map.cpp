#include "outfn/graph_map.hpp"

#include <algorithm>
#include <set>

#include "outfn/folds.hpp"

namespace outfn {

Path GraphMap::image(Dir d) const {
  const Path& p = img[d.edge];
  return d.rev ? reverse(H(), p) : p;
}

Path GraphMap::map_path(const Path& p) const {
  if (p.trivial()) return trivial_at(vmap[p.base]);
  Path out;
  out.base = vmap[path_start(G(), p)];
  for (Dir d : p.e) {
    const Path& im = img[d.edge];
    auto push = [&](Dir x) {
      if (!out.e.empty() && out.e.back() == bar(x))
        out.e.pop_back();
      else
        out.e.push_back(x);
    };
    if (!d.rev)
      for (Dir x : im.e) push(x);
    else
      for (auto it = im.e.rbegin(); it != im.e.rend(); ++it) push(bar(*it));
    if (out.e.size() > kBlowup) throw BlowupError("path image exceeds edge budget");
  }
  if (!out.e.empty()) out.base = H().init(out.e.front());
  return out;
}

Circuit GraphMap::map_circuit(const Circuit& c) const {
  Path p = map_path(as_path(G(), c));
  return cyclic_tighten(H(), p.e);
}

void GraphMap::validate() const {
  if (static_cast<int>(vmap.size()) != G().nv() || static_cast<int>(img.size()) != G().ne())
    throw StructuralError("map tables do not match the domain graph");
  for (int v : vmap)
    if (v < 0 || v >= H().nv()) throw StructuralError("vertex image out of range");
  for (int e = 0; e < G().ne(); ++e) {
    const Path& p = img[e];
    if (p.trivial()) throw StructuralError("edge " + G().enames[e] + " has a trivial image");
    if (!composable(H(), p.e) || !is_reduced(p.e))
      throw StructuralError("image of edge " + G().enames[e] + " is not a reduced path");
    if (path_start(H(), p) != vmap[G().src[e]] || path_end(H(), p) != vmap[G().dst[e]])
      throw StructuralError("image of edge " + G().enames[e] + " does not join the vertex images");
  }
}

std::vector<FWord> GraphMap::outer_class() const {
  std::vector<FWord> out;
  for (const Path& m : dom->marking) out.push_back(cod->to_rose(map_path(m).e));
  return out;
}

GraphMap identity_map(std::shared_ptr<const MarkedGraph> g) {
  GraphMap f;
  f.dom = f.cod = g;
  for (int v = 0; v < g->nv(); ++v) f.vmap.push_back(v);
  for (int e = 0; e < g->ne(); ++e) f.img.push_back(single(*g, {e, false}));
  return f;
}

GraphMap compose(const GraphMap& g, const GraphMap& f) {
  if (f.cod.get() != g.dom.get()) throw StructuralError("composing maps with mismatched graphs");
  GraphMap h;
  h.dom = f.dom;
  h.cod = g.cod;
  for (int v : f.vmap) h.vmap.push_back(g.vmap[v]);
  for (const Path& p : f.img) h.img.push_back(g.map_path(p));
  return h;
}

GraphMap power(const GraphMap& f, int k) {
  GraphMap h = identity_map(f.dom);
  for (int i = 0; i < k; ++i) h = compose(f, h);
  return h;
}

Path iterate(const GraphMap& f, Path p, int k, std::size_t budget) {
  for (int i = 0; i < k; ++i) {
    p = f.map_path(p);
    if (p.e.size() > budget) throw BlowupError("iterate exceeds edge budget");
  }
  return p;
}

bool is_legal_turn(const GraphMap& f, Dir a, Dir b) {
  const std::size_t dirs = 2 * static_cast<std::size_t>(f.G().ne());
  const std::size_t steps = dirs * (dirs - 1) / 2 + 1;
  for (std::size_t i = 0; i <= steps; ++i) {
    if (a == b) return false;
    a = f.df(a);
    b = f.df(b);
  }
  return true;
}

std::vector<std::size_t> illegal_turns(const GraphMap& f, const Path& p) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i + 1 < p.e.size(); ++i)
    if (!is_legal_turn(f, bar(p.e[i]), p.e[i + 1])) out.push_back(i + 1);
  return out;
}

namespace {

// The cut into f_#(beta) equals the cut into f_#(beta') for a prefix beta'
// whose image agrees with f_#(beta) beyond that cut.
std::size_t left_cut(const GraphMap& f, const Path& beta, const Path& image) {
  for (std::size_t n = 8; n < beta.size(); n *= 2) {
    Path pre = subpath(f.G(), beta, 0, n);
    std::size_t c = max_left_cancellation(f, pre);
    Path im = f.map_path(pre);
    std::size_t common = 0;
    while (common < im.size() && common < image.size() && im.e[common] == image.e[common]) ++common;
    if (c < common) return c;
  }
  return max_left_cancellation(f, beta);
}

}  // namespace

DoubleSharp double_sharp(const GraphMap& f, const Path& beta, int bcc_value) {
  DoubleSharp out;
  out.bcc = bcc_value;
  out.image = f.map_path(beta);
  const Path& P = out.image;
  if (beta.trivial()) {
    out.path = P;
    return out;
  }
  const std::size_t n = P.size();
  std::size_t cl = left_cut(f, beta, P);
  std::size_t cr = left_cut(f, reverse(f.G(), beta), reverse(f.H(), P));
  if (cl + cr <= n) {
    out.from = cl;
    out.to = n - cr;
  } else {
    out.from = out.to = std::min(cl, n);
  }
  out.path = subpath(f.H(), P, out.from, out.to);
  return out;
}

DoubleSharp double_sharp(const GraphMap& f, const Path& beta) { return double_sharp(f, beta, bcc(f)); }

}  // namespace outfn
