#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "outfn/graph_map.hpp"

namespace outfn {

struct MapFile {
  std::shared_ptr<const MarkedGraph> graph;
  std::optional<GraphMap> map;
  std::vector<std::vector<int>> strata;  // optional declared filtration, bottom first
};

// Parses the graph/map text format. Throws StructuralError with a line number.
MapFile parse_map_text(const std::string& text);
MapFile load_map_file(const std::string& path);
std::string write_map_text(const GraphMap& f);

// Convenience: a self-map of the rose on the given generators, images in
// the same word syntax ("a b^-1").
GraphMap rose_map(const std::vector<std::string>& gens, const std::vector<std::string>& images);

}  // namespace outfn
