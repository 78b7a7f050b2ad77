#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "outfn/laminations.hpp"

namespace outfn {

struct BufferConstant {
  int C = 1;
  int bcc = 0;
  int windows = 0;  // leaf windows verified
  int depth = 0;
};
// Smallest C in bcc+1, 2(bcc+1), 4(bcc+1), 8(bcc+1) passing the window
// harness; throws std::logic_error when none does.
BufferConstant buffer_constant(const GraphMap& f, const Filtration& filt, int r, std::uint64_t seed = 1,
                               int windows = 100, int depth = 5);

// Same-orientation occurrences, greedily disjoint.
std::vector<std::size_t> disjoint_copies(const Path& hay, const Path& needle);

struct FindingEg {
  std::optional<int> k;
  Path survivor;  // f^k_##(beta) at a hit, or a subpath of it when not exact
  bool exact = false;
  std::vector<std::size_t> positions;  // first three copies in the survivor
  std::vector<std::size_t> reversed;   // copies of beta^-1, reported only
  int exact_through = 0;               // f^k_## computed exactly for k <= this
  int certified_miss_through = 0;      // no hit for any k <= this
  std::vector<int> copies;             // per k: copies of beta in the survivor
  std::vector<bool> exact_at;          // per k: survivor computed exactly
};
// Least k <= kmax with three disjoint copies of beta in f^k_##(beta).
// Beyond exact_limit total image edges of f^k the survivor is the lower
// bound f_##(S_{k-1}); misses are certified by exact survivors or by
// f^k_#(beta) itself holding fewer than three copies.
FindingEg finding_eg(const GraphMap& f, const Path& beta, int kmax, std::size_t exact_limit = 120,
                     bool continue_after_hit = false);

struct NeighborhoodCheck {
  bool ok = true;
  int trials = 0;
  std::vector<Path> nested;  // beta_0 subset beta_1 subset ...
  std::string failure;
};
// Builds beta_{j+1} from three copies of beta_j in f^k_##(beta_j) and checks
// f^{jk}_#(sigma) contains beta_j for random sigma containing beta.
NeighborhoodCheck check_attracting_neighborhood(const GraphMap& f, const Path& beta, int k, std::uint64_t seed,
                                                int trials = 50, int levels = 3);

struct PingPongSetup {
  GraphMap g_phi, g_psi;
  GraphMap h_psi;  // G_phi -> G_psi
  GraphMap h_phi;  // G_psi -> G_phi
};
// Marking-change maps through the rose; throws StructuralError when the
// round trip is not the identity on generators.
PingPongSetup make_pingpong_setup(const GraphMap& g_phi, const GraphMap& g_psi);

// g_psi^m h_psi g_phi^n h_phi on G_psi.
GraphMap pingpong_composite(const PingPongSetup& s, int m, int n);

// Subpaths of length lo..hi of a long tile of the top EG stratum.
std::vector<Path> tile_betas(const GraphMap& f, const Filtration& filt, std::size_t lo = 3, std::size_t hi = 5,
                             std::size_t max_count = 24);

struct PingPongHit {
  int m = 0, n = 0;
  Path beta;
  std::vector<std::size_t> positions;
  std::vector<std::size_t> reversed;
  bool neighborhood_ok = false;
  bool outer_ok = false;  // composite class equals psi^m phi^n
  // Sampled circuits carried by neither A_na system that entered N(G, beta).
  int na_checked = 0, na_consistent = 0;
};
struct PingPongReport {
  std::vector<PingPongHit> hits;
  std::vector<std::pair<int, int>> misses;
  std::vector<std::string> notes;
};
struct NaPair {
  const NonattractingSystem* phi = nullptr;  // on G_phi
  const NonattractingSystem* psi = nullptr;  // on G_psi
};
PingPongReport pingpong_search(const PingPongSetup& s, int m_max, const std::vector<Path>& betas,
                               std::uint64_t seed = 1, NaPair na = {}, int neighborhood_trials = 10);

}  // namespace outfn
