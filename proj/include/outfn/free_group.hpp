#pragma once

#include <optional>
#include <string>
#include <vector>

namespace outfn {

// Letters are ±(i+1) for generator i.
using FWord = std::vector<int>;

FWord freduce(const FWord& w);
FWord finverse(const FWord& w);
FWord fmul(const FWord& a, const FWord& b);
FWord fcyclic(const FWord& w);
bool fconjugate(const FWord& a, const FWord& b);
// Substitutes images for generators and reduces.
FWord fapply(const std::vector<FWord>& images, const FWord& w);

// Inverse of the endomorphism x_i -> images[i] of the rank-n free group,
// or nothing when it is not an automorphism.
std::optional<std::vector<FWord>> finvert(const std::vector<FWord>& images, int n);

std::string fword_string(const FWord& w, const std::vector<std::string>& names);

}  // namespace outfn
