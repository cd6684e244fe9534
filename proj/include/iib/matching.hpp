// Copyright 2026 The IIB Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef IIB_MATCHING_HPP_
#define IIB_MATCHING_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "iib/descriptor.hpp"

namespace iib {

struct MatchPair {
  std::uint32_t query = 0;
  std::uint32_t train = 0;
  std::uint32_t distance = 0;

  bool operator==(const MatchPair&) const = default;
};

struct MatchStats {
  std::uint64_t bit_comparisons_hierarchical = 0;
  std::uint64_t bit_comparisons_bruteforce = 0;

  // N_hierarchical / N_brute-force; 0 when nothing was compared.
  double match_cost() const {
    return bit_comparisons_bruteforce == 0
               ? 0.0
               : static_cast<double>(bit_comparisons_hierarchical) /
                     static_cast<double>(bit_comparisons_bruteforce);
  }
};

struct MatchResult {
  std::vector<MatchPair> pairs;  // ascending query index
  MatchStats stats;
};

// Popcount of XOR over bits [begin, end).
std::size_t HammingBits(std::span<const std::uint64_t> a,
                        std::span<const std::uint64_t> b, std::size_t begin,
                        std::size_t end);

// Throws kFingerprintMismatch naming both fingerprints.
void CheckCompatible(const BinaryDescriptor& a, const BinaryDescriptor& b);

std::size_t Hamming(const BinaryDescriptor& a, const BinaryDescriptor& b);

// Distance over granularity segments first..last (1-based, inclusive).
std::size_t Hamming(const BinaryDescriptor& a, const BinaryDescriptor& b,
                    int first_segment, int last_segment);

// Mutual nearest neighbours under Hamming distance, ties to the lowest
// index. With `max_distance`, pairs farther apart are discarded before the
// mutual check. Both stats counters are set to |Q| * |T| * M.
MatchResult BruteForceMutual(std::span<const BinaryDescriptor> query,
                             std::span<const BinaryDescriptor> train,
                             std::optional<std::size_t> max_distance = {},
                             int workers = 1);

// Coarse-to-fine cascade: a candidate survives segment g < G iff its
// segment-g distance is < ceil(threshold * bits(g)). Survivors are ranked
// by full distance and checked for mutual consistency over survivors only.
// Throws kInvalidArgument unless 0 < threshold <= 1.
MatchResult HierarchicalMatch(std::span<const BinaryDescriptor> query,
                              std::span<const BinaryDescriptor> train,
                              double threshold, int workers = 1);

// ceil(threshold * bits), robust to products that are integral in exact
// arithmetic but land just above an integer in floating point.
std::size_t PruneLimit(double threshold, std::size_t bits);

}  // namespace iib

#endif  // IIB_MATCHING_HPP_
