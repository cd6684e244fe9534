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

#include "iib/matching.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <thread>

#include "iib/error.hpp"

namespace iib {
namespace {

constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();

template <class Fn>
void ParallelFor(std::size_t n, int workers, Fn&& fn) {
  const std::size_t w = std::min<std::size_t>(
      static_cast<std::size_t>(ResolveWorkers(workers)), std::max<std::size_t>(n, 1));
  if (w <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i, 0);
    return;
  }
  std::vector<std::jthread> threads;
  for (std::size_t t = 0; t < w; ++t) {
    threads.emplace_back([&, t] {
      for (std::size_t i = t; i < n; i += w) fn(i, t);
    });
  }
}

void CheckSets(std::span<const BinaryDescriptor> query,
               std::span<const BinaryDescriptor> train) {
  const BinaryDescriptor& ref = query.front();
  for (const BinaryDescriptor& d : query) CheckCompatible(ref, d);
  for (const BinaryDescriptor& d : train) CheckCompatible(ref, d);
}

// Pairs (i, best_train[i]) that are also best_query[best_train[i]].
std::vector<MatchPair> MutualPairs(const std::vector<std::uint32_t>& best_train,
                                   const std::vector<std::uint32_t>& best_dist,
                                   const std::vector<std::uint32_t>& best_query) {
  std::vector<MatchPair> pairs;
  for (std::size_t i = 0; i < best_train.size(); ++i) {
    const std::uint32_t j = best_train[i];
    if (j != kNone && best_query[j] == i) {
      pairs.push_back({static_cast<std::uint32_t>(i), j, best_dist[i]});
    }
  }
  return pairs;
}

}  // namespace

std::size_t HammingBits(std::span<const std::uint64_t> a,
                        std::span<const std::uint64_t> b, std::size_t begin,
                        std::size_t end) {
  if (begin >= end) return 0;
  std::size_t first = begin >> 6;
  const std::size_t last = (end - 1) >> 6;
  const std::uint64_t head = ~std::uint64_t{0} << (begin & 63);
  const std::uint64_t tail =
      (end & 63) == 0 ? ~std::uint64_t{0} : (std::uint64_t{1} << (end & 63)) - 1;
  if (first == last) {
    return static_cast<std::size_t>(
        std::popcount((a[first] ^ b[first]) & head & tail));
  }
  std::size_t d = static_cast<std::size_t>(std::popcount((a[first] ^ b[first]) & head));
  for (++first; first < last; ++first) {
    d += static_cast<std::size_t>(std::popcount(a[first] ^ b[first]));
  }
  d += static_cast<std::size_t>(std::popcount((a[last] ^ b[last]) & tail));
  return d;
}

void CheckCompatible(const BinaryDescriptor& a, const BinaryDescriptor& b) {
  if (a.empty() || b.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "empty descriptor");
  }
  if (a.format_ptr() != b.format_ptr() &&
      (a.fingerprint() != b.fingerprint() || a.size() != b.size())) {
    throw Error(ErrorCode::kFingerprintMismatch,
                "descriptor fingerprints differ: [" + a.fingerprint().ToString() +
                    "] vs [" + b.fingerprint().ToString() + "]");
  }
}

std::size_t Hamming(const BinaryDescriptor& a, const BinaryDescriptor& b) {
  CheckCompatible(a, b);
  std::size_t d = 0;
  const auto wa = a.words();
  const auto wb = b.words();
  for (std::size_t i = 0; i < wa.size(); ++i) {
    d += static_cast<std::size_t>(std::popcount(wa[i] ^ wb[i]));
  }
  return d;
}

std::size_t Hamming(const BinaryDescriptor& a, const BinaryDescriptor& b,
                    int first_segment, int last_segment) {
  CheckCompatible(a, b);
  const auto& bounds = a.format().segment_bounds;
  const int segments = static_cast<int>(a.format().segment_count());
  if (first_segment < 1 || last_segment > segments ||
      first_segment > last_segment) {
    throw Error(ErrorCode::kInvalidArgument,
                "segment range [" + std::to_string(first_segment) + ", " +
                    std::to_string(last_segment) + "] outside 1.." +
                    std::to_string(segments));
  }
  return HammingBits(a.words(), b.words(), bounds[first_segment - 1],
                     bounds[last_segment]);
}

std::size_t PruneLimit(double threshold, std::size_t bits) {
  return static_cast<std::size_t>(
      std::ceil(threshold * static_cast<double>(bits) - 1e-9));
}

MatchResult BruteForceMutual(std::span<const BinaryDescriptor> query,
                             std::span<const BinaryDescriptor> train,
                             std::optional<std::size_t> max_distance,
                             int workers) {
  MatchResult result;
  if (query.empty() || train.empty()) return result;
  CheckSets(query, train);
  const std::size_t m = query.front().size();
  const std::size_t nq = query.size();
  const std::size_t nt = train.size();
  const std::uint32_t cap = max_distance
                                ? static_cast<std::uint32_t>(std::min<std::size_t>(
                                      *max_distance, m))
                                : static_cast<std::uint32_t>(m);

  std::vector<std::uint32_t> dist(nq * nt);
  ParallelFor(nq, workers, [&](std::size_t i, std::size_t) {
    const auto qa = query[i].words();
    for (std::size_t j = 0; j < nt; ++j) {
      const auto tb = train[j].words();
      std::uint32_t d = 0;
      for (std::size_t w = 0; w < qa.size(); ++w) {
        d += static_cast<std::uint32_t>(std::popcount(qa[w] ^ tb[w]));
      }
      dist[i * nt + j] = d;
    }
  });

  std::vector<std::uint32_t> best_train(nq, kNone), best_dist(nq, kNone);
  std::vector<std::uint32_t> best_query(nt, kNone), best_query_dist(nt, kNone);
  for (std::size_t i = 0; i < nq; ++i) {
    for (std::size_t j = 0; j < nt; ++j) {
      const std::uint32_t d = dist[i * nt + j];
      if (d > cap) continue;
      if (d < best_dist[i]) {
        best_dist[i] = d;
        best_train[i] = static_cast<std::uint32_t>(j);
      }
      if (d < best_query_dist[j]) {
        best_query_dist[j] = d;
        best_query[j] = static_cast<std::uint32_t>(i);
      }
    }
  }
  result.pairs = MutualPairs(best_train, best_dist, best_query);
  const std::uint64_t total = static_cast<std::uint64_t>(nq) * nt * m;
  result.stats.bit_comparisons_bruteforce = total;
  result.stats.bit_comparisons_hierarchical = total;
  return result;
}

MatchResult HierarchicalMatch(std::span<const BinaryDescriptor> query,
                              std::span<const BinaryDescriptor> train,
                              double threshold, int workers) {
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "hierarchical threshold must be in (0, 1], got " +
                    std::to_string(threshold));
  }
  MatchResult result;
  if (query.empty() || train.empty()) return result;
  CheckSets(query, train);
  const DescriptorFormat& format = query.front().format();
  const std::size_t segments = format.segment_count();
  const std::size_t nq = query.size();
  const std::size_t nt = train.size();

  struct Survivor {
    std::uint32_t train;
    std::uint32_t distance;
  };
  std::vector<std::vector<Survivor>> survivors(nq);
  const std::size_t n_workers = static_cast<std::size_t>(ResolveWorkers(workers));
  std::vector<std::uint64_t> compared(n_workers, 0);

  ParallelFor(nq, workers, [&](std::size_t i, std::size_t w) {
    const auto qa = query[i].words();
    std::vector<Survivor> cand(nt);
    for (std::size_t j = 0; j < nt; ++j) {
      cand[j] = {static_cast<std::uint32_t>(j), 0};
    }
    std::uint64_t bits_compared = 0;
    for (std::size_t s = 0; s < segments; ++s) {
      const std::size_t begin = format.segment_bounds[s];
      const std::size_t end = format.segment_bounds[s + 1];
      const std::size_t width = end - begin;
      if (width == 0) continue;  // masked descriptors may drop a level
      const bool prune = s + 1 < segments;
      const std::size_t limit = PruneLimit(threshold, width);
      std::size_t kept = 0;
      for (const Survivor& c : cand) {
        const std::size_t d =
            HammingBits(qa, train[c.train].words(), begin, end);
        bits_compared += width;
        if (!prune || d < limit) {
          cand[kept++] = {c.train, c.distance + static_cast<std::uint32_t>(d)};
        }
      }
      cand.resize(kept);
      if (cand.empty()) break;
    }
    compared[w] += bits_compared;
    survivors[i] = std::move(cand);
  });

  std::vector<std::uint32_t> best_train(nq, kNone), best_dist(nq, kNone);
  std::vector<std::uint32_t> best_query(nt, kNone), best_query_dist(nt, kNone);
  for (std::size_t i = 0; i < nq; ++i) {
    for (const Survivor& s : survivors[i]) {
      if (s.distance < best_dist[i] ||
          (s.distance == best_dist[i] && s.train < best_train[i])) {
        best_dist[i] = s.distance;
        best_train[i] = s.train;
      }
      if (s.distance < best_query_dist[s.train]) {
        best_query_dist[s.train] = s.distance;
        best_query[s.train] = static_cast<std::uint32_t>(i);
      }
    }
  }
  result.pairs = MutualPairs(best_train, best_dist, best_query);
  for (std::uint64_t c : compared) result.stats.bit_comparisons_hierarchical += c;
  result.stats.bit_comparisons_bruteforce =
      static_cast<std::uint64_t>(nq) * nt * format.bits;
  return result;
}

}  // namespace iib
