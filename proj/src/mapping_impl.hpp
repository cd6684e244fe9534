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

// Mapping functions parameterised on an operation-count policy so that the
// instrumented and the plain paths share one implementation.

#ifndef IIB_SRC_MAPPING_IMPL_HPP_
#define IIB_SRC_MAPPING_IMPL_HPP_

#include <algorithm>
#include <cmath>

#include "iib/descriptor.hpp"

namespace iib::internal {

struct NoCount {
  void Alg(int) {}
  void Rel(int) {}
};

struct Count {
  OpCounter* counter;
  void Alg(int n) { counter->algebraic += n; }
  void Rel(int n) { counter->relational += n; }
};

template <class C>
double QuadMean(const PatchQuad& x, C& c) {
  c.Alg(4);
  return ((x[0] + x[1]) + (x[2] + x[3])) * 0.25;
}

// x_i > mean(x), strict, with a relative tie band.
template <class C>
QuadCodes MeanCodes(const PatchQuad& x, double mean, C& c) {
  const double tol = kTieTolerance * std::abs(mean);
  c.Alg(2);
  QuadCodes out{};
  for (int i = 0; i < 4; ++i) {
    out[i] = (x[i] - mean) > tol ? 1 : 0;
    c.Alg(1);
    c.Rel(1);
  }
  return out;
}

template <class C>
double MagnitudeScale(const PatchQuad& x, C& c) {
  c.Alg(4);
  c.Rel(3);
  return std::max(std::max(std::abs(x[0]), std::abs(x[1])),
                  std::max(std::abs(x[2]), std::abs(x[3])));
}

template <class C>
QuadCodes ExtremeCodes(const PatchQuad& x, bool want_max, C& c) {
  double e = x[0];
  for (int i = 1; i < 4; ++i) {
    e = want_max ? std::max(e, x[i]) : std::min(e, x[i]);
  }
  c.Rel(3);
  const double tol = kTieTolerance * MagnitudeScale(x, c);
  c.Alg(1);
  QuadCodes out{};
  for (int i = 0; i < 4; ++i) {
    out[i] = std::abs(x[i] - e) <= tol ? 1 : 0;
    c.Alg(2);
    c.Rel(1);
  }
  return out;
}

// Bands of (x_i - min) against 0.25R, 0.5R, 0.75R with R = max - min.
template <class C>
QuadCodes QuartileCodes(const PatchQuad& x, C& c) {
  double lo = x[0], hi = x[0];
  for (int i = 1; i < 4; ++i) {
    lo = std::min(lo, x[i]);
    hi = std::max(hi, x[i]);
  }
  c.Rel(6);
  const double range = hi - lo;
  const double tol = kTieTolerance * MagnitudeScale(x, c);
  c.Alg(2);
  QuadCodes out{};
  c.Rel(1);
  if (range <= tol) return out;
  for (int i = 0; i < 4; ++i) {
    const double v = x[i] - lo;
    c.Alg(1);
    std::uint8_t code = 0;
    if (v - 0.75 * range > tol) {
      code = 3;
    } else if (v - 0.5 * range > tol) {
      code = 2;
    } else if (v - 0.25 * range > tol) {
      code = 1;
    }
    c.Alg(6);
    c.Rel(3);
    out[i] = code;
  }
  return out;
}

// Ascending rank; values within the tie band of a cluster's smallest member
// share the cluster and are ranked by patch index.
template <class C>
QuadCodes SortCodes(const PatchQuad& x, C& c) {
  const double tol = kTieTolerance * MagnitudeScale(x, c);
  c.Alg(1);
  std::array<int, 4> order{0, 1, 2, 3};
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return x[a] < x[b]; });
  c.Rel(5);
  QuadCodes out{};
  int start = 0;
  while (start < 4) {
    int end = start + 1;
    while (end < 4 && x[order[end]] - x[order[start]] <= tol) ++end;
    c.Alg(end - start);
    c.Rel(end - start);
    std::sort(order.begin() + start, order.begin() + end);
    start = end;
  }
  for (int rank = 0; rank < 4; ++rank) {
    out[order[rank]] = static_cast<std::uint8_t>(rank);
  }
  return out;
}

template <class C>
QuadCodes Map(Mapping mapping, const PatchQuad& x, C& c) {
  switch (mapping) {
    case Mapping::kMean:
      return MeanCodes(x, QuadMean(x, c), c);
    case Mapping::kMax:
      return ExtremeCodes(x, true, c);
    case Mapping::kMin:
      return ExtremeCodes(x, false, c);
    case Mapping::kQuartile:
      return QuartileCodes(x, c);
    case Mapping::kSort:
      return SortCodes(x, c);
  }
  return {};
}

}  // namespace iib::internal

#endif  // IIB_SRC_MAPPING_IMPL_HPP_
