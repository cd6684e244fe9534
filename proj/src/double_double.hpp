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

// Minimal double-double arithmetic (Dekker / Knuth error-free transforms).
// Must not be compiled with -ffast-math.

#ifndef IIB_SRC_DOUBLE_DOUBLE_HPP_
#define IIB_SRC_DOUBLE_DOUBLE_HPP_

#include <cmath>

namespace iib::internal {

struct DoubleDouble {
  double hi = 0.0;
  double lo = 0.0;
};

inline DoubleDouble TwoSum(double a, double b) {
  const double s = a + b;
  const double bb = s - a;
  const double e = (a - (s - bb)) + (b - bb);
  return {s, e};
}

inline DoubleDouble FastTwoSum(double a, double b) {
  const double s = a + b;
  return {s, b - (s - a)};
}

inline DoubleDouble Add(DoubleDouble a, DoubleDouble b) {
  DoubleDouble s = TwoSum(a.hi, b.hi);
  const DoubleDouble t = TwoSum(a.lo, b.lo);
  s.lo += t.hi;
  s = FastTwoSum(s.hi, s.lo);
  s.lo += t.lo;
  return FastTwoSum(s.hi, s.lo);
}

inline DoubleDouble Negate(DoubleDouble a) { return {-a.hi, -a.lo}; }

inline DoubleDouble Sub(DoubleDouble a, DoubleDouble b) {
  return Add(a, Negate(b));
}

// a / d rounded to the nearest double.
inline double DivideToDouble(DoubleDouble a, double d) {
  const double q = a.hi / d;
  const double r = std::fma(-q, d, a.hi);  // exact remainder of hi
  return q + (r + a.lo) / d;
}

}  // namespace iib::internal

#endif  // IIB_SRC_DOUBLE_DOUBLE_HPP_
