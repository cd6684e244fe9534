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

#ifndef IIB_SELECTION_HPP_
#define IIB_SELECTION_HPP_

#include <compare>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "iib/descriptor.hpp"
#include "iib/evaluation.hpp"

namespace iib {

// (granularity, channel position, quadruple index); ordering follows the
// descriptor bit layout.
struct QuadrupleId {
  int granularity = 1;
  int channel = 0;
  std::uint32_t index = 0;

  auto operator<=>(const QuadrupleId&) const = default;
};

struct QuadrupleSpan {
  QuadrupleId id;
  std::size_t bit_offset = 0;
  std::size_t bit_count = 0;
};

// Every quadruple of an unmasked IIB format, in bit order.
std::vector<QuadrupleSpan> EnumerateQuadruples(const DescriptorFormat& format);

struct TrainingPair {
  BinaryDescriptor a;
  BinaryDescriptor b;
  bool positive = false;
};

struct QuadrupleWeight {
  QuadrupleId id;
  double weight = 0.0;
};

struct ImagePairSample {
  GrayImage reference;
  GrayImage test;
  Homography homography;
};

struct TrainingSetOptions {
  int grid_cols = 20;
  int grid_rows = 20;
  std::size_t min_positives = 16;
  double epsilon = kDefaultEpsilon;  // negatives lie farther than this
  std::uint64_t seed = 1;
  int workers = 1;
};

// Positives: descriptors at grid keypoints of the reference image and at
// their projections in the test image. Negatives: the same reference
// descriptor against a uniformly drawn non-corresponding test keypoint.
// Exactly one negative per positive. Throws kInsufficientData when fewer
// than min_positives positives survive extraction.
std::vector<TrainingPair> BuildTrainingSet(
    std::span<const ImagePairSample> pairs, const DescriptorConfig& config,
    const TrainingSetOptions& options);

struct AdaBoostRound {
  QuadrupleId chosen;
  int threshold = 0;        // predict positive iff distance <= threshold
  double weighted_error = 0.0;
  double alpha = 0.0;
  double loss_bound = 1.0;  // running product of normalisers Z_t
  double training_error = 0.0;  // strong classifier, uniform weights
};

struct AdaBoostResult {
  std::vector<QuadrupleWeight> weights;  // one per quadruple, bit order
  std::vector<AdaBoostRound> rounds;
  std::string stop_reason;
};

// Discrete AdaBoost over per-quadruple distance stumps. A quadruple's weight
// is the sum of alpha over the rounds that chose it. Training stops early
// when no stump beats chance or a stump is perfect.
AdaBoostResult AdaBoostTrain(std::span<const TrainingPair> pairs, int rounds);

class SelectionMask {
 public:
  SelectionMask() = default;
  // Ids must be distinct quadruples of `source`; they are stored in bit order.
  SelectionMask(const Fingerprint& source, std::vector<QuadrupleId> ids);

  const Fingerprint& source() const { return source_; }
  const std::vector<QuadrupleId>& ids() const { return ids_; }
  std::size_t bits() const { return reduced_->bits; }
  const std::shared_ptr<const DescriptorFormat>& reduced_format() const {
    return reduced_;
  }
  // Source bit ranges gathered, in order, into the reduced descriptor.
  const std::vector<std::pair<std::size_t, std::size_t>>& spans() const {
    return spans_;
  }

 private:
  Fingerprint source_;
  std::vector<QuadrupleId> ids_;
  std::vector<std::pair<std::size_t, std::size_t>> spans_;
  std::shared_ptr<const DescriptorFormat> reduced_;
};

std::uint64_t MaskHash(std::span<const QuadrupleId> ids);

// The target_bits / bits-per-quadruple highest-weight quadruples, ties by
// id. Throws kInvalidArgument when the target is not a multiple of the
// quadruple width or exceeds the full descriptor size.
SelectionMask SelectTopM(std::span<const QuadrupleWeight> weights,
                         std::size_t target_bits, const Fingerprint& source);

// Throws kFingerprintMismatch if `d` was not produced with the mask source.
BinaryDescriptor ApplyMask(const BinaryDescriptor& d, const SelectionMask& mask);

// JSON text: {"format": "iib-mask", "version", "fingerprint", "bits",
// "quadruples": [[g, channel, index], ...]}.
void SaveMask(const SelectionMask& mask, const std::string& path);
SelectionMask LoadMask(const std::string& path);

}  // namespace iib

#endif  // IIB_SELECTION_HPP_
