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

#ifndef IIB_DESCRIPTOR_HPP_
#define IIB_DESCRIPTOR_HPP_

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "iib/image.hpp"

namespace iib {

inline constexpr double kDefaultRadius = 32.0;
inline constexpr int kDefaultGranularity = 4;
inline constexpr int kMaxGranularity = 8;

// Relative tolerance under which two patch statistics are considered tied.
// Genuine differences between patch means of 8-bit data are at least
// 1 / area, many orders of magnitude above this.
inline constexpr double kTieTolerance = 1e-9;

enum class Mapping : std::uint8_t {
  kMean = 0,
  kMax = 1,
  kMin = 2,
  kQuartile = 3,
  kSort = 4,
};

const char* MappingName(Mapping mapping);
// Throws kInvalidArgument for unknown names.
Mapping ParseMapping(const std::string& name);
int BitsPerPatch(Mapping mapping);

struct Keypoint {
  double x = 0.0;  // column
  double y = 0.0;  // row
  double radius = kDefaultRadius;
  std::optional<double> angle;  // radians; empty means upright

  bool operator==(const Keypoint&) const = default;
};

// ---------------------------------------------------------------------------
// Quadtree geometry

// Floor-based rounding, translation-equivariant for integer shifts.
inline double RoundHalfUp(double v) { return std::floor(v + 0.5); }

class QuadtreeLayout {
 public:
  QuadtreeLayout(double radius, int granularity);

  double radius() const { return radius_; }
  int granularity() const { return granularity_; }

  static int GridSize(int level) { return 1 << level; }
  static std::size_t PatchCount(int level) {
    return std::size_t{1} << (2 * level);
  }
  static std::size_t QuadrupleCount(int level, bool overlap);

  double PatchSide(int level) const;

  // Row-major patch indices (in the 2^g x 2^g grid) of quadruple `q`,
  // ordered top-left, top-right, bottom-left, bottom-right.
  static std::array<int, 4> QuadruplePatches(int level, std::size_t q,
                                             bool overlap);

  // Pixel boundaries round(center - r + j * side_g), j = 0..2^g.
  std::vector<int> Boundaries(double center, int level) const;

  Rect PatchRect(double cx, double cy, int level, int patch) const;

 private:
  double radius_;
  int granularity_;
};

// Throws kInvalidArgument naming the minimum radius when radius < 2^G.
QuadtreeLayout LayoutPatches(double radius, int granularity);

// ---------------------------------------------------------------------------
// Configuration and fingerprints

struct DescriptorConfig {
  int granularity = kDefaultGranularity;
  Mapping mapping = Mapping::kMean;
  bool overlap = false;
  // Channel short names in descriptor order: gx, gy, go, gi or extra names.
  std::vector<std::string> channels = {"gx", "gy", "go", "gi"};
  bool rotation_enabled = false;
  double radius = kDefaultRadius;  // default ROS radius

  void Validate() const;
};

std::size_t DescriptorSize(Mapping mapping, bool overlap, int channel_count,
                           int granularity);
std::size_t DescriptorSize(const DescriptorConfig& config);

enum class DescriptorFamily : std::uint8_t {
  kIib = 0,
  kPointPair = 1,
};

ChannelKind KindFromName(const std::string& name);

struct Fingerprint {
  DescriptorFamily family = DescriptorFamily::kIib;
  int granularity = kDefaultGranularity;
  Mapping mapping = Mapping::kMean;
  bool overlap = false;
  std::vector<ChannelKind> kinds;
  std::vector<std::string> channel_names;
  double radius = kDefaultRadius;
  std::uint64_t mask_hash = 0;  // 0 for full descriptors

  bool operator==(const Fingerprint&) const = default;
  std::string ToString() const;
};

Fingerprint MakeFingerprint(const DescriptorConfig& config);

// Shared per-set description: fingerprint, bit count and the bit offsets
// delimiting granularity segments (segment g covers [bounds[g-1], bounds[g])).
struct DescriptorFormat {
  Fingerprint fingerprint;
  std::size_t bits = 0;
  std::vector<std::size_t> segment_bounds;

  std::size_t segment_count() const {
    return segment_bounds.empty() ? 0 : segment_bounds.size() - 1;
  }
  std::size_t SegmentBits(std::size_t segment) const {
    return segment_bounds[segment + 1] - segment_bounds[segment];
  }
};

// Format of an unmasked IIB descriptor with this fingerprint.
std::shared_ptr<const DescriptorFormat> MakeFormat(const Fingerprint& fp);
std::shared_ptr<const DescriptorFormat> MakeFormat(
    const DescriptorConfig& config);

// Packed bit vector; bit i lives in word i / 64 at position i % 64.
class BinaryDescriptor {
 public:
  BinaryDescriptor() = default;
  explicit BinaryDescriptor(std::shared_ptr<const DescriptorFormat> format);

  std::size_t size() const { return format_ ? format_->bits : 0; }
  bool empty() const { return size() == 0; }

  bool Get(std::size_t bit) const {
    return (words_[bit >> 6] >> (bit & 63)) & 1u;
  }
  void Set(std::size_t bit, bool value) {
    const std::uint64_t m = std::uint64_t{1} << (bit & 63);
    if (value) {
      words_[bit >> 6] |= m;
    } else {
      words_[bit >> 6] &= ~m;
    }
  }

  std::span<const std::uint64_t> words() const { return words_; }
  std::span<std::uint64_t> words() { return words_; }

  const DescriptorFormat& format() const { return *format_; }
  const std::shared_ptr<const DescriptorFormat>& format_ptr() const {
    return format_;
  }
  const Fingerprint& fingerprint() const { return format_->fingerprint; }

  // ceil(M / 8) bytes, bit 0 is the least significant bit of byte 0.
  std::vector<std::uint8_t> ToBytes() const;
  static BinaryDescriptor FromBytes(
      std::shared_ptr<const DescriptorFormat> format,
      std::span<const std::uint8_t> bytes);

  friend bool operator==(const BinaryDescriptor& a, const BinaryDescriptor& b) {
    return a.size() == b.size() && a.words_ == b.words_ &&
           (a.size() == 0 || a.fingerprint() == b.fingerprint());
  }

 private:
  std::shared_ptr<const DescriptorFormat> format_;
  std::vector<std::uint64_t> words_;
};

// ---------------------------------------------------------------------------
// Mapping functions: four patch statistics in TL, TR, BL, BR order to one
// code per patch (1-bit codes are 0/1, 2-bit codes 0..3).

using PatchQuad = std::array<double, 4>;
using QuadCodes = std::array<std::uint8_t, 4>;

// Counts basic operations of the bit-formulation stage.
struct OpCounter {
  std::uint64_t algebraic = 0;
  std::uint64_t relational = 0;
  // Integral-image work spent on patch statistics (reported separately).
  std::uint64_t patch_algebraic = 0;
  std::uint64_t descriptors = 0;
};

QuadCodes MapMean(const PatchQuad& x);
QuadCodes MapMax(const PatchQuad& x);
QuadCodes MapMin(const PatchQuad& x);
QuadCodes MapQuartile(const PatchQuad& x);
QuadCodes MapSort(const PatchQuad& x);
QuadCodes ApplyMapping(Mapping mapping, const PatchQuad& x);

// Region means of the four patches of quadruple `q` at `level` for the ROS
// centred at (cx, cy). Throws kOutOfBounds if a patch leaves the image.
PatchQuad QuadStats(const ChannelStack& stack, std::size_t channel,
                    const QuadtreeLayout& layout, double cx, double cy,
                    int level, std::size_t q, bool overlap);

// ---------------------------------------------------------------------------
// Extraction

enum class KeypointStatus : std::uint8_t {
  kOk = 0,
  kOutOfBounds = 1,
  kRadiusTooSmall = 2,
};
const char* KeypointStatusName(KeypointStatus status);

struct Extraction {
  KeypointStatus status = KeypointStatus::kOk;
  BinaryDescriptor descriptor;  // empty unless status == kOk

  bool ok() const { return status == KeypointStatus::kOk; }
};

// Binds a configuration to a channel stack. Immutable; Run() may be called
// concurrently from any number of threads.
class Extractor {
 public:
  // Throws kInvalidArgument for invalid configs or channels missing from
  // the stack (rotation additionally requires the "gi" channel).
  Extractor(const ChannelStack& stack, DescriptorConfig config);

  Extraction Run(const Keypoint& kp, OpCounter* counter = nullptr) const;

  const std::shared_ptr<const DescriptorFormat>& format() const {
    return format_;
  }
  const DescriptorConfig& config() const { return config_; }

 private:
  Extraction RunUpright(const ChannelStack& stack,
                        const std::vector<std::size_t>& channels, double cx,
                        double cy, double radius, OpCounter* counter) const;
  Extraction RunRotated(const Keypoint& kp, OpCounter* counter) const;

  const ChannelStack* stack_;
  DescriptorConfig config_;
  std::vector<std::size_t> channel_index_;
  std::shared_ptr<const DescriptorFormat> format_;
};

Extraction Extract(const ChannelStack& stack, const Keypoint& kp,
                   const DescriptorConfig& config,
                   OpCounter* counter = nullptr);

// Descriptors of the accepted keypoints plus the skip report.
struct DescriptorSet {
  std::shared_ptr<const DescriptorFormat> format;
  std::vector<Keypoint> keypoints;
  std::vector<BinaryDescriptor> descriptors;
  std::vector<std::uint32_t> source_index;  // position in the input list
  std::vector<std::pair<std::uint32_t, KeypointStatus>> skipped;

  std::size_t size() const { return descriptors.size(); }
};

// workers <= 0 selects the available hardware parallelism.
DescriptorSet ExtractAll(const ChannelStack& stack,
                         std::span<const Keypoint> keypoints,
                         const DescriptorConfig& config, int workers = 0,
                         OpCounter* counter = nullptr);

// Evenly spaced interior keypoints on a cols x rows grid whose ROS of the
// given radius fit inside a width x height image. Centres are integral.
std::vector<Keypoint> GridKeypoints(int width, int height, int cols, int rows,
                                    double radius = kDefaultRadius);

int ResolveWorkers(int workers);

}  // namespace iib

#endif  // IIB_DESCRIPTOR_HPP_
