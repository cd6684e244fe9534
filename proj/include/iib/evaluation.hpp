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

#ifndef IIB_EVALUATION_HPP_
#define IIB_EVALUATION_HPP_

#include <array>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "iib/descriptor.hpp"
#include "iib/image.hpp"
#include "iib/matching.hpp"

namespace iib {

inline constexpr double kDefaultEpsilon = 3.0;

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

// Row-major 3x3 projective transform.
class Homography {
 public:
  Homography() : m_{1, 0, 0, 0, 1, 0, 0, 0, 1} {}
  // Throws kInvalidArgument when |det| <= 1e-12.
  explicit Homography(const std::array<double, 9>& m);

  static Homography Identity() { return Homography(); }
  static Homography Translation(double tx, double ty);

  const std::array<double, 9>& matrix() const { return m_; }
  double operator()(int r, int c) const { return m_[3 * r + c]; }
  double Determinant() const;
  Homography Inverse() const;
  Homography operator*(const Homography& rhs) const;

  // Throws kInvalidArgument if the point maps to infinity.
  Point2 Project(Point2 p) const;

 private:
  std::array<double, 9> m_;
};

// 9 whitespace-separated reals, row-major.
Homography LoadHomography(const std::string& path);
void SaveHomography(const Homography& h, const std::string& path);

std::vector<Point2> KeypointPositions(std::span<const Keypoint> keypoints);

// Test-side keypoints as exact projections of the reference keypoints.
std::vector<Keypoint> ProjectKeypoints(std::span<const Keypoint> keypoints,
                                       const Homography& h);

// max(|H p - q|, |H^-1 q - p|); infinity if either side maps to infinity.
double SymmetricReprojectionError(const Homography& h,
                                  const Homography& h_inverse, Point2 ref,
                                  Point2 test);

struct Correspondence {
  std::uint32_t ref = 0;
  std::uint32_t test = 0;
  double error = 0.0;

  bool operator==(const Correspondence&) const = default;
};

struct CorrespondenceSet {
  std::vector<Correspondence> pairs;  // ascending reference index
  double epsilon = kDefaultEpsilon;

  std::size_t size() const { return pairs.size(); }
  bool Contains(std::uint32_t ref, std::uint32_t test) const;
};

// One-to-one greedy assignment by ascending symmetric reprojection error
// among pairs with error <= epsilon (ties broken by reference, then test
// index). Throws kInvalidArgument for negative epsilon.
CorrespondenceSet FindCorrespondences(std::span<const Point2> ref,
                                      std::span<const Point2> test,
                                      const Homography& h, double epsilon);

struct PrPoint {
  double threshold = std::numeric_limits<double>::infinity();
  double precision = 0.0;
  double recall = 0.0;
  std::size_t correct = 0;
  std::size_t putative = 0;
  std::size_t correspondences = 0;
  bool no_putative = false;
  bool no_correspondences = false;
};

// A putative match is correct iff it is one of the geometric
// correspondences (which all satisfy the epsilon-reprojection rule).
PrPoint PrecisionRecall(std::span<const MatchPair> matches,
                        const CorrespondenceSet& correspondences);

// One PrPoint per ascending distance threshold; pairs farther than the
// threshold are dropped before the mutual check.
std::vector<PrPoint> PrSweep(std::span<const BinaryDescriptor> query,
                             std::span<const BinaryDescriptor> train,
                             const CorrespondenceSet& correspondences,
                             std::span<const double> thresholds,
                             int workers = 1);

struct SynthSpec {
  double gain = 1.0;
  double bias = 0.0;
  double gamma = 1.0;
  Homography homography;
};

struct SynthPair {
  GrayImage image;
  Homography homography;
};

// out(p) = clip(255 * (gain * I(H^-1 p) / 255 + bias)^gamma), bilinear warp,
// rounded to 8-bit levels. Destination pixels whose source falls outside
// the image are 0.
SynthPair SynthesizePair(const GrayImage& image, const SynthSpec& spec);

// 256-bit point-pair comparison baseline (smoothed-intensity tests between
// Gaussian-distributed point pairs in the ROS), used for relative checks.
class PointPairBaseline {
 public:
  explicit PointPairBaseline(double radius = kDefaultRadius, int bits = 256,
                             std::uint64_t seed = 0x5eedba5e1157ULL);

  // Uses the stack's "gi" channel. Keypoints whose sampling window leaves
  // the image are skipped.
  DescriptorSet Extract(const ChannelStack& stack,
                        std::span<const Keypoint> keypoints) const;

  const std::shared_ptr<const DescriptorFormat>& format() const {
    return format_;
  }

 private:
  struct Test {
    double ax, ay, bx, by;
  };
  double radius_;
  std::vector<Test> tests_;
  std::shared_ptr<const DescriptorFormat> format_;
};

struct PairEvaluation {
  std::string pair_id;
  PrPoint point;
  double match_cost = 1.0;
};

struct EvaluationSummary {
  double mean_precision = 0.0;
  double mean_recall = 0.0;
  double mean_match_cost = 0.0;
  std::size_t pairs = 0;
};

// mAP / mAR: means over image pairs of the per-pair precision and recall
// at the mutual-match operating point.
EvaluationSummary Summarize(std::span<const PairEvaluation> pairs);

}  // namespace iib

#endif  // IIB_EVALUATION_HPP_
