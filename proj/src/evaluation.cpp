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

#include "iib/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

#include "iib/error.hpp"

namespace iib {

// ---------------------------------------------------------------------------
// Homography

Homography::Homography(const std::array<double, 9>& m) : m_(m) {
  const double det = Determinant();
  if (!std::isfinite(det) || std::abs(det) <= 1e-12) {
    std::ostringstream msg;
    msg << "homography is singular (det = " << det << ")";
    throw Error(ErrorCode::kInvalidArgument, msg.str());
  }
}

Homography Homography::Translation(double tx, double ty) {
  return Homography({1, 0, tx, 0, 1, ty, 0, 0, 1});
}

double Homography::Determinant() const {
  const auto& m = m_;
  return m[0] * (m[4] * m[8] - m[5] * m[7]) -
         m[1] * (m[3] * m[8] - m[5] * m[6]) +
         m[2] * (m[3] * m[7] - m[4] * m[6]);
}

Homography Homography::Inverse() const {
  const auto& m = m_;
  const double det = Determinant();
  std::array<double, 9> inv{
      (m[4] * m[8] - m[5] * m[7]), -(m[1] * m[8] - m[2] * m[7]),
      (m[1] * m[5] - m[2] * m[4]), -(m[3] * m[8] - m[5] * m[6]),
      (m[0] * m[8] - m[2] * m[6]), -(m[0] * m[5] - m[2] * m[3]),
      (m[3] * m[7] - m[4] * m[6]), -(m[0] * m[7] - m[1] * m[6]),
      (m[0] * m[4] - m[1] * m[3])};
  for (double& v : inv) v /= det;
  return Homography(inv);
}

Homography Homography::operator*(const Homography& rhs) const {
  std::array<double, 9> out{};
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k) s += (*this)(r, k) * rhs(k, c);
      out[3 * r + c] = s;
    }
  }
  return Homography(out);
}

Point2 Homography::Project(Point2 p) const {
  const auto& m = m_;
  const double w = m[6] * p.x + m[7] * p.y + m[8];
  if (w == 0.0 || !std::isfinite(w)) {
    std::ostringstream msg;
    msg << "point (" << p.x << ", " << p.y << ") projects to infinity";
    throw Error(ErrorCode::kInvalidArgument, msg.str());
  }
  return {(m[0] * p.x + m[1] * p.y + m[2]) / w,
          (m[3] * p.x + m[4] * p.y + m[5]) / w};
}

Homography LoadHomography(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open homography '" + path + "'");
  std::array<double, 9> m{};
  for (double& v : m) {
    if (!(in >> v)) {
      throw Error(ErrorCode::kFormat,
                  path + ": expected 9 whitespace-separated reals");
    }
  }
  std::string extra;
  if (in >> extra) {
    throw Error(ErrorCode::kFormat, path + ": trailing data after 9 reals");
  }
  return Homography(m);
}

void SaveHomography(const Homography& h, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write homography '" + path + "'");
  out << std::setprecision(17);
  for (int r = 0; r < 3; ++r) {
    out << h(r, 0) << " " << h(r, 1) << " " << h(r, 2) << "\n";
  }
}

std::vector<Point2> KeypointPositions(std::span<const Keypoint> keypoints) {
  std::vector<Point2> out;
  out.reserve(keypoints.size());
  for (const Keypoint& kp : keypoints) out.push_back({kp.x, kp.y});
  return out;
}

std::vector<Keypoint> ProjectKeypoints(std::span<const Keypoint> keypoints,
                                       const Homography& h) {
  std::vector<Keypoint> out;
  out.reserve(keypoints.size());
  for (const Keypoint& kp : keypoints) {
    const Point2 p = h.Project({kp.x, kp.y});
    Keypoint projected = kp;
    projected.x = p.x;
    projected.y = p.y;
    out.push_back(projected);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Correspondences and precision / recall

namespace {

bool TryProject(const Homography& h, Point2 p, Point2& out) {
  const auto& m = h.matrix();
  const double w = m[6] * p.x + m[7] * p.y + m[8];
  if (w == 0.0 || !std::isfinite(w)) return false;
  out = {(m[0] * p.x + m[1] * p.y + m[2]) / w,
         (m[3] * p.x + m[4] * p.y + m[5]) / w};
  return true;
}

}  // namespace

double SymmetricReprojectionError(const Homography& h,
                                  const Homography& h_inverse, Point2 ref,
                                  Point2 test) {
  Point2 fwd, bwd;
  if (!TryProject(h, ref, fwd) || !TryProject(h_inverse, test, bwd)) {
    return std::numeric_limits<double>::infinity();
  }
  const double e1 = std::hypot(fwd.x - test.x, fwd.y - test.y);
  const double e2 = std::hypot(bwd.x - ref.x, bwd.y - ref.y);
  return std::max(e1, e2);
}

bool CorrespondenceSet::Contains(std::uint32_t ref, std::uint32_t test) const {
  const auto it = std::lower_bound(
      pairs.begin(), pairs.end(), ref,
      [](const Correspondence& c, std::uint32_t r) { return c.ref < r; });
  return it != pairs.end() && it->ref == ref && it->test == test;
}

CorrespondenceSet FindCorrespondences(std::span<const Point2> ref,
                                      std::span<const Point2> test,
                                      const Homography& h, double epsilon) {
  if (!(epsilon >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "epsilon must be >= 0");
  }
  const Homography inv = h.Inverse();
  std::vector<Correspondence> candidates;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    Point2 fwd;
    if (!TryProject(h, ref[i], fwd)) continue;
    for (std::size_t j = 0; j < test.size(); ++j) {
      // Cheap forward rejection before the symmetric check.
      if (std::abs(fwd.x - test[j].x) > epsilon ||
          std::abs(fwd.y - test[j].y) > epsilon) {
        continue;
      }
      const double e = SymmetricReprojectionError(h, inv, ref[i], test[j]);
      if (e <= epsilon) {
        candidates.push_back({static_cast<std::uint32_t>(i),
                              static_cast<std::uint32_t>(j), e});
      }
    }
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const Correspondence& a, const Correspondence& b) {
              if (a.error != b.error) return a.error < b.error;
              if (a.ref != b.ref) return a.ref < b.ref;
              return a.test < b.test;
            });
  std::vector<bool> ref_used(ref.size(), false), test_used(test.size(), false);
  CorrespondenceSet set;
  set.epsilon = epsilon;
  for (const Correspondence& c : candidates) {
    if (ref_used[c.ref] || test_used[c.test]) continue;
    ref_used[c.ref] = true;
    test_used[c.test] = true;
    set.pairs.push_back(c);
  }
  std::sort(set.pairs.begin(), set.pairs.end(),
            [](const Correspondence& a, const Correspondence& b) {
              return a.ref < b.ref;
            });
  return set;
}

PrPoint PrecisionRecall(std::span<const MatchPair> matches,
                        const CorrespondenceSet& correspondences) {
  PrPoint pr;
  pr.putative = matches.size();
  pr.correspondences = correspondences.size();
  for (const MatchPair& m : matches) {
    if (correspondences.Contains(m.query, m.train)) ++pr.correct;
  }
  pr.no_putative = pr.putative == 0;
  pr.no_correspondences = pr.correspondences == 0;
  pr.precision = pr.no_putative ? 0.0
                                : static_cast<double>(pr.correct) /
                                      static_cast<double>(pr.putative);
  pr.recall = pr.no_correspondences
                  ? 0.0
                  : static_cast<double>(pr.correct) /
                        static_cast<double>(pr.correspondences);
  return pr;
}

std::vector<PrPoint> PrSweep(std::span<const BinaryDescriptor> query,
                             std::span<const BinaryDescriptor> train,
                             const CorrespondenceSet& correspondences,
                             std::span<const double> thresholds, int workers) {
  if (!std::is_sorted(thresholds.begin(), thresholds.end())) {
    throw Error(ErrorCode::kInvalidArgument, "thresholds must be ascending");
  }
  std::vector<PrPoint> out;
  out.reserve(thresholds.size());
  for (double t : thresholds) {
    if (t < 0.0) {
      throw Error(ErrorCode::kInvalidArgument, "thresholds must be >= 0");
    }
    const std::size_t cap = static_cast<std::size_t>(
        std::min(std::floor(t), static_cast<double>(
                                    std::numeric_limits<std::uint32_t>::max())));
    const MatchResult r = BruteForceMutual(query, train, cap, workers);
    PrPoint p = PrecisionRecall(r.pairs, correspondences);
    p.threshold = t;
    out.push_back(p);
  }
  return out;
}

EvaluationSummary Summarize(std::span<const PairEvaluation> pairs) {
  EvaluationSummary s;
  s.pairs = pairs.size();
  if (pairs.empty()) return s;
  for (const PairEvaluation& p : pairs) {
    s.mean_precision += p.point.precision;
    s.mean_recall += p.point.recall;
    s.mean_match_cost += p.match_cost;
  }
  const double n = static_cast<double>(pairs.size());
  s.mean_precision /= n;
  s.mean_recall /= n;
  s.mean_match_cost /= n;
  return s;
}

// ---------------------------------------------------------------------------
// Synthetic pairs

SynthPair SynthesizePair(const GrayImage& image, const SynthSpec& spec) {
  if (!(spec.gain > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "gain must be > 0");
  }
  if (!(spec.gamma > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "gamma must be > 0");
  }
  const Homography inv = spec.homography.Inverse();
  const int w = image.width();
  const int h = image.height();
  GrayImage out(w, h);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      Point2 src;
      if (!TryProject(inv, {c + 0.5, r + 0.5}, src)) continue;
      const double sc = src.x - 0.5;
      const double sr = src.y - 0.5;
      if (sc < 0.0 || sr < 0.0 || sc > w - 1 || sr > h - 1) continue;
      const double v = SampleBilinear(image, sc, sr);
      const double base = std::max(0.0, spec.gain * (v / 255.0) + spec.bias);
      const double mapped = 255.0 * std::pow(base, spec.gamma);
      out.at(r, c) = std::clamp(std::round(mapped), 0.0, 255.0);
    }
  }
  return {std::move(out), spec.homography};
}

// ---------------------------------------------------------------------------
// Point-pair baseline

namespace {
constexpr int kBoxHalf = 2;  // 5x5 smoothing window
}

PointPairBaseline::PointPairBaseline(double radius, int bits,
                                     std::uint64_t seed)
    : radius_(radius) {
  if (bits < 1 || radius < kBoxHalf + 2) {
    throw Error(ErrorCode::kInvalidArgument, "bad baseline parameters");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 2.0 * radius / 5.0);
  const double limit = radius - kBoxHalf - 1;
  auto draw = [&] { return std::clamp(normal(rng), -limit, limit); };
  for (int i = 0; i < bits; ++i) {
    tests_.push_back({draw(), draw(), draw(), draw()});
  }
  auto format = std::make_shared<DescriptorFormat>();
  format->fingerprint.family = DescriptorFamily::kPointPair;
  format->fingerprint.granularity = 1;
  format->fingerprint.kinds = {ChannelKind::kIntensity};
  format->fingerprint.channel_names = {"gi"};
  format->fingerprint.radius = radius;
  format->bits = static_cast<std::size_t>(bits);
  format->segment_bounds = {0, format->bits};
  format_ = std::move(format);
}

DescriptorSet PointPairBaseline::Extract(
    const ChannelStack& stack, std::span<const Keypoint> keypoints) const {
  const int gi = stack.Find("gi");
  if (gi < 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "point-pair baseline needs the intensity channel 'gi'");
  }
  const IntegralImage& ii = stack[static_cast<std::size_t>(gi)].integral;
  DescriptorSet set;
  set.format = format_;
  for (std::size_t k = 0; k < keypoints.size(); ++k) {
    const Keypoint& kp = keypoints[k];
    const Rect ros{static_cast<int>(std::floor(kp.x - radius_)),
                   static_cast<int>(std::floor(kp.y - radius_)),
                   static_cast<int>(2 * radius_), static_cast<int>(2 * radius_)};
    if (!ii.Contains(ros)) {
      set.skipped.emplace_back(static_cast<std::uint32_t>(k),
                               KeypointStatus::kOutOfBounds);
      continue;
    }
    auto box = [&](double dx, double dy) {
      const int c = static_cast<int>(std::floor(kp.x + dx));
      const int r = static_cast<int>(std::floor(kp.y + dy));
      return ii.RegionSumExtended({c - kBoxHalf, r - kBoxHalf, 2 * kBoxHalf + 1,
                                   2 * kBoxHalf + 1})
          .first;
    };
    BinaryDescriptor d(format_);
    for (std::size_t i = 0; i < tests_.size(); ++i) {
      const Test& t = tests_[i];
      d.Set(i, box(t.ax, t.ay) < box(t.bx, t.by));
    }
    set.keypoints.push_back(kp);
    set.descriptors.push_back(std::move(d));
    set.source_index.push_back(static_cast<std::uint32_t>(k));
  }
  return set;
}

}  // namespace iib
