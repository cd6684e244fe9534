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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <numeric>
#include <random>

#include "iib/error.hpp"
#include "iib/evaluation.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

namespace iib {
namespace {

using testing::MakeScene;
using testing::OptimalAssignment;
using testing::RandomHomography;
using testing::Scene;
using testing::DataPath;
using testing::TempPath;

TEST(Homography, IdentityTranslationAndOracle) {
  const Point2 p{12.5, -3.25};
  const Point2 i = Homography::Identity().Project(p);
  EXPECT_EQ(i.x, p.x);
  EXPECT_EQ(i.y, p.y);
  const Point2 t = Homography::Translation(4, -7).Project(p);
  EXPECT_EQ(t.x, 16.5);
  EXPECT_EQ(t.y, -10.25);

  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> coord(-500, 500);
  for (int k = 0; k < 200; ++k) {
    const Homography h = RandomHomography(rng);
    const Point2 q{coord(rng), coord(rng)};
    const auto& m = h.matrix();
    // Matrix multiply of (x, y, 1), then divide.
    double v[3];
    for (int r = 0; r < 3; ++r) v[r] = m[3 * r] * q.x + m[3 * r + 1] * q.y + m[3 * r + 2];
    const Point2 got = h.Project(q);
    EXPECT_NEAR(got.x, v[0] / v[2], 1e-12 * std::max(1.0, std::abs(got.x)));
    EXPECT_NEAR(got.y, v[1] / v[2], 1e-12 * std::max(1.0, std::abs(got.y)));
    const Point2 back = h.Inverse().Project(got);
    EXPECT_NEAR(back.x, q.x, 1e-8);
    EXPECT_NEAR(back.y, q.y, 1e-8);
  }
}

TEST(Homography, Errors) {
  EXPECT_THROW(Homography({1, 2, 3, 2, 4, 6, 0, 0, 1}), Error);
  const Homography h({1, 0, 0, 0, 1, 0, 1, 0, -5});
  EXPECT_THROW(h.Project({5, 0}), Error);
}

TEST(Homography, FileRoundTrip) {
  std::mt19937_64 rng(2);
  const Homography h = RandomHomography(rng);
  const std::string path = TempPath("h.txt");
  SaveHomography(h, path);
  EXPECT_EQ(LoadHomography(path).matrix(), h.matrix());
  {
    std::ofstream out(path);
    out << "1 0 0\n0 1 0\n0 0\n";
  }
  EXPECT_THROW(LoadHomography(path), Error);
}

// ---- correspondences

TEST(Correspondences, PlantedExactProjections) {
  std::mt19937_64 rng(3);
  const Scene s = MakeScene(rng, 40, 4.0, 0.0, true);
  const CorrespondenceSet c = FindCorrespondences(s.ref, s.test, s.h, 3.0);
  EXPECT_EQ(c.size(), 40u);
  for (const Correspondence& p : c.pairs) EXPECT_LT(p.error, 1e-6);
}

TEST(Correspondences, ZeroEpsilonWithNoiseIsEmpty) {
  std::mt19937_64 rng(4);
  const Scene s = MakeScene(rng, 20, 7.0, 2.0, false);
  EXPECT_EQ(FindCorrespondences(s.ref, s.test, s.h, 0.0).size(), 0u);
  EXPECT_THROW(FindCorrespondences(s.ref, s.test, s.h, -1.0), Error);
}

TEST(Correspondences, MatchesOptimalAssignmentOracle) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<std::size_t> sizes(2, 30);
  for (int trial = 0; trial < 120; ++trial) {
    const Scene s = MakeScene(rng, sizes(rng), 6.5, 2.0, trial % 2 == 1);
    const CorrespondenceSet c = FindCorrespondences(s.ref, s.test, s.h, 3.0);
    std::vector<std::pair<std::uint32_t, std::uint32_t>> got;
    for (const Correspondence& p : c.pairs) {
      got.push_back({p.ref, p.test});
      EXPECT_LE(p.error, 3.0);
    }
    EXPECT_EQ(got, OptimalAssignment(s, 3.0)) << "trial " << trial;
  }
}

// ---- precision / recall

TEST(PrecisionRecall, DirectRatios) {
  CorrespondenceSet corr;
  for (std::uint32_t i = 0; i < 20; ++i) corr.pairs.push_back({i, i, 0.0});
  std::vector<MatchPair> m;
  for (std::uint32_t i = 0; i < 8; ++i) m.push_back({i, i, 0});
  m.push_back({8, 9, 0});
  m.push_back({9, 8, 0});
  const PrPoint p = PrecisionRecall(m, corr);
  EXPECT_EQ(p.putative, 10u);
  EXPECT_EQ(p.correct, 8u);
  EXPECT_DOUBLE_EQ(p.precision, 0.8);
  EXPECT_DOUBLE_EQ(p.recall, 0.4);
}

TEST(PrecisionRecall, EmptyFlags) {
  const PrPoint p = PrecisionRecall({}, CorrespondenceSet{});
  EXPECT_TRUE(p.no_putative);
  EXPECT_TRUE(p.no_correspondences);
  EXPECT_EQ(p.precision, 0.0);
  EXPECT_EQ(p.recall, 0.0);
}

TEST(PrecisionRecall, AgreesWithRecountOracle) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 100; ++trial) {
    const Scene s = MakeScene(rng, 25, 7.0, 1.5, true);
    const CorrespondenceSet corr = FindCorrespondences(s.ref, s.test, s.h, 3.0);
    // Random injective putative matches.
    std::vector<std::uint32_t> perm(s.test.size());
    std::iota(perm.begin(), perm.end(), 0u);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<MatchPair> m;
    std::bernoulli_distribution keep(0.6), truth(0.5);
    for (std::uint32_t i = 0; i < s.ref.size(); ++i) {
      if (!keep(rng)) continue;
      std::uint32_t j = perm[i];
      if (truth(rng)) {
        // Point i's real partner, when there is one and it is free.
        for (const Correspondence& c : corr.pairs) {
          if (c.ref == i) j = c.test;
        }
      }
      bool dup = false;
      for (const MatchPair& p : m) dup = dup || p.train == j;
      if (!dup) m.push_back({i, j, 0});
    }
    const PrPoint p = PrecisionRecall(m, corr);
    const Homography inv = s.h.Inverse();
    std::size_t correct = 0;
    for (const MatchPair& mp : m) {
      const Point2 f = s.h.Project(s.ref[mp.query]);
      const Point2 b = inv.Project(s.test[mp.train]);
      const double e = std::max(std::hypot(f.x - s.test[mp.train].x, f.y - s.test[mp.train].y),
                                std::hypot(b.x - s.ref[mp.query].x, b.y - s.ref[mp.query].y));
      correct += e <= 3.0;
    }
    EXPECT_EQ(p.correct, correct);
    EXPECT_EQ(p.putative, m.size());
    EXPECT_LE(p.correct, p.putative);
    EXPECT_LE(p.correct, corr.size());
    EXPECT_GE(p.precision, 0.0);
    EXPECT_LE(p.precision, 1.0);
    EXPECT_LE(p.recall, 1.0);
    if (!m.empty()) EXPECT_DOUBLE_EQ(p.precision * m.size(), static_cast<double>(p.correct));
    if (corr.size()) EXPECT_DOUBLE_EQ(p.recall * corr.size(), static_cast<double>(p.correct));
  }
}

TEST(PrSweep, MonotoneAndLimits) {
  std::mt19937_64 rng(7);
  DescriptorConfig cfg;
  const auto f = MakeFormat(cfg);
  std::vector<BinaryDescriptor> q, t;
  CorrespondenceSet corr;
  for (std::uint32_t i = 0; i < 60; ++i) {
    t.push_back(testing::RandomDescriptor(f, rng));
    BinaryDescriptor d = t.back();
    std::bernoulli_distribution flip(0.05 + 0.4 * (i % 6) / 6.0);
    for (std::size_t b = 0; b < d.size(); ++b) {
      if (flip(rng)) d.Set(b, !d.Get(b));
    }
    q.push_back(d);
    corr.pairs.push_back({i, i, 0.0});
  }
  std::vector<double> th;
  for (int k = 0; k <= 1360; k += 40) th.push_back(k);
  th.push_back(1360);
  const auto pts = PrSweep(q, t, corr, th);
  ASSERT_EQ(pts.size(), th.size());
  EXPECT_EQ(pts.front().putative, 0u);
  for (std::size_t i = 1; i < pts.size(); ++i) {
    EXPECT_GE(pts[i].putative, pts[i - 1].putative);
  }
  const PrPoint full = PrecisionRecall(BruteForceMutual(q, t).pairs, corr);
  EXPECT_EQ(pts.back().putative, full.putative);
  EXPECT_EQ(pts.back().correct, full.correct);
  EXPECT_EQ(pts.back().precision, full.precision);
  EXPECT_EQ(pts.back().recall, full.recall);
  const std::vector<double> bad = {5, 3};
  EXPECT_THROW(PrSweep(q, t, corr, bad), Error);
}

// ---- synthetic pairs

TEST(Synth, IdentityIsExact) {
  const GrayImage img = LoadImage(DataPath("camera.pgm"));
  const SynthPair p = SynthesizePair(img, SynthSpec{});
  for (std::size_t i = 0; i < img.pixels().size(); ++i) {
    ASSERT_EQ(p.image.pixels()[i], img.pixels()[i]);
  }
}

TEST(Synth, BiasAddsFiftyOne) {
  const GrayImage img = LoadImage(DataPath("moon.pgm"));
  SynthSpec spec;
  spec.bias = 0.2;
  const SynthPair p = SynthesizePair(img, spec);
  for (std::size_t i = 0; i < img.pixels().size(); ++i) {
    if (img.pixels()[i] + 51 <= 255) {
      ASSERT_EQ(p.image.pixels()[i], img.pixels()[i] + 51);
    } else {
      ASSERT_EQ(p.image.pixels()[i], 255.0);
    }
  }
}

TEST(Synth, WarpFollowsHomography) {
  const GrayImage img = LoadImage(DataPath("coins.pgm"));
  SynthSpec spec;
  spec.homography = Homography::Translation(5, 3);
  const SynthPair p = SynthesizePair(img, spec);
  EXPECT_EQ(p.homography.matrix(), spec.homography.matrix());
  for (int r = 3; r < img.height(); r += 7) {
    for (int c = 5; c < img.width(); c += 7) {
      ASSERT_EQ(p.image.at(r, c), img.at(r - 3, c - 5));
    }
  }
  EXPECT_EQ(p.image.at(0, 0), 0.0);
}

TEST(Synth, Errors) {
  const GrayImage img(10, 10, 5.0);
  SynthSpec spec;
  spec.gain = 0.0;
  EXPECT_THROW(SynthesizePair(img, spec), Error);
  spec = SynthSpec{};
  spec.gamma = -1.0;
  EXPECT_THROW(SynthesizePair(img, spec), Error);
}

// ---- baseline

TEST(Baseline, ShapeAndDeterminism) {
  const GrayImage img = LoadImage(DataPath("camera.pgm"));
  const ChannelStack s = ComputeChannels(img);
  const auto kps = GridKeypoints(img.width(), img.height(), 5, 5);
  const PointPairBaseline a, b;
  const DescriptorSet da = a.Extract(s, kps), db = b.Extract(s, kps);
  ASSERT_EQ(da.size(), 25u);
  EXPECT_EQ(da.format->bits, 256u);
  EXPECT_EQ(da.format->fingerprint.family, DescriptorFamily::kPointPair);
  for (std::size_t i = 0; i < da.size(); ++i) EXPECT_EQ(da.descriptors[i], db.descriptors[i]);
  const std::vector<Keypoint> edge = {{5, 5}};
  EXPECT_EQ(a.Extract(s, edge).skipped.size(), 1u);
  EXPECT_NE(MakeFormat(DescriptorConfig{})->fingerprint, da.format->fingerprint);
}

PrPoint IdentityScore(const DescriptorSet& a, const DescriptorSet& b) {
  const auto m = BruteForceMutual(a.descriptors, b.descriptors);
  const auto pa = KeypointPositions(a.keypoints), pb = KeypointPositions(b.keypoints);
  return PrecisionRecall(m.pairs, FindCorrespondences(pa, pb, Homography::Identity(), 3.0));
}

// Strict ordering of mean precision on gamma 0.5 pairs.
TEST(Baseline, IibPrecisionExceedsPointPairsOnGammaHalf) {
  double iib = 0.0, pp = 0.0;
  const PointPairBaseline base;
  for (const std::string& name : testing::NaturalImages()) {
    const GrayImage img = LoadImage(DataPath(name));
    SynthSpec spec;
    spec.gamma = 0.5;
    const GrayImage g = SynthesizePair(img, spec).image;
    const ChannelStack sa = ComputeChannels(img), sb = ComputeChannels(g);
    const auto kps = GridKeypoints(img.width(), img.height(), 20, 10);
    iib += IdentityScore(ExtractAll(sa, kps, DescriptorConfig{}, 1),
                         ExtractAll(sb, kps, DescriptorConfig{}, 1)).precision / 5;
    pp += IdentityScore(base.Extract(sa, kps), base.Extract(sb, kps)).precision / 5;
  }
  EXPECT_GT(iib, pp) << "mean precision: IIB " << iib << ", point-pair " << pp;
}

TEST(Summary, MeansOverPairs) {
  std::vector<PairEvaluation> pairs(2);
  pairs[0].point.precision = 1.0;
  pairs[0].point.recall = 0.5;
  pairs[0].match_cost = 0.2;
  pairs[1].point.precision = 0.5;
  pairs[1].point.recall = 0.25;
  pairs[1].match_cost = 1.0;
  const EvaluationSummary s = Summarize(pairs);
  EXPECT_DOUBLE_EQ(s.mean_precision, 0.75);
  EXPECT_DOUBLE_EQ(s.mean_recall, 0.375);
  EXPECT_DOUBLE_EQ(s.mean_match_cost, 0.6);
  EXPECT_EQ(s.pairs, 2u);
}

}  // namespace
}  // namespace iib
