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

#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "iib/descriptor.hpp"
#include "iib/error.hpp"
#include "iib/evaluation.hpp"
#include "iib/matching.hpp"
#include "test_util.hpp"

namespace iib {
namespace {

using testing::DataPath;
using testing::NaturalImages;
using testing::TextureImage;

QuadCodes Codes(std::initializer_list<int> v) {
  QuadCodes out{};
  int i = 0;
  for (int x : v) out[i++] = static_cast<std::uint8_t>(x);
  return out;
}

// ---- layout

TEST(Layout, DefaultCountsAndSides) {
  const QuadtreeLayout layout = LayoutPatches(32, 4);
  const std::size_t patches[] = {4, 16, 64, 256};
  const double sides[] = {32, 16, 8, 4};
  const std::size_t nonoverlap[] = {1, 4, 16, 64};
  const std::size_t overlap[] = {1, 9, 49, 225};
  for (int g = 1; g <= 4; ++g) {
    EXPECT_EQ(QuadtreeLayout::PatchCount(g), patches[g - 1]);
    EXPECT_EQ(layout.PatchSide(g), sides[g - 1]);
    EXPECT_EQ(QuadtreeLayout::QuadrupleCount(g, false), nonoverlap[g - 1]);
    EXPECT_EQ(QuadtreeLayout::QuadrupleCount(g, true), overlap[g - 1]);
  }
}

TEST(Layout, OverlapCountsMatchEnumeratedWindows) {
  std::size_t total = 0;
  for (int g = 1; g <= 4; ++g) {
    const int n = 1 << g;
    std::size_t windows = 0;
    for (int r = 0; r + 1 < n; ++r) {
      for (int c = 0; c + 1 < n; ++c) ++windows;
    }
    EXPECT_EQ(QuadtreeLayout::QuadrupleCount(g, true), windows);
    total += windows;
  }
  EXPECT_EQ(4 * total * 4, 4544u);
}

TEST(Layout, QuadruplePatchesTileSuperCells) {
  for (int g = 1; g <= 5; ++g) {
    const int n = 1 << g;
    std::set<int> seen;
    for (std::size_t q = 0; q < QuadtreeLayout::QuadrupleCount(g, false); ++q) {
      const auto p = QuadtreeLayout::QuadruplePatches(g, q, false);
      const int sr = static_cast<int>(q) / (n / 2), sc = static_cast<int>(q) % (n / 2);
      EXPECT_EQ(p[0], (2 * sr) * n + 2 * sc);
      EXPECT_EQ(p[1], p[0] + 1);
      EXPECT_EQ(p[2], p[0] + n);
      EXPECT_EQ(p[3], p[0] + n + 1);
      for (int i : p) EXPECT_TRUE(seen.insert(i).second) << "patch reused";
    }
    EXPECT_EQ(seen.size(), QuadtreeLayout::PatchCount(g));
    for (std::size_t q = 0; q < QuadtreeLayout::QuadrupleCount(g, true); ++q) {
      const auto p = QuadtreeLayout::QuadruplePatches(g, q, true);
      const int r = static_cast<int>(q) / (n - 1), c = static_cast<int>(q) % (n - 1);
      EXPECT_EQ(p[0], r * n + c);
      EXPECT_EQ(p[3], (r + 1) * n + c + 1);
    }
  }
}

TEST(Layout, PatchesTileRosWithoutGaps) {
  for (double radius : {16.0, 21.3, 32.0, 40.7}) {
    const QuadtreeLayout layout(radius, 4);
    const double cx = 100.4, cy = 77.6;
    for (int g = 1; g <= 4; ++g) {
      const int n = 1 << g;
      long area = 0;
      for (int p = 0; p < n * n; ++p) {
        const Rect r = layout.PatchRect(cx, cy, g, p);
        EXPECT_GE(r.width, 1);
        EXPECT_GE(r.height, 1);
        area += static_cast<long>(r.width) * r.height;
        if (p % n + 1 < n) EXPECT_EQ(r.x + r.width, layout.PatchRect(cx, cy, g, p + 1).x);
      }
      const Rect first = layout.PatchRect(cx, cy, g, 0);
      const Rect last = layout.PatchRect(cx, cy, g, n * n - 1);
      EXPECT_EQ(area, static_cast<long>(last.x + last.width - first.x) *
                          (last.y + last.height - first.y));
    }
  }
}

TEST(Layout, RadiusTooSmallNamesMinimum) {
  try {
    LayoutPatches(15.0, 4);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidArgument);
    EXPECT_NE(std::string(e.what()).find("16"), std::string::npos) << e.what();
  }
  EXPECT_NO_THROW(LayoutPatches(16.0, 4));
}

// ---- sizes

TEST(Size, KnownSizes) {
  EXPECT_EQ(DescriptorSize(Mapping::kMean, false, 1, 4), 340u);
  EXPECT_EQ(DescriptorSize(Mapping::kMean, false, 2, 4), 680u);
  EXPECT_EQ(DescriptorSize(Mapping::kMean, false, 3, 4), 1020u);
  EXPECT_EQ(DescriptorSize(Mapping::kMean, false, 4, 4), 1360u);
  EXPECT_EQ(DescriptorSize(Mapping::kQuartile, false, 4, 4), 2720u);
  EXPECT_EQ(DescriptorSize(Mapping::kSort, false, 4, 4), 2720u);
  EXPECT_EQ(DescriptorSize(Mapping::kMean, true, 4, 4), 4544u);
  const std::size_t by_g[] = {80, 336, 1360, 5456};
  for (int g = 2; g <= 5; ++g) {
    EXPECT_EQ(DescriptorSize(Mapping::kMean, false, 4, g), by_g[g - 2]);
  }
  EXPECT_EQ(DescriptorSize(DescriptorConfig{}), 1360u);
}

TEST(Size, ClosedFormAgainstLayoutEnumeration) {
  for (Mapping m : {Mapping::kMean, Mapping::kMax, Mapping::kMin,
                    Mapping::kQuartile, Mapping::kSort}) {
    for (bool overlap : {false, true}) {
      for (int g = 1; g <= 6; ++g) {
        for (int n = 1; n <= 5; ++n) {
          std::size_t quads = 0;
          for (int l = 1; l <= g; ++l) quads += QuadtreeLayout::QuadrupleCount(l, overlap);
          EXPECT_EQ(DescriptorSize(m, overlap, n, g),
                    static_cast<std::size_t>(BitsPerPatch(m)) * 4 * n * quads);
        }
      }
    }
  }
}

// ---- mapping functions

TEST(Mapping, Mean) {
  EXPECT_EQ(MapMean({1, 2, 3, 4}), Codes({0, 0, 1, 1}));
  EXPECT_EQ(MapMean({7, 7, 7, 7}), Codes({0, 0, 0, 0}));
  EXPECT_EQ(MapMean({4, 0, 0, 0}), Codes({1, 0, 0, 0}));
}

TEST(Mapping, MaxMin) {
  EXPECT_EQ(MapMax({1, 2, 3, 4}), Codes({0, 0, 0, 1}));
  EXPECT_EQ(MapMin({1, 2, 3, 4}), Codes({1, 0, 0, 0}));
  EXPECT_EQ(MapMax({5, 5, 1, 1}), Codes({1, 1, 0, 0}));
  EXPECT_EQ(MapMin({5, 5, 1, 1}), Codes({0, 0, 1, 1}));
  EXPECT_EQ(MapMax({3, 3, 3, 3}), Codes({1, 1, 1, 1}));
  EXPECT_EQ(MapMin({3, 3, 3, 3}), Codes({1, 1, 1, 1}));
}

TEST(Mapping, Quartile) {
  EXPECT_EQ(MapQuartile({0, 1, 2, 4}), Codes({0, 0, 1, 3}));
  EXPECT_EQ(MapQuartile({9, 9, 9, 9}), Codes({0, 0, 0, 0}));
  EXPECT_EQ(MapQuartile({0, 2.0001, 3.0001, 4}), Codes({0, 2, 3, 3}));
}

TEST(Mapping, Sort) {
  EXPECT_EQ(MapSort({1, 2, 3, 4}), Codes({0, 1, 2, 3}));
  EXPECT_EQ(MapSort({4, 3, 2, 1}), Codes({3, 2, 1, 0}));
  EXPECT_EQ(MapSort({5, 5, 1, 1}), Codes({2, 3, 0, 1}));
}

TEST(Mapping, AffineInvariantOnRandomQuadruples) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> v(0.0, 255.0), a(0.05, 20.0), b(-100, 100);
  std::uniform_int_distribution<int> levels(0, 4);
  for (int t = 0; t < 2000; ++t) {
    PatchQuad x;
    // Coarse levels make ties common.
    for (double& xi : x) xi = t % 2 ? v(rng) : 10.0 * levels(rng);
    const double aa = a(rng), bb = b(rng);
    PatchQuad y;
    for (int i = 0; i < 4; ++i) y[i] = aa * x[i] + bb;
    for (Mapping m : {Mapping::kMean, Mapping::kMax, Mapping::kMin,
                      Mapping::kQuartile, Mapping::kSort}) {
      EXPECT_EQ(ApplyMapping(m, x), ApplyMapping(m, y)) << MappingName(m);
    }
  }
}

TEST(Mapping, Names) {
  for (Mapping m : {Mapping::kMean, Mapping::kMax, Mapping::kMin,
                    Mapping::kQuartile, Mapping::kSort}) {
    EXPECT_EQ(ParseMapping(MappingName(m)), m);
  }
  EXPECT_THROW(ParseMapping("median"), Error);
}

// ---- quad stats

TEST(QuadStats, ConstantAndHalfPlane) {
  const ChannelStack constant = ComputeChannels(GrayImage(80, 80, 42.0));
  const QuadtreeLayout layout(32, 4);
  const PatchQuad x = QuadStats(constant, 3, layout, 40, 40, 2, 3, false);
  for (double xi : x) EXPECT_EQ(xi, 42.0);

  GrayImage half(80, 80, 0.0);
  for (int r = 0; r < 80; ++r) {
    for (int c = 40; c < 80; ++c) half.at(r, c) = 8.0;
  }
  const ChannelStack hs = ComputeChannels(half);
  const PatchQuad h = QuadStats(hs, 3, layout, 40, 40, 1, 0, false);
  EXPECT_EQ(h, (PatchQuad{0, 8, 0, 8}));
}

TEST(QuadStats, MatchesNaivePatchMeans) {
  std::mt19937_64 rng(4);
  const GrayImage img = testing::RandomImage(64, 64, rng, false);
  const ChannelStack s = ComputeChannels(img);
  const QuadtreeLayout layout(32, 3);
  for (std::size_t q = 0; q < QuadtreeLayout::QuadrupleCount(3, false); ++q) {
    const PatchQuad x = QuadStats(s, 3, layout, 32, 32, 3, q, false);
    const auto patches = QuadtreeLayout::QuadruplePatches(3, q, false);
    for (int i = 0; i < 4; ++i) {
      const int pr = patches[i] / 8, pc = patches[i] % 8;
      long double sum = 0;
      for (int r = pr * 8; r < pr * 8 + 8; ++r) {
        for (int c = pc * 8; c < pc * 8 + 8; ++c) sum += img.at(r, c);
      }
      EXPECT_NEAR(x[i], static_cast<double>(sum / 64), 1e-9 * static_cast<double>(sum / 64));
    }
  }
  EXPECT_THROW(QuadStats(s, 3, layout, 20, 32, 3, 0, false), Error);
}

// ---- extraction

TEST(Extract, DefaultSizeAndSegments) {
  const GrayImage img = TextureImage(128, 128, 1);
  const ChannelStack s = ComputeChannels(img);
  const Extraction e = Extract(s, {64, 64}, DescriptorConfig{});
  ASSERT_TRUE(e.ok());
  EXPECT_EQ(e.descriptor.size(), 1360u);
  const auto& bounds = e.descriptor.format().segment_bounds;
  ASSERT_EQ(bounds.size(), 5u);
  const std::size_t seg[] = {16, 64, 256, 1024};
  for (std::size_t g = 0; g < 4; ++g) EXPECT_EQ(bounds[g + 1] - bounds[g], seg[g]);
}

TEST(Extract, SizeLawAcrossConfigurations) {
  const GrayImage img = TextureImage(96, 96, 2);
  const ChannelStack s = ComputeChannels(img);
  const std::vector<std::string> all = {"gx", "gy", "go", "gi"};
  for (Mapping m : {Mapping::kMean, Mapping::kMax, Mapping::kMin,
                    Mapping::kQuartile, Mapping::kSort}) {
    for (bool overlap : {false, true}) {
      for (int g = 2; g <= 5; ++g) {
        for (int n = 1; n <= 4; ++n) {
          DescriptorConfig c;
          c.mapping = m;
          c.overlap = overlap;
          c.granularity = g;
          c.channels.assign(all.begin(), all.begin() + n);
          const Extraction e = Extract(s, {48, 48}, c);
          ASSERT_TRUE(e.ok());
          EXPECT_EQ(e.descriptor.size(), DescriptorSize(c));
          EXPECT_EQ(e.descriptor.format().segment_bounds.back(), DescriptorSize(c));
        }
      }
    }
  }
}

TEST(Extract, ConstantImageIntensityBitsAreZero) {
  const ChannelStack s = ComputeChannels(GrayImage(100, 100, 77.0));
  DescriptorConfig c;
  c.channels = {"gi"};
  const Extraction e = Extract(s, {50, 50}, c);
  ASSERT_TRUE(e.ok());
  for (std::size_t i = 0; i < e.descriptor.size(); ++i) EXPECT_FALSE(e.descriptor.Get(i));
}

TEST(Extract, BitLayoutMatchesQuadStats) {
  const GrayImage img = TextureImage(100, 100, 3);
  const ChannelStack s = ComputeChannels(img);
  for (Mapping m : {Mapping::kMean, Mapping::kQuartile}) {
    for (bool overlap : {false, true}) {
      DescriptorConfig c;
      c.mapping = m;
      c.overlap = overlap;
      c.channels = {"gi", "gx"};
      const QuadtreeLayout layout(32, 4);
      const Extraction e = Extract(s, {50.3, 49.6}, c);
      ASSERT_TRUE(e.ok());
      std::size_t bit = 0;
      for (int g = 1; g <= 4; ++g) {
        for (std::size_t ch : {std::size_t{3}, std::size_t{0}}) {
          for (std::size_t q = 0; q < QuadtreeLayout::QuadrupleCount(g, overlap); ++q) {
            const QuadCodes codes =
                ApplyMapping(m, QuadStats(s, ch, layout, 50.3, 49.6, g, q, overlap));
            for (int i = 0; i < 4; ++i) {
              if (BitsPerPatch(m) == 1) {
                EXPECT_EQ(e.descriptor.Get(bit++), codes[i] != 0);
              } else {
                EXPECT_EQ(e.descriptor.Get(bit++), ((codes[i] >> 1) & 1) != 0);
                EXPECT_EQ(e.descriptor.Get(bit++), (codes[i] & 1) != 0);
              }
            }
          }
        }
      }
      EXPECT_EQ(bit, e.descriptor.size());
    }
  }
}

TEST(Extract, SkipsOutOfBoundsAndSmallRadius) {
  const ChannelStack s = ComputeChannels(TextureImage(100, 100, 4));
  const std::vector<Keypoint> kps = {{50, 50}, {10, 50}, {50, 90}, {50, 50, 8.0}};
  const DescriptorSet set = ExtractAll(s, kps, DescriptorConfig{}, 2);
  ASSERT_EQ(set.size(), 1u);
  EXPECT_EQ(set.source_index[0], 0u);
  ASSERT_EQ(set.skipped.size(), 3u);
  EXPECT_EQ(set.skipped[0].second, KeypointStatus::kOutOfBounds);
  EXPECT_EQ(set.skipped[1].second, KeypointStatus::kOutOfBounds);
  EXPECT_EQ(set.skipped[2].second, KeypointStatus::kRadiusTooSmall);
}

TEST(Extract, MissingChannelRejected) {
  const ChannelStack s = ComputeChannels(GrayImage(80, 80));
  DescriptorConfig c;
  c.channels = {"gx", "depth"};
  EXPECT_THROW(Extractor(s, c), Error);
}

TEST(Extract, ExtraChannelsParticipate) {
  const GrayImage img = TextureImage(100, 100, 5);
  const ChannelStack s = ComputeChannels(img, {{"depth", TextureImage(100, 100, 6)}});
  DescriptorConfig c;
  c.channels = {"gx", "gy", "go", "gi", "depth"};
  const Extraction e = Extract(s, {50, 50}, c);
  ASSERT_TRUE(e.ok());
  EXPECT_EQ(e.descriptor.size(), 1700u);
  EXPECT_EQ(e.descriptor.fingerprint().kinds.back(), ChannelKind::kExtra);
}

TEST(Extract, DeterministicAcrossWorkerCounts) {
  const ChannelStack s = ComputeChannels(TextureImage(200, 160, 7));
  const auto kps = GridKeypoints(200, 160, 7, 5);
  const DescriptorSet a = ExtractAll(s, kps, DescriptorConfig{}, 1);
  const DescriptorSet b = ExtractAll(s, kps, DescriptorConfig{}, 4);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a.descriptors[i], b.descriptors[i]);
}

TEST(Extract, GridKeypointsAreInterior) {
  const auto kps = GridKeypoints(256, 256, 10, 10);
  ASSERT_EQ(kps.size(), 100u);
  const ChannelStack s = ComputeChannels(TextureImage(256, 256, 8));
  EXPECT_EQ(ExtractAll(s, kps, DescriptorConfig{}).size(), 100u);
  for (const Keypoint& kp : kps) {
    EXPECT_EQ(kp.x, std::floor(kp.x));
    EXPECT_EQ(kp.y, std::floor(kp.y));
  }
}

// I versus a * I + b in real arithmetic: bit-identical apart from
// orientation bits over exactly-zero-gradient pixels.
TEST(Extract, AffineIlluminationInvariance) {
  for (const std::string& name : NaturalImages()) {
    const GrayImage img = LoadImage(DataPath(name));
    const testing::ZeroGradientMask zero_mask(img);
    GrayImage lit(img.width(), img.height());
    for (int r = 0; r < img.height(); ++r) {
      for (int c = 0; c < img.width(); ++c) lit.at(r, c) = 1.7 * img.at(r, c) + 20.0;
    }
    const ChannelStack s1 = ComputeChannels(img), s2 = ComputeChannels(lit);
    const auto kps = GridKeypoints(img.width(), img.height(), 10, 5);
    for (Mapping m : {Mapping::kMean, Mapping::kMax, Mapping::kMin,
                      Mapping::kQuartile, Mapping::kSort}) {
      DescriptorConfig c;
      c.mapping = m;
      const Extractor e1(s1, c), e2(s2, c);
      for (const Keypoint& kp : kps) {
        const Extraction a = e1.Run(kp), b = e2.Run(kp);
        ASSERT_TRUE(a.ok() && b.ok());
        const auto excluded = zero_mask.Bits(kp, c);
        for (std::size_t i = 0; i < a.descriptor.size(); ++i) {
          if (!excluded[i]) {
            ASSERT_EQ(a.descriptor.Get(i), b.descriptor.Get(i))
                << name << " " << MappingName(m) << " bit " << i;
          }
        }
      }
    }
  }
}

// Property check on requantized gamma: Hamming <= 5% of M at >= 90% of
// grid keypoints for every natural image.
TEST(Extract, GammaHalfStaysClose) {
  for (const std::string& name : NaturalImages()) {
    const GrayImage img = LoadImage(DataPath(name));
    SynthSpec spec;
    spec.gamma = 0.5;
    const GrayImage g = SynthesizePair(img, spec).image;
    const auto kps = GridKeypoints(img.width(), img.height(), 20, 10);
    const DescriptorSet a = ExtractAll(ComputeChannels(img), kps, DescriptorConfig{}, 1);
    const DescriptorSet b = ExtractAll(ComputeChannels(g), kps, DescriptorConfig{}, 1);
    ASSERT_EQ(a.size(), b.size());
    std::size_t close = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (Hamming(a.descriptors[i], b.descriptors[i]) <= 0.05 * 1360) ++close;
    }
    const double share = static_cast<double>(close) / static_cast<double>(a.size());
    EXPECT_GE(share, 0.9) << name << ": share of keypoints within 5% of M";
  }
}

TEST(Extract, OperationCounts) {
  const ChannelStack s = ComputeChannels(TextureImage(160, 160, 9));
  const auto kps = GridKeypoints(160, 160, 6, 6);
  for (double radius : {32.0, 27.3}) {
    for (bool overlap : {false, true}) {
      DescriptorConfig c;
      c.overlap = overlap;
      std::vector<Keypoint> k = kps;
      for (Keypoint& kp : k) kp.radius = radius;
      OpCounter counter;
      const DescriptorSet set = ExtractAll(s, k, c, 2, &counter);
      const std::uint64_t total = set.size() * DescriptorSize(c);
      ASSERT_GT(set.size(), 0u);
      EXPECT_EQ(counter.descriptors, set.size());
      EXPECT_EQ(counter.relational, total);
      EXPECT_LE(counter.algebraic, 4 * total);
      EXPECT_GT(counter.patch_algebraic, 0u);
    }
  }
}

TEST(Rotation, AngleZeroMatchesUpright) {
  const GrayImage img = LoadImage(DataPath("camera.pgm"));
  const ChannelStack s = ComputeChannels(img);
  DescriptorConfig rot;
  rot.rotation_enabled = true;
  const Extractor upright(s, DescriptorConfig{}), rotated(s, rot);
  for (Keypoint kp : GridKeypoints(img.width(), img.height(), 8, 8)) {
    const Extraction a = upright.Run(kp);
    kp.angle = 0.0;
    const Extraction b = rotated.Run(kp);
    ASSERT_TRUE(a.ok() && b.ok());
    EXPECT_EQ(a.descriptor, b.descriptor);
  }
}

TEST(Rotation, HalfTurnReproducesMirroredKeypoint) {
  const GrayImage img = LoadImage(DataPath("coffee.ppm"));
  const int W = img.width(), H = img.height();
  GrayImage turned(W, H);
  for (int r = 0; r < H; ++r) {
    for (int c = 0; c < W; ++c) turned.at(H - 1 - r, W - 1 - c) = img.at(r, c);
  }
  const ChannelStack s1 = ComputeChannels(img), s2 = ComputeChannels(turned);
  DescriptorConfig rot;
  rot.rotation_enabled = true;
  const Extractor upright(s1, DescriptorConfig{}), rotated(s2, rot);
  for (const Keypoint& kp : GridKeypoints(W, H, 8, 6)) {
    const Keypoint mirrored{W - kp.x, H - kp.y, kp.radius, std::numbers::pi};
    const Extraction a = upright.Run(kp), b = rotated.Run(mirrored);
    ASSERT_TRUE(a.ok() && b.ok());
    EXPECT_LE(Hamming(a.descriptor, b.descriptor), 0.02 * 1360);
  }
}

TEST(Rotation, OutOfBoundsCornersSkipped) {
  const ChannelStack s = ComputeChannels(TextureImage(100, 100, 10));
  DescriptorConfig rot;
  rot.rotation_enabled = true;
  // Upright fits (33..67 < 100) but the 45-degree square reaches past 0.
  const Keypoint kp{36, 50, 32, std::numbers::pi / 4};
  EXPECT_EQ(Extract(s, kp, rot).status, KeypointStatus::kOutOfBounds);
  EXPECT_TRUE(Extract(s, {50, 50, 32, std::numbers::pi / 4}, rot).ok());
}

// ---- descriptor container

TEST(BinaryDescriptor, BytesRoundTripAndPadding) {
  std::mt19937_64 rng(12);
  DescriptorConfig c;
  c.channels = {"gx"};
  c.granularity = 2;  // 80 bits: not a multiple of 64
  const auto format = MakeFormat(c);
  const BinaryDescriptor d = testing::RandomDescriptor(format, rng);
  const auto bytes = d.ToBytes();
  ASSERT_EQ(bytes.size(), 3u);  // 20 bits
  for (std::size_t i = 0; i < d.size(); ++i) {
    EXPECT_EQ(((bytes[i / 8] >> (i % 8)) & 1) != 0, d.Get(i));
  }
  EXPECT_EQ(BinaryDescriptor::FromBytes(format, bytes), d);
}

TEST(Fingerprint, DistinguishesConfigs) {
  DescriptorConfig a, b;
  EXPECT_EQ(MakeFingerprint(a), MakeFingerprint(b));
  b.mapping = Mapping::kMax;
  EXPECT_NE(MakeFingerprint(a), MakeFingerprint(b));
  b = a;
  b.channels = {"gy", "gx", "go", "gi"};
  EXPECT_NE(MakeFingerprint(a), MakeFingerprint(b));
  b = a;
  b.radius = 24;
  EXPECT_NE(MakeFingerprint(a), MakeFingerprint(b));
}

TEST(Config, ValidationErrors) {
  DescriptorConfig c;
  c.granularity = 0;
  EXPECT_THROW(c.Validate(), Error);
  c = DescriptorConfig{};
  c.channels = {};
  EXPECT_THROW(c.Validate(), Error);
  c = DescriptorConfig{};
  c.channels = {"gx", "gx"};
  EXPECT_THROW(c.Validate(), Error);
}

}  // namespace
}  // namespace iib
