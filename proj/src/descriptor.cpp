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

#include "iib/descriptor.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <thread>

#include "double_double.hpp"
#include "iib/error.hpp"
#include "mapping_impl.hpp"

namespace iib {

// ---------------------------------------------------------------------------
// Names

const char* MappingName(Mapping mapping) {
  switch (mapping) {
    case Mapping::kMean:
      return "mean";
    case Mapping::kMax:
      return "max";
    case Mapping::kMin:
      return "min";
    case Mapping::kQuartile:
      return "quartile";
    case Mapping::kSort:
      return "sort";
  }
  return "?";
}

Mapping ParseMapping(const std::string& name) {
  for (Mapping m : {Mapping::kMean, Mapping::kMax, Mapping::kMin,
                    Mapping::kQuartile, Mapping::kSort}) {
    if (name == MappingName(m)) return m;
  }
  throw Error(ErrorCode::kInvalidArgument,
              "unknown mapping '" + name +
                  "' (expected mean, max, min, quartile or sort)");
}

int BitsPerPatch(Mapping mapping) {
  return mapping == Mapping::kQuartile || mapping == Mapping::kSort ? 2 : 1;
}

const char* KeypointStatusName(KeypointStatus status) {
  switch (status) {
    case KeypointStatus::kOk:
      return "ok";
    case KeypointStatus::kOutOfBounds:
      return "out_of_bounds";
    case KeypointStatus::kRadiusTooSmall:
      return "radius_too_small";
  }
  return "?";
}

ChannelKind KindFromName(const std::string& name) {
  if (name == "gx") return ChannelKind::kGradX;
  if (name == "gy") return ChannelKind::kGradY;
  if (name == "go") return ChannelKind::kGradOrientation;
  if (name == "gi") return ChannelKind::kIntensity;
  return ChannelKind::kExtra;
}

// ---------------------------------------------------------------------------
// QuadtreeLayout

QuadtreeLayout::QuadtreeLayout(double radius, int granularity)
    : radius_(radius), granularity_(granularity) {}

QuadtreeLayout LayoutPatches(double radius, int granularity) {
  if (granularity < 1 || granularity > kMaxGranularity) {
    throw Error(ErrorCode::kInvalidArgument,
                "granularity must be in [1, " +
                    std::to_string(kMaxGranularity) + "], got " +
                    std::to_string(granularity));
  }
  const double min_radius = static_cast<double>(1 << granularity);
  if (!(radius >= min_radius)) {
    std::ostringstream msg;
    msg << "radius " << radius << " is too small for granularity "
        << granularity << " (minimum radius " << min_radius << ")";
    throw Error(ErrorCode::kInvalidArgument, msg.str());
  }
  return QuadtreeLayout(radius, granularity);
}

std::size_t QuadtreeLayout::QuadrupleCount(int level, bool overlap) {
  if (overlap) {
    const std::size_t m = (std::size_t{1} << level) - 1;
    return m * m;
  }
  return std::size_t{1} << (2 * (level - 1));
}

double QuadtreeLayout::PatchSide(int level) const {
  return 2.0 * radius_ / static_cast<double>(GridSize(level));
}

std::array<int, 4> QuadtreeLayout::QuadruplePatches(int level, std::size_t q,
                                                    bool overlap) {
  const int n = GridSize(level);
  int row, col;
  if (overlap) {
    const int m = n - 1;
    row = static_cast<int>(q) / m;
    col = static_cast<int>(q) % m;
  } else {
    const int half = n / 2;
    row = 2 * (static_cast<int>(q) / half);
    col = 2 * (static_cast<int>(q) % half);
  }
  const int tl = row * n + col;
  return {tl, tl + 1, tl + n, tl + n + 1};
}

std::vector<int> QuadtreeLayout::Boundaries(double center, int level) const {
  const int n = GridSize(level);
  const double side = PatchSide(level);
  std::vector<int> b(n + 1);
  for (int j = 0; j <= n; ++j) {
    b[j] = static_cast<int>(RoundHalfUp(center - radius_ + j * side));
  }
  return b;
}

Rect QuadtreeLayout::PatchRect(double cx, double cy, int level,
                               int patch) const {
  const int n = GridSize(level);
  const std::vector<int> bx = Boundaries(cx, level);
  const std::vector<int> by = Boundaries(cy, level);
  const int r = patch / n;
  const int c = patch % n;
  return {bx[c], by[r], bx[c + 1] - bx[c], by[r + 1] - by[r]};
}

// ---------------------------------------------------------------------------
// Config / fingerprint / format

void DescriptorConfig::Validate() const {
  if (granularity < 1 || granularity > kMaxGranularity) {
    throw Error(ErrorCode::kInvalidArgument,
                "granularity must be in [1, " +
                    std::to_string(kMaxGranularity) + "], got " +
                    std::to_string(granularity));
  }
  if (channels.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "at least one channel required");
  }
  for (std::size_t i = 0; i < channels.size(); ++i) {
    if (channels[i].empty() || channels[i].size() > 255) {
      throw Error(ErrorCode::kInvalidArgument, "bad channel name length");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (channels[i] == channels[j]) {
        throw Error(ErrorCode::kInvalidArgument,
                    "channel '" + channels[i] + "' listed twice");
      }
    }
  }
  LayoutPatches(radius, granularity);
}

std::size_t DescriptorSize(Mapping mapping, bool overlap, int channel_count,
                           int granularity) {
  std::size_t patches = 0;
  for (int g = 1; g <= granularity; ++g) {
    patches += 4 * QuadtreeLayout::QuadrupleCount(g, overlap);
  }
  return static_cast<std::size_t>(BitsPerPatch(mapping)) *
         static_cast<std::size_t>(channel_count) * patches;
}

std::size_t DescriptorSize(const DescriptorConfig& config) {
  return DescriptorSize(config.mapping, config.overlap,
                        static_cast<int>(config.channels.size()),
                        config.granularity);
}

std::string Fingerprint::ToString() const {
  std::ostringstream out;
  out << "family=" << (family == DescriptorFamily::kIib ? "iib" : "point-pair")
      << " G=" << granularity << " mapping=" << MappingName(mapping)
      << " overlap=" << (overlap ? 1 : 0) << " channels=";
  for (std::size_t i = 0; i < channel_names.size(); ++i) {
    out << (i ? "," : "") << channel_names[i];
  }
  out << " radius=" << radius << " mask=" << std::hex << mask_hash;
  return out.str();
}

Fingerprint MakeFingerprint(const DescriptorConfig& config) {
  Fingerprint fp;
  fp.granularity = config.granularity;
  fp.mapping = config.mapping;
  fp.overlap = config.overlap;
  fp.channel_names = config.channels;
  for (const std::string& name : config.channels) {
    fp.kinds.push_back(KindFromName(name));
  }
  fp.radius = config.radius;
  return fp;
}

std::shared_ptr<const DescriptorFormat> MakeFormat(const Fingerprint& fp) {
  if (fp.family != DescriptorFamily::kIib || fp.mask_hash != 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "MakeFormat needs an unmasked IIB fingerprint");
  }
  auto format = std::make_shared<DescriptorFormat>();
  format->fingerprint = fp;
  const std::size_t per_quad =
      4 * static_cast<std::size_t>(BitsPerPatch(fp.mapping)) *
      fp.channel_names.size();
  format->segment_bounds.push_back(0);
  for (int g = 1; g <= fp.granularity; ++g) {
    format->segment_bounds.push_back(
        format->segment_bounds.back() +
        per_quad * QuadtreeLayout::QuadrupleCount(g, fp.overlap));
  }
  format->bits = format->segment_bounds.back();
  return format;
}

std::shared_ptr<const DescriptorFormat> MakeFormat(
    const DescriptorConfig& config) {
  return MakeFormat(MakeFingerprint(config));
}

// ---------------------------------------------------------------------------
// BinaryDescriptor

BinaryDescriptor::BinaryDescriptor(
    std::shared_ptr<const DescriptorFormat> format)
    : format_(std::move(format)), words_((format_->bits + 63) / 64, 0) {}

std::vector<std::uint8_t> BinaryDescriptor::ToBytes() const {
  std::vector<std::uint8_t> out((size() + 7) / 8);
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] = static_cast<std::uint8_t>(words_[k / 8] >> (8 * (k % 8)));
  }
  return out;
}

BinaryDescriptor BinaryDescriptor::FromBytes(
    std::shared_ptr<const DescriptorFormat> format,
    std::span<const std::uint8_t> bytes) {
  BinaryDescriptor d(std::move(format));
  if (bytes.size() != (d.size() + 7) / 8) {
    throw Error(ErrorCode::kFormat,
                "descriptor byte count " + std::to_string(bytes.size()) +
                    " does not match " + std::to_string(d.size()) + " bits");
  }
  for (std::size_t k = 0; k < bytes.size(); ++k) {
    d.words_[k / 8] |= std::uint64_t{bytes[k]} << (8 * (k % 8));
  }
  // Padding bits beyond M are kept clear so word-wise popcounts stay exact.
  if (d.size() % 64 != 0) {
    d.words_.back() &= (std::uint64_t{1} << (d.size() % 64)) - 1;
  }
  return d;
}

// ---------------------------------------------------------------------------
// Mapping entry points

QuadCodes MapMean(const PatchQuad& x) {
  internal::NoCount c;
  return internal::MeanCodes(x, internal::QuadMean(x, c), c);
}
QuadCodes MapMax(const PatchQuad& x) {
  internal::NoCount c;
  return internal::ExtremeCodes(x, true, c);
}
QuadCodes MapMin(const PatchQuad& x) {
  internal::NoCount c;
  return internal::ExtremeCodes(x, false, c);
}
QuadCodes MapQuartile(const PatchQuad& x) {
  internal::NoCount c;
  return internal::QuartileCodes(x, c);
}
QuadCodes MapSort(const PatchQuad& x) {
  internal::NoCount c;
  return internal::SortCodes(x, c);
}
QuadCodes ApplyMapping(Mapping mapping, const PatchQuad& x) {
  internal::NoCount c;
  return internal::Map(mapping, x, c);
}

PatchQuad QuadStats(const ChannelStack& stack, std::size_t channel,
                    const QuadtreeLayout& layout, double cx, double cy,
                    int level, std::size_t q, bool overlap) {
  if (channel >= stack.size()) {
    throw Error(ErrorCode::kInvalidArgument, "channel index out of range");
  }
  if (level < 1 || level > layout.granularity() ||
      q >= QuadtreeLayout::QuadrupleCount(level, overlap)) {
    throw Error(ErrorCode::kInvalidArgument, "quadruple index out of range");
  }
  const IntegralImage& ii = stack[channel].integral;
  PatchQuad x{};
  const auto patches = QuadtreeLayout::QuadruplePatches(level, q, overlap);
  for (int i = 0; i < 4; ++i) {
    x[i] = ii.RegionMean(layout.PatchRect(cx, cy, level, patches[i]));
  }
  return x;
}

// ---------------------------------------------------------------------------
// Extraction

namespace {

// Patch means of every level 0..G of one channel, level-major, row-major.
struct MeansPyramid {
  std::vector<std::size_t> level_offset;
  std::vector<double> means;

  double at(int level, int patch) const {
    return means[level_offset[level] + patch];
  }
};

struct RosGeometry {
  // Level-G boundaries; level g boundary j is level-G boundary j << (G - g).
  std::vector<int> bx;
  std::vector<int> by;
  int granularity;

  int X(int level, int j) const { return bx[j << (granularity - level)]; }
  int Y(int level, int j) const { return by[j << (granularity - level)]; }
};

void FillPyramid(const IntegralImage& ii, const RosGeometry& geo,
                 MeansPyramid& pyramid, OpCounter* counter) {
  const int levels = geo.granularity;
  pyramid.level_offset.resize(levels + 2);
  pyramid.level_offset[0] = 0;
  for (int g = 0; g <= levels; ++g) {
    pyramid.level_offset[g + 1] =
        pyramid.level_offset[g] + QuadtreeLayout::PatchCount(g);
  }
  pyramid.means.resize(pyramid.level_offset[levels + 1]);
  std::size_t k = 0;
  for (int g = 0; g <= levels; ++g) {
    const int n = QuadtreeLayout::GridSize(g);
    for (int r = 0; r < n; ++r) {
      const int y0 = geo.Y(g, r), y1 = geo.Y(g, r + 1);
      for (int c = 0; c < n; ++c) {
        const int x0 = geo.X(g, c), x1 = geo.X(g, c + 1);
        const Rect rect{x0, y0, x1 - x0, y1 - y0};
        const auto [hi, lo] = ii.RegionSumExtended(rect);
        pyramid.means[k++] = internal::DivideToDouble(
            {hi, lo}, static_cast<double>(rect.width) * rect.height);
      }
    }
  }
  if (counter) {
    counter->patch_algebraic += 4 * pyramid.means.size();
  }
}

template <class C>
void EmitBits(const std::vector<MeansPyramid>& pyramids,
              const RosGeometry& geo, const DescriptorConfig& config,
              BinaryDescriptor& out, C& counter) {
  const int bpp = BitsPerPatch(config.mapping);
  std::span<std::uint64_t> words = out.words();
  std::size_t bit = 0;
  auto put = [&](bool v) {
    if (v) words[bit >> 6] |= std::uint64_t{1} << (bit & 63);
    ++bit;
  };
  for (int g = 1; g <= config.granularity; ++g) {
    const int n = QuadtreeLayout::GridSize(g);
    const std::size_t quads = QuadtreeLayout::QuadrupleCount(g, config.overlap);
    for (const MeansPyramid& pyr : pyramids) {
      for (std::size_t q = 0; q < quads; ++q) {
        const auto p = QuadtreeLayout::QuadruplePatches(g, q, config.overlap);
        const PatchQuad x{pyr.at(g, p[0]), pyr.at(g, p[1]), pyr.at(g, p[2]),
                          pyr.at(g, p[3])};
        QuadCodes codes;
        if (config.mapping == Mapping::kMean) {
          double mean;
          const int row = p[0] / n, col = p[0] % n;
          // The parent patch mean equals mean(x) when the four children have
          // equal area; it is then read from the coarser level for free.
          const bool aligned = !config.overlap &&
                               geo.X(g, col + 1) - geo.X(g, col) ==
                                   geo.X(g, col + 2) - geo.X(g, col + 1) &&
                               geo.Y(g, row + 1) - geo.Y(g, row) ==
                                   geo.Y(g, row + 2) - geo.Y(g, row + 1);
          if (aligned) {
            mean = pyr.at(g - 1, static_cast<int>(q));
          } else {
            mean = internal::QuadMean(x, counter);
          }
          codes = internal::MeanCodes(x, mean, counter);
        } else {
          codes = internal::Map(config.mapping, x, counter);
        }
        for (int i = 0; i < 4; ++i) {
          if (bpp == 1) {
            put(codes[i] != 0);
          } else {
            put((codes[i] >> 1) & 1);
            put(codes[i] & 1);
          }
        }
      }
    }
  }
}

}  // namespace

Extractor::Extractor(const ChannelStack& stack, DescriptorConfig config)
    : stack_(&stack), config_(std::move(config)) {
  config_.Validate();
  for (const std::string& name : config_.channels) {
    const int idx = stack.Find(name);
    if (idx < 0) {
      throw Error(ErrorCode::kInvalidArgument,
                  "channel '" + name + "' is not present in the channel stack");
    }
    channel_index_.push_back(static_cast<std::size_t>(idx));
  }
  if (config_.rotation_enabled && stack.Find("gi") < 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "rotated extraction needs the intensity channel 'gi'");
  }
  format_ = MakeFormat(config_);
}

Extraction Extractor::RunUpright(const ChannelStack& stack,
                                 const std::vector<std::size_t>& channels,
                                 double cx, double cy, double radius,
                                 OpCounter* counter) const {
  const int G = config_.granularity;
  const QuadtreeLayout layout(radius, G);
  RosGeometry geo{layout.Boundaries(cx, G), layout.Boundaries(cy, G), G};
  if (geo.bx.front() < 0 || geo.by.front() < 0 ||
      geo.bx.back() > stack.width() || geo.by.back() > stack.height()) {
    return {KeypointStatus::kOutOfBounds, {}};
  }
  std::vector<MeansPyramid> pyramids(channels.size());
  for (std::size_t i = 0; i < channels.size(); ++i) {
    FillPyramid(stack[channels[i]].integral, geo, pyramids[i], counter);
  }
  Extraction result{KeypointStatus::kOk, BinaryDescriptor(format_)};
  if (counter) {
    internal::Count c{counter};
    EmitBits(pyramids, geo, config_, result.descriptor, c);
    ++counter->descriptors;
  } else {
    internal::NoCount c;
    EmitBits(pyramids, geo, config_, result.descriptor, c);
  }
  return result;
}

Extraction Extractor::RunRotated(const Keypoint& kp, OpCounter* counter) const {
  const double r = kp.radius;
  const double angle = *kp.angle;
  const double cos_a = angle == 0.0 ? 1.0 : std::cos(angle);
  const double sin_a = angle == 0.0 ? 0.0 : std::sin(angle);
  // Local buffer: the upright ROS grid plus a one-pixel margin so gradients
  // on the ROS border see real neighbours.
  const int x_lo = static_cast<int>(RoundHalfUp(kp.x - r));
  const int x_hi = static_cast<int>(RoundHalfUp(kp.x + r));
  const int y_lo = static_cast<int>(RoundHalfUp(kp.y - r));
  const int y_hi = static_cast<int>(RoundHalfUp(kp.y + r));
  const int ox = x_lo - 1;
  const int oy = y_lo - 1;
  const int lw = x_hi - x_lo + 2;
  const int lh = y_hi - y_lo + 2;

  const int W = stack_->width();
  const int H = stack_->height();
  // Maps a local pixel centre to source pixel-centre coordinates.
  auto source = [&](int u, int v) {
    const double du = (ox + u + 0.5) - kp.x;
    const double dv = (oy + v + 0.5) - kp.y;
    const double sx = kp.x + cos_a * du - sin_a * dv;
    const double sy = kp.y + sin_a * du + cos_a * dv;
    return std::pair<double, double>{sx - 0.5, sy - 0.5};
  };
  for (int u : {0, lw - 1}) {
    for (int v : {0, lh - 1}) {
      const auto [sc, sr] = source(u, v);
      if (!(sc >= 0.0 && sr >= 0.0 && sc <= W - 1 && sr <= H - 1)) {
        return {KeypointStatus::kOutOfBounds, {}};
      }
    }
  }

  const GrayImage& gray = (*stack_)[stack_->Find("gi")].image.values;
  auto resample = [&](const GrayImage& src) {
    GrayImage local(lw, lh);
    for (int v = 0; v < lh; ++v) {
      for (int u = 0; u < lw; ++u) {
        const auto [sc, sr] = source(u, v);
        local.at(v, u) = SampleBilinear(src, sc, sr);
      }
    }
    return local;
  };
  const GrayImage local_gray = resample(gray);
  std::vector<ChannelImage> defaults = DefaultChannels(local_gray);

  std::vector<Channel> local;
  for (std::size_t i = 0; i < config_.channels.size(); ++i) {
    const std::string& name = config_.channels[i];
    ChannelImage ch;
    const auto it = std::find_if(defaults.begin(), defaults.end(),
                                 [&](const ChannelImage& c) { return c.name == name; });
    if (it != defaults.end()) {
      ch = *it;
    } else {
      const ChannelImage& src = (*stack_)[channel_index_[i]].image;
      ch = ChannelImage{src.kind, src.name, resample(src.values)};
    }
    IntegralImage ii = BuildIntegral(ch);
    local.push_back({std::move(ch), std::move(ii)});
  }
  const ChannelStack local_stack(std::move(local));
  std::vector<std::size_t> identity(config_.channels.size());
  for (std::size_t i = 0; i < identity.size(); ++i) identity[i] = i;
  return RunUpright(local_stack, identity, kp.x - ox, kp.y - oy, r, counter);
}

Extraction Extractor::Run(const Keypoint& kp, OpCounter* counter) const {
  if (!(kp.radius >= static_cast<double>(1 << config_.granularity))) {
    return {KeypointStatus::kRadiusTooSmall, {}};
  }
  if (config_.rotation_enabled && kp.angle.has_value()) {
    return RunRotated(kp, counter);
  }
  return RunUpright(*stack_, channel_index_, kp.x, kp.y, kp.radius, counter);
}

Extraction Extract(const ChannelStack& stack, const Keypoint& kp,
                   const DescriptorConfig& config, OpCounter* counter) {
  return Extractor(stack, config).Run(kp, counter);
}

int ResolveWorkers(int workers) {
  if (workers > 0) return workers;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

DescriptorSet ExtractAll(const ChannelStack& stack,
                         std::span<const Keypoint> keypoints,
                         const DescriptorConfig& config, int workers,
                         OpCounter* counter) {
  const Extractor extractor(stack, config);
  std::vector<Extraction> results(keypoints.size());
  const std::size_t n_workers = std::min<std::size_t>(
      static_cast<std::size_t>(ResolveWorkers(workers)),
      std::max<std::size_t>(keypoints.size(), 1));
  std::vector<OpCounter> counters(n_workers);
  auto work = [&](std::size_t w) {
    for (std::size_t i = w; i < keypoints.size(); i += n_workers) {
      results[i] = extractor.Run(keypoints[i], counter ? &counters[w] : nullptr);
    }
  };
  if (n_workers <= 1) {
    work(0);
  } else {
    std::vector<std::jthread> threads;
    for (std::size_t w = 0; w < n_workers; ++w) threads.emplace_back(work, w);
  }
  if (counter) {
    for (const OpCounter& c : counters) {
      counter->algebraic += c.algebraic;
      counter->relational += c.relational;
      counter->patch_algebraic += c.patch_algebraic;
      counter->descriptors += c.descriptors;
    }
  }

  DescriptorSet set;
  set.format = extractor.format();
  for (std::size_t i = 0; i < results.size(); ++i) {
    if (results[i].ok()) {
      set.keypoints.push_back(keypoints[i]);
      set.descriptors.push_back(std::move(results[i].descriptor));
      set.source_index.push_back(static_cast<std::uint32_t>(i));
    } else {
      set.skipped.emplace_back(static_cast<std::uint32_t>(i), results[i].status);
    }
  }
  return set;
}

std::vector<Keypoint> GridKeypoints(int width, int height, int cols, int rows,
                                    double radius) {
  if (cols < 1 || rows < 1) {
    throw Error(ErrorCode::kInvalidArgument, "grid needs at least 1x1 points");
  }
  // Two extra pixels keep the rotated-path margin inside the image too.
  const double lo_x = std::ceil(radius) + 2.0;
  const double hi_x = std::floor(width - radius) - 2.0;
  const double lo_y = std::ceil(radius) + 2.0;
  const double hi_y = std::floor(height - radius) - 2.0;
  if (hi_x < lo_x || hi_y < lo_y) {
    std::ostringstream msg;
    msg << "image " << width << "x" << height
        << " is too small for grid keypoints of radius " << radius;
    throw Error(ErrorCode::kInvalidArgument, msg.str());
  }
  auto place = [](double lo, double hi, int i, int count) {
    if (count == 1) return RoundHalfUp((lo + hi) / 2.0);
    return RoundHalfUp(lo + (hi - lo) * i / (count - 1));
  };
  std::vector<Keypoint> out;
  out.reserve(static_cast<std::size_t>(cols) * rows);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      out.push_back({place(lo_x, hi_x, c, cols), place(lo_y, hi_y, r, rows),
                     radius, std::nullopt});
    }
  }
  return out;
}

}  // namespace iib
