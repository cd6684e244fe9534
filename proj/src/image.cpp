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

#include "iib/image.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "double_double.hpp"
#include "iib/error.hpp"

namespace iib {

using internal::DoubleDouble;

GrayImage::GrayImage(int width, int height, double fill)
    : width_(width), height_(height) {
  if (width < 1 || height < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "image dimensions must be positive, got " +
                    std::to_string(width) + "x" + std::to_string(height));
  }
  pixels_.assign(static_cast<std::size_t>(width) * height, fill);
}

GrayImage::GrayImage(int width, int height, std::vector<double> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  if (width < 1 || height < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "image dimensions must be positive, got " +
                    std::to_string(width) + "x" + std::to_string(height));
  }
  if (pixels_.size() != static_cast<std::size_t>(width) * height) {
    throw Error(ErrorCode::kInvalidArgument,
                "pixel count " + std::to_string(pixels_.size()) +
                    " does not match " + std::to_string(width) + "x" +
                    std::to_string(height));
  }
}

const char* ChannelKindName(ChannelKind kind) {
  switch (kind) {
    case ChannelKind::kGradX:
      return "gx";
    case ChannelKind::kGradY:
      return "gy";
    case ChannelKind::kGradOrientation:
      return "go";
    case ChannelKind::kIntensity:
      return "gi";
    case ChannelKind::kExtra:
      return "extra";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// IntegralImage

IntegralImage::IntegralImage(const GrayImage& channel)
    : width_(channel.width()), height_(channel.height()) {
  const std::size_t n = static_cast<std::size_t>(width_ + 1) * (height_ + 1);
  hi_.assign(n, 0.0);
  lo_.assign(n, 0.0);
  for (int r = 0; r < height_; ++r) {
    DoubleDouble row_sum;
    for (int c = 0; c < width_; ++c) {
      row_sum = internal::Add(row_sum, {channel.at(r, c), 0.0});
      const std::size_t above = Index(r, c + 1);
      const DoubleDouble value =
          internal::Add({hi_[above], lo_[above]}, row_sum);
      const std::size_t here = Index(r + 1, c + 1);
      hi_[here] = value.hi;
      lo_[here] = value.lo;
    }
  }
}

double IntegralImage::at(int r, int c) const {
  const std::size_t i = Index(r, c);
  return hi_[i] + lo_[i];
}

bool IntegralImage::Contains(const Rect& rect) const {
  return rect.width >= 1 && rect.height >= 1 && rect.x >= 0 && rect.y >= 0 &&
         rect.x + rect.width <= width_ && rect.y + rect.height <= height_;
}

void IntegralImage::CheckRect(const Rect& rect) const {
  if (!Contains(rect)) {
    std::ostringstream msg;
    msg << "rect (x=" << rect.x << ", y=" << rect.y << ", w=" << rect.width
        << ", h=" << rect.height << ") is outside image bounds " << width_
        << "x" << height_;
    throw Error(ErrorCode::kOutOfBounds, msg.str());
  }
}

std::pair<double, double> IntegralImage::RegionSumExtended(
    const Rect& rect) const {
  const std::size_t a = Index(rect.y, rect.x);
  const std::size_t b = Index(rect.y, rect.x + rect.width);
  const std::size_t c = Index(rect.y + rect.height, rect.x);
  const std::size_t d = Index(rect.y + rect.height, rect.x + rect.width);
  DoubleDouble s = internal::Sub({hi_[d], lo_[d]}, {hi_[b], lo_[b]});
  s = internal::Sub(s, {hi_[c], lo_[c]});
  s = internal::Add(s, {hi_[a], lo_[a]});
  return {s.hi, s.lo};
}

double IntegralImage::RegionSum(const Rect& rect) const {
  CheckRect(rect);
  const auto [hi, lo] = RegionSumExtended(rect);
  return hi + lo;
}

double IntegralImage::RegionMean(const Rect& rect) const {
  CheckRect(rect);
  const auto [hi, lo] = RegionSumExtended(rect);
  return internal::DivideToDouble({hi, lo},
                                  static_cast<double>(rect.width) * rect.height);
}

IntegralImage BuildIntegral(const ChannelImage& channel) {
  return IntegralImage(channel.values);
}

// ---------------------------------------------------------------------------
// ChannelStack

ChannelStack::ChannelStack(std::vector<Channel> channels)
    : channels_(std::move(channels)) {
  if (channels_.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "channel stack needs >= 1 channel");
  }
  width_ = channels_.front().image.width();
  height_ = channels_.front().image.height();
  for (const Channel& ch : channels_) {
    if (ch.image.width() != width_ || ch.image.height() != height_) {
      throw Error(ErrorCode::kInvalidArgument,
                  "channel '" + ch.image.name + "' has size " +
                      std::to_string(ch.image.width()) + "x" +
                      std::to_string(ch.image.height()) + ", expected " +
                      std::to_string(width_) + "x" + std::to_string(height_));
    }
  }
}

int ChannelStack::Find(const std::string& name) const {
  for (std::size_t i = 0; i < channels_.size(); ++i) {
    if (channels_[i].image.name == name) return static_cast<int>(i);
  }
  return -1;
}

// ---------------------------------------------------------------------------
// Channels

namespace {

constexpr double kGradientRoundOff = 1e-12;

}  // namespace

SignedGradients Sobel(const GrayImage& image) {
  const int w = image.width();
  const int h = image.height();
  SignedGradients out{GrayImage(w, h), GrayImage(w, h)};
  auto px = [&](int r, int c) {
    r = std::clamp(r, 0, h - 1);
    c = std::clamp(c, 0, w - 1);
    return image.at(r, c);
  };
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const double tl = px(r - 1, c - 1), tc = px(r - 1, c), tr = px(r - 1, c + 1);
      const double ml = px(r, c - 1), mr = px(r, c + 1);
      const double bl = px(r + 1, c - 1), bc = px(r + 1, c), br = px(r + 1, c + 1);
      const double gx = ((tr - tl) + 2.0 * (mr - ml)) + (br - bl);
      const double gy = ((bl - tl) + 2.0 * (bc - tc)) + (br - tr);
      // Responses at round-off level of the kernel inputs are exact zeros;
      // this keeps orientation stable under affine intensity changes.
      const double sx = std::abs(tl) + std::abs(tr) + 2.0 * (std::abs(ml) + std::abs(mr)) +
                        std::abs(bl) + std::abs(br);
      const double sy = std::abs(tl) + std::abs(bl) + 2.0 * (std::abs(tc) + std::abs(bc)) +
                        std::abs(tr) + std::abs(br);
      out.gx.at(r, c) = std::abs(gx) <= kGradientRoundOff * sx ? 0.0 : gx;
      out.gy.at(r, c) = std::abs(gy) <= kGradientRoundOff * sy ? 0.0 : gy;
    }
  }
  return out;
}

double NormalizedOrientation(double gx, double gy) {
  if (gx == 0.0 && gy == 0.0) return 0.5;
  const double angle = std::atan2(gy, gx);  // (-pi, pi]
  const double v = (std::numbers::pi - angle) / (2.0 * std::numbers::pi);
  return v >= 1.0 ? 0.0 : v;  // guards angle rounding to exactly -pi
}

std::vector<ChannelImage> DefaultChannels(const GrayImage& image) {
  const SignedGradients g = Sobel(image);
  const int w = image.width();
  const int h = image.height();
  GrayImage mag_x(w, h), mag_y(w, h), orient(w, h);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const double gx = g.gx.at(r, c);
      const double gy = g.gy.at(r, c);
      mag_x.at(r, c) = std::abs(gx);
      mag_y.at(r, c) = std::abs(gy);
      orient.at(r, c) = NormalizedOrientation(gx, gy);
    }
  }
  std::vector<ChannelImage> out;
  out.push_back({ChannelKind::kGradX, "gx", std::move(mag_x)});
  out.push_back({ChannelKind::kGradY, "gy", std::move(mag_y)});
  out.push_back({ChannelKind::kGradOrientation, "go", std::move(orient)});
  out.push_back({ChannelKind::kIntensity, "gi", image});
  return out;
}

ChannelStack ComputeChannels(
    const GrayImage& image,
    const std::vector<std::pair<std::string, GrayImage>>& extras) {
  for (const auto& [name, extra] : extras) {
    if (extra.width() != image.width() || extra.height() != image.height()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "extra channel '" + name + "' is " +
                      std::to_string(extra.width()) + "x" +
                      std::to_string(extra.height()) + " but the image is " +
                      std::to_string(image.width()) + "x" +
                      std::to_string(image.height()));
    }
  }
  std::vector<Channel> channels;
  for (ChannelImage& ch : DefaultChannels(image)) {
    IntegralImage ii = BuildIntegral(ch);
    channels.push_back({std::move(ch), std::move(ii)});
  }
  for (const auto& [name, extra] : extras) {
    ChannelImage ch{ChannelKind::kExtra, name, extra};
    IntegralImage ii = BuildIntegral(ch);
    channels.push_back({std::move(ch), std::move(ii)});
  }
  return ChannelStack(std::move(channels));
}

double SampleBilinear(const GrayImage& image, double col, double row) {
  const int w = image.width();
  const int h = image.height();
  const double fc = std::floor(col);
  const double fr = std::floor(row);
  const double tc = col - fc;
  const double tr = row - fr;
  const int c0 = std::clamp(static_cast<int>(fc), 0, w - 1);
  const int r0 = std::clamp(static_cast<int>(fr), 0, h - 1);
  const int c1 = std::clamp(static_cast<int>(fc) + 1, 0, w - 1);
  const int r1 = std::clamp(static_cast<int>(fr) + 1, 0, h - 1);
  // Exact hits skip the blend so integer positions reproduce pixels exactly.
  if (tc == 0.0 && tr == 0.0) return image.at(r0, c0);
  const double top = image.at(r0, c0) * (1.0 - tc) + image.at(r0, c1) * tc;
  const double bottom = image.at(r1, c0) * (1.0 - tc) + image.at(r1, c1) * tc;
  return top * (1.0 - tr) + bottom * tr;
}

}  // namespace iib
