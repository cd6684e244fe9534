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

#ifndef IIB_IMAGE_HPP_
#define IIB_IMAGE_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace iib {

// Row-major scalar raster. Values are doubles so that affine intensity
// changes can be expressed without requantization.
class GrayImage {
 public:
  GrayImage() = default;
  GrayImage(int width, int height, double fill = 0.0);
  GrayImage(int width, int height, std::vector<double> pixels);

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return pixels_.empty(); }

  double at(int row, int col) const { return pixels_[Index(row, col)]; }
  double& at(int row, int col) { return pixels_[Index(row, col)]; }

  std::span<const double> pixels() const { return pixels_; }
  std::span<double> pixels() { return pixels_; }

 private:
  std::size_t Index(int row, int col) const {
    return static_cast<std::size_t>(row) * width_ + col;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<double> pixels_;
};

enum class ChannelKind : std::uint8_t {
  kGradX = 0,
  kGradY = 1,
  kGradOrientation = 2,
  kIntensity = 3,
  kExtra = 4,
};

// Short CLI name ("gx", "gy", "go", "gi") for the built-in kinds.
const char* ChannelKindName(ChannelKind kind);

struct ChannelImage {
  ChannelKind kind = ChannelKind::kIntensity;
  std::string name;  // built-in short name, or the user name of an extra
  GrayImage values;

  int width() const { return values.width(); }
  int height() const { return values.height(); }
};

// Pixel rectangle: columns [x, x + width), rows [y, y + height).
struct Rect {
  int x = 0;
  int y = 0;
  int width = 0;
  int height = 0;
};

// Summed-area table with (width + 1) x (height + 1) entries. Entries are
// kept as an unevaluated double-double (hi + lo) so that region sums of
// real-valued channels stay accurate far below one ulp of the patch mean;
// integer channels are summed exactly.
class IntegralImage {
 public:
  IntegralImage() = default;
  explicit IntegralImage(const GrayImage& channel);

  int width() const { return width_; }
  int height() const { return height_; }

  // Sum of all values with row < r and col < c.
  double at(int r, int c) const;

  bool Contains(const Rect& rect) const;

  // Throws iib::Error(kOutOfBounds) naming the rect and the image bounds.
  double RegionSum(const Rect& rect) const;
  double RegionMean(const Rect& rect) const;

  // Unchecked variants for hot loops whose callers validated the bounds.
  // The sum is returned as an unevaluated pair (hi, lo).
  std::pair<double, double> RegionSumExtended(const Rect& rect) const;

 private:
  void CheckRect(const Rect& rect) const;
  std::size_t Index(int r, int c) const {
    return static_cast<std::size_t>(r) * (width_ + 1) + c;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<double> hi_;
  std::vector<double> lo_;
};

IntegralImage BuildIntegral(const ChannelImage& channel);

struct Channel {
  ChannelImage image;
  IntegralImage integral;
};

// Immutable per-image stack of N channels with their integral images. The
// default order is [grad_x, grad_y, grad_orientation, intensity]; extras
// follow in registration order.
class ChannelStack {
 public:
  ChannelStack() = default;
  explicit ChannelStack(std::vector<Channel> channels);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return channels_.size(); }
  const Channel& operator[](std::size_t i) const { return channels_[i]; }
  const std::vector<Channel>& channels() const { return channels_; }

  // Index of the channel with the given short name, or -1.
  int Find(const std::string& name) const;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<Channel> channels_;
};

// Signed Sobel 3x3 responses with replicate-edge borders. Responses no larger
// than 1e-12 times the absolute kernel input sum are set to exactly 0.
struct SignedGradients {
  GrayImage gx;
  GrayImage gy;
};
SignedGradients Sobel(const GrayImage& image);

// atan2(gy, gx) mapped linearly from (-pi, pi] onto [0, 1) as (pi - a) / 2pi.
// Zero gradient is treated as angle 0.
double NormalizedOrientation(double gx, double gy);

// The four default channels (no integrals), in default order.
std::vector<ChannelImage> DefaultChannels(const GrayImage& image);

// Default channels plus `extras`, each paired with its integral image.
// Throws kInvalidArgument naming the extra whose size does not match.
ChannelStack ComputeChannels(
    const GrayImage& image,
    const std::vector<std::pair<std::string, GrayImage>>& extras = {});

// Bilinear sample at continuous pixel-center coordinates (col, row), where
// integer coordinates hit pixel centers. Neighbours are clamped to the image.
double SampleBilinear(const GrayImage& image, double col, double row);

// PGM (P2/P5) and PPM (P3/P6) reader. Colour input is reduced to luma with
// the BT.601 weights. 16-bit maxval files are scaled to [0, 255].
GrayImage LoadImage(const std::string& path);
// Binary PGM, values rounded and clipped to [0, 255].
void SavePgm(const GrayImage& image, const std::string& path);

}  // namespace iib

#endif  // IIB_IMAGE_HPP_
