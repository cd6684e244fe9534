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

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>

#include "iib/error.hpp"
#include "iib/image.hpp"

namespace iib {
namespace {

constexpr double kLumaR = 0.299;
constexpr double kLumaG = 0.587;
constexpr double kLumaB = 0.114;

class PnmReader {
 public:
  PnmReader(std::vector<unsigned char> data, std::string path)
      : data_(std::move(data)), path_(std::move(path)) {}

  [[noreturn]] void Fail(const std::string& what) const {
    throw Error(ErrorCode::kFormat, path_ + ": " + what);
  }

  void SkipSpaceAndComments() {
    while (pos_ < data_.size()) {
      if (data_[pos_] == '#') {
        while (pos_ < data_.size() && data_[pos_] != '\n') ++pos_;
      } else if (std::isspace(data_[pos_])) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  long ReadInt() {
    SkipSpaceAndComments();
    if (pos_ >= data_.size() || !std::isdigit(data_[pos_])) {
      Fail("expected an integer at byte " + std::to_string(pos_));
    }
    long v = 0;
    while (pos_ < data_.size() && std::isdigit(data_[pos_])) {
      v = v * 10 + (data_[pos_] - '0');
      if (v > 1'000'000'000) Fail("integer overflow in header");
      ++pos_;
    }
    return v;
  }

  // Binary payload starts after exactly one whitespace byte.
  void SkipSingleSeparator() {
    if (pos_ >= data_.size() || !std::isspace(data_[pos_])) {
      Fail("missing separator before binary raster");
    }
    ++pos_;
  }

  unsigned ReadBinarySample(bool wide) {
    const std::size_t need = wide ? 2 : 1;
    if (pos_ + need > data_.size()) Fail("truncated raster");
    unsigned v = data_[pos_];
    if (wide) v = (v << 8) | data_[pos_ + 1];
    pos_ += need;
    return v;
  }

  std::string ReadMagic() {
    if (data_.size() < 2 || data_[0] != 'P') Fail("not a PNM file");
    pos_ = 2;
    return std::string(data_.begin(), data_.begin() + 2);
  }

 private:
  std::vector<unsigned char> data_;
  std::string path_;
  std::size_t pos_ = 0;
};

}  // namespace

GrayImage LoadImage(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open image '" + path + "'");
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  PnmReader reader(std::move(bytes), path);
  const std::string magic = reader.ReadMagic();
  const bool ascii = magic == "P2" || magic == "P3";
  const bool colour = magic == "P3" || magic == "P6";
  if (magic != "P2" && magic != "P3" && magic != "P5" && magic != "P6") {
    reader.Fail("unsupported PNM variant " + magic);
  }
  const long w = reader.ReadInt();
  const long h = reader.ReadInt();
  const long maxval = reader.ReadInt();
  if (w < 1 || h < 1) reader.Fail("bad dimensions");
  if (maxval < 1 || maxval > 65535) reader.Fail("bad maxval");
  if (!ascii) reader.SkipSingleSeparator();
  const bool wide = maxval > 255;
  const double scale = 255.0 / static_cast<double>(maxval);

  auto next = [&]() -> double {
    if (ascii) return static_cast<double>(reader.ReadInt());
    return static_cast<double>(reader.ReadBinarySample(wide));
  };

  GrayImage image(static_cast<int>(w), static_cast<int>(h));
  for (double& px : image.pixels()) {
    double v;
    if (colour) {
      const double r = next(), g = next(), b = next();
      v = kLumaR * r + kLumaG * g + kLumaB * b;
    } else {
      v = next();
    }
    v = maxval == 255 ? v : v * scale;
    // Luma is requantized to 8 bits, as a grayscale decoder would store it.
    px = colour ? std::clamp(std::round(v), 0.0, 255.0) : v;
  }
  return image;
}

void SavePgm(const GrayImage& image, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write image '" + path + "'");
  out << "P5\n" << image.width() << " " << image.height() << "\n255\n";
  std::vector<unsigned char> raster;
  raster.reserve(image.pixels().size());
  for (double v : image.pixels()) {
    raster.push_back(
        static_cast<unsigned char>(std::clamp(std::round(v), 0.0, 255.0)));
  }
  out.write(reinterpret_cast<const char*>(raster.data()),
            static_cast<std::streamsize>(raster.size()));
  if (!out) throw Error(ErrorCode::kIo, "write failed for '" + path + "'");
}

}  // namespace iib
