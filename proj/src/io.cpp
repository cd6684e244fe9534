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

#include "iib/io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include "iib/error.hpp"

namespace iib {
namespace {

static_assert(std::endian::native == std::endian::little,
              "descriptor files assume a little-endian host");

constexpr char kMagic[4] = {'I', 'I', 'B', 'D'};
constexpr std::uint16_t kVersion = 1;

std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double ParseField(const std::string& field, const std::string& where) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(field, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != field.size() || !std::isfinite(v)) {
    throw Error(ErrorCode::kFormat, where + ": bad number '" + field + "'");
  }
  return v;
}

template <class T>
void Put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

class Reader {
 public:
  Reader(std::istream& in, const std::string& path) : in_(in), path_(path) {}

  template <class T>
  T Get() {
    T v{};
    Bytes(&v, sizeof(T));
    return v;
  }
  void Bytes(void* dst, std::size_t n) {
    in_.read(static_cast<char*>(dst), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) {
      throw Error(ErrorCode::kFormat, path_ + ": truncated descriptor file");
    }
  }
  [[noreturn]] void Fail(const std::string& what) const {
    throw Error(ErrorCode::kFormat, path_ + ": " + what);
  }

 private:
  std::istream& in_;
  const std::string& path_;
};

}  // namespace

std::vector<Keypoint> LoadKeypoints(const std::string& path,
                                    double default_radius) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open keypoints '" + path + "'");
  std::vector<Keypoint> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = Trim(line);
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(Trim(f));
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    if (out.empty() && !fields.empty() && fields[0] == "x") continue;
    const std::string where = path + ":" + std::to_string(line_no);
    if (fields.size() < 2 || fields.size() > 4) {
      throw Error(ErrorCode::kFormat, where + ": expected 2 to 4 fields");
    }
    Keypoint kp;
    kp.x = ParseField(fields[0], where);
    kp.y = ParseField(fields[1], where);
    kp.radius = default_radius;
    if (fields.size() > 2 && !fields[2].empty()) {
      kp.radius = ParseField(fields[2], where);
    }
    if (fields.size() > 3 && !fields[3].empty()) {
      kp.angle = ParseField(fields[3], where);
    }
    out.push_back(kp);
  }
  return out;
}

void SaveKeypoints(const std::vector<Keypoint>& keypoints,
                   const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write '" + path + "'");
  out.precision(17);
  out << "x,y,radius,angle_rad\n";
  for (const Keypoint& kp : keypoints) {
    out << kp.x << ',' << kp.y << ',' << kp.radius << ',';
    if (kp.angle) out << *kp.angle;
    out << '\n';
  }
  if (!out) throw Error(ErrorCode::kIo, "write failed for '" + path + "'");
}

void SaveDescriptorSet(const DescriptorSet& set, const std::string& path) {
  if (!set.format) {
    throw Error(ErrorCode::kInvalidArgument, "descriptor set has no format");
  }
  const DescriptorFormat& fmt = *set.format;
  const Fingerprint& fp = fmt.fingerprint;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write '" + path + "'");
  out.write(kMagic, 4);
  Put<std::uint16_t>(out, kVersion);
  Put<std::uint8_t>(out, static_cast<std::uint8_t>(fp.family));
  Put<std::uint8_t>(out, static_cast<std::uint8_t>(fp.granularity));
  Put<std::uint8_t>(out, static_cast<std::uint8_t>(fp.mapping));
  Put<std::uint8_t>(out, fp.overlap ? 1 : 0);
  Put<std::uint8_t>(out, static_cast<std::uint8_t>(fp.channel_names.size()));
  for (std::size_t c = 0; c < fp.channel_names.size(); ++c) {
    const std::string& name = fp.channel_names[c];
    if (name.size() > 255) {
      throw Error(ErrorCode::kInvalidArgument, "channel name too long");
    }
    Put<std::uint8_t>(out, static_cast<std::uint8_t>(fp.kinds[c]));
    Put<std::uint8_t>(out, static_cast<std::uint8_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
  }
  Put<double>(out, fp.radius);
  Put<std::uint64_t>(out, fp.mask_hash);
  Put<std::uint8_t>(out, static_cast<std::uint8_t>(fmt.segment_count()));
  for (std::size_t b : fmt.segment_bounds) {
    Put<std::uint32_t>(out, static_cast<std::uint32_t>(b));
  }
  Put<std::uint32_t>(out, static_cast<std::uint32_t>(set.size()));
  Put<std::uint32_t>(out, static_cast<std::uint32_t>(fmt.bits));
  for (std::size_t i = 0; i < set.size(); ++i) {
    const Keypoint& kp = set.keypoints[i];
    Put<double>(out, kp.x);
    Put<double>(out, kp.y);
    Put<double>(out, kp.radius);
    Put<double>(out, kp.angle ? *kp.angle
                              : std::numeric_limits<double>::quiet_NaN());
    Put<std::uint32_t>(out, i < set.source_index.size()
                                ? set.source_index[i]
                                : static_cast<std::uint32_t>(i));
    const std::vector<std::uint8_t> bytes = set.descriptors[i].ToBytes();
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
  }
  if (!out) throw Error(ErrorCode::kIo, "write failed for '" + path + "'");
}

DescriptorSet LoadDescriptorSet(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path + "'");
  Reader r(in, path);
  char magic[4];
  r.Bytes(magic, 4);
  if (std::memcmp(magic, kMagic, 4) != 0) r.Fail("not an IIBD file");
  if (r.Get<std::uint16_t>() != kVersion) r.Fail("unsupported version");

  auto format = std::make_shared<DescriptorFormat>();
  Fingerprint& fp = format->fingerprint;
  const auto family = r.Get<std::uint8_t>();
  if (family > 1) r.Fail("unknown descriptor family");
  fp.family = static_cast<DescriptorFamily>(family);
  fp.granularity = r.Get<std::uint8_t>();
  const auto mapping = r.Get<std::uint8_t>();
  if (mapping > 4) r.Fail("unknown mapping id");
  fp.mapping = static_cast<Mapping>(mapping);
  fp.overlap = r.Get<std::uint8_t>() != 0;
  const int channels = r.Get<std::uint8_t>();
  for (int c = 0; c < channels; ++c) {
    const auto kind = r.Get<std::uint8_t>();
    if (kind > static_cast<std::uint8_t>(ChannelKind::kExtra)) {
      r.Fail("unknown channel kind");
    }
    std::string name(r.Get<std::uint8_t>(), '\0');
    r.Bytes(name.data(), name.size());
    fp.kinds.push_back(static_cast<ChannelKind>(kind));
    fp.channel_names.push_back(std::move(name));
  }
  fp.radius = r.Get<double>();
  fp.mask_hash = r.Get<std::uint64_t>();
  const int segments = r.Get<std::uint8_t>();
  for (int s = 0; s <= segments; ++s) {
    format->segment_bounds.push_back(r.Get<std::uint32_t>());
  }
  const std::uint32_t count = r.Get<std::uint32_t>();
  format->bits = r.Get<std::uint32_t>();
  for (int s = 0; s < segments; ++s) {
    if (format->segment_bounds[s] > format->segment_bounds[s + 1]) {
      r.Fail("segment bounds not ascending");
    }
  }
  if (format->segment_bounds.front() != 0 ||
      format->segment_bounds.back() != format->bits) {
    r.Fail("segment bounds do not cover the descriptor");
  }
  if (fp.family == DescriptorFamily::kIib && fp.mask_hash == 0 &&
      format->bits != DescriptorSize(fp.mapping, fp.overlap, channels,
                                     fp.granularity)) {
    r.Fail("bit count does not match the fingerprint");
  }

  DescriptorSet set;
  set.format = format;
  const std::size_t nbytes = (format->bits + 7) / 8;
  std::vector<std::uint8_t> bytes(nbytes);
  for (std::uint32_t i = 0; i < count; ++i) {
    Keypoint kp;
    kp.x = r.Get<double>();
    kp.y = r.Get<double>();
    kp.radius = r.Get<double>();
    const double angle = r.Get<double>();
    if (!std::isnan(angle)) kp.angle = angle;
    set.keypoints.push_back(kp);
    set.source_index.push_back(r.Get<std::uint32_t>());
    r.Bytes(bytes.data(), nbytes);
    set.descriptors.push_back(BinaryDescriptor::FromBytes(format, bytes));
  }
  if (in.peek() != std::char_traits<char>::eof()) r.Fail("trailing bytes");
  return set;
}

}  // namespace iib
