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

#include "iib/selection.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <random>

#include "iib/error.hpp"
#include "iib/matching.hpp"
#include "json.hpp"

namespace iib {

std::vector<QuadrupleSpan> EnumerateQuadruples(const DescriptorFormat& format) {
  const Fingerprint& fp = format.fingerprint;
  if (fp.family != DescriptorFamily::kIib || fp.mask_hash != 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "quadruples are defined for unmasked IIB descriptors only");
  }
  const std::size_t width = 4 * static_cast<std::size_t>(BitsPerPatch(fp.mapping));
  std::vector<QuadrupleSpan> out;
  std::size_t offset = 0;
  for (int g = 1; g <= fp.granularity; ++g) {
    const std::size_t quads = QuadtreeLayout::QuadrupleCount(g, fp.overlap);
    for (int c = 0; c < static_cast<int>(fp.channel_names.size()); ++c) {
      for (std::size_t q = 0; q < quads; ++q) {
        out.push_back({{g, c, static_cast<std::uint32_t>(q)}, offset, width});
        offset += width;
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Training set

std::vector<TrainingPair> BuildTrainingSet(
    std::span<const ImagePairSample> pairs, const DescriptorConfig& config,
    const TrainingSetOptions& options) {
  std::mt19937_64 rng(options.seed);
  std::vector<TrainingPair> out;
  std::size_t positives = 0;
  for (const ImagePairSample& sample : pairs) {
    const ChannelStack ref_stack = ComputeChannels(sample.reference);
    const ChannelStack test_stack = ComputeChannels(sample.test);
    const std::vector<Keypoint> grid =
        GridKeypoints(sample.reference.width(), sample.reference.height(),
                      options.grid_cols, options.grid_rows, config.radius);
    const std::vector<Keypoint> projected =
        ProjectKeypoints(grid, sample.homography);
    const DescriptorSet ref =
        ExtractAll(ref_stack, grid, config, options.workers);
    const DescriptorSet test =
        ExtractAll(test_stack, projected, config, options.workers);

    // Keypoints accepted on both sides.
    std::vector<std::size_t> ref_pos(grid.size(), SIZE_MAX);
    for (std::size_t i = 0; i < ref.size(); ++i) ref_pos[ref.source_index[i]] = i;
    struct Positive {
      std::size_t ref;
      std::size_t test;
    };
    std::vector<Positive> pos;
    for (std::size_t j = 0; j < test.size(); ++j) {
      const std::size_t r = ref_pos[test.source_index[j]];
      if (r != SIZE_MAX) pos.push_back({r, j});
    }
    if (pos.size() < 2) continue;

    std::uniform_int_distribution<std::size_t> pick(0, pos.size() - 1);
    for (std::size_t k = 0; k < pos.size(); ++k) {
      const Keypoint& anchor = test.keypoints[pos[k].test];
      std::size_t m = SIZE_MAX;
      for (int attempt = 0; attempt < 64 && m == SIZE_MAX; ++attempt) {
        const std::size_t cand = pick(rng);
        const Keypoint& other = test.keypoints[pos[cand].test];
        if (std::hypot(other.x - anchor.x, other.y - anchor.y) > options.epsilon) {
          m = cand;
        }
      }
      if (m == SIZE_MAX) continue;
      out.push_back({ref.descriptors[pos[k].ref], test.descriptors[pos[k].test], true});
      out.push_back({ref.descriptors[pos[k].ref], test.descriptors[pos[m].test], false});
      ++positives;
    }
  }
  if (positives < options.min_positives) {
    throw Error(ErrorCode::kInsufficientData,
                "only " + std::to_string(positives) +
                    " positive training pairs, need at least " +
                    std::to_string(options.min_positives));
  }
  return out;
}

// ---------------------------------------------------------------------------
// AdaBoost

AdaBoostResult AdaBoostTrain(std::span<const TrainingPair> pairs, int rounds) {
  if (pairs.empty()) {
    throw Error(ErrorCode::kInsufficientData, "no training pairs");
  }
  if (rounds < 1) {
    throw Error(ErrorCode::kInvalidArgument, "rounds must be >= 1");
  }
  bool has_pos = false, has_neg = false;
  for (const TrainingPair& p : pairs) {
    CheckCompatible(p.a, p.b);
    CheckCompatible(pairs.front().a, p.a);
    (p.positive ? has_pos : has_neg) = true;
  }
  if (!has_pos || !has_neg) {
    throw Error(ErrorCode::kInsufficientData,
                "training needs both positive and negative pairs");
  }
  const std::vector<QuadrupleSpan> quads =
      EnumerateQuadruples(pairs.front().a.format());
  const std::size_t n = pairs.size();
  const std::size_t nq = quads.size();
  const int width = static_cast<int>(quads.front().bit_count);

  // distance[q * n + i]
  std::vector<std::uint8_t> distance(nq * n);
  for (std::size_t q = 0; q < nq; ++q) {
    const std::size_t begin = quads[q].bit_offset;
    const std::size_t end = begin + quads[q].bit_count;
    for (std::size_t i = 0; i < n; ++i) {
      distance[q * n + i] = static_cast<std::uint8_t>(
          HammingBits(pairs[i].a.words(), pairs[i].b.words(), begin, end));
    }
  }

  AdaBoostResult result;
  result.weights.reserve(nq);
  for (const QuadrupleSpan& s : quads) result.weights.push_back({s.id, 0.0});

  std::vector<double> w(n, 1.0 / static_cast<double>(n));
  std::vector<double> score(n, 0.0);
  std::vector<double> pos_hist(width + 1), neg_hist(width + 1);
  double loss_bound = 1.0;
  result.stop_reason = "round limit reached";

  for (int round = 0; round < rounds; ++round) {
    double best_err = 2.0;
    std::size_t best_q = 0;
    int best_theta = -1;
    for (std::size_t q = 0; q < nq; ++q) {
      std::fill(pos_hist.begin(), pos_hist.end(), 0.0);
      std::fill(neg_hist.begin(), neg_hist.end(), 0.0);
      double pos_total = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const std::uint8_t d = distance[q * n + i];
        if (pairs[i].positive) {
          pos_hist[d] += w[i];
          pos_total += w[i];
        } else {
          neg_hist[d] += w[i];
        }
      }
      // theta = -1 predicts every pair negative.
      double err = pos_total;
      if (err < best_err) {
        best_err = err;
        best_q = q;
        best_theta = -1;
      }
      for (int theta = 0; theta <= width; ++theta) {
        err += neg_hist[theta] - pos_hist[theta];
        if (err < best_err - 1e-15) {
          best_err = err;
          best_q = q;
          best_theta = theta;
        }
      }
    }
    if (best_err >= 0.5 - 1e-12) {
      result.stop_reason = "no weak learner better than chance";
      break;
    }
    const double eps = std::max(best_err, 1e-10);
    const double alpha = 0.5 * std::log((1.0 - eps) / eps);
    double z = 0.0;
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double h = distance[best_q * n + i] <= best_theta ? 1.0 : -1.0;
      const double y = pairs[i].positive ? 1.0 : -1.0;
      w[i] *= std::exp(-alpha * y * h);
      z += w[i];
      score[i] += alpha * h;
      if ((score[i] > 0.0 ? 1.0 : -1.0) != y) ++wrong;
    }
    for (double& wi : w) wi /= z;
    loss_bound *= z;
    result.weights[best_q].weight += alpha;
    result.rounds.push_back({quads[best_q].id, best_theta, best_err, alpha,
                             loss_bound,
                             static_cast<double>(wrong) / static_cast<double>(n)});
    if (best_err <= 1e-10) {
      result.stop_reason = "perfect weak learner";
      break;
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Masks

std::uint64_t MaskHash(std::span<const QuadrupleId> ids) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&](std::uint64_t v, int bytes) {
    for (int b = 0; b < bytes; ++b) {
      h ^= (v >> (8 * b)) & 0xff;
      h *= 0x100000001b3ULL;
    }
  };
  for (const QuadrupleId& id : ids) {
    mix(static_cast<std::uint64_t>(id.granularity), 1);
    mix(static_cast<std::uint64_t>(id.channel), 1);
    mix(id.index, 4);
  }
  return h == 0 ? 1 : h;
}

SelectionMask::SelectionMask(const Fingerprint& source,
                             std::vector<QuadrupleId> ids)
    : source_(source), ids_(std::move(ids)) {
  const auto full = MakeFormat(source_);
  const std::vector<QuadrupleSpan> quads = EnumerateQuadruples(*full);
  std::sort(ids_.begin(), ids_.end());
  if (std::adjacent_find(ids_.begin(), ids_.end()) != ids_.end()) {
    throw Error(ErrorCode::kInvalidArgument, "mask lists a quadruple twice");
  }
  auto reduced = std::make_shared<DescriptorFormat>();
  reduced->fingerprint = source_;
  reduced->fingerprint.mask_hash = MaskHash(ids_);
  reduced->segment_bounds.assign(1, 0);
  std::size_t bits = 0;
  std::size_t cursor = 0;
  for (int g = 1; g <= source_.granularity; ++g) {
    for (; cursor < ids_.size() && ids_[cursor].granularity == g; ++cursor) {
      const QuadrupleId& id = ids_[cursor];
      const auto it = std::lower_bound(
          quads.begin(), quads.end(), id,
          [](const QuadrupleSpan& s, const QuadrupleId& v) { return s.id < v; });
      if (it == quads.end() || it->id != id) {
        throw Error(ErrorCode::kInvalidArgument,
                    "quadruple (" + std::to_string(id.granularity) + ", " +
                        std::to_string(id.channel) + ", " +
                        std::to_string(id.index) +
                        ") does not exist in the source layout");
      }
      spans_.emplace_back(it->bit_offset, it->bit_count);
      bits += it->bit_count;
    }
    reduced->segment_bounds.push_back(bits);
  }
  if (cursor != ids_.size()) {
    throw Error(ErrorCode::kInvalidArgument, "mask granularity out of range");
  }
  reduced->bits = bits;
  reduced_ = std::move(reduced);
}

SelectionMask SelectTopM(std::span<const QuadrupleWeight> weights,
                         std::size_t target_bits, const Fingerprint& source) {
  const auto full = MakeFormat(source);
  const std::size_t width = 4 * static_cast<std::size_t>(BitsPerPatch(source.mapping));
  if (target_bits == 0 || target_bits % width != 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "target size " + std::to_string(target_bits) +
                    " is not a positive multiple of the quadruple width " +
                    std::to_string(width));
  }
  if (target_bits > full->bits) {
    throw Error(ErrorCode::kInvalidArgument,
                "target size " + std::to_string(target_bits) +
                    " exceeds the full descriptor size " +
                    std::to_string(full->bits));
  }
  const std::size_t k = target_bits / width;
  if (weights.size() < k) {
    throw Error(ErrorCode::kInvalidArgument, "not enough quadruple weights");
  }
  std::vector<QuadrupleWeight> ranked(weights.begin(), weights.end());
  for (const QuadrupleWeight& qw : ranked) {
    if (!std::isfinite(qw.weight) || qw.weight < 0.0) {
      throw Error(ErrorCode::kInvalidArgument, "weights must be finite and >= 0");
    }
  }
  std::sort(ranked.begin(), ranked.end(),
            [](const QuadrupleWeight& a, const QuadrupleWeight& b) {
              if (a.weight != b.weight) return a.weight > b.weight;
              return a.id < b.id;
            });
  std::vector<QuadrupleId> ids;
  ids.reserve(k);
  for (std::size_t i = 0; i < k; ++i) ids.push_back(ranked[i].id);
  return SelectionMask(source, std::move(ids));
}

BinaryDescriptor ApplyMask(const BinaryDescriptor& d, const SelectionMask& mask) {
  if (d.empty() || d.fingerprint() != mask.source()) {
    throw Error(ErrorCode::kFingerprintMismatch,
                "descriptor [" + (d.empty() ? std::string("empty")
                                            : d.fingerprint().ToString()) +
                    "] does not match mask source [" +
                    mask.source().ToString() + "]");
  }
  BinaryDescriptor out(mask.reduced_format());
  std::size_t dst = 0;
  for (const auto& [offset, count] : mask.spans()) {
    for (std::size_t b = 0; b < count; ++b) {
      if (d.Get(offset + b)) out.Set(dst, true);
      ++dst;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Mask files

namespace {

using nlohmann::json;

json FingerprintToJson(const Fingerprint& fp) {
  return json{{"family", "iib"},
              {"granularity", fp.granularity},
              {"mapping", MappingName(fp.mapping)},
              {"overlap", fp.overlap},
              {"channels", fp.channel_names},
              {"radius", fp.radius}};
}

Fingerprint FingerprintFromJson(const json& j) {
  if (j.at("family").get<std::string>() != "iib") {
    throw Error(ErrorCode::kFormat, "mask source must be an IIB fingerprint");
  }
  DescriptorConfig config;
  config.granularity = j.at("granularity").get<int>();
  config.mapping = ParseMapping(j.at("mapping").get<std::string>());
  config.overlap = j.at("overlap").get<bool>();
  config.channels = j.at("channels").get<std::vector<std::string>>();
  config.radius = j.at("radius").get<double>();
  config.Validate();
  return MakeFingerprint(config);
}

}  // namespace

void SaveMask(const SelectionMask& mask, const std::string& path) {
  json ids = json::array();
  for (const QuadrupleId& id : mask.ids()) {
    ids.push_back({id.granularity, id.channel, id.index});
  }
  const json doc{{"format", "iib-mask"},
                 {"version", 1},
                 {"fingerprint", FingerprintToJson(mask.source())},
                 {"bits", mask.bits()},
                 {"quadruples", ids}};
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write mask '" + path + "'");
  out << doc.dump(2) << "\n";
  if (!out) throw Error(ErrorCode::kIo, "write failed for '" + path + "'");
}

SelectionMask LoadMask(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open mask '" + path + "'");
  try {
    const json doc = json::parse(in);
    if (doc.at("format").get<std::string>() != "iib-mask") {
      throw Error(ErrorCode::kFormat, path + ": not an iib-mask document");
    }
    if (doc.at("version").get<int>() != 1) {
      throw Error(ErrorCode::kFormat, path + ": unsupported mask version");
    }
    const Fingerprint fp = FingerprintFromJson(doc.at("fingerprint"));
    std::vector<QuadrupleId> ids;
    for (const json& e : doc.at("quadruples")) {
      ids.push_back({e.at(0).get<int>(), e.at(1).get<int>(),
                     e.at(2).get<std::uint32_t>()});
    }
    SelectionMask mask(fp, std::move(ids));
    if (mask.bits() != doc.at("bits").get<std::size_t>()) {
      throw Error(ErrorCode::kFormat, path + ": bit count does not match ids");
    }
    return mask;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormat, path + ": " + e.what());
  }
}

}  // namespace iib
