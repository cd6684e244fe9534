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

#include "iib/iib.h"

#include <chrono>
#include <cmath>
#include <cstring>
#include <new>
#include <sstream>
#include <string>
#include <vector>

#include "iib/descriptor.hpp"
#include "iib/error.hpp"
#include "iib/evaluation.hpp"
#include "iib/image.hpp"
#include "iib/io.hpp"
#include "iib/matching.hpp"
#include "iib/selection.hpp"

struct iib_image {
  iib::GrayImage image;
};

struct iib_config {
  iib::DescriptorConfig config;
  std::string fingerprint;
};

struct iib_channels {
  iib::ChannelStack stack;
};

struct iib_keypoints {
  std::vector<iib::Keypoint> keypoints;
};

struct iib_descriptor_set {
  iib::DescriptorSet set;
  std::string fingerprint;
};

struct iib_matches {
  iib::MatchResult result;
};

struct iib_mask {
  iib::SelectionMask mask;
  std::size_t rounds = 0;
  std::string stop_reason;
};

namespace {

thread_local std::string g_last_error;

iib_status ToStatus(iib::ErrorCode code) {
  switch (code) {
    case iib::ErrorCode::kInvalidArgument: return IIB_ERR_INVALID_ARGUMENT;
    case iib::ErrorCode::kOutOfBounds: return IIB_ERR_OUT_OF_BOUNDS;
    case iib::ErrorCode::kIo: return IIB_ERR_IO;
    case iib::ErrorCode::kFormat: return IIB_ERR_FORMAT;
    case iib::ErrorCode::kFingerprintMismatch:
      return IIB_ERR_FINGERPRINT_MISMATCH;
    case iib::ErrorCode::kInsufficientData: return IIB_ERR_INSUFFICIENT_DATA;
    case iib::ErrorCode::kInternal: return IIB_ERR_INTERNAL;
  }
  return IIB_ERR_INTERNAL;
}

template <class Fn>
iib_status Guard(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return IIB_OK;
  } catch (const iib::Error& e) {
    g_last_error = e.what();
    return ToStatus(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return IIB_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return IIB_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return IIB_ERR_INTERNAL;
  }
}

void Require(bool ok, const char* what) {
  if (!ok) throw iib::Error(iib::ErrorCode::kInvalidArgument, what);
}

iib::Homography ToHomography(const double* h) {
  Require(h != nullptr, "homography is null");
  std::array<double, 9> m;
  std::copy(h, h + 9, m.begin());
  return iib::Homography(m);
}

iib_pr_point ToPoint(const iib::PrPoint& p) {
  return {p.threshold,       p.precision, p.recall,
          p.correct,         p.putative,  p.correspondences,
          p.no_putative ? 1 : 0, p.no_correspondences ? 1 : 0};
}

iib_descriptor_set* Wrap(iib::DescriptorSet set) {
  auto* out = new iib_descriptor_set{std::move(set), {}};
  out->fingerprint = out->set.format->fingerprint.ToString();
  return out;
}

iib::CorrespondenceSet Correspond(const iib_descriptor_set* ref,
                                  const iib_descriptor_set* test,
                                  const double* h, double epsilon) {
  Require(ref && test, "descriptor set is null");
  const auto rp = iib::KeypointPositions(ref->set.keypoints);
  const auto tp = iib::KeypointPositions(test->set.keypoints);
  return iib::FindCorrespondences(rp, tp, ToHomography(h), epsilon);
}

}  // namespace

extern "C" {

const char* iib_status_name(iib_status status) {
  switch (status) {
    case IIB_OK: return "ok";
    case IIB_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case IIB_ERR_OUT_OF_BOUNDS: return "out_of_bounds";
    case IIB_ERR_IO: return "io";
    case IIB_ERR_FORMAT: return "format";
    case IIB_ERR_FINGERPRINT_MISMATCH: return "fingerprint_mismatch";
    case IIB_ERR_INSUFFICIENT_DATA: return "insufficient_data";
    case IIB_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* iib_last_error_message(void) { return g_last_error.c_str(); }

const char* iib_version(void) { return "1.0.0"; }

uint32_t iib_format_version(void) { return 1; }

// ---- images

iib_status iib_image_load(const char* path, iib_image** out) {
  return Guard([&] {
    Require(path && out, "null argument");
    *out = new iib_image{iib::LoadImage(path)};
  });
}

iib_status iib_image_create(int width, int height, const double* pixels,
                            iib_image** out) {
  return Guard([&] {
    Require(out != nullptr, "null argument");
    Require(width >= 1 && height >= 1, "image size must be at least 1x1");
    Require(pixels != nullptr, "pixels are null");
    std::vector<double> v(pixels, pixels + static_cast<std::size_t>(width) * height);
    *out = new iib_image{iib::GrayImage(width, height, std::move(v))};
  });
}

iib_status iib_image_save_pgm(const iib_image* image, const char* path) {
  return Guard([&] {
    Require(image && path, "null argument");
    iib::SavePgm(image->image, path);
  });
}

int iib_image_width(const iib_image* image) {
  return image ? image->image.width() : 0;
}
int iib_image_height(const iib_image* image) {
  return image ? image->image.height() : 0;
}
const double* iib_image_pixels(const iib_image* image) {
  return image ? image->image.pixels().data() : nullptr;
}
void iib_image_free(iib_image* image) { delete image; }

// ---- configuration

iib_status iib_config_create(iib_config** out) {
  return Guard([&] {
    Require(out != nullptr, "null argument");
    *out = new iib_config{};
  });
}

iib_status iib_config_set_granularity(iib_config* config, int g) {
  return Guard([&] {
    Require(config != nullptr, "null config");
    Require(g >= 1 && g <= iib::kMaxGranularity, "granularity out of range");
    config->config.granularity = g;
  });
}

iib_status iib_config_set_mapping(iib_config* config, const char* mapping) {
  return Guard([&] {
    Require(config && mapping, "null argument");
    config->config.mapping = iib::ParseMapping(mapping);
  });
}

iib_status iib_config_set_overlap(iib_config* config, int overlap) {
  return Guard([&] {
    Require(config != nullptr, "null config");
    config->config.overlap = overlap != 0;
  });
}

iib_status iib_config_set_channels(iib_config* config, const char* channels) {
  return Guard([&] {
    Require(config && channels, "null argument");
    std::vector<std::string> names;
    std::stringstream ss(channels);
    std::string name;
    while (std::getline(ss, name, ',')) names.push_back(name);
    iib::DescriptorConfig next = config->config;
    next.channels = names;
    next.Validate();
    config->config = next;
  });
}

iib_status iib_config_set_radius(iib_config* config, double radius) {
  return Guard([&] {
    Require(config != nullptr, "null config");
    Require(std::isfinite(radius) && radius > 0.0, "radius must be > 0");
    config->config.radius = radius;
  });
}

iib_status iib_config_set_rotation(iib_config* config, int enabled) {
  return Guard([&] {
    Require(config != nullptr, "null config");
    config->config.rotation_enabled = enabled != 0;
  });
}

iib_status iib_config_descriptor_size(const iib_config* config, size_t* bits) {
  return Guard([&] {
    Require(config && bits, "null argument");
    config->config.Validate();
    *bits = iib::DescriptorSize(config->config);
  });
}

const char* iib_config_fingerprint(const iib_config* config) {
  if (!config) return "";
  auto* mutable_config = const_cast<iib_config*>(config);
  try {
    mutable_config->fingerprint = iib::MakeFingerprint(config->config).ToString();
  } catch (const std::exception& e) {
    mutable_config->fingerprint = std::string("invalid: ") + e.what();
  }
  return config->fingerprint.c_str();
}

void iib_config_free(iib_config* config) { delete config; }

// ---- channels

iib_status iib_channels_compute(const iib_image* image,
                                const char* const* extra_names,
                                const iib_image* const* extras,
                                size_t extra_count, iib_channels** out) {
  return Guard([&] {
    Require(image && out, "null argument");
    Require(extra_count == 0 || (extra_names && extras), "extras are null");
    std::vector<std::pair<std::string, iib::GrayImage>> named;
    for (size_t i = 0; i < extra_count; ++i) {
      Require(extra_names[i] && extras[i], "extra channel is null");
      named.emplace_back(extra_names[i], extras[i]->image);
    }
    *out = new iib_channels{iib::ComputeChannels(image->image, named)};
  });
}

size_t iib_channels_count(const iib_channels* channels) {
  return channels ? channels->stack.size() : 0;
}

void iib_channels_free(iib_channels* channels) { delete channels; }

// ---- keypoints

iib_status iib_keypoints_create(iib_keypoints** out) {
  return Guard([&] {
    Require(out != nullptr, "null argument");
    *out = new iib_keypoints{};
  });
}

iib_status iib_keypoints_add(iib_keypoints* kps, double x, double y,
                             double radius, int has_angle, double angle) {
  return Guard([&] {
    Require(kps != nullptr, "null keypoints");
    Require(std::isfinite(x) && std::isfinite(y) && std::isfinite(radius),
            "keypoint fields must be finite");
    iib::Keypoint kp{x, y, radius, std::nullopt};
    if (has_angle) {
      Require(std::isfinite(angle), "angle must be finite");
      kp.angle = angle;
    }
    kps->keypoints.push_back(kp);
  });
}

iib_status iib_keypoints_load(const char* path, double default_radius,
                              iib_keypoints** out) {
  return Guard([&] {
    Require(path && out, "null argument");
    *out = new iib_keypoints{iib::LoadKeypoints(path, default_radius)};
  });
}

iib_status iib_keypoints_save(const iib_keypoints* kps, const char* path) {
  return Guard([&] {
    Require(kps && path, "null argument");
    iib::SaveKeypoints(kps->keypoints, path);
  });
}

iib_status iib_keypoints_grid(int width, int height, int cols, int rows,
                              double radius, iib_keypoints** out) {
  return Guard([&] {
    Require(out != nullptr, "null argument");
    *out = new iib_keypoints{
        iib::GridKeypoints(width, height, cols, rows, radius)};
  });
}

size_t iib_keypoints_count(const iib_keypoints* kps) {
  return kps ? kps->keypoints.size() : 0;
}

iib_status iib_keypoints_get(const iib_keypoints* kps, size_t index, double* x,
                             double* y, double* radius, int* has_angle,
                             double* angle) {
  return Guard([&] {
    Require(kps != nullptr, "null keypoints");
    if (index >= kps->keypoints.size()) {
      throw iib::Error(iib::ErrorCode::kOutOfBounds, "keypoint index out of range");
    }
    const iib::Keypoint& kp = kps->keypoints[index];
    if (x) *x = kp.x;
    if (y) *y = kp.y;
    if (radius) *radius = kp.radius;
    if (has_angle) *has_angle = kp.angle ? 1 : 0;
    if (angle) *angle = kp.angle.value_or(0.0);
  });
}

void iib_keypoints_free(iib_keypoints* kps) { delete kps; }

// ---- descriptors

iib_status iib_extract(const iib_channels* channels, const iib_keypoints* kps,
                       const iib_config* config, const iib_mask* mask,
                       int workers, iib_descriptor_set** out) {
  return Guard([&] {
    Require(channels && kps && config && out, "null argument");
    if (mask && mask->mask.source() != iib::MakeFingerprint(config->config)) {
      throw iib::Error(iib::ErrorCode::kFingerprintMismatch,
                       "mask source [" + mask->mask.source().ToString() +
                           "] does not match the extraction config [" +
                           iib::MakeFingerprint(config->config).ToString() + "]");
    }
    iib::DescriptorSet set =
        iib::ExtractAll(channels->stack, kps->keypoints, config->config, workers);
    if (mask) {
      for (iib::BinaryDescriptor& d : set.descriptors) {
        d = iib::ApplyMask(d, mask->mask);
      }
      set.format = mask->mask.reduced_format();
    }
    *out = Wrap(std::move(set));
  });
}

size_t iib_descriptor_set_count(const iib_descriptor_set* set) {
  return set ? set->set.size() : 0;
}

size_t iib_descriptor_set_bits(const iib_descriptor_set* set) {
  return set && set->set.format ? set->set.format->bits : 0;
}

const char* iib_descriptor_set_fingerprint(const iib_descriptor_set* set) {
  return set ? set->fingerprint.c_str() : "";
}

iib_status iib_descriptor_set_get_bytes(const iib_descriptor_set* set,
                                        size_t index, uint8_t* buffer,
                                        size_t capacity) {
  return Guard([&] {
    Require(set && buffer, "null argument");
    if (index >= set->set.size()) {
      throw iib::Error(iib::ErrorCode::kOutOfBounds, "descriptor index out of range");
    }
    const std::vector<std::uint8_t> bytes = set->set.descriptors[index].ToBytes();
    Require(capacity >= bytes.size(), "buffer too small");
    std::memcpy(buffer, bytes.data(), bytes.size());
  });
}

iib_status iib_descriptor_set_keypoint(const iib_descriptor_set* set,
                                       size_t index, double* x, double* y,
                                       double* radius, uint32_t* source_index) {
  return Guard([&] {
    Require(set != nullptr, "null set");
    if (index >= set->set.size()) {
      throw iib::Error(iib::ErrorCode::kOutOfBounds, "descriptor index out of range");
    }
    const iib::Keypoint& kp = set->set.keypoints[index];
    if (x) *x = kp.x;
    if (y) *y = kp.y;
    if (radius) *radius = kp.radius;
    if (source_index) *source_index = set->set.source_index[index];
  });
}

size_t iib_descriptor_set_skipped_count(const iib_descriptor_set* set) {
  return set ? set->set.skipped.size() : 0;
}

iib_status iib_descriptor_set_skipped(const iib_descriptor_set* set,
                                      size_t index, uint32_t* source_index,
                                      const char** reason) {
  return Guard([&] {
    Require(set != nullptr, "null set");
    if (index >= set->set.skipped.size()) {
      throw iib::Error(iib::ErrorCode::kOutOfBounds, "skip index out of range");
    }
    const auto& [idx, status] = set->set.skipped[index];
    if (source_index) *source_index = idx;
    if (reason) *reason = iib::KeypointStatusName(status);
  });
}

iib_status iib_descriptor_set_save(const iib_descriptor_set* set,
                                   const char* path) {
  return Guard([&] {
    Require(set && path, "null argument");
    iib::SaveDescriptorSet(set->set, path);
  });
}

iib_status iib_descriptor_set_load(const char* path, iib_descriptor_set** out) {
  return Guard([&] {
    Require(path && out, "null argument");
    *out = Wrap(iib::LoadDescriptorSet(path));
  });
}

iib_status iib_hamming(const iib_descriptor_set* a, size_t ia,
                       const iib_descriptor_set* b, size_t ib,
                       size_t* distance) {
  return Guard([&] {
    Require(a && b && distance, "null argument");
    if (ia >= a->set.size() || ib >= b->set.size()) {
      throw iib::Error(iib::ErrorCode::kOutOfBounds, "descriptor index out of range");
    }
    *distance = iib::Hamming(a->set.descriptors[ia], b->set.descriptors[ib]);
  });
}

void iib_descriptor_set_free(iib_descriptor_set* set) { delete set; }

// ---- matching

iib_status iib_match(const iib_descriptor_set* query,
                     const iib_descriptor_set* train, iib_match_mode mode,
                     double threshold, int workers, iib_matches** out) {
  return Guard([&] {
    Require(query && train && out, "null argument");
    iib::MatchResult r;
    switch (mode) {
      case IIB_MATCH_BRUTE:
        r = iib::BruteForceMutual(query->set.descriptors, train->set.descriptors,
                                  std::nullopt, workers);
        break;
      case IIB_MATCH_HIERARCHICAL:
        r = iib::HierarchicalMatch(query->set.descriptors,
                                   train->set.descriptors, threshold, workers);
        break;
      default:
        Require(false, "unknown match mode");
    }
    *out = new iib_matches{std::move(r)};
  });
}

size_t iib_matches_count(const iib_matches* matches) {
  return matches ? matches->result.pairs.size() : 0;
}

iib_status iib_matches_get(const iib_matches* matches, size_t index,
                           uint32_t* query, uint32_t* train,
                           uint32_t* distance) {
  return Guard([&] {
    Require(matches != nullptr, "null matches");
    if (index >= matches->result.pairs.size()) {
      throw iib::Error(iib::ErrorCode::kOutOfBounds, "match index out of range");
    }
    const iib::MatchPair& p = matches->result.pairs[index];
    if (query) *query = p.query;
    if (train) *train = p.train;
    if (distance) *distance = p.distance;
  });
}

double iib_matches_cost(const iib_matches* matches, uint64_t* hierarchical_bits,
                        uint64_t* bruteforce_bits) {
  if (!matches) return 0.0;
  const iib::MatchStats& s = matches->result.stats;
  if (hierarchical_bits) *hierarchical_bits = s.bit_comparisons_hierarchical;
  if (bruteforce_bits) *bruteforce_bits = s.bit_comparisons_bruteforce;
  return s.match_cost();
}

void iib_matches_free(iib_matches* matches) { delete matches; }

// ---- evaluation

iib_status iib_homography_load(const char* path, double h[9]) {
  return Guard([&] {
    Require(path && h, "null argument");
    const auto& m = iib::LoadHomography(path).matrix();
    std::copy(m.begin(), m.end(), h);
  });
}

iib_status iib_homography_save(const char* path, const double h[9]) {
  return Guard([&] {
    Require(path != nullptr, "null path");
    iib::SaveHomography(ToHomography(h), path);
  });
}

iib_status iib_evaluate(const iib_descriptor_set* ref,
                        const iib_descriptor_set* test,
                        const iib_matches* matches, const double h[9],
                        double epsilon, iib_pr_point* out) {
  return Guard([&] {
    Require(matches && out, "null argument");
    const iib::CorrespondenceSet corr = Correspond(ref, test, h, epsilon);
    *out = ToPoint(iib::PrecisionRecall(matches->result.pairs, corr));
  });
}

iib_status iib_pr_sweep(const iib_descriptor_set* ref,
                        const iib_descriptor_set* test, const double h[9],
                        double epsilon, const double* thresholds, size_t count,
                        int workers, iib_pr_point* out) {
  return Guard([&] {
    Require(count == 0 || (thresholds && out), "null argument");
    const iib::CorrespondenceSet corr = Correspond(ref, test, h, epsilon);
    const std::vector<iib::PrPoint> points =
        iib::PrSweep(ref->set.descriptors, test->set.descriptors, corr,
                     std::span<const double>(thresholds, count), workers);
    for (size_t i = 0; i < points.size(); ++i) out[i] = ToPoint(points[i]);
  });
}

iib_status iib_synth(const iib_image* image, double gain, double bias,
                     double gamma, const double h[9], iib_image** out) {
  return Guard([&] {
    Require(image && out, "null argument");
    iib::SynthSpec spec;
    spec.gain = gain;
    spec.bias = bias;
    spec.gamma = gamma;
    if (h) spec.homography = ToHomography(h);
    *out = new iib_image{iib::SynthesizePair(image->image, spec).image};
  });
}

// ---- selection

void iib_train_options_default(iib_train_options* options) {
  if (!options) return;
  const iib::TrainingSetOptions d;
  options->rounds = 200;
  options->target_bits = 512;
  options->seed = d.seed;
  options->grid_cols = d.grid_cols;
  options->grid_rows = d.grid_rows;
  options->epsilon = d.epsilon;
  options->min_positives = d.min_positives;
  options->workers = d.workers;
}

iib_status iib_train_select(const iib_image* const* refs,
                            const iib_image* const* tests,
                            const double* homographies, size_t count,
                            const iib_config* config,
                            const iib_train_options* options, iib_mask** out) {
  return Guard([&] {
    Require(config && options && out, "null argument");
    Require(count == 0 || (refs && tests && homographies), "null pair arrays");
    std::vector<iib::ImagePairSample> samples;
    for (size_t i = 0; i < count; ++i) {
      Require(refs[i] && tests[i], "null image in training pairs");
      samples.push_back({refs[i]->image, tests[i]->image,
                         ToHomography(homographies + 9 * i)});
    }
    iib::TrainingSetOptions opts;
    opts.grid_cols = options->grid_cols;
    opts.grid_rows = options->grid_rows;
    opts.min_positives = options->min_positives;
    opts.epsilon = options->epsilon;
    opts.seed = options->seed;
    opts.workers = options->workers;
    const std::vector<iib::TrainingPair> pairs =
        iib::BuildTrainingSet(samples, config->config, opts);
    const iib::AdaBoostResult boost = iib::AdaBoostTrain(pairs, options->rounds);
    *out = new iib_mask{
        iib::SelectTopM(boost.weights, options->target_bits,
                        iib::MakeFingerprint(config->config)),
        boost.rounds.size(), boost.stop_reason};
  });
}

size_t iib_mask_bits(const iib_mask* mask) { return mask ? mask->mask.bits() : 0; }

size_t iib_mask_quadruples(const iib_mask* mask) {
  return mask ? mask->mask.ids().size() : 0;
}

size_t iib_mask_rounds(const iib_mask* mask) { return mask ? mask->rounds : 0; }

const char* iib_mask_stop_reason(const iib_mask* mask) {
  return mask ? mask->stop_reason.c_str() : "";
}

iib_status iib_mask_save(const iib_mask* mask, const char* path) {
  return Guard([&] {
    Require(mask && path, "null argument");
    iib::SaveMask(mask->mask, path);
  });
}

iib_status iib_mask_load(const char* path, iib_mask** out) {
  return Guard([&] {
    Require(path && out, "null argument");
    *out = new iib_mask{iib::LoadMask(path), 0, {}};
  });
}

void iib_mask_free(iib_mask* mask) { delete mask; }

// ---- benchmark

iib_status iib_bench(const iib_channels* channels, const iib_keypoints* kps,
                     const iib_config* config, int workers,
                     iib_bench_report* out) {
  return Guard([&] {
    Require(channels && kps && config && out, "null argument");
    iib::OpCounter counter;
    const iib::DescriptorSet counted = iib::ExtractAll(
        channels->stack, kps->keypoints, config->config, workers, &counter);
    const auto start = std::chrono::steady_clock::now();
    const iib::DescriptorSet timed =
        iib::ExtractAll(channels->stack, kps->keypoints, config->config, workers);
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    out->descriptors = counted.size();
    out->bits = counted.format->bits;
    out->algebraic = counter.algebraic;
    out->relational = counter.relational;
    out->patch_algebraic = counter.patch_algebraic;
    out->seconds = seconds;
    out->descriptors_per_second =
        seconds > 0.0 ? static_cast<double>(timed.size()) / seconds : 0.0;
  });
}

}  // extern "C"
