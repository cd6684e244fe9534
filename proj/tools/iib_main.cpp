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

// Command-line front end over the C interface.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "iib/iib.h"

namespace {

template <class T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using Image = std::unique_ptr<iib_image, Deleter<iib_image, iib_image_free>>;
using Config = std::unique_ptr<iib_config, Deleter<iib_config, iib_config_free>>;
using Channels =
    std::unique_ptr<iib_channels, Deleter<iib_channels, iib_channels_free>>;
using Keypoints =
    std::unique_ptr<iib_keypoints, Deleter<iib_keypoints, iib_keypoints_free>>;
using DescriptorSet =
    std::unique_ptr<iib_descriptor_set,
                    Deleter<iib_descriptor_set, iib_descriptor_set_free>>;
using Matches =
    std::unique_ptr<iib_matches, Deleter<iib_matches, iib_matches_free>>;
using Mask = std::unique_ptr<iib_mask, Deleter<iib_mask, iib_mask_free>>;

// Library failure, reported as one key=value line on stderr.
struct Failure {
  iib_status status;
  std::string message;
};

void Check(iib_status s) {
  if (s != IIB_OK) throw Failure{s, iib_last_error_message()};
}

[[noreturn]] void Usage(const std::string& message) {
  throw Failure{IIB_ERR_INVALID_ARGUMENT, message};
}

std::string Quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

struct Global {
  std::uint64_t seed = 1;
  int workers = 0;
};

struct ConfigFlags {
  int granularity = 4;
  std::string mapping = "mean";
  bool overlap = false;
  std::string channels;
  double radius = 32.0;
  bool rotate = false;

  void Register(CLI::App* app) {
    app->add_option("--granularity", granularity, "Quadtree levels G")
        ->check(CLI::Range(1, 8))
        ->capture_default_str();
    app->add_option("--mapping", mapping, "mean, max, min, quartile or sort")
        ->check(CLI::IsMember({"mean", "max", "min", "quartile", "sort"}))
        ->capture_default_str();
    app->add_flag("--overlap", overlap, "Overlapping quadruples");
    app->add_option("--channels", channels,
                    "Comma-separated channels (default gx,gy,go,gi plus extras)");
    app->add_option("--radius", radius, "Default ROS radius in pixels")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app->add_flag("--rotate", rotate, "Use keypoint angles (rotated ROS)");
  }

  Config Build(const std::vector<std::string>& extra_names) const {
    iib_config* raw = nullptr;
    Check(iib_config_create(&raw));
    Config c(raw);
    Check(iib_config_set_granularity(c.get(), granularity));
    Check(iib_config_set_mapping(c.get(), mapping.c_str()));
    Check(iib_config_set_overlap(c.get(), overlap ? 1 : 0));
    Check(iib_config_set_radius(c.get(), radius));
    Check(iib_config_set_rotation(c.get(), rotate ? 1 : 0));
    std::string names = channels;
    if (names.empty()) {
      names = "gx,gy,go,gi";
      for (const std::string& e : extra_names) names += "," + e;
    }
    Check(iib_config_set_channels(c.get(), names.c_str()));
    return c;
  }
};

std::pair<int, int> ParseGrid(const std::string& text) {
  int cols = 0, rows = 0;
  char x = 0;
  std::istringstream in(text);
  if (!(in >> cols >> x >> rows) || (x != 'x' && x != 'X') || cols < 1 ||
      rows < 1 || in.peek() != EOF) {
    Usage("--grid expects COLSxROWS, got '" + text + "'");
  }
  return {cols, rows};
}

Image LoadImage(const std::string& path) {
  iib_image* raw = nullptr;
  Check(iib_image_load(path.c_str(), &raw));
  return Image(raw);
}

std::array<double, 9> LoadH(const std::string& path) {
  std::array<double, 9> h{};
  Check(iib_homography_load(path.c_str(), h.data()));
  return h;
}

DescriptorSet LoadSet(const std::string& path) {
  iib_descriptor_set* raw = nullptr;
  Check(iib_descriptor_set_load(path.c_str(), &raw));
  return DescriptorSet(raw);
}

// Rows of a pairs list: "id,a,b,homography"; relative paths resolve
// against the list's directory.
struct PairRow {
  std::string id, a, b, homography;
};

std::vector<PairRow> LoadPairs(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Failure{IIB_ERR_IO, "cannot open pairs list '" + path + "'"};
  const std::filesystem::path base = std::filesystem::path(path).parent_path();
  auto resolve = [&](const std::string& p) {
    const std::filesystem::path fp(p);
    return (fp.is_absolute() ? fp : base / fp).string();
  };
  std::vector<PairRow> rows;
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) f.push_back(field);
    if (f.size() != 4) {
      throw Failure{IIB_ERR_FORMAT,
                    path + ":" + std::to_string(n) + ": expected 4 fields"};
    }
    rows.push_back({f[0], resolve(f[1]), resolve(f[2]), resolve(f[3])});
  }
  if (rows.empty()) throw Failure{IIB_ERR_FORMAT, path + ": no pairs listed"};
  return rows;
}

std::ostream& OpenOut(const std::string& path, std::ofstream& file) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path);
  if (!file) throw Failure{IIB_ERR_IO, "cannot write '" + path + "'"};
  return file;
}

// ---------------------------------------------------------------------------

struct ExtractCmd {
  std::string image, keypoints, grid, mask, out;
  std::vector<std::string> extras;
  ConfigFlags config;

  void Register(CLI::App* app) {
    app->add_option("--image", image, "Input image (PGM/PPM)")->required();
    auto* kp = app->add_option("--keypoints", keypoints,
                               "Keypoint CSV x,y,radius,angle_rad");
    auto* g = app->add_option("--grid", grid, "Interior grid COLSxROWS");
    kp->excludes(g);
    app->add_option("--extra", extras, "Extra channel NAME=PATH (repeatable)");
    app->add_option("--mask", mask, "Selection mask to apply");
    app->add_option("--out", out, "Output descriptor file")->required();
    config.Register(app);
  }

  void Run(const Global& global) {
    if (keypoints.empty() && grid.empty()) {
      Usage("extract needs --keypoints or --grid");
    }
    std::vector<std::string> names;
    std::vector<std::string> paths;
    for (const std::string& e : extras) {
      const auto eq = e.find('=');
      if (eq == std::string::npos || eq == 0 || eq + 1 == e.size()) {
        Usage("--extra expects NAME=PATH, got '" + e + "'");
      }
      names.push_back(e.substr(0, eq));
      paths.push_back(e.substr(eq + 1));
    }
    const Config cfg = config.Build(names);

    Image img = LoadImage(image);
    std::vector<Image> extra_images;
    std::vector<const iib_image*> extra_ptrs;
    std::vector<const char*> name_ptrs;
    for (std::size_t i = 0; i < paths.size(); ++i) {
      extra_images.push_back(LoadImage(paths[i]));
      extra_ptrs.push_back(extra_images.back().get());
      name_ptrs.push_back(names[i].c_str());
    }
    Mask m;
    if (!mask.empty()) {
      iib_mask* raw = nullptr;
      Check(iib_mask_load(mask.c_str(), &raw));
      m.reset(raw);
    }
    iib_keypoints* kraw = nullptr;
    if (!keypoints.empty()) {
      Check(iib_keypoints_load(keypoints.c_str(), config.radius, &kraw));
    } else {
      const auto [cols, rows] = ParseGrid(grid);
      Check(iib_keypoints_grid(iib_image_width(img.get()),
                               iib_image_height(img.get()), cols, rows,
                               config.radius, &kraw));
    }
    const Keypoints kps(kraw);
    iib_channels* craw = nullptr;
    Check(iib_channels_compute(img.get(), name_ptrs.data(), extra_ptrs.data(),
                               extra_ptrs.size(), &craw));
    const Channels chans(craw);
    iib_descriptor_set* sraw = nullptr;
    Check(iib_extract(chans.get(), kps.get(), cfg.get(), m.get(),
                      global.workers, &sraw));
    const DescriptorSet set(sraw);
    for (std::size_t i = 0; i < iib_descriptor_set_skipped_count(set.get()); ++i) {
      std::uint32_t idx = 0;
      const char* reason = nullptr;
      Check(iib_descriptor_set_skipped(set.get(), i, &idx, &reason));
      std::cerr << "skip keypoint=" << idx << " reason=" << reason << "\n";
    }
    Check(iib_descriptor_set_save(set.get(), out.c_str()));
    std::cout << "descriptors=" << iib_descriptor_set_count(set.get())
              << " bits=" << iib_descriptor_set_bits(set.get())
              << " skipped=" << iib_descriptor_set_skipped_count(set.get())
              << "\n";
  }
};

struct MatchFlags {
  std::string mode = "brute";
  double threshold = 0.5;

  void Register(CLI::App* app) {
    app->add_option("--mode", mode, "brute or hier")
        ->check(CLI::IsMember({"brute", "hier"}))
        ->capture_default_str();
    app->add_option("--threshold", threshold,
                    "Per-granularity pruning fraction in (0, 1]")
        ->capture_default_str();
  }

  Matches Run(const iib_descriptor_set* q, const iib_descriptor_set* t,
              int workers) const {
    iib_matches* raw = nullptr;
    Check(iib_match(q, t, mode == "hier" ? IIB_MATCH_HIERARCHICAL : IIB_MATCH_BRUTE,
                    threshold, workers, &raw));
    return Matches(raw);
  }
};

struct MatchCmd {
  std::string query, train, out;
  MatchFlags flags;

  void Register(CLI::App* app) {
    app->add_option("--query", query, "Query descriptor file")->required();
    app->add_option("--train", train, "Train descriptor file")->required();
    app->add_option("--out", out, "Match CSV (default stdout)");
    flags.Register(app);
  }

  void Run(const Global& global) {
    const DescriptorSet q = LoadSet(query);
    const DescriptorSet t = LoadSet(train);
    const Matches m = flags.Run(q.get(), t.get(), global.workers);
    std::ofstream file;
    std::ostream& os = OpenOut(out, file);
    os << "query_idx,train_idx,distance\n";
    for (std::size_t i = 0; i < iib_matches_count(m.get()); ++i) {
      std::uint32_t qi = 0, ti = 0, d = 0;
      Check(iib_matches_get(m.get(), i, &qi, &ti, &d));
      os << qi << ',' << ti << ',' << d << '\n';
    }
    std::uint64_t hier = 0, brute = 0;
    const double mc = iib_matches_cost(m.get(), &hier, &brute);
    std::cerr << "MC=" << mc << " hierarchical_bits=" << hier
              << " bruteforce_bits=" << brute << "\n";
  }
};

struct EvalCmd {
  std::string ref, test, homography, pairs, pair_id = "pair", out, plot_data;
  double epsilon = 3.0;
  int plot_steps = 32;
  MatchFlags flags;

  void Register(CLI::App* app) {
    app->add_option("--ref", ref, "Reference descriptor file");
    app->add_option("--test", test, "Test descriptor file");
    app->add_option("--homography", homography, "Reference-to-test homography");
    app->add_option("--pair-id", pair_id, "Label of the single pair");
    app->add_option("--pairs", pairs,
                    "CSV list of pair_id,ref.iibd,test.iibd,homography");
    app->add_option("--epsilon", epsilon, "Reprojection radius in pixels")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    app->add_option("--out", out, "Report CSV (default stdout)");
    app->add_option("--plot-data", plot_data,
                    "Write 1-precision/recall per threshold to this CSV");
    app->add_option("--plot-steps", plot_steps, "Thresholds in the sweep")
        ->check(CLI::Range(1, 100000))
        ->capture_default_str();
    flags.Register(app);
  }

  void Run(const Global& global) {
    std::vector<PairRow> rows;
    if (!pairs.empty()) {
      if (!ref.empty() || !test.empty() || !homography.empty()) {
        Usage("--pairs excludes --ref/--test/--homography");
      }
      rows = LoadPairs(pairs);
    } else {
      if (ref.empty() || test.empty() || homography.empty()) {
        Usage("eval needs --pairs or all of --ref, --test, --homography");
      }
      rows.push_back({pair_id, ref, test, homography});
    }
    std::ofstream file, plot;
    std::ostream& os = OpenOut(out, file);
    if (!plot_data.empty()) {
      plot.open(plot_data);
      if (!plot) throw Failure{IIB_ERR_IO, "cannot write '" + plot_data + "'"};
      plot << "pair_id,threshold,one_minus_precision,recall,putative,correct\n";
    }
    os << "pair_id,putative,correct,correspondences,precision,recall,MC\n";
    double sum_p = 0, sum_r = 0, sum_mc = 0;
    double sum_put = 0, sum_cor = 0, sum_corr = 0;
    for (const PairRow& row : rows) {
      const DescriptorSet a = LoadSet(row.a);
      const DescriptorSet b = LoadSet(row.b);
      const std::array<double, 9> h = LoadH(row.homography);
      const Matches m = flags.Run(a.get(), b.get(), global.workers);
      iib_pr_point pt{};
      Check(iib_evaluate(a.get(), b.get(), m.get(), h.data(), epsilon, &pt));
      const double mc = iib_matches_cost(m.get(), nullptr, nullptr);
      os << row.id << ',' << pt.putative << ',' << pt.correct << ','
         << pt.correspondences << ',' << pt.precision << ',' << pt.recall
         << ',' << mc << '\n';
      sum_p += pt.precision;
      sum_r += pt.recall;
      sum_mc += mc;
      sum_put += static_cast<double>(pt.putative);
      sum_cor += static_cast<double>(pt.correct);
      sum_corr += static_cast<double>(pt.correspondences);
      if (plot.is_open()) {
        const std::size_t bits = iib_descriptor_set_bits(a.get());
        std::vector<double> thresholds;
        for (int s = 1; s <= plot_steps; ++s) {
          const double t = std::round(static_cast<double>(bits) * s / plot_steps);
          if (thresholds.empty() || t > thresholds.back()) thresholds.push_back(t);
        }
        std::vector<iib_pr_point> sweep(thresholds.size());
        Check(iib_pr_sweep(a.get(), b.get(), h.data(), epsilon,
                           thresholds.data(), thresholds.size(), global.workers,
                           sweep.data()));
        for (const iib_pr_point& p : sweep) {
          plot << row.id << ',' << p.threshold << ',' << 1.0 - p.precision << ','
               << p.recall << ',' << p.putative << ',' << p.correct << '\n';
        }
      }
    }
    const double n = static_cast<double>(rows.size());
    os << "mean," << sum_put / n << ',' << sum_cor / n << ',' << sum_corr / n
       << ',' << sum_p / n << ',' << sum_r / n << ',' << sum_mc / n << '\n';
  }
};

struct TrainCmd {
  std::string pairs, out, grid = "20x20";
  int rounds = 200;
  std::size_t target_bits = 512;
  double epsilon = 3.0;
  std::size_t min_positives = 16;
  ConfigFlags config;

  void Register(CLI::App* app) {
    app->add_option("--pairs", pairs,
                    "CSV list of pair_id,ref_image,test_image,homography")
        ->required();
    app->add_option("--out", out, "Output mask file")->required();
    app->add_option("--rounds", rounds, "AdaBoost rounds")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app->add_option("--target-bits", target_bits, "Reduced descriptor size")
        ->capture_default_str();
    app->add_option("--grid", grid, "Training grid COLSxROWS per image")
        ->capture_default_str();
    app->add_option("--epsilon", epsilon, "Negatives lie farther than this")
        ->capture_default_str();
    app->add_option("--min-positives", min_positives,
                    "Fail with fewer positive pairs")
        ->capture_default_str();
    config.Register(app);
  }

  void Run(const Global& global) {
    const Config cfg = config.Build({});
    const auto [cols, rows] = ParseGrid(grid);
    const std::vector<PairRow> list = LoadPairs(pairs);
    std::vector<Image> images;
    std::vector<const iib_image*> refs, tests;
    std::vector<double> hs;
    for (const PairRow& row : list) {
      images.push_back(LoadImage(row.a));
      refs.push_back(images.back().get());
      images.push_back(LoadImage(row.b));
      tests.push_back(images.back().get());
      const auto h = LoadH(row.homography);
      hs.insert(hs.end(), h.begin(), h.end());
    }
    iib_train_options opts;
    iib_train_options_default(&opts);
    opts.rounds = rounds;
    opts.target_bits = target_bits;
    opts.seed = global.seed;
    opts.grid_cols = cols;
    opts.grid_rows = rows;
    opts.epsilon = epsilon;
    opts.min_positives = min_positives;
    opts.workers = global.workers;
    iib_mask* raw = nullptr;
    Check(iib_train_select(refs.data(), tests.data(), hs.data(), list.size(),
                           cfg.get(), &opts, &raw));
    const Mask mask(raw);
    Check(iib_mask_save(mask.get(), out.c_str()));
    std::cout << "bits=" << iib_mask_bits(mask.get())
              << " quadruples=" << iib_mask_quadruples(mask.get())
              << " rounds=" << iib_mask_rounds(mask.get()) << " stop="
              << Quote(iib_mask_stop_reason(mask.get())) << "\n";
  }
};

struct SynthCmd {
  std::string image, out, homography, homography_out;
  double gain = 1.0, bias = 0.0, gamma = 1.0;

  void Register(CLI::App* app) {
    app->add_option("--image", image, "Input image")->required();
    app->add_option("--out", out, "Output PGM")->required();
    app->add_option("--gain", gain, "Multiplicative gain a > 0")
        ->capture_default_str();
    app->add_option("--bias", bias, "Additive bias on the [0, 1] scale")
        ->capture_default_str();
    app->add_option("--gamma", gamma, "Gamma exponent > 0")
        ->capture_default_str();
    app->add_option("--homography", homography, "Warp (default identity)");
    app->add_option("--homography-out", homography_out,
                    "Write the ground-truth homography here");
  }

  void Run(const Global&) {
    const Image img = LoadImage(image);
    std::array<double, 9> h{1, 0, 0, 0, 1, 0, 0, 0, 1};
    if (!homography.empty()) h = LoadH(homography);
    iib_image* raw = nullptr;
    Check(iib_synth(img.get(), gain, bias, gamma, h.data(), &raw));
    const Image result(raw);
    Check(iib_image_save_pgm(result.get(), out.c_str()));
    if (!homography_out.empty()) {
      Check(iib_homography_save(homography_out.c_str(), h.data()));
    }
  }
};

struct BenchCmd {
  std::string image, grid = "40x25";
  int size = 512;
  ConfigFlags config;

  void Register(CLI::App* app) {
    app->add_option("--image", image,
                    "Input image (default: seeded synthetic texture)");
    app->add_option("--size", size, "Synthetic image side")
        ->check(CLI::Range(16, 8192))
        ->capture_default_str();
    app->add_option("--grid", grid, "Keypoint grid COLSxROWS")
        ->capture_default_str();
    config.Register(app);
  }

  static Image Synthetic(int side, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> px(static_cast<std::size_t>(side) * side);
    // Sum of a few random plane waves plus noise, scaled to [0, 255].
    std::vector<std::array<double, 4>> waves(6);
    for (auto& w : waves) w = {u(rng) * 0.2, u(rng) * 0.2, u(rng) * 6.3, u(rng)};
    for (int r = 0; r < side; ++r) {
      for (int c = 0; c < side; ++c) {
        double v = 0.0;
        for (const auto& w : waves) v += w[3] * std::sin(w[0] * c + w[1] * r + w[2]);
        px[static_cast<std::size_t>(r) * side + c] =
            std::clamp(std::round(128.0 + 20.0 * v + 20.0 * (u(rng) - 0.5)), 0.0, 255.0);
      }
    }
    iib_image* raw = nullptr;
    Check(iib_image_create(side, side, px.data(), &raw));
    return Image(raw);
  }

  void Run(const Global& global) {
    const Config cfg = config.Build({});
    const Image img = image.empty() ? Synthetic(size, global.seed) : LoadImage(image);
    const auto [cols, rows] = ParseGrid(grid);
    iib_keypoints* kraw = nullptr;
    Check(iib_keypoints_grid(iib_image_width(img.get()), iib_image_height(img.get()),
                             cols, rows, config.radius, &kraw));
    const Keypoints kps(kraw);
    iib_channels* craw = nullptr;
    Check(iib_channels_compute(img.get(), nullptr, nullptr, 0, &craw));
    const Channels chans(craw);
    iib_bench_report rep{};
    Check(iib_bench(chans.get(), kps.get(), cfg.get(), global.workers, &rep));
    const std::uint64_t total_bits =
        static_cast<std::uint64_t>(rep.descriptors) * rep.bits;
    std::cout << "descriptors=" << rep.descriptors << " bits=" << rep.bits
              << " algebraic_ops=" << rep.algebraic
              << " relational_ops=" << rep.relational
              << " patch_algebraic_ops=" << rep.patch_algebraic
              << " seconds=" << rep.seconds
              << " descriptors_per_sec=" << rep.descriptors_per_second << "\n";
    if (config.mapping == "mean") {
      const bool alg_ok = rep.algebraic <= 4 * total_bits;
      const bool rel_ok = rep.relational == total_bits;
      std::cout << "check algebraic<=4M " << (alg_ok ? "ok" : "violated")
                << "\ncheck relational==M " << (rel_ok ? "ok" : "violated")
                << "\n";
      if (!alg_ok || !rel_ok) {
        throw Failure{IIB_ERR_INTERNAL, "operation count check failed"};
      }
    }
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Illumination-insensitive binary descriptor tools", "iib"};
  app.require_subcommand(0, 1);
  Global global;
  bool version = false;
  app.add_flag("--version", version, "Print versions and exit");
  app.add_option("--seed", global.seed, "Seed for every random choice")
      ->capture_default_str();
  app.add_option("--workers", global.workers, "Worker threads (0 = all cores)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();

  ExtractCmd extract;
  MatchCmd match;
  EvalCmd eval;
  TrainCmd train;
  SynthCmd synth;
  BenchCmd bench;
  CLI::App* c_extract = app.add_subcommand("extract", "Extract descriptors");
  CLI::App* c_match = app.add_subcommand("match", "Mutual nearest-neighbour matching");
  CLI::App* c_eval = app.add_subcommand("eval", "Precision/recall against homographies");
  CLI::App* c_train = app.add_subcommand("train-select", "Learn a reduced-size mask");
  CLI::App* c_synth = app.add_subcommand("synth", "Synthesise an illumination pair");
  CLI::App* c_bench = app.add_subcommand("bench", "Throughput and operation counts");
  extract.Register(c_extract);
  match.Register(c_match);
  eval.Register(c_eval);
  train.Register(c_train);
  synth.Register(c_synth);
  bench.Register(c_bench);
  // Subcommands inherit the global options when given after the name.
  for (CLI::App* sub : {c_extract, c_match, c_eval, c_train, c_synth, c_bench}) {
    sub->add_option("--seed", global.seed, "Seed for every random choice");
    sub->add_option("--workers", global.workers, "Worker threads")
        ->check(CLI::NonNegativeNumber);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "error subcommand=- status=usage message=" << Quote(e.what())
              << "\n";
    return 2;
  }
  if (version) {
    std::cout << "iib " << iib_version() << "\n"
              << "descriptor-format " << iib_format_version() << "\n"
              << "fingerprint-schema family,granularity,mapping,overlap,"
                 "channels,radius,mask_hash\n";
    return 0;
  }

  std::string name = "-";
  try {
    if (c_extract->parsed()) {
      name = "extract";
      extract.Run(global);
    } else if (c_match->parsed()) {
      name = "match";
      match.Run(global);
    } else if (c_eval->parsed()) {
      name = "eval";
      eval.Run(global);
    } else if (c_train->parsed()) {
      name = "train-select";
      train.Run(global);
    } else if (c_synth->parsed()) {
      name = "synth";
      synth.Run(global);
    } else if (c_bench->parsed()) {
      name = "bench";
      bench.Run(global);
    } else {
      std::cout << app.help();
      return 2;
    }
  } catch (const Failure& f) {
    std::cerr << "error subcommand=" << name << " status="
              << iib_status_name(f.status) << " message=" << Quote(f.message)
              << "\n";
    return 1;
  }
  return 0;
}
