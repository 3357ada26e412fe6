#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "core/alignment.hpp"
#include "core/encoder.hpp"
#include "core/fewshot.hpp"
#include "core/geometry.hpp"
#include "core/skeleton.hpp"

namespace jeanie {

// Flat key = value run configuration. Unknown keys are rejected and every
// numeric range is validated at load time. Defaults are the ablation-selected
// values: iota 2, M 8 with stride ratio 0.6, 15 degree grid step over
// [-45, 45], rbf sigma 2, 6 propagation layers, alpha 0.5.
struct RunConfig {
  std::uint64_t seed = 0;
  int jobs = 1;

  std::string geometry_mode = "euler";  // euler | camvpc
  double step_deg = 15.0;
  int eta_az = 3;
  int eta_alt = 3;

  int torso_index = 2;

  int block_size = 8;
  double stride_ratio = 0.6;

  std::string encoder_mode = "raw";  // raw | network
  std::string backbone = "s2gc";     // gcn | sgc | appnp | s2gc
  int layers = 6;
  double alpha = 0.5;
  int feature_dim = 32;
  int out_dim = 50;
  std::string graph = "auto";
  double dropout = 0.5;
  bool transformer_enabled = false;
  int transformer_depth = 6;
  int transformer_hidden = 64;
  int transformer_heads = 4;

  double gamma = 1e-4;
  int iota = 2;
  std::string base = "rbf";  // euclidean | rbf
  double sigma = 2.0;

  int n_way = 5;
  int z_shot = 1;
  int batch = 1;
  int beta = 1;
  int episodes = 500;
  bool expand_support = false;

  std::string io_input;
  std::string io_output;

  int synth_classes = 10;
  int synth_per_class = 20;
  int synth_joints = 15;
  int synth_frames = 40;
  double synth_view_noise_deg = 45.0;
  double synth_coord_noise = 0.01;

  int oracle_trials = 200;

  std::string bench_grids = "1x1,3x1,3x3";
  std::string bench_taus = "4,8,16";
  int bench_repeats = 9;

  static RunConfig defaults() { return RunConfig{}; }
  static RunConfig parse(const std::string& text);
  static RunConfig load(const std::string& path);

  void set(const std::string& key, const std::string& value);
  void validate() const;

  // sorted key=value lines with normalized numbers; basis of the hash
  std::string canonical() const;
  std::string hash() const;  // 16 hex chars, fnv-1a 64 over canonical()

  ViewGrid view_grid() const;
  BlockingParams blocking() const;
  EncoderConfig encoder() const;
  AlignmentParams alignment() const;
  EpisodeRunParams episode_params(AlignMethod method) const;
};

}  // namespace jeanie
