#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/alignment.hpp"
#include "core/encoder.hpp"
#include "core/geometry.hpp"
#include "core/skeleton.hpp"

namespace jeanie {

struct LossResult {
  double value = 0.0;
  std::vector<double> grad_dplus;
  std::vector<double> grad_dminus;
};

// Squared gaps between the mean within-/between-class distances and their
// detached top-k targets: beta smallest of d+ and min(N*Z*beta, |d-|)
// largest of d-. Targets carry no gradient.
LossResult episode_loss(const std::vector<double>& dplus, const std::vector<double>& dminus,
                        int beta, int n_way, int z_shot);

// One query vs one support sequence index set per episode; slot 0 of the
// class list always holds the query's class.
struct EpisodeDraw {
  int query = 0;
  std::vector<int> classes;                // N class ids, slot 0 = query class
  std::vector<std::vector<int>> supports;  // N x Z sequence indices
};

struct LabeledCorpus {
  std::vector<SkeletonSequence> sequences;
  std::vector<std::string> class_names;       // distinct labels in first-seen order
  std::vector<std::vector<int>> by_class;     // sequence indices per class
};

LabeledCorpus index_corpus(const std::vector<SkeletonSequence>& sequences);

EpisodeDraw sample_episode(const LabeledCorpus& corpus, int n_way, int z_shot, Rng& rng);

// argmin over supports of the alignment distance; ties break to the lowest
// index. Supports must be single-view maps.
int one_shot_classify(const FeatureMap& query, const std::vector<FeatureMap>& supports,
                      const AlignmentParams& params);

// Parametric harmonic trajectory families, one per class; instances get a
// random azimuth rotation within +/- view_noise_deg and coordinate noise,
// then are torso-centered and range-normalized.
std::vector<SkeletonSequence> synth_corpus(int n_classes, int per_class, int joints, int frames,
                                           std::uint64_t seed, double view_noise_deg,
                                           double noise_sigma = 0.01);

enum class AlignMethod { SoftDtw, Fvm, Jeanie };

AlignMethod method_from_name(const std::string& name);
std::string method_name(AlignMethod method);

struct EpisodeRunParams {
  int n_way = 5;
  int z_shot = 1;
  int episodes = 500;
  std::uint64_t seed = 0;
  bool expand_support = false;
  AlignMethod method = AlignMethod::Jeanie;
  int jobs = 1;
  int torso_index = 2;
  ViewGrid grid;
  std::optional<CameraModel> camera;
  BlockingParams blocking;
  EncoderConfig encoder;
  AlignmentParams align;
};

struct EpisodeRunResult {
  int episodes = 0;
  int correct = 0;
  double accuracy = 0.0;
  double ci95_low = 0.0;
  double ci95_high = 0.0;
  std::vector<std::uint8_t> outcomes;  // per-episode 0/1, episode order
  double wall_time_s = 0.0;
};

// N-way Z-shot evaluation loop: preprocess, expand query views, align with
// the configured method, classify nearest support. Deterministic per seed
// regardless of the worker count.
EpisodeRunResult run_episodes(const LabeledCorpus& corpus, const EpisodeRunParams& params);

}  // namespace jeanie
