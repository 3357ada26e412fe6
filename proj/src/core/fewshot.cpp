#include "core/fewshot.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <thread>

#include "core/error.hpp"

namespace jeanie {

LossResult episode_loss(const std::vector<double>& dplus, const std::vector<double>& dminus,
                        int beta, int n_way, int z_shot) {
  require(!dplus.empty() && !dminus.empty(), ErrorCode::EmptyInput,
          "distance vectors must be nonempty");
  require(beta >= 1 && beta <= static_cast<int>(dplus.size()), ErrorCode::InvalidArgument,
          "beta must be in [1, |d+|]");
  require(n_way >= 2 && z_shot >= 1, ErrorCode::InvalidArgument, "need n_way >= 2 and z_shot >= 1");

  auto mean = [](const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  };

  std::vector<double> sorted_plus = dplus;
  std::sort(sorted_plus.begin(), sorted_plus.end());
  const double target_plus =
      std::accumulate(sorted_plus.begin(), sorted_plus.begin() + beta, 0.0) / beta;

  // top set saturates to the whole vector on small batches
  const int k_minus = std::min<int>(n_way * z_shot * beta, static_cast<int>(dminus.size()));
  std::vector<double> sorted_minus = dminus;
  std::sort(sorted_minus.begin(), sorted_minus.end(), std::greater<>());
  const double target_minus =
      std::accumulate(sorted_minus.begin(), sorted_minus.begin() + k_minus, 0.0) / k_minus;

  const double mean_plus = mean(dplus);
  const double mean_minus = mean(dminus);

  LossResult res;
  res.value = (mean_plus - target_plus) * (mean_plus - target_plus) +
              (mean_minus - target_minus) * (mean_minus - target_minus);
  res.grad_dplus.assign(dplus.size(),
                        2.0 * (mean_plus - target_plus) / static_cast<double>(dplus.size()));
  res.grad_dminus.assign(dminus.size(),
                         2.0 * (mean_minus - target_minus) / static_cast<double>(dminus.size()));
  return res;
}

LabeledCorpus index_corpus(const std::vector<SkeletonSequence>& sequences) {
  LabeledCorpus corpus;
  corpus.sequences = sequences;
  for (std::size_t i = 0; i < sequences.size(); ++i) {
    const std::string& label = sequences[i].label;
    auto it = std::find(corpus.class_names.begin(), corpus.class_names.end(), label);
    std::size_t cls;
    if (it == corpus.class_names.end()) {
      cls = corpus.class_names.size();
      corpus.class_names.push_back(label);
      corpus.by_class.emplace_back();
    } else {
      cls = static_cast<std::size_t>(it - corpus.class_names.begin());
    }
    corpus.by_class[cls].push_back(static_cast<int>(i));
  }
  return corpus;
}

EpisodeDraw sample_episode(const LabeledCorpus& corpus, int n_way, int z_shot, Rng& rng) {
  const int n_classes = static_cast<int>(corpus.class_names.size());
  require(n_way >= 2 && z_shot >= 1, ErrorCode::InvalidArgument, "need n_way >= 2 and z_shot >= 1");
  require(n_classes >= n_way, ErrorCode::InsufficientData,
          "corpus has fewer classes than n_way");
  for (const auto& members : corpus.by_class)
    require(static_cast<int>(members.size()) >= z_shot + 1, ErrorCode::InsufficientData,
            "every class needs at least z_shot + 1 sequences");

  // partial Fisher-Yates: first n_way entries are distinct uniform classes
  std::vector<int> order(n_classes);
  std::iota(order.begin(), order.end(), 0);
  for (int i = 0; i < n_way; ++i) {
    const int j = i + static_cast<int>(rng.bounded(static_cast<std::uint64_t>(n_classes - i)));
    std::swap(order[i], order[j]);
  }

  EpisodeDraw draw;
  draw.classes.assign(order.begin(), order.begin() + n_way);

  // slot 0: query class; its supports exclude the query sequence
  const auto& query_members = corpus.by_class[draw.classes[0]];
  const int query_pos = static_cast<int>(rng.bounded(query_members.size()));
  draw.query = query_members[query_pos];

  draw.supports.resize(n_way);
  for (int n = 0; n < n_way; ++n) {
    std::vector<int> pool = corpus.by_class[draw.classes[n]];
    if (n == 0) pool.erase(pool.begin() + query_pos);
    for (int z = 0; z < z_shot; ++z) {
      const int pick = static_cast<int>(rng.bounded(pool.size()));
      draw.supports[n].push_back(pool[pick]);
      pool.erase(pool.begin() + pick);
    }
  }
  return draw;
}

int one_shot_classify(const FeatureMap& query, const std::vector<FeatureMap>& supports,
                      const AlignmentParams& params) {
  require(!supports.empty(), ErrorCode::EmptyInput, "no supports to classify against");
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t n = 0; n < supports.size(); ++n) {
    const DistanceTensor d4 = distance_tensor(query, supports[n], params);
    const double d = jeanie(d4, params).distance;
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(n);
    }
  }
  return best;
}

namespace {

struct ClassMotion {
  double freq1 = 1.0;
  double freq2 = 2.0;
  std::vector<double> amp;     // per joint
  std::vector<double> phase;   // per joint
  std::vector<double> dir;     // per joint, azimuthal direction of the planar swing
  std::vector<double> amp_y;   // per joint vertical bob
};

ClassMotion draw_class_motion(int joints, Rng& rng) {
  ClassMotion m;
  m.freq1 = rng.uniform(0.6, 2.4);
  m.freq2 = m.freq1 * rng.uniform(1.4, 2.2);
  m.amp.resize(joints);
  m.phase.resize(joints);
  m.dir.resize(joints);
  m.amp_y.resize(joints);
  for (int j = 0; j < joints; ++j) {
    const bool active = rng.next_unit() < 0.7;
    m.amp[j] = active ? rng.uniform(0.1, 0.4) : 0.0;
    m.phase[j] = rng.uniform(0.0, 6.283185307179586);
    m.dir[j] = rng.uniform(0.0, 6.283185307179586);
    m.amp_y[j] = rng.uniform(0.0, 0.08);
  }
  return m;
}

// deterministic non-degenerate rest pose for any joint count
void rest_pose(int joints, int j, double& x, double& y, double& z) {
  const double frac = joints > 1 ? static_cast<double>(j) / (joints - 1) : 0.0;
  x = 0.25 * std::sin(2.4 * j);
  y = 0.8 * (0.5 - frac);
  z = 0.12 * std::cos(1.7 * j);
}

}  // namespace

std::vector<SkeletonSequence> synth_corpus(int n_classes, int per_class, int joints, int frames,
                                           std::uint64_t seed, double view_noise_deg,
                                           double noise_sigma) {
  require(n_classes >= 1 && per_class >= 1 && joints >= 1 && frames >= 1,
          ErrorCode::InvalidArgument, "all corpus counts must be >= 1");
  require(view_noise_deg >= 0.0 && noise_sigma >= 0.0, ErrorCode::InvalidArgument,
          "noise magnitudes must be nonnegative");

  constexpr double kTwoPi = 6.283185307179586;
  std::vector<SkeletonSequence> corpus;
  corpus.reserve(static_cast<std::size_t>(n_classes) * per_class);

  for (int c = 0; c < n_classes; ++c) {
    Rng class_rng(derive_seed(seed, 0xC1A5 + static_cast<std::uint64_t>(c)));
    const ClassMotion motion = draw_class_motion(joints, class_rng);

    for (int i = 0; i < per_class; ++i) {
      Rng inst_rng(derive_seed(seed, (static_cast<std::uint64_t>(c) << 24) ^
                                         (0x1237 + static_cast<std::uint64_t>(i))));
      SkeletonSequence seq = SkeletonSequence::zeros(frames, joints);
      seq.label = "class_" + std::to_string(c);
      for (int t = 0; t < frames; ++t) {
        const double u = static_cast<double>(t) / frames;
        for (int j = 0; j < joints; ++j) {
          double x, y, z;
          rest_pose(joints, j, x, y, z);
          const double s1 = std::sin(kTwoPi * motion.freq1 * u + motion.phase[j]);
          const double s2 = std::sin(kTwoPi * motion.freq2 * u + 2.0 * motion.phase[j]);
          const double swing = motion.amp[j] * (s1 + 0.5 * s2);
          seq.at(t, j, 0) = x + swing * std::cos(motion.dir[j]);
          seq.at(t, j, 1) = y + motion.amp_y[j] * std::sin(kTwoPi * motion.freq1 * u);
          seq.at(t, j, 2) = z + swing * std::sin(motion.dir[j]);
        }
      }

      const double angle = inst_rng.uniform(-view_noise_deg, view_noise_deg);
      seq = simulate_view(seq, angle, 0.0, ViewMode::Euler);
      seq = normalize_range(center_by_torso(seq, std::min(2, joints - 1)));
      if (noise_sigma > 0.0) {
        for (double& v : seq.data) v += noise_sigma * inst_rng.normal();
        seq = normalize_range(center_by_torso(seq, std::min(2, joints - 1)));
      }
      corpus.push_back(std::move(seq));
    }
  }
  return corpus;
}

AlignMethod method_from_name(const std::string& name) {
  if (name == "softdtw") return AlignMethod::SoftDtw;
  if (name == "fvm") return AlignMethod::Fvm;
  if (name == "jeanie") return AlignMethod::Jeanie;
  raise(ErrorCode::InvalidArgument, "unknown method: " + name + " (softdtw|fvm|jeanie)");
}

std::string method_name(AlignMethod method) {
  switch (method) {
    case AlignMethod::SoftDtw: return "softdtw";
    case AlignMethod::Fvm: return "fvm";
    case AlignMethod::Jeanie: return "jeanie";
  }
  return "?";
}

namespace {

FeatureMap single_view_slice(const FeatureMap& expanded, int k, int kp) {
  FeatureMap out;
  out.dim = expanded.dim;
  out.K = 1;
  out.Kp = 1;
  out.tau = expanded.tau;
  out.data.assign(expanded.slice(k, kp, 0), expanded.slice(k, kp, 0) +
                                                static_cast<std::size_t>(expanded.tau) * expanded.dim);
  return out;
}

double pair_distance(const FeatureMap& query, const FeatureMap& support, AlignMethod method,
                     const AlignmentParams& align) {
  switch (method) {
    case AlignMethod::SoftDtw: {
      const DistanceTensor d4 = distance_tensor(query, support, align);
      return soft_dtw(d4.values, d4.tau, d4.taup, align.gamma).distance;
    }
    case AlignMethod::Fvm: {
      if (support.K * support.Kp > 1) return fvm_expanded(query, support, align).distance;
      const DistanceTensor d4 = distance_tensor(query, support, align);
      return fvm(d4, align).distance;
    }
    case AlignMethod::Jeanie: {
      if (support.K * support.Kp > 1) {
        // expanded support: best JEANIE over the support's simulated views
        std::vector<double> per_view;
        per_view.reserve(static_cast<std::size_t>(support.K) * support.Kp);
        for (int m = 0; m < support.K; ++m)
          for (int mp = 0; mp < support.Kp; ++mp) {
            const FeatureMap sv = single_view_slice(support, m, mp);
            const DistanceTensor d4 = distance_tensor(query, sv, align);
            per_view.push_back(jeanie(d4, align).distance);
          }
        return softmin(per_view, align.gamma);
      }
      const DistanceTensor d4 = distance_tensor(query, support, align);
      return jeanie(d4, align).distance;
    }
  }
  raise(ErrorCode::InvalidArgument, "unknown method");
}

}  // namespace

EpisodeRunResult run_episodes(const LabeledCorpus& corpus, const EpisodeRunParams& params) {
  require(params.episodes >= 0, ErrorCode::InvalidArgument, "episode count must be nonnegative");
  const auto start = std::chrono::steady_clock::now();

  // preprocessing is idempotent for already-normalized corpora
  LabeledCorpus prepared = corpus;
  for (auto& seq : prepared.sequences)
    seq = normalize_range(center_by_torso(seq, params.torso_index));

  Rng sampler(derive_seed(params.seed, 0xE915));
  std::vector<EpisodeDraw> draws;
  draws.reserve(params.episodes);
  for (int e = 0; e < params.episodes; ++e)
    draws.push_back(sample_episode(prepared, params.n_way, params.z_shot, sampler));

  // query features carry the simulated-view grid except for plain soft-DTW;
  // supports stay single-view unless expansion is requested
  const bool expand_query = params.method != AlignMethod::SoftDtw;
  ViewGrid unity;
  unity.azimuth_steps = 0;
  unity.altitude_steps = 0;
  unity.mode = params.grid.mode;
  const ViewGrid& query_grid = expand_query ? params.grid : unity;
  const ViewGrid& support_grid = (expand_query && params.expand_support) ? params.grid : unity;

  auto features_for = [&](int seq_index, const ViewGrid& grid) {
    const SkeletonSequence& seq = prepared.sequences[seq_index];
    std::optional<CameraModel> cam = params.camera;
    const auto views = generate_view_grid(grid, seq, cam);
    return encode_views(views, grid.k_azimuth(), grid.k_altitude(), params.blocking,
                        params.encoder);
  };

  std::vector<std::uint8_t> outcomes(params.episodes, 0);
  const int jobs = std::max(1, params.jobs);

  auto worker = [&](int first) {
    for (int e = first; e < params.episodes; e += jobs) {
      const EpisodeDraw& draw = draws[e];
      const FeatureMap query = features_for(draw.query, query_grid);
      int best_class = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (int n = 0; n < params.n_way; ++n) {
        double class_d = std::numeric_limits<double>::infinity();
        for (int idx : draw.supports[n]) {
          const FeatureMap support = features_for(idx, support_grid);
          class_d = std::min(class_d, pair_distance(query, support, params.method, params.align));
        }
        if (class_d < best_d) {
          best_d = class_d;
          best_class = n;
        }
      }
      outcomes[e] = best_class == 0 ? 1 : 0;
    }
  };

  if (jobs == 1 || params.episodes <= 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (int w = 0; w < jobs; ++w) pool.emplace_back(worker, w);
    for (auto& th : pool) th.join();
  }

  EpisodeRunResult res;
  res.episodes = params.episodes;
  res.outcomes = std::move(outcomes);
  res.correct = static_cast<int>(std::count(res.outcomes.begin(), res.outcomes.end(), 1));
  if (params.episodes > 0) {
    const double p = static_cast<double>(res.correct) / params.episodes;
    const double half = 1.96 * std::sqrt(p * (1.0 - p) / params.episodes);
    res.accuracy = p;
    res.ci95_low = std::max(0.0, p - half);
    res.ci95_high = std::min(1.0, p + half);
  }
  res.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

}  // namespace jeanie
