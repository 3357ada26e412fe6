#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "core/feature_map.hpp"
#include "core/rng.hpp"
#include "core/skeleton.hpp"

namespace jeanie {

enum class GnnVariant { Gcn, Sgc, Appnp, S2gc };
enum class FeatureMode { Raw, Network };

struct TransformerConfig {
  bool enabled = false;
  int depth = 6;
  int hidden = 64;
  int heads = 4;
};

struct EncoderConfig {
  FeatureMode mode = FeatureMode::Raw;
  GnnVariant backbone = GnnVariant::S2gc;
  int layers = 6;
  double alpha = 0.5;
  int feature_dim = 32;  // d, per-joint block feature size
  int out_dim = 50;      // d', final feature size
  std::string graph = "auto";
  double dropout = 0.5;
  TransformerConfig transformer;
  std::uint64_t seed = 0;
};

struct JointGraph {
  Eigen::MatrixXd adjacency;
  Eigen::MatrixXd normalized;  // D~^-1/2 (A+I) D~^-1/2
};

// S = D~^-1/2 (A+I) D~^-1/2 for a symmetric zero-diagonal binary adjacency.
Eigen::MatrixXd normalized_adjacency(const Eigen::MatrixXd& adjacency);

JointGraph make_joint_graph(const Eigen::MatrixXd& adjacency);

// Built-in body layouts: uwa15, openpose18, kinect20, ntu25; "auto" picks by
// joint count and falls back to a chain, "chain" forces the fallback.
JointGraph builtin_graph(const std::string& name, int joints);

struct MlpWeights {
  Eigen::MatrixXd w1, w2, w3;  // 3M->6M->9M->d, biases zero, LN affine identity
};

struct TransformerLayerWeights {
  Eigen::MatrixXd wq, wk, wv, wo;  // d x d
  Eigen::MatrixXd m1, m2;          // hidden x d, d x hidden
};

struct TransformerWeights {
  Eigen::VectorXd token;  // learnable row prepended to the joint features
  std::vector<TransformerLayerWeights> layers;
};

struct EncoderWeights {
  MlpWeights mlp;
  std::vector<Eigen::MatrixXd> gcn_theta;  // per-layer d x d, GCN only
  std::optional<TransformerWeights> transformer;
  Eigen::MatrixXd projection;  // d' x d
};

// All weights drawn N(0,1) from the config seed in a fixed order, so query
// and support encodings share one network.
EncoderWeights make_encoder_weights(const EncoderConfig& cfg, int block_size);

// Inverted-dropout mask: 0 with probability rate, else 1/(1-rate).
std::vector<double> dropout_mask(std::size_t n, double rate, Rng& rng);

// FC-LN-ReLU, FC-LN-ReLU, Dropout, FC-LN per joint column; returns d x J.
Eigen::MatrixXd mlp_encode(const TemporalBlock& block, const MlpWeights& weights,
                           double dropout, bool training, Rng* rng);

// Spectral propagation over the joint graph; x is J x d. Theta is identity
// for sgc/appnp/s2gc and per-layer for gcn.
Eigen::MatrixXd gnn_forward(const Eigen::MatrixXd& x, const JointGraph& graph, GnnVariant variant,
                            int layers, double alpha, const std::vector<Eigen::MatrixXd>& theta);

// Pre-LN transformer over [token; x] + sinusoidal positions; returns the
// token row after the final LayerNorm.
Eigen::VectorXd transformer_encode(const Eigen::MatrixXd& x, const TransformerWeights& weights,
                                   int depth, int heads);

// Sinusoidal position table, (1+J) x d, interleaved sine/cosine, base 1e4.
Eigen::MatrixXd positional_table(int rows, int dim);

// Full per-view, per-block encoding producing the query-form feature map
// (support form via K = Kp = 1). Views are K*Kp sequences in row-major grid
// order and must share frame/joint counts.
FeatureMap encode_views(const std::vector<SkeletonSequence>& views, int K, int Kp,
                        const BlockingParams& blocking, const EncoderConfig& cfg,
                        bool training = false);

}  // namespace jeanie
