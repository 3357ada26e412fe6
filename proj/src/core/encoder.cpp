#include "core/encoder.hpp"

#include <cmath>
#include <utility>

#include "core/error.hpp"

namespace jeanie {

namespace {

constexpr double kLnEps = 1e-5;

Eigen::VectorXd layer_norm(const Eigen::VectorXd& v) {
  const double mean = v.mean();
  const double var = (v.array() - mean).square().mean();
  return (v.array() - mean) / std::sqrt(var + kLnEps);
}

Eigen::MatrixXd layer_norm_rows(const Eigen::MatrixXd& m) {
  Eigen::MatrixXd out(m.rows(), m.cols());
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    out.row(r) = layer_norm(m.row(r).transpose()).transpose();
  return out;
}

Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = rng.normal();
  return m;
}

double gelu(double x) {
  return 0.5 * x * (1.0 + std::erf(x / 1.4142135623730951));
}

std::vector<std::pair<int, int>> builtin_edges(int joints) {
  switch (joints) {
    case 15:  // head, neck, torso, L/R arm chains, L/R leg chains
      return {{0, 1}, {1, 2}, {1, 3}, {3, 4}, {4, 5}, {1, 6}, {6, 7}, {7, 8},
              {2, 9}, {9, 10}, {10, 11}, {2, 12}, {12, 13}, {13, 14}};
    case 18:  // openpose coco layout
      return {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {1, 5}, {5, 6}, {6, 7}, {1, 8}, {8, 9},
              {9, 10}, {1, 11}, {11, 12}, {12, 13}, {0, 14}, {14, 16}, {0, 15}, {15, 17}};
    case 20:  // kinect v1 layout
      return {{0, 1}, {1, 2}, {2, 3}, {2, 4}, {4, 5}, {5, 6}, {6, 7}, {2, 8}, {8, 9}, {9, 10},
              {10, 11}, {0, 12}, {12, 13}, {13, 14}, {14, 15}, {0, 16}, {16, 17}, {17, 18}, {18, 19}};
    case 25:  // kinect v2 layout
      return {{0, 1}, {1, 20}, {2, 20}, {3, 2}, {4, 20}, {5, 4}, {6, 5}, {7, 6},
              {8, 20}, {9, 8}, {10, 9}, {11, 10}, {12, 0}, {13, 12}, {14, 13}, {15, 14},
              {16, 0}, {17, 16}, {18, 17}, {19, 18}, {21, 22}, {22, 7}, {23, 24}, {24, 11}};
    default:
      return {};
  }
}

Eigen::MatrixXd adjacency_from_edges(int joints, const std::vector<std::pair<int, int>>& edges) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(joints, joints);
  for (const auto& [i, j] : edges) {
    a(i, j) = 1.0;
    a(j, i) = 1.0;
  }
  return a;
}

Eigen::MatrixXd chain_adjacency(int joints) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(joints, joints);
  for (int j = 0; j + 1 < joints; ++j) {
    a(j, j + 1) = 1.0;
    a(j + 1, j) = 1.0;
  }
  return a;
}

}  // namespace

Eigen::MatrixXd normalized_adjacency(const Eigen::MatrixXd& adjacency) {
  require(adjacency.rows() == adjacency.cols() && adjacency.rows() >= 1,
          ErrorCode::DimensionMismatch, "adjacency must be square and nonempty");
  require(adjacency.isApprox(adjacency.transpose(), 0.0), ErrorCode::InvalidArgument,
          "adjacency must be symmetric");
  require(adjacency.diagonal().isZero(0.0), ErrorCode::InvalidArgument,
          "adjacency must have a zero diagonal");
  const Eigen::Index n = adjacency.rows();
  const Eigen::MatrixXd with_loops = adjacency + Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd inv_sqrt_deg(n);
  for (Eigen::Index i = 0; i < n; ++i) inv_sqrt_deg(i) = 1.0 / std::sqrt(with_loops.row(i).sum());
  return inv_sqrt_deg.asDiagonal() * with_loops * inv_sqrt_deg.asDiagonal();
}

JointGraph make_joint_graph(const Eigen::MatrixXd& adjacency) {
  JointGraph g;
  g.adjacency = adjacency;
  g.normalized = normalized_adjacency(adjacency);
  return g;
}

JointGraph builtin_graph(const std::string& name, int joints) {
  require(joints >= 1, ErrorCode::InvalidArgument, "graph needs at least one joint");
  auto by_count = [&](int expected) {
    require(joints == expected, ErrorCode::DimensionMismatch,
            "graph '" + name + "' expects " + std::to_string(expected) + " joints");
    return make_joint_graph(adjacency_from_edges(expected, builtin_edges(expected)));
  };
  if (name == "uwa15") return by_count(15);
  if (name == "openpose18") return by_count(18);
  if (name == "kinect20") return by_count(20);
  if (name == "ntu25") return by_count(25);
  if (name == "chain") return make_joint_graph(chain_adjacency(joints));
  if (name == "auto") {
    const auto edges = builtin_edges(joints);
    if (!edges.empty()) return make_joint_graph(adjacency_from_edges(joints, edges));
    return make_joint_graph(chain_adjacency(joints));
  }
  raise(ErrorCode::InvalidArgument, "unknown graph name: " + name);
}

EncoderWeights make_encoder_weights(const EncoderConfig& cfg, int block_size) {
  require(block_size >= 1, ErrorCode::InvalidArgument, "block size must be positive");
  require(cfg.feature_dim >= 1 && cfg.out_dim >= 1, ErrorCode::InvalidArgument,
          "feature dimensions must be positive");
  require(cfg.layers >= 1, ErrorCode::InvalidArgument, "layer count must be >= 1");
  require(cfg.alpha > 0.0 && cfg.alpha <= 1.0, ErrorCode::InvalidArgument,
          "alpha must be in (0, 1]");

  Rng rng(derive_seed(cfg.seed, 0x0e11c0de));
  const int m3 = 3 * block_size;
  EncoderWeights w;
  w.mlp.w1 = random_matrix(2 * m3, m3, rng);
  w.mlp.w2 = random_matrix(3 * m3, 2 * m3, rng);
  w.mlp.w3 = random_matrix(cfg.feature_dim, 3 * m3, rng);
  if (cfg.backbone == GnnVariant::Gcn) {
    w.gcn_theta.reserve(cfg.layers);
    for (int l = 0; l < cfg.layers; ++l)
      w.gcn_theta.push_back(random_matrix(cfg.feature_dim, cfg.feature_dim, rng));
  }
  if (cfg.transformer.enabled) {
    require(cfg.feature_dim % cfg.transformer.heads == 0, ErrorCode::InvalidArgument,
            "head count must divide the feature dimension");
    TransformerWeights tw;
    tw.token = random_matrix(cfg.feature_dim, 1, rng).col(0);
    tw.layers.resize(cfg.transformer.depth);
    for (auto& layer : tw.layers) {
      layer.wq = random_matrix(cfg.feature_dim, cfg.feature_dim, rng);
      layer.wk = random_matrix(cfg.feature_dim, cfg.feature_dim, rng);
      layer.wv = random_matrix(cfg.feature_dim, cfg.feature_dim, rng);
      layer.wo = random_matrix(cfg.feature_dim, cfg.feature_dim, rng);
      layer.m1 = random_matrix(cfg.transformer.hidden, cfg.feature_dim, rng);
      layer.m2 = random_matrix(cfg.feature_dim, cfg.transformer.hidden, rng);
    }
    w.transformer = std::move(tw);
  }
  w.projection = random_matrix(cfg.out_dim, cfg.feature_dim, rng);
  return w;
}

std::vector<double> dropout_mask(std::size_t n, double rate, Rng& rng) {
  require(rate >= 0.0 && rate < 1.0, ErrorCode::InvalidArgument, "dropout rate must be in [0, 1)");
  std::vector<double> mask(n, 1.0);
  if (rate == 0.0) return mask;
  const double keep = 1.0 / (1.0 - rate);
  for (double& v : mask) v = rng.next_unit() < rate ? 0.0 : keep;
  return mask;
}

Eigen::MatrixXd mlp_encode(const TemporalBlock& block, const MlpWeights& weights,
                           double dropout, bool training, Rng* rng) {
  const int m3 = 3 * block.length;
  require(weights.w1.cols() == m3, ErrorCode::DimensionMismatch,
          "block length does not match the MLP input size");
  require(!training || rng != nullptr, ErrorCode::InvalidArgument,
          "training mode needs a generator for dropout");

  const Eigen::Index d = weights.w3.rows();
  Eigen::MatrixXd out(d, block.joints);
  for (int j = 0; j < block.joints; ++j) {
    Eigen::VectorXd v(m3);
    for (int f = 0; f < block.length; ++f)
      for (int c = 0; c < 3; ++c) v(3 * f + c) = block.at(c, j, f);
    Eigen::VectorXd h = layer_norm(weights.w1 * v).cwiseMax(0.0);
    h = layer_norm(weights.w2 * h).cwiseMax(0.0);
    if (training && dropout > 0.0) {
      const auto mask = dropout_mask(static_cast<std::size_t>(h.size()), dropout, *rng);
      for (Eigen::Index i = 0; i < h.size(); ++i) h(i) *= mask[i];
    }
    out.col(j) = layer_norm(weights.w3 * h);
  }
  return out;
}

Eigen::MatrixXd gnn_forward(const Eigen::MatrixXd& x, const JointGraph& graph, GnnVariant variant,
                            int layers, double alpha, const std::vector<Eigen::MatrixXd>& theta) {
  require(x.rows() == graph.normalized.rows(), ErrorCode::DimensionMismatch,
          "node count does not match the graph");
  require(layers >= 1, ErrorCode::InvalidArgument, "layer count must be >= 1");
  const Eigen::MatrixXd& s = graph.normalized;

  switch (variant) {
    case GnnVariant::Gcn: {
      require(static_cast<int>(theta.size()) == layers, ErrorCode::DimensionMismatch,
              "gcn needs one weight matrix per layer");
      Eigen::MatrixXd h = x;
      for (int l = 0; l < layers; ++l) {
        h = s * h * theta[l];
        if (l + 1 < layers) h = h.cwiseMax(0.0);
      }
      return h;
    }
    case GnnVariant::Sgc: {
      Eigen::MatrixXd h = x;
      for (int l = 0; l < layers; ++l) h = s * h;
      return h;
    }
    case GnnVariant::Appnp: {
      require(alpha > 0.0 && alpha <= 1.0, ErrorCode::InvalidArgument, "alpha must be in (0, 1]");
      Eigen::MatrixXd h = x;
      for (int l = 0; l < layers; ++l) h = (1.0 - alpha) * (s * h) + alpha * x;
      return h;
    }
    case GnnVariant::S2gc: {
      require(alpha >= 0.0 && alpha <= 1.0, ErrorCode::InvalidArgument, "alpha must be in [0, 1]");
      Eigen::MatrixXd power = x;
      Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(x.rows(), x.cols());
      for (int l = 0; l < layers; ++l) {
        power = s * power;
        sum += (1.0 - alpha) * power + alpha * x;
      }
      return sum / static_cast<double>(layers);
    }
  }
  raise(ErrorCode::InvalidArgument, "unknown gnn variant");
}

Eigen::MatrixXd positional_table(int rows, int dim) {
  Eigen::MatrixXd e(rows, dim);
  for (int p = 0; p < rows; ++p)
    for (int i = 0; i < dim; ++i) {
      const double exponent = static_cast<double>(i - (i % 2)) / dim;
      const double angle = p / std::pow(1e4, exponent);
      e(p, i) = (i % 2 == 0) ? std::sin(angle) : std::cos(angle);
    }
  return e;
}

Eigen::VectorXd transformer_encode(const Eigen::MatrixXd& x, const TransformerWeights& weights,
                                   int depth, int heads) {
  const Eigen::Index d = x.cols();
  require(weights.token.size() == d, ErrorCode::DimensionMismatch,
          "token dimension does not match the input");
  require(heads >= 1 && d % heads == 0, ErrorCode::InvalidArgument,
          "head count must divide the feature dimension");
  require(depth >= 0 && depth <= static_cast<int>(weights.layers.size()),
          ErrorCode::DimensionMismatch, "depth exceeds the available layers");

  const Eigen::Index n = x.rows() + 1;
  Eigen::MatrixXd z(n, d);
  z.row(0) = weights.token.transpose();
  z.bottomRows(x.rows()) = x;
  z += positional_table(static_cast<int>(n), static_cast<int>(d));

  const Eigen::Index dh = d / heads;
  for (int l = 0; l < depth; ++l) {
    const TransformerLayerWeights& lw = weights.layers[l];

    const Eigen::MatrixXd ln1 = layer_norm_rows(z);
    const Eigen::MatrixXd q = ln1 * lw.wq.transpose();
    const Eigen::MatrixXd k = ln1 * lw.wk.transpose();
    const Eigen::MatrixXd v = ln1 * lw.wv.transpose();
    Eigen::MatrixXd heads_out(n, d);
    for (int h = 0; h < heads; ++h) {
      const auto qh = q.middleCols(h * dh, dh);
      const auto kh = k.middleCols(h * dh, dh);
      const auto vh = v.middleCols(h * dh, dh);
      Eigen::MatrixXd logits = qh * kh.transpose() / std::sqrt(static_cast<double>(dh));
      for (Eigen::Index r = 0; r < n; ++r) {
        const double mx = logits.row(r).maxCoeff();
        Eigen::ArrayXd ex = (logits.row(r).array() - mx).exp();
        logits.row(r) = (ex / ex.sum()).matrix();
      }
      heads_out.middleCols(h * dh, dh) = logits * vh;
    }
    z += heads_out * lw.wo.transpose();

    const Eigen::MatrixXd ln2 = layer_norm_rows(z);
    Eigen::MatrixXd hidden = ln2 * lw.m1.transpose();
    hidden = hidden.unaryExpr([](double u) { return gelu(u); });
    z += hidden * lw.m2.transpose();
  }
  return layer_norm(z.row(0).transpose());
}

namespace {

SkeletonSequence subject_slice(const SkeletonSequence& seq, const std::vector<int>& part) {
  SkeletonSequence sub = SkeletonSequence::zeros(seq.frames, static_cast<int>(part.size()));
  for (int t = 0; t < seq.frames; ++t)
    for (std::size_t j = 0; j < part.size(); ++j)
      for (int c = 0; c < 3; ++c) sub.at(t, static_cast<int>(j), c) = seq.at(t, part[j], c);
  return sub;
}

// d'-vector for one temporal block of a single-subject sequence
Eigen::VectorXd encode_block(const TemporalBlock& block, const EncoderConfig& cfg,
                             const EncoderWeights& weights, const JointGraph& graph,
                             bool training, Rng* rng) {
  const Eigen::MatrixXd per_joint = mlp_encode(block, weights.mlp, cfg.dropout, training, rng);
  const Eigen::MatrixXd propagated = gnn_forward(per_joint.transpose(), graph, cfg.backbone,
                                                 cfg.layers, cfg.alpha, weights.gcn_theta);
  Eigen::VectorXd pooled;
  if (cfg.transformer.enabled) {
    pooled = transformer_encode(propagated, *weights.transformer, cfg.transformer.depth,
                                cfg.transformer.heads);
  } else {
    pooled = propagated.colwise().mean().transpose();
  }
  return weights.projection * pooled;
}

}  // namespace

FeatureMap encode_views(const std::vector<SkeletonSequence>& views, int K, int Kp,
                        const BlockingParams& blocking, const EncoderConfig& cfg, bool training) {
  require(K >= 1 && Kp >= 1, ErrorCode::InvalidArgument, "grid must be nonempty");
  require(views.size() == static_cast<std::size_t>(K) * Kp, ErrorCode::DimensionMismatch,
          "view count does not match the grid");
  const int frames = views.front().frames;
  const int joints = views.front().joints;
  for (const auto& v : views)
    require(v.frames == frames && v.joints == joints, ErrorCode::DimensionMismatch,
            "all views must share frame and joint counts");

  const auto parts = effective_subjects(views.front());
  const int tau = block_count(frames, blocking);

  FeatureMap map;
  map.K = K;
  map.Kp = Kp;
  map.tau = tau;

  if (cfg.mode == FeatureMode::Raw) {
    map.dim = 3 * static_cast<int>(parts.front().size()) * blocking.block_size;
    for (const auto& p : parts)
      require(static_cast<int>(p.size()) == static_cast<int>(parts.front().size()),
              ErrorCode::DimensionMismatch, "subjects must share joint counts");
    map.data.resize(static_cast<std::size_t>(K) * Kp * tau * map.dim);
    for (int k = 0; k < K; ++k)
      for (int kp = 0; kp < Kp; ++kp) {
        const SkeletonSequence& view = views[static_cast<std::size_t>(k) * Kp + kp];
        std::vector<std::vector<TemporalBlock>> per_subject;
        per_subject.reserve(parts.size());
        for (const auto& p : parts) per_subject.push_back(split_blocks(subject_slice(view, p), blocking));
        for (int t = 0; t < tau; ++t) {
          std::vector<std::vector<double>> flats;
          flats.reserve(parts.size());
          for (const auto& blocks : per_subject) flats.push_back(blocks[t].data);
          const auto mean = aggregate_subjects(flats);
          std::copy(mean.begin(), mean.end(), map.slice(k, kp, t));
        }
      }
    return map;
  }

  const EncoderWeights weights = make_encoder_weights(cfg, blocking.block_size);
  map.dim = cfg.out_dim;
  map.data.resize(static_cast<std::size_t>(K) * Kp * tau * map.dim);

  std::vector<JointGraph> graphs;
  graphs.reserve(parts.size());
  for (const auto& p : parts) graphs.push_back(builtin_graph(cfg.graph, static_cast<int>(p.size())));

  for (int k = 0; k < K; ++k)
    for (int kp = 0; kp < Kp; ++kp) {
      const SkeletonSequence& view = views[static_cast<std::size_t>(k) * Kp + kp];
      std::vector<std::vector<TemporalBlock>> per_subject;
      per_subject.reserve(parts.size());
      for (const auto& p : parts) per_subject.push_back(split_blocks(subject_slice(view, p), blocking));
      for (int t = 0; t < tau; ++t) {
        std::vector<std::vector<double>> encoded;
        encoded.reserve(parts.size());
        for (std::size_t s = 0; s < parts.size(); ++s) {
          Rng rng(derive_seed(cfg.seed, (static_cast<std::uint64_t>(k * Kp + kp) << 32) ^
                                            (static_cast<std::uint64_t>(t) << 8) ^ s));
          const Eigen::VectorXd f = encode_block(per_subject[s][t], cfg, weights, graphs[s],
                                                 training, training ? &rng : nullptr);
          encoded.emplace_back(f.data(), f.data() + f.size());
        }
        const auto mean = aggregate_subjects(encoded);
        std::copy(mean.begin(), mean.end(), map.slice(k, kp, t));
      }
    }
  return map;
}

}  // namespace jeanie
