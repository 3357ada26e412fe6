#include "core/skeleton.hpp"

#include <cmath>
#include <cstdlib>

#include "core/error.hpp"

namespace jeanie {

SkeletonSequence SkeletonSequence::zeros(int frames, int joints) {
  require(frames >= 1 && joints >= 1, ErrorCode::EmptyInput, "sequence needs at least one frame and one joint");
  SkeletonSequence seq;
  seq.frames = frames;
  seq.joints = joints;
  seq.data.assign(static_cast<std::size_t>(frames) * joints * 3, 0.0);
  return seq;
}

BlockingParams BlockingParams::from_ratio(int block_size, double stride_ratio) {
  require(block_size >= 1, ErrorCode::InvalidArgument, "block_size must be >= 1");
  require(stride_ratio > 0.0 && stride_ratio <= 1.0, ErrorCode::InvalidArgument,
          "stride_ratio must be in (0, 1]");
  BlockingParams p;
  p.block_size = block_size;
  p.stride = std::max(1, static_cast<int>(std::lround(stride_ratio * block_size)));
  return p;
}

std::vector<std::vector<int>> effective_subjects(const SkeletonSequence& seq) {
  if (!seq.subjects.empty()) return seq.subjects;
  std::vector<int> all(seq.joints);
  for (int j = 0; j < seq.joints; ++j) all[j] = j;
  return {all};
}

SkeletonSequence center_by_torso(const SkeletonSequence& seq, int torso_index) {
  require(seq.frames >= 1 && seq.joints >= 1, ErrorCode::EmptyInput, "empty sequence");
  SkeletonSequence out = seq;
  for (const auto& part : effective_subjects(seq)) {
    require(torso_index >= 0 && torso_index < static_cast<int>(part.size()),
            ErrorCode::IndexOutOfRange, "torso index outside subject joint range");
    const int torso = part[torso_index];
    for (int t = 0; t < seq.frames; ++t) {
      const double cx = seq.at(t, torso, 0);
      const double cy = seq.at(t, torso, 1);
      const double cz = seq.at(t, torso, 2);
      for (int j : part) {
        out.at(t, j, 0) = seq.at(t, j, 0) - cx;
        out.at(t, j, 1) = seq.at(t, j, 1) - cy;
        out.at(t, j, 2) = seq.at(t, j, 2) - cz;
      }
    }
  }
  return out;
}

SkeletonSequence normalize_range(const SkeletonSequence& seq) {
  require(seq.frames >= 1 && seq.joints >= 1, ErrorCode::EmptyInput, "empty sequence");
  SkeletonSequence out = seq;
  for (const auto& part : effective_subjects(seq)) {
    for (int c = 0; c < 3; ++c) {
      double max_abs = 0.0;
      for (int t = 0; t < seq.frames; ++t)
        for (int j : part) max_abs = std::max(max_abs, std::fabs(seq.at(t, j, c)));
      if (max_abs == 0.0) continue;  // degenerate axis: skip
      for (int t = 0; t < seq.frames; ++t)
        for (int j : part) out.at(t, j, c) = seq.at(t, j, c) / max_abs;
    }
  }
  return out;
}

int block_count(int frames, const BlockingParams& params) {
  require(params.block_size >= 1 && params.stride >= 1 && params.stride <= params.block_size,
          ErrorCode::InvalidArgument, "blocking requires 1 <= stride <= block_size");
  require(frames >= params.block_size, ErrorCode::SequenceTooShort,
          "sequence shorter than one temporal block");
  return (frames - params.block_size) / params.stride + 1;
}

std::vector<TemporalBlock> split_blocks(const SkeletonSequence& seq, const BlockingParams& params) {
  const int tau = block_count(seq.frames, params);
  std::vector<TemporalBlock> blocks(tau);
  for (int i = 0; i < tau; ++i) {
    TemporalBlock& b = blocks[i];
    b.joints = seq.joints;
    b.length = params.block_size;
    b.data.resize(static_cast<std::size_t>(3) * seq.joints * params.block_size);
    const int start = i * params.stride;
    for (int c = 0; c < 3; ++c)
      for (int j = 0; j < seq.joints; ++j)
        for (int f = 0; f < params.block_size; ++f)
          b.at(c, j, f) = seq.at(start + f, j, c);
  }
  return blocks;
}

std::vector<double> aggregate_subjects(const std::vector<std::vector<double>>& features) {
  require(!features.empty(), ErrorCode::EmptyInput, "no feature maps to aggregate");
  const std::size_t n = features.front().size();
  for (const auto& f : features)
    require(f.size() == n, ErrorCode::DimensionMismatch, "feature maps differ in shape");
  std::vector<double> mean(n, 0.0);
  for (const auto& f : features)
    for (std::size_t i = 0; i < n; ++i) mean[i] += f[i];
  const double inv = 1.0 / static_cast<double>(features.size());
  for (double& v : mean) v *= inv;
  return mean;
}

}  // namespace jeanie
