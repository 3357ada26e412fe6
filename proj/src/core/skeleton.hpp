#pragma once

#include <optional>
#include <string>
#include <vector>

namespace jeanie {

// T frames x J joints x 3 coordinates, flat row-major [frame][joint][xyz].
struct SkeletonSequence {
  int frames = 0;
  int joints = 0;
  std::vector<double> data;
  std::string label;
  // Optional per-subject joint-index partitions; empty means one subject
  // owning all joints.
  std::vector<std::vector<int>> subjects;

  double& at(int t, int j, int c) { return data[(static_cast<std::size_t>(t) * joints + j) * 3 + c]; }
  double at(int t, int j, int c) const { return data[(static_cast<std::size_t>(t) * joints + j) * 3 + c]; }

  static SkeletonSequence zeros(int frames, int joints);
};

// 3 x J x M block, flat [coord][joint][frame].
struct TemporalBlock {
  int joints = 0;
  int length = 0;
  std::vector<double> data;

  double& at(int c, int j, int f) { return data[(static_cast<std::size_t>(c) * joints + j) * length + f]; }
  double at(int c, int j, int f) const { return data[(static_cast<std::size_t>(c) * joints + j) * length + f]; }
};

struct BlockingParams {
  int block_size = 8;
  int stride = 5;

  // stride from the S = p*M convention, rounded to the nearest frame, min 1
  static BlockingParams from_ratio(int block_size, double stride_ratio);
};

// Per-frame translation so the chosen torso joint sits at the origin. With
// subject partitions each subject is centered by its own torso joint
// (torso_index is a position within the partition).
SkeletonSequence center_by_torso(const SkeletonSequence& seq, int torso_index);

// Divide each axis by its max-abs over all frames and joints (per subject).
// An identically-zero axis is left unchanged.
SkeletonSequence normalize_range(const SkeletonSequence& seq);

std::vector<TemporalBlock> split_blocks(const SkeletonSequence& seq, const BlockingParams& params);

// Elementwise mean of same-shaped feature buffers.
std::vector<double> aggregate_subjects(const std::vector<std::vector<double>>& features);

int block_count(int frames, const BlockingParams& params);

// Partitions to iterate: the declared subjects, or the whole joint range.
std::vector<std::vector<int>> effective_subjects(const SkeletonSequence& seq);

}  // namespace jeanie
