#pragma once

#include <optional>
#include <span>
#include <vector>

#include "core/feature_map.hpp"

namespace jeanie {

enum class BaseDistanceKind { Euclidean, Rbf };

struct AlignmentParams {
  double gamma = 1e-4;
  int iota = 2;
  BaseDistanceKind base = BaseDistanceKind::Rbf;
  double sigma = 2.0;
};

// Nonnegative base distances, K x K' x tau x tau', flat
// ((k*Kp + kp)*tau + t)*taup + tp.
struct DistanceTensor {
  int K = 1;
  int Kp = 1;
  int tau = 0;
  int taup = 0;
  std::vector<double> values;

  std::size_t index(int k, int kp, int t, int tp) const {
    return (static_cast<std::size_t>((k * Kp + kp) * tau + t)) * taup + tp;
  }
  double at(int k, int kp, int t, int tp) const { return values[index(k, kp, t, tp)]; }
  double& at(int k, int kp, int t, int tp) { return values[index(k, kp, t, tp)]; }
};

struct PathStep {
  int k = 0;
  int kp = 0;
  int t = 0;
  int tp = 0;
};

struct AlignmentResult {
  double distance = 0.0;
  std::optional<std::vector<double>> gradient;  // shaped like the input tensor
  std::optional<std::vector<PathStep>> path;    // start -> end, hard-min backtrack
};

// -gamma * log sum exp(-v/gamma), max-shifted. +inf entries carry zero mass;
// an all-infinite input yields +inf.
double softmin(std::span<const double> values, double gamma);

double base_distance(std::span<const double> x, std::span<const double> y,
                     BaseDistanceKind kind, double sigma);

// Entry (k,k',t,t') = base_distance(query slice, support column). The support
// map must be single-view.
DistanceTensor distance_tensor(const FeatureMap& query, const FeatureMap& support,
                               const AlignmentParams& params);

// Classical soft-DTW over a tau x tau' cost matrix (predecessors
// (t,t'-1), (t-1,t'), (t-1,t'-1)).
AlignmentResult soft_dtw(const std::vector<double>& d2, int tau, int taup, double gamma,
                         bool want_grad = false, bool want_path = false);

// Joint temporal-viewpoint alignment: paths start at any view at t=(1,1),
// end at any view at (tau,tau'), move temporally by {(0,1),(1,0),(1,1)} and
// across the view grid by at most iota per axis per step. The returned
// gradient is the soft path-occupancy of each cell.
AlignmentResult jeanie(const DistanceTensor& d4, const AlignmentParams& params,
                       bool want_grad = false, bool want_path = false);

// Greedy baseline: collapse the view axes per (t,t') by softmin, then run
// soft-DTW on the collapsed matrix. The gradient is chained through the
// collapse weights back to the full tensor.
AlignmentResult fvm(const DistanceTensor& d4, const AlignmentParams& params,
                    bool want_grad = false, bool want_path = false);

// Path-enumeration oracle for jeanie; refuses instances beyond max_paths.
double brute_force_jeanie(const DistanceTensor& d4, const AlignmentParams& params,
                          std::size_t max_paths = 10'000'000);

// FVM when both sides carry a view grid: per (t,t') the softmin runs over all
// query x support view pairs.
AlignmentResult fvm_expanded(const FeatureMap& query, const FeatureMap& support,
                             const AlignmentParams& params);

}  // namespace jeanie
