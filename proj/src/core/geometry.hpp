#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "core/skeleton.hpp"

namespace jeanie {

enum class ViewMode { Euler, CamVpc };

struct CameraModel {
  Eigen::Matrix3d intrinsics_left = Eigen::Matrix3d::Identity();
  Eigen::Matrix3d intrinsics_right = Eigen::Matrix3d::Identity();
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();
  double distance_m = 3.0;  // camera-to-subject distance for orbit placement
};

struct ViewGrid {
  int azimuth_steps = 3;   // eta_az
  int altitude_steps = 3;  // eta_alt
  double step_deg = 15.0;
  ViewMode mode = ViewMode::Euler;

  int k_azimuth() const { return 2 * azimuth_steps + 1; }
  int k_altitude() const { return 2 * altitude_steps + 1; }
};

// Single-axis rotations with the sign convention R_x = [[1,0,0],[0,c,s],[0,-s,c]],
// R_y = [[c,0,-s],[0,1,0],[s,0,c]], R_z = [[c,s,0],[-s,c,0],[0,0,1]].
Eigen::Matrix3d rotation_x(double deg);
Eigen::Matrix3d rotation_y(double deg);
Eigen::Matrix3d rotation_z(double deg);

enum class AxisOrder { XYZ, ZYX };

// Product of the single-axis matrices in the written order, e.g. XYZ gives
// R_x(tx) * R_y(ty) * R_z(tz).
Eigen::Matrix3d euler_rotation(double theta_x_deg, double theta_y_deg, double theta_z_deg,
                               AxisOrder order = AxisOrder::XYZ);

// S with S*p == p x t for every p.
Eigen::Matrix3d skew_symmetric(const Eigen::Vector3d& t);

// E = R * S(t); rank 2 whenever t != 0.
Eigen::Matrix3d essential_matrix(const CameraModel& cam);

// F = (M_r^-1)^T * E * M_l^-1; pixel-coordinate epipolar constraint.
Eigen::Matrix3d fundamental_matrix(const CameraModel& cam);

// Rigid viewpoint simulation. Euler mode rotates joints by
// R_x(altitude) * R_y(azimuth); camvpc mode maps every joint through
// p_r = R (p_l - t) for a camera orbited to the shifted azimuth/altitude at
// radius distance_m, then re-expresses the result in world-aligned axes.
SkeletonSequence simulate_view(const SkeletonSequence& seq, double azimuth_deg, double altitude_deg,
                               ViewMode mode, const std::optional<CameraModel>& cam = std::nullopt);

// Row-major K x K' grid of simulated views; element (k, k') carries the shift
// ((k - eta_az) * step, (k' - eta_alt) * step) and the center equals the input.
std::vector<SkeletonSequence> generate_view_grid(const ViewGrid& grid, const SkeletonSequence& seq,
                                                 const std::optional<CameraModel>& cam = std::nullopt);

}  // namespace jeanie
