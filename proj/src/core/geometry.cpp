#include "core/geometry.hpp"

#include <cmath>

#include "core/error.hpp"

namespace jeanie {

namespace {
constexpr double kPi = 3.14159265358979323846;
double to_rad(double deg) { return deg * kPi / 180.0; }
}  // namespace

Eigen::Matrix3d rotation_x(double deg) {
  const double c = std::cos(to_rad(deg)), s = std::sin(to_rad(deg));
  Eigen::Matrix3d m;
  m << 1, 0, 0,
       0, c, s,
       0, -s, c;
  return m;
}

Eigen::Matrix3d rotation_y(double deg) {
  const double c = std::cos(to_rad(deg)), s = std::sin(to_rad(deg));
  Eigen::Matrix3d m;
  m << c, 0, -s,
       0, 1, 0,
       s, 0, c;
  return m;
}

Eigen::Matrix3d rotation_z(double deg) {
  const double c = std::cos(to_rad(deg)), s = std::sin(to_rad(deg));
  Eigen::Matrix3d m;
  m << c, s, 0,
       -s, c, 0,
       0, 0, 1;
  return m;
}

Eigen::Matrix3d euler_rotation(double tx, double ty, double tz, AxisOrder order) {
  require(std::isfinite(tx) && std::isfinite(ty) && std::isfinite(tz), ErrorCode::InvalidArgument,
          "euler angles must be finite");
  switch (order) {
    case AxisOrder::XYZ:
      return rotation_x(tx) * rotation_y(ty) * rotation_z(tz);
    case AxisOrder::ZYX:
      return rotation_z(tz) * rotation_y(ty) * rotation_x(tx);
  }
  raise(ErrorCode::InvalidArgument, "unknown axis order");
}

Eigen::Matrix3d skew_symmetric(const Eigen::Vector3d& t) {
  Eigen::Matrix3d s;
  s << 0, t.z(), -t.y(),
       -t.z(), 0, t.x(),
       t.y(), -t.x(), 0;
  return s;
}

Eigen::Matrix3d essential_matrix(const CameraModel& cam) {
  return cam.rotation * skew_symmetric(cam.translation);
}

Eigen::Matrix3d fundamental_matrix(const CameraModel& cam) {
  constexpr double kDetEps = 1e-12;
  require(std::fabs(cam.intrinsics_left.determinant()) > kDetEps, ErrorCode::SingularIntrinsics,
          "left intrinsics matrix is not invertible");
  require(std::fabs(cam.intrinsics_right.determinant()) > kDetEps, ErrorCode::SingularIntrinsics,
          "right intrinsics matrix is not invertible");
  const Eigen::Matrix3d e = essential_matrix(cam);
  return cam.intrinsics_right.inverse().transpose() * e * cam.intrinsics_left.inverse();
}

SkeletonSequence simulate_view(const SkeletonSequence& seq, double azimuth_deg, double altitude_deg,
                               ViewMode mode, const std::optional<CameraModel>& cam) {
  require(seq.frames >= 1 && seq.joints >= 1, ErrorCode::EmptyInput, "empty sequence");

  Eigen::Matrix3d orbit = rotation_x(altitude_deg) * rotation_y(azimuth_deg);
  SkeletonSequence out = seq;

  if (mode == ViewMode::Euler) {
    if (azimuth_deg == 0.0 && altitude_deg == 0.0) return out;
    for (int t = 0; t < seq.frames; ++t)
      for (int j = 0; j < seq.joints; ++j) {
        const Eigen::Vector3d p(seq.at(t, j, 0), seq.at(t, j, 1), seq.at(t, j, 2));
        const Eigen::Vector3d q = orbit * p;
        out.at(t, j, 0) = q.x();
        out.at(t, j, 1) = q.y();
        out.at(t, j, 2) = q.z();
      }
    return out;
  }

  require(cam.has_value(), ErrorCode::MissingCamera, "camvpc mode requires camera parameters");
  require(cam->distance_m > 0.0, ErrorCode::InvalidArgument, "camera distance must be positive");

  // Baseline camera sits on the depth axis at the subject distance with
  // world-aligned axes; the simulated camera is the same pose orbited by the
  // requested shift. Joints pass through the rig transform and come back in
  // world-aligned coordinates.
  const Eigen::Vector3d base_pos(0.0, 0.0, cam->distance_m);
  const Eigen::Vector3d new_pos = orbit * base_pos;
  const Eigen::Matrix3d frame_rot = orbit.transpose();  // world -> new camera axes
  const Eigen::Vector3d t_rel = new_pos - base_pos;

  for (int t = 0; t < seq.frames; ++t)
    for (int j = 0; j < seq.joints; ++j) {
      const Eigen::Vector3d p_world(seq.at(t, j, 0), seq.at(t, j, 1), seq.at(t, j, 2));
      const Eigen::Vector3d p_left = p_world - base_pos;
      const Eigen::Vector3d p_right = frame_rot * (p_left - t_rel);
      const Eigen::Vector3d q = p_right + base_pos;
      out.at(t, j, 0) = q.x();
      out.at(t, j, 1) = q.y();
      out.at(t, j, 2) = q.z();
    }
  return out;
}

std::vector<SkeletonSequence> generate_view_grid(const ViewGrid& grid, const SkeletonSequence& seq,
                                                 const std::optional<CameraModel>& cam) {
  require(grid.azimuth_steps >= 0 && grid.altitude_steps >= 0, ErrorCode::InvalidArgument,
          "grid step counts must be nonnegative");
  require(grid.step_deg > 0.0, ErrorCode::InvalidArgument, "grid step size must be positive");
  std::vector<SkeletonSequence> views;
  views.reserve(static_cast<std::size_t>(grid.k_azimuth()) * grid.k_altitude());
  for (int k = 0; k < grid.k_azimuth(); ++k)
    for (int kp = 0; kp < grid.k_altitude(); ++kp) {
      const double az = (k - grid.azimuth_steps) * grid.step_deg;
      const double alt = (kp - grid.altitude_steps) * grid.step_deg;
      views.push_back(simulate_view(seq, az, alt, grid.mode, cam));
    }
  return views;
}

}  // namespace jeanie
