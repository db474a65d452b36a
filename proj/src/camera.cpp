#include "textworld/camera.hpp"

#include <cmath>

#include "textworld/error.hpp"

namespace textworld {

double CameraIntrinsics::focal_length() const {
  return 0.5 * height / std::tan(0.5 * vertical_fov);
}

void CameraIntrinsics::validate() const {
  if (width <= 0 || height <= 0) throw Error("camera image size must be positive");
  if (!(vertical_fov > 0 && vertical_fov < kPi)) throw Error("camera fov must lie in (0, pi)");
}

void horizontal_basis(const Vec3& gravity, Vec3& e1, Vec3& e2) {
  Vec3 up = -normalize(gravity);
  // Prefer world +x as the yaw origin so -z gravity gives the usual frame.
  Vec3 ref = std::abs(up.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
  e1 = normalize(ref - up * dot(ref, up));
  e2 = cross(up, e1);
}

Vec3 view_direction(double pitch, double yaw, const Vec3& gravity) {
  Vec3 e1, e2;
  horizontal_basis(gravity, e1, e2);
  Vec3 up = -normalize(gravity);
  return normalize((e1 * std::cos(yaw) + e2 * std::sin(yaw)) * std::cos(pitch) +
                   up * std::sin(pitch));
}

Camera::Camera(const CameraPose& pose, const CameraIntrinsics& intrinsics, const Vec3& gravity)
    : pose_(pose), intrinsics_(intrinsics) {
  if (!is_finite(pose.position) || !std::isfinite(pose.pitch) || !std::isfinite(pose.yaw) ||
      !std::isfinite(pose.roll))
    throw Error("camera pose is not finite");
  intrinsics.validate();
  position_ = pose.position;
  forward_ = view_direction(pose.pitch, pose.yaw, gravity);
  Vec3 world_up = -normalize(gravity);
  Vec3 r = cross(forward_, world_up);
  if (length(r) < 1e-9) {
    Vec3 e1, e2;
    horizontal_basis(gravity, e1, e2);
    r = cross(forward_, e1);
  }
  right_ = normalize(r);
  up_ = cross(right_, forward_);
  if (pose.roll != 0) {
    right_ = rotate(right_, forward_, pose.roll);
    up_ = rotate(up_, forward_, pose.roll);
  }
  focal_ = intrinsics.focal_length();
  cx_ = 0.5 * intrinsics.width;
  cy_ = 0.5 * intrinsics.height;
}

Vec3 Camera::to_camera(const Vec3& world) const {
  Vec3 d = world - position_;
  return {dot(d, right_), dot(d, up_), dot(d, forward_)};
}

Vec3 Camera::direction_to_camera(const Vec3& v) const {
  return {dot(v, right_), dot(v, up_), dot(v, forward_)};
}

std::optional<Projection> Camera::project(const Vec3& world) const {
  Vec3 c = to_camera(world);
  if (!(c.z > 0)) return std::nullopt;
  return Projection{{cx_ + focal_ * c.x / c.z, cy_ - focal_ * c.y / c.z}, c.z};
}

Vec3 Camera::unproject(Vec2 pixel, double depth) const {
  double x = (pixel.x - cx_) * depth / focal_;
  double y = (cy_ - pixel.y) * depth / focal_;
  return position_ + right_ * x + up_ * y + forward_ * depth;
}

Vec3 Camera::ray_direction(Vec2 pixel) const {
  return normalize(right_ * ((pixel.x - cx_) / focal_) + up_ * ((cy_ - pixel.y) / focal_) + forward_);
}

}  // namespace textworld
