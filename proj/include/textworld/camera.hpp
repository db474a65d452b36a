#pragma once

#include <optional>

#include "textworld/math.hpp"

namespace textworld {

// Viewpoint. Yaw turns around the up axis (opposite gravity), pitch tilts
// toward it, roll spins around the view direction. Radians.
struct CameraPose {
  Vec3 position;
  double pitch = 0;
  double yaw = 0;
  double roll = 0;
  bool operator==(const CameraPose&) const = default;
};

struct CameraIntrinsics {
  int width = 1080;
  int height = 720;
  double vertical_fov = radians(60);

  // Pixels per unit of tangent, from the vertical field of view.
  double focal_length() const;
  // Throws Error on non-positive size or fov outside (0, pi).
  void validate() const;
};

struct Projection {
  Vec2 pixel;    // continuous coordinates, (0,0) = top-left image corner
  double depth;  // camera-space z, world units
};

// Orthonormal horizontal basis perpendicular to gravity: e1 points along yaw
// 0 and e2 along yaw pi/2.
void horizontal_basis(const Vec3& gravity, Vec3& e1, Vec3& e2);

// Unit view direction for a pitch/yaw pair.
Vec3 view_direction(double pitch, double yaw, const Vec3& gravity);

// Pinhole camera. Camera space: x right, y up, z forward. Pixel centers sit at
// half-integer coordinates; pixel rows grow downward.
class Camera {
 public:
  Camera(const CameraPose& pose, const CameraIntrinsics& intrinsics, const Vec3& gravity);

  // nullopt for points at or behind the camera plane.
  std::optional<Projection> project(const Vec3& world) const;
  Vec3 unproject(Vec2 pixel, double depth) const;
  // Unit world-space direction through a pixel position.
  Vec3 ray_direction(Vec2 pixel) const;

  Vec3 to_camera(const Vec3& world) const;
  Vec3 direction_to_camera(const Vec3& world_dir) const;

  const Vec3& position() const { return position_; }
  const Vec3& right() const { return right_; }
  const Vec3& up() const { return up_; }
  const Vec3& forward() const { return forward_; }
  const CameraIntrinsics& intrinsics() const { return intrinsics_; }
  double focal() const { return focal_; }
  const CameraPose& pose() const { return pose_; }

 private:
  CameraPose pose_;
  CameraIntrinsics intrinsics_;
  Vec3 position_, right_, up_, forward_;
  double focal_;
  double cx_, cy_;
};

}  // namespace textworld
