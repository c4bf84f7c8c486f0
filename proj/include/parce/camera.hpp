// Flat-ground pinhole camera: projection of ground points into the image and
// ray-casting of pixels back onto the z=0 plane.
//
// Conventions: the camera sits above the vehicle reference point at
// height_above_ground, yawed to the vehicle heading and pitched down.
// Continuous pixel coordinates (u,v) have the origin at the top-left corner;
// integer pixel (ix,iy) covers [ix,ix+1) x [iy,iy+1), so its center is at
// (ix+0.5, iy+0.5). u grows to the right, v grows downward.
#pragma once

#include <cmath>
#include <cstdint>

#include "parce/geometry.hpp"

namespace parce {

struct VehicleState;  // dynamics.hpp

struct CameraModel {
    double height_above_ground = 0.5;        // m
    double pitch = 15.0 * M_PI / 180.0;      // rad, downward positive
    double horizontal_fov = M_PI / 2.0;      // rad
    double vertical_fov = M_PI / 2.0;        // rad
    int image_width = 64;                    // px
    int image_height = 64;                   // px
    double max_view_distance = 12.0;         // m, ground distance cutoff

    double fx() const;  // focal lengths in pixels
    double fy() const;
};

struct PixelProjection {
    bool in_view = false;   // in front of camera and inside image bounds
    double u = 0.0;         // continuous pixel coords (valid whenever depth > 0)
    double v = 0.0;
    double depth = 0.0;     // camera-frame z of the point (m)
};

struct GroundHit {
    bool hit = false;       // ray reached the ground within max_view_distance
    Vec2 point{0.0, 0.0};   // world ground coordinates
    double distance = 0.0;  // horizontal distance from the camera (m)
};

// Camera pose derived from a vehicle state (position, heading).
struct CameraPose {
    Eigen::Vector3d position;           // world, z up
    Eigen::Vector3d right, down, fwd;   // orthonormal camera axes in world frame

    static CameraPose from_state(const CameraModel& cam, const VehicleState& state);
};

// Projects a ground point (z=0) into the image.
PixelProjection project_ground_point(const CameraModel& cam, const CameraPose& pose, const Vec2& ground);
PixelProjection project_ground_point(const CameraModel& cam, const VehicleState& state, const Vec2& ground);

// Casts the ray through continuous pixel (u,v) onto the ground plane.
GroundHit pixel_to_ground(const CameraModel& cam, const CameraPose& pose, double u, double v);
GroundHit pixel_to_ground(const CameraModel& cam, const VehicleState& state, double u, double v);

// Per-pixel sky mask from camera geometry alone: true where the pixel-center
// ray never reaches the ground within max_view_distance.
std::vector<std::uint8_t> sky_mask(const CameraModel& cam);

}  // namespace parce
