#include "parce/camera.hpp"

#include <Eigen/Geometry>

#include "parce/dynamics.hpp"

namespace parce {

double CameraModel::fx() const { return 0.5 * image_width / std::tan(0.5 * horizontal_fov); }
double CameraModel::fy() const { return 0.5 * image_height / std::tan(0.5 * vertical_fov); }

CameraPose CameraPose::from_state(const CameraModel& cam, const VehicleState& state) {
    const double ct = std::cos(state.theta), st = std::sin(state.theta);
    const double cp = std::cos(cam.pitch), sp = std::sin(cam.pitch);
    CameraPose pose;
    pose.position = Eigen::Vector3d(state.x, state.y, cam.height_above_ground);
    pose.fwd = Eigen::Vector3d(ct * cp, st * cp, -sp);
    pose.right = Eigen::Vector3d(st, -ct, 0.0);
    pose.down = pose.fwd.cross(pose.right);
    return pose;
}

PixelProjection project_ground_point(const CameraModel& cam, const CameraPose& pose, const Vec2& ground) {
    const Eigen::Vector3d rel = Eigen::Vector3d(ground.x(), ground.y(), 0.0) - pose.position;
    PixelProjection out;
    out.depth = rel.dot(pose.fwd);
    if (out.depth <= 1e-12) return out;  // behind or in the camera plane
    out.u = 0.5 * cam.image_width + cam.fx() * (rel.dot(pose.right) / out.depth);
    out.v = 0.5 * cam.image_height + cam.fy() * (rel.dot(pose.down) / out.depth);
    out.in_view = out.u >= 0.0 && out.u < cam.image_width && out.v >= 0.0 && out.v < cam.image_height;
    return out;
}

PixelProjection project_ground_point(const CameraModel& cam, const VehicleState& state, const Vec2& ground) {
    return project_ground_point(cam, CameraPose::from_state(cam, state), ground);
}

GroundHit pixel_to_ground(const CameraModel& cam, const CameraPose& pose, double u, double v) {
    const double dx = (u - 0.5 * cam.image_width) / cam.fx();
    const double dy = (v - 0.5 * cam.image_height) / cam.fy();
    const Eigen::Vector3d dir = pose.right * dx + pose.down * dy + pose.fwd;
    GroundHit out;
    if (dir.z() >= -1e-12) return out;  // at or above the horizon
    const double t = -pose.position.z() / dir.z();
    const Eigen::Vector3d p = pose.position + t * dir;
    out.point = Vec2(p.x(), p.y());
    out.distance = (out.point - Vec2(pose.position.x(), pose.position.y())).norm();
    out.hit = out.distance <= cam.max_view_distance;
    return out;
}

GroundHit pixel_to_ground(const CameraModel& cam, const VehicleState& state, double u, double v) {
    return pixel_to_ground(cam, CameraPose::from_state(cam, state), u, v);
}

std::vector<std::uint8_t> sky_mask(const CameraModel& cam) {
    // The mask depends only on intrinsics and pitch, not on the vehicle pose.
    VehicleState origin{};
    const CameraPose pose = CameraPose::from_state(cam, origin);
    std::vector<std::uint8_t> mask(static_cast<std::size_t>(cam.image_width) * cam.image_height, 0);
    for (int y = 0; y < cam.image_height; ++y)
        for (int x = 0; x < cam.image_width; ++x) {
            const GroundHit hit = pixel_to_ground(cam, pose, x + 0.5, y + 0.5);
            if (!hit.hit) mask[static_cast<std::size_t>(y) * cam.image_width + x] = 1;
        }
    return mask;
}

}  // namespace parce
