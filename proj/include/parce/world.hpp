// Deterministic 2D world: class-labeled terrain textures on the z=0 plane,
// flat obstacle decals (familiar or unfamiliar texture), a flat-ground
// renderer and exact collision queries. Everything is a pure function of the
// seeds, so repeated calls are bitwise identical.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "parce/camera.hpp"
#include "parce/geometry.hpp"
#include "parce/image.hpp"

namespace parce {

struct VehicleState;

struct TerrainClass {
    int id = 0;
    std::string name;
};

// Fixed desk-scale class set; ids are contiguous from 0.
const std::vector<TerrainClass>& terrain_classes();
int n_terrain_classes();

enum class TextureKind { familiar, unfamiliar };

struct Obstacle {
    Polygon footprint;  // convex, ground meters
    TextureKind kind = TextureKind::unfamiliar;
    std::uint64_t texture_seed = 0;
};

struct World {
    double x_min = -2.0, x_max = 18.0;
    double y_min = -10.0, y_max = 10.0;
    std::uint64_t seed = 0;
    int uniform_class = -1;      // >= 0: whole extent is this class
    double field_scale = 0.12;   // terrain class-field frequency, 1/m
    std::vector<Obstacle> obstacles;

    bool contains(double x, double y) const {
        return x >= x_min && x <= x_max && y >= y_min && y <= y_max;
    }

    // Terrain class at a ground point; pure in (seed, x, y).
    int terrain_class_at(double x, double y) const;
};

// Per-pixel ground-truth labels emitted alongside renders.
namespace pixel_label {
constexpr std::uint8_t sky = 255;
constexpr std::uint8_t obstacle_unfamiliar = 254;
constexpr std::uint8_t obstacle_familiar = 253;
// anything below: terrain class id
}  // namespace pixel_label

struct RenderOutput {
    Image image;
    std::vector<std::uint8_t> labels;  // row-major, pixel_label encoding
};

// Terrain texture color at a ground point, in [0,1]^3.
void terrain_texture(int class_id, std::uint64_t seed, double x, double y, double rgb[3]);

// Unfamiliar decal texture: striped/checkered high-saturation palettes that
// the terrain generators never produce.
void unfamiliar_texture(std::uint64_t seed, double x, double y, double rgb[3]);

constexpr double kSkyColor[3] = {0.5, 0.5, 0.5};

// Meters of ground covered by one training-tile pixel; ties the tile corpus
// scale to the renderer's near field.
constexpr double kTileMetersPerPixel = 0.06;

// Square single-class texture tile, deterministic in (class, seed, size).
// Throws std::invalid_argument for an unknown class id or size <= 0.
Image generate_tile(int class_id, std::uint64_t seed, int size);

// Ray-casts every pixel onto the ground plane; obstacle decals override the
// terrain; rays that miss the ground within max_view_distance get sky color.
RenderOutput render_camera(const World& world, const VehicleState& state, const CameraModel& cam);

// True iff the vehicle rectangle intersects any obstacle footprint
// (closed-set separating-axis test).
bool collision_query(const World& world, const VehicleState& state, double length, double width);

// Minimum translation resolving the deepest current penetration, if any.
std::optional<Vec2> collision_mtv(const World& world, const VehicleState& state, double length,
                                  double width);

}  // namespace parce
