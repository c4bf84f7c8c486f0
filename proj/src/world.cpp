#include "parce/world.hpp"

#include <cmath>
#include <stdexcept>

#include "parce/dynamics.hpp"
#include "parce/rng.hpp"

namespace parce {

const std::vector<TerrainClass>& terrain_classes() {
    static const std::vector<TerrainClass> classes = {
        {0, "smooth"}, {1, "bumpy"}, {2, "crater-edge"}, {3, "crater-interior"}};
    return classes;
}

int n_terrain_classes() { return static_cast<int>(terrain_classes().size()); }

namespace {

double lattice_value(std::uint64_t seed, std::int64_t ix, std::int64_t iy) {
    std::uint64_t h = hash_combine(seed, static_cast<std::uint64_t>(ix) * 0x9e3779b97f4a7c15ULL ^
                                             static_cast<std::uint64_t>(iy));
    return u64_to_unit(h);
}

double smoothstep(double t) { return t * t * (3.0 - 2.0 * t); }

// Bilinear value noise in [0,1].
double value_noise(std::uint64_t seed, double x, double y) {
    const double fx = std::floor(x), fy = std::floor(y);
    const auto ix = static_cast<std::int64_t>(fx);
    const auto iy = static_cast<std::int64_t>(fy);
    const double tx = smoothstep(x - fx);
    const double ty = smoothstep(y - fy);
    const double v00 = lattice_value(seed, ix, iy);
    const double v10 = lattice_value(seed, ix + 1, iy);
    const double v01 = lattice_value(seed, ix, iy + 1);
    const double v11 = lattice_value(seed, ix + 1, iy + 1);
    return (v00 * (1 - tx) + v10 * tx) * (1 - ty) + (v01 * (1 - tx) + v11 * tx) * ty;
}

// Octave sum normalized back to [0,1].
double fbm(std::uint64_t seed, double x, double y, int octaves) {
    double sum = 0.0, amp = 1.0, norm = 0.0, freq = 1.0;
    for (int o = 0; o < octaves; ++o) {
        sum += amp * value_noise(hash_combine(seed, static_cast<std::uint64_t>(o)), x * freq, y * freq);
        norm += amp;
        amp *= 0.5;
        freq *= 2.0;
    }
    return sum / norm;
}

struct TextureParams {
    double base[3];      // mean color
    double contrast;     // amplitude of the noise modulation
    double frequency;    // 1/m
    int octaves;
    bool ridged;         // fold the noise for crater-rim ridges
};

// Class palettes: earth tones with distinct means so a linear model separates
// them; "smooth" is kept dark and flat, "bumpy" bright and high-contrast.
const TextureParams kTerrainParams[4] = {
    {{0.14, 0.13, 0.12}, 0.05, 1.2, 2, false},   // smooth
    {{0.47, 0.39, 0.30}, 0.34, 9.0, 4, false},   // bumpy
    {{0.60, 0.54, 0.47}, 0.20, 4.0, 3, true},    // crater-edge
    {{0.31, 0.19, 0.14}, 0.10, 2.0, 2, false},   // crater-interior
};

double clamp01(double v) { return v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v); }

}  // namespace

void terrain_texture(int class_id, std::uint64_t seed, double x, double y, double rgb[3]) {
    const TextureParams& p = kTerrainParams[class_id];
    const std::uint64_t s = hash_combine(seed, static_cast<std::uint64_t>(class_id) + 101);
    double n = fbm(s, x * p.frequency, y * p.frequency, p.octaves);
    if (p.ridged) n = 1.0 - std::abs(2.0 * n - 1.0);
    const double mod = (n - 0.5) * 2.0 * p.contrast;
    // small independent chroma wobble so channels are not perfectly correlated
    const double chroma = (value_noise(hash_combine(s, 7), x * p.frequency * 1.7, y * p.frequency * 1.7) - 0.5) * 0.05;
    rgb[0] = clamp01(p.base[0] + mod + chroma);
    rgb[1] = clamp01(p.base[1] + mod);
    rgb[2] = clamp01(p.base[2] + mod - chroma);
}

void unfamiliar_texture(std::uint64_t seed, double x, double y, double rgb[3]) {
    // Palettes deliberately saturated and far outside the terrain gamut.
    static const double palettes[4][2][3] = {
        {{0.95, 0.05, 0.60}, {0.05, 0.90, 0.95}},  // magenta / cyan
        {{1.00, 0.62, 0.00}, {0.97, 0.97, 1.00}},  // orange / white
        {{0.05, 0.25, 0.95}, {0.95, 0.90, 0.10}},  // blue / yellow
        {{0.80, 0.05, 0.05}, {0.98, 0.98, 0.98}},  // red / white
    };
    const std::uint64_t h = hash_u64(seed ^ 0x5eedULL);
    const int palette = static_cast<int>(h % 4);
    const bool checker = ((h >> 2) & 1) != 0;
    const double angle = u64_to_unit(hash_combine(h, 3)) * M_PI;
    const double period = 0.22 + 0.18 * u64_to_unit(hash_combine(h, 4));  // m
    const double ca = std::cos(angle), sa = std::sin(angle);
    const double a = (x * ca + y * sa) / period;
    const double b = (-x * sa + y * ca) / period;
    int cell;
    if (checker)
        cell = (static_cast<std::int64_t>(std::floor(a)) + static_cast<std::int64_t>(std::floor(b))) & 1;
    else
        cell = static_cast<std::int64_t>(std::floor(a)) & 1;
    const double* c = palettes[palette][cell];
    rgb[0] = c[0];
    rgb[1] = c[1];
    rgb[2] = c[2];
}

int World::terrain_class_at(double x, double y) const {
    if (uniform_class >= 0) return uniform_class;
    const int n = n_terrain_classes();
    const double v = fbm(hash_combine(seed, 0xf1e1dULL), x * field_scale, y * field_scale, 2);
    int c = static_cast<int>(v * n);
    return c < 0 ? 0 : (c >= n ? n - 1 : c);
}

Image generate_tile(int class_id, std::uint64_t seed, int size) {
    if (class_id < 0 || class_id >= n_terrain_classes())
        throw std::invalid_argument("generate_tile: unknown class id " + std::to_string(class_id));
    if (size <= 0) throw std::invalid_argument("generate_tile: size must be positive");

    // Per-tile brightness jitter: keeps within-class variance realistic and
    // gives the loss calibration a nonzero spread.
    const double jitter = (unit_at(hash_combine(seed, 0xb17eULL), class_id) - 0.5) * 0.10;
    // Each tile samples a distinct patch of an unbounded texture plane.
    const double ox = (unit_at(hash_combine(seed, 1), class_id) - 0.5) * 2000.0;
    const double oy = (unit_at(hash_combine(seed, 2), class_id) - 0.5) * 2000.0;

    Image img(size, size);
    double rgb[3];
    for (int y = 0; y < size; ++y)
        for (int x = 0; x < size; ++x) {
            terrain_texture(class_id, 0, ox + x * kTileMetersPerPixel, oy + y * kTileMetersPerPixel, rgb);
            img.set(x, y, clamp01(rgb[0] + jitter), clamp01(rgb[1] + jitter), clamp01(rgb[2] + jitter));
        }
    return img;
}

RenderOutput render_camera(const World& world, const VehicleState& state, const CameraModel& cam) {
    RenderOutput out;
    out.image = Image(cam.image_width, cam.image_height);
    out.labels.assign(static_cast<std::size_t>(cam.image_width) * cam.image_height, pixel_label::sky);

    const CameraPose pose = CameraPose::from_state(cam, state);
    double rgb[3];
    for (int y = 0; y < cam.image_height; ++y) {
        for (int x = 0; x < cam.image_width; ++x) {
            const GroundHit hit = pixel_to_ground(cam, pose, x + 0.5, y + 0.5);
            if (!hit.hit) {
                out.image.set(x, y, kSkyColor[0], kSkyColor[1], kSkyColor[2]);
                continue;
            }
            const Vec2& g = hit.point;
            const Obstacle* on = nullptr;
            for (const Obstacle& ob : world.obstacles)
                if (point_in_convex(ob.footprint, g)) {
                    on = &ob;
                    break;
                }
            std::uint8_t label;
            if (on != nullptr) {
                if (on->kind == TextureKind::unfamiliar) {
                    unfamiliar_texture(on->texture_seed, g.x(), g.y(), rgb);
                    label = pixel_label::obstacle_unfamiliar;
                } else {
                    const int c = static_cast<int>(on->texture_seed % n_terrain_classes());
                    terrain_texture(c, hash_combine(on->texture_seed, 0xfa3ULL), g.x(), g.y(), rgb);
                    label = pixel_label::obstacle_familiar;
                }
            } else {
                const int c = world.terrain_class_at(g.x(), g.y());
                terrain_texture(c, world.seed, g.x(), g.y(), rgb);
                label = static_cast<std::uint8_t>(c);
            }
            out.image.set(x, y, rgb[0], rgb[1], rgb[2]);
            out.labels[static_cast<std::size_t>(y) * cam.image_width + x] = label;
        }
    }
    return out;
}

bool collision_query(const World& world, const VehicleState& state, double length, double width) {
    if (length <= 0 || width <= 0) throw std::invalid_argument("collision_query: footprint must be positive");
    const Polygon vehicle = oriented_rect(state.x, state.y, state.theta, length, width);
    for (const Obstacle& ob : world.obstacles)
        if (convex_intersect(vehicle, ob.footprint)) return true;
    return false;
}

std::optional<Vec2> collision_mtv(const World& world, const VehicleState& state, double length,
                                  double width) {
    const Polygon vehicle = oriented_rect(state.x, state.y, state.theta, length, width);
    std::optional<Vec2> best;
    for (const Obstacle& ob : world.obstacles) {
        const auto mtv = convex_mtv(vehicle, ob.footprint);
        if (mtv && (!best || mtv->squaredNorm() > best->squaredNorm())) best = mtv;
    }
    return best;
}

}  // namespace parce
