// RGB raster with channels in [0,1], plus PPM/PGM serialization.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace parce {

struct Image {
    int width = 0;
    int height = 0;
    std::vector<double> px;  // row-major RGB, size = width*height*3

    Image() = default;
    Image(int w, int h, double fill = 0.0)
        : width(w), height(h), px(static_cast<std::size_t>(w) * h * 3, fill) {}

    double& at(int x, int y, int c) { return px[(static_cast<std::size_t>(y) * width + x) * 3 + c]; }
    double at(int x, int y, int c) const { return px[(static_cast<std::size_t>(y) * width + x) * 3 + c]; }

    void set(int x, int y, double r, double g, double b) {
        auto* p = &px[(static_cast<std::size_t>(y) * width + x) * 3];
        p[0] = r; p[1] = g; p[2] = b;
    }

    std::size_t n_pixels() const { return static_cast<std::size_t>(width) * height; }
    std::size_t n_values() const { return px.size(); }
    bool same_shape(const Image& o) const { return width == o.width && height == o.height; }
};

// Per-pixel boolean mask; true = missing / held out.
struct PixelMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> bits;

    PixelMask() = default;
    PixelMask(int w, int h, bool fill = false)
        : width(w), height(h), bits(static_cast<std::size_t>(w) * h, fill ? 1 : 0) {}

    bool at(int x, int y) const { return bits[static_cast<std::size_t>(y) * width + x] != 0; }
    void set(int x, int y, bool v) { bits[static_cast<std::size_t>(y) * width + x] = v ? 1 : 0; }

    std::size_t count() const;
};

// Binary PPM (P6, maxval 255). Channels are clamped to [0,1] and quantized.
void write_ppm(const Image& img, const std::string& path);
Image read_ppm(const std::string& path);

// Binary PGM (P5) for single-channel debug output; values in [0,1] scaled to 255.
void write_pgm(const std::vector<double>& gray, int width, int height, const std::string& path);
std::vector<double> read_pgm(const std::string& path, int& width, int& height);

}  // namespace parce
