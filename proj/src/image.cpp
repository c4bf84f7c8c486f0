#include "parce/image.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace parce {

std::size_t PixelMask::count() const {
    return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), std::uint8_t{1}));
}

namespace {

std::uint8_t quantize(double v) {
    double c = std::clamp(v, 0.0, 1.0);
    return static_cast<std::uint8_t>(std::lround(c * 255.0));
}

// Reads one whitespace-delimited token, skipping '#' comment lines.
std::string next_token(std::istream& in) {
    std::string tok;
    for (;;) {
        int ch = in.get();
        if (ch == EOF) throw std::runtime_error("unexpected EOF in PNM header");
        if (ch == '#') {
            std::string line;
            std::getline(in, line);
            continue;
        }
        if (std::isspace(ch)) {
            if (!tok.empty()) return tok;
            continue;
        }
        tok.push_back(static_cast<char>(ch));
    }
}

void read_pnm_header(std::istream& in, const char* magic, int& w, int& h, int& maxval) {
    if (next_token(in) != magic) throw std::runtime_error(std::string("not a ") + magic + " file");
    w = std::stoi(next_token(in));
    h = std::stoi(next_token(in));
    maxval = std::stoi(next_token(in));
    if (w <= 0 || h <= 0) throw std::runtime_error("bad PNM dimensions");
    if (maxval != 255) throw std::runtime_error("only maxval 255 supported");
    // The single whitespace byte after maxval was consumed by next_token.
}

}  // namespace

void write_ppm(const Image& img, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for write: " + path);
    out << "P6\n" << img.width << " " << img.height << "\n255\n";
    std::vector<std::uint8_t> row(static_cast<std::size_t>(img.width) * 3);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x)
            for (int c = 0; c < 3; ++c) row[static_cast<std::size_t>(x) * 3 + c] = quantize(img.at(x, y, c));
        out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size()));
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

Image read_ppm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    int w, h, maxval;
    read_pnm_header(in, "P6", w, h, maxval);
    Image img(w, h);
    std::vector<std::uint8_t> buf(static_cast<std::size_t>(w) * h * 3);
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (in.gcount() != static_cast<std::streamsize>(buf.size()))
        throw std::runtime_error("truncated PPM: " + path);
    for (std::size_t i = 0; i < buf.size(); ++i) img.px[i] = buf[i] / 255.0;
    return img;
}

void write_pgm(const std::vector<double>& gray, int width, int height, const std::string& path) {
    if (gray.size() != static_cast<std::size_t>(width) * height)
        throw std::invalid_argument("write_pgm: size mismatch");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for write: " + path);
    out << "P5\n" << width << " " << height << "\n255\n";
    std::vector<std::uint8_t> buf(gray.size());
    for (std::size_t i = 0; i < gray.size(); ++i) buf[i] = quantize(gray[i]);
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<double> read_pgm(const std::string& path, int& width, int& height) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    int maxval;
    read_pnm_header(in, "P5", width, height, maxval);
    std::vector<std::uint8_t> buf(static_cast<std::size_t>(width) * height);
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (in.gcount() != static_cast<std::streamsize>(buf.size()))
        throw std::runtime_error("truncated PGM: " + path);
    std::vector<double> gray(buf.size());
    for (std::size_t i = 0; i < buf.size(); ++i) gray[i] = buf[i] / 255.0;
    return gray;
}

}  // namespace parce
