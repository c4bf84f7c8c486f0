#include "parce/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace parce {

std::vector<std::size_t> SegmentMap::segment_sizes() const {
    std::vector<std::size_t> sizes(n_segments, 0);
    for (int id : segment_id) ++sizes[id];
    return sizes;
}

Image gaussian_smooth(const Image& img, double sigma) {
    if (sigma <= 0.0) return img;
    const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
    std::vector<double> kernel(2 * radius + 1);
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        kernel[i + radius] = std::exp(-0.5 * (i * i) / (sigma * sigma));
        sum += kernel[i + radius];
    }
    for (double& k : kernel) k /= sum;

    const int w = img.width, h = img.height;
    auto clampi = [](int v, int lo, int hi) { return v < lo ? lo : (v > hi ? hi : v); };

    Image tmp(w, h), out(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            for (int c = 0; c < 3; ++c) {
                double acc = 0.0;
                for (int i = -radius; i <= radius; ++i)
                    acc += kernel[i + radius] * img.at(clampi(x + i, 0, w - 1), y, c);
                tmp.at(x, y, c) = acc;
            }
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            for (int c = 0; c < 3; ++c) {
                double acc = 0.0;
                for (int i = -radius; i <= radius; ++i)
                    acc += kernel[i + radius] * tmp.at(x, clampi(y + i, 0, h - 1), c);
                out.at(x, y, c) = acc;
            }
    return out;
}

namespace {

struct Edge {
    double weight;
    int a, b;  // flat pixel indices, a < b by construction
};

// Euclidean RGB distance on the 0-255 scale (matches the conventional k range).
double edge_weight(const Image& img, int pa, int pb) {
    const double* va = &img.px[static_cast<std::size_t>(pa) * 3];
    const double* vb = &img.px[static_cast<std::size_t>(pb) * 3];
    double s = 0.0;
    for (int c = 0; c < 3; ++c) {
        const double d = (va[c] - vb[c]) * 255.0;
        s += d * d;
    }
    return std::sqrt(s);
}

class UnionFind {
public:
    explicit UnionFind(int n) : parent_(n), size_(n, 1), internal_(n, 0.0) {
        std::iota(parent_.begin(), parent_.end(), 0);
    }

    int find(int x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    // Merge roots ra, rb; new internal weight = w (edges arrive sorted).
    int unite(int ra, int rb, double w) {
        if (size_[ra] < size_[rb]) std::swap(ra, rb);
        parent_[rb] = ra;
        size_[ra] += size_[rb];
        internal_[ra] = w;
        return ra;
    }

    int size(int root) const { return size_[root]; }
    double internal(int root) const { return internal_[root]; }

private:
    std::vector<int> parent_;
    std::vector<int> size_;
    std::vector<double> internal_;
};

std::vector<Edge> build_edges(const Image& img) {
    const int w = img.width, h = img.height;
    std::vector<Edge> edges;
    edges.reserve(static_cast<std::size_t>(w) * h * 4);
    auto idx = [w](int x, int y) { return y * w + x; };
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const int p = idx(x, y);
            // right, down, down-right, down-left: each undirected edge once,
            // and the neighbor's flat index is always larger.
            if (x + 1 < w) edges.push_back({edge_weight(img, p, idx(x + 1, y)), p, idx(x + 1, y)});
            if (y + 1 < h) edges.push_back({edge_weight(img, p, idx(x, y + 1)), p, idx(x, y + 1)});
            if (x + 1 < w && y + 1 < h)
                edges.push_back({edge_weight(img, p, idx(x + 1, y + 1)), p, idx(x + 1, y + 1)});
            if (x - 1 >= 0 && y + 1 < h)
                edges.push_back({edge_weight(img, p, idx(x - 1, y + 1)), p, idx(x - 1, y + 1)});
        }
    return edges;
}

}  // namespace

SegmentMap segment(const Image& img, const FhParams& params) {
    if (img.width <= 0 || img.height <= 0) throw std::invalid_argument("segment: empty image");
    if (params.k <= 0.0 || params.min_size < 1) throw std::invalid_argument("segment: bad parameters");

    const Image smoothed = gaussian_smooth(img, params.smoothing_sigma);
    const int n = img.width * img.height;
    std::vector<Edge> edges = build_edges(smoothed);
    std::sort(edges.begin(), edges.end(), [](const Edge& l, const Edge& r) {
        if (l.weight != r.weight) return l.weight < r.weight;
        if (l.a != r.a) return l.a < r.a;
        return l.b < r.b;
    });

    UnionFind uf(n);
    for (const Edge& e : edges) {
        const int ra = uf.find(e.a), rb = uf.find(e.b);
        if (ra == rb) continue;
        const double ta = uf.internal(ra) + params.k / uf.size(ra);
        const double tb = uf.internal(rb) + params.k / uf.size(rb);
        if (e.weight <= std::min(ta, tb)) uf.unite(ra, rb, e.weight);
    }

    // Absorption pass: scan edges in sorted order and merge whenever an edge
    // joins two components of which at least one is undersized, so each small
    // component is absorbed across its lowest-weight boundary edge. Repeated
    // until stable because a merge can still leave a small component behind.
    for (;;) {
        bool changed = false;
        for (const Edge& e : edges) {
            const int ra = uf.find(e.a), rb = uf.find(e.b);
            if (ra == rb) continue;
            if (uf.size(ra) < params.min_size || uf.size(rb) < params.min_size) {
                uf.unite(ra, rb, e.weight);
                changed = true;
            }
        }
        if (!changed) break;
    }

    SegmentMap map;
    map.width = img.width;
    map.height = img.height;
    map.segment_id.assign(n, -1);
    std::vector<int> root_label(n, -1);
    int next = 0;
    for (int p = 0; p < n; ++p) {
        const int r = uf.find(p);
        if (root_label[r] < 0) root_label[r] = next++;
        map.segment_id[p] = root_label[r];
    }
    map.n_segments = next;
    return map;
}

void write_segment_pgm(const SegmentMap& map, const std::string& path) {
    std::vector<double> gray(map.segment_id.size());
    const double scale = map.n_segments > 1 ? 1.0 / (map.n_segments - 1) : 1.0;
    for (std::size_t i = 0; i < gray.size(); ++i) gray[i] = map.segment_id[i] * scale;
    write_pgm(gray, map.width, map.height, path);
}

}  // namespace parce
