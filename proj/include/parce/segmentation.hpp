// Graph-based image segmentation (Felzenszwalb-Huttenlocher): 8-connected
// pixel graph, RGB edge weights, greedy merging with the adaptive predicate
// w <= min(Int(C1) + k/|C1|, Int(C2) + k/|C2|), followed by a minimum-size
// absorption pass. Deterministic: equal-weight edges are ordered by
// (weight, source pixel index, target pixel index).
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "parce/image.hpp"

namespace parce {

struct FhParams {
    double k = 300.0;           // scale of observation, on the 0-255 weight scale
    int min_size = 20;          // components smaller than this are absorbed
    double smoothing_sigma = 0.8;
};

struct SegmentMap {
    int width = 0;
    int height = 0;
    std::vector<int> segment_id;  // row-major, contiguous ids in [0, n_segments)
    int n_segments = 0;

    int at(int x, int y) const { return segment_id[static_cast<std::size_t>(y) * width + x]; }
    std::vector<std::size_t> segment_sizes() const;
};

// Gaussian blur used as the segmentation pre-pass (replicated borders).
Image gaussian_smooth(const Image& img, double sigma);

SegmentMap segment(const Image& img, const FhParams& params);

// Debug view: ids scaled into gray levels.
void write_segment_pgm(const SegmentMap& map, const std::string& path);

}  // namespace parce
