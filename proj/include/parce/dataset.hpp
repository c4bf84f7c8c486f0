// Labeled image corpus: generation of the terrain-tile training set and the
// OOD composites, plus CSV manifest persistence.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "parce/image.hpp"

namespace parce {

enum class Split { train, holdout, test };

std::string split_name(Split s);
Split split_from_name(const std::string& name);

struct LabeledDataset {
    std::vector<Image> images;
    std::vector<int> labels;
    std::vector<Split> splits;

    std::size_t size() const { return images.size(); }
    void push(Image img, int label, Split split);

    // Subset with the given split tag.
    LabeledDataset filter(Split s) const;
    std::vector<std::size_t> class_counts(int n_classes) const;
};

struct CorpusParams {
    int n_classes = 4;
    int tiles_per_class = 200;       // split into train/holdout
    int test_tiles_per_class = 50;
    int n_ood_composites = 100;
    int tile_size = 64;
    double holdout_fraction = 0.2;   // stratified, seed-fixed
};

// Deterministic tile corpus. Tile seeds are derived from (seed, class, index);
// the holdout assignment is stratified per class.
LabeledDataset generate_corpus(const CorpusParams& params, std::uint64_t seed);

// Terrain tile with a rectangular unfamiliar-texture patch composited in
// (patch covers ~25-60% of the area). Returns the composite and its patch mask.
Image generate_ood_composite(const CorpusParams& params, std::uint64_t seed, PixelMask* mask = nullptr);
std::vector<Image> generate_ood_set(const CorpusParams& params, std::uint64_t seed);

// Manifest: CSV rows "ppm_path,label_id,split". Images are written next to
// the manifest under tiles/.
void save_corpus(const LabeledDataset& data, const std::string& dir, const std::string& manifest_name);
LabeledDataset load_corpus(const std::string& manifest_path);

}  // namespace parce
