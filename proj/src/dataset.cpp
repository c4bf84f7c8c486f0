#include "parce/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "parce/rng.hpp"
#include "parce/world.hpp"

namespace fs = std::filesystem;

namespace parce {

std::string split_name(Split s) {
    switch (s) {
        case Split::train: return "train";
        case Split::holdout: return "holdout";
        case Split::test: return "test";
    }
    return "?";
}

Split split_from_name(const std::string& name) {
    if (name == "train") return Split::train;
    if (name == "holdout") return Split::holdout;
    if (name == "test") return Split::test;
    throw std::invalid_argument("unknown split: " + name);
}

void LabeledDataset::push(Image img, int label, Split split) {
    images.push_back(std::move(img));
    labels.push_back(label);
    splits.push_back(split);
}

LabeledDataset LabeledDataset::filter(Split s) const {
    LabeledDataset out;
    for (std::size_t i = 0; i < size(); ++i)
        if (splits[i] == s) out.push(images[i], labels[i], s);
    return out;
}

std::vector<std::size_t> LabeledDataset::class_counts(int n_classes) const {
    std::vector<std::size_t> counts(n_classes, 0);
    for (int l : labels) {
        if (l < 0 || l >= n_classes) throw std::runtime_error("label out of range");
        ++counts[l];
    }
    return counts;
}

LabeledDataset generate_corpus(const CorpusParams& p, std::uint64_t seed) {
    LabeledDataset data;
    const int n_holdout = static_cast<int>(p.tiles_per_class * p.holdout_fraction + 0.5);
    for (int c = 0; c < p.n_classes; ++c) {
        for (int i = 0; i < p.tiles_per_class; ++i) {
            const std::uint64_t tile_seed = hash_combine(seed, (static_cast<std::uint64_t>(c) << 32) | i);
            // Stratified tail of each class goes to holdout; tile_seed already
            // varies with i so the assignment order carries no bias.
            const Split split = (i >= p.tiles_per_class - n_holdout) ? Split::holdout : Split::train;
            data.push(generate_tile(c, tile_seed, p.tile_size), c, split);
        }
        for (int i = 0; i < p.test_tiles_per_class; ++i) {
            const std::uint64_t tile_seed =
                hash_combine(seed ^ 0x7e57ULL, (static_cast<std::uint64_t>(c) << 32) | i);
            data.push(generate_tile(c, tile_seed, p.tile_size), c, Split::test);
        }
    }
    return data;
}

Image generate_ood_composite(const CorpusParams& p, std::uint64_t seed, PixelMask* mask) {
    Rng rng(hash_combine(seed, 0x00dULL));
    const int base_class = static_cast<int>(rng.uniform_index(p.n_classes));
    Image img = generate_tile(base_class, rng.next_u64(), p.tile_size);

    // Rectangular patch covering roughly 25-60% of the tile.
    const double frac = rng.uniform(0.25, 0.60);
    const double aspect = rng.uniform(0.6, 1.6);
    int pw = static_cast<int>(p.tile_size * std::sqrt(frac * aspect));
    int ph = static_cast<int>(p.tile_size * std::sqrt(frac / aspect));
    pw = std::min(std::max(pw, 4), p.tile_size);
    ph = std::min(std::max(ph, 4), p.tile_size);
    const int x0 = static_cast<int>(rng.uniform_index(p.tile_size - pw + 1));
    const int y0 = static_cast<int>(rng.uniform_index(p.tile_size - ph + 1));

    const std::uint64_t tex_seed = rng.next_u64();
    if (mask) *mask = PixelMask(p.tile_size, p.tile_size, false);
    double rgb[3];
    for (int y = y0; y < y0 + ph; ++y)
        for (int x = x0; x < x0 + pw; ++x) {
            unfamiliar_texture(tex_seed, x * kTileMetersPerPixel, y * kTileMetersPerPixel, rgb);
            img.set(x, y, rgb[0], rgb[1], rgb[2]);
            if (mask) mask->set(x, y, true);
        }
    return img;
}

std::vector<Image> generate_ood_set(const CorpusParams& p, std::uint64_t seed) {
    std::vector<Image> out;
    out.reserve(p.n_ood_composites);
    for (int i = 0; i < p.n_ood_composites; ++i)
        out.push_back(generate_ood_composite(p, hash_combine(seed, 0xc0deULL + i)));
    return out;
}

void save_corpus(const LabeledDataset& data, const std::string& dir, const std::string& manifest_name) {
    fs::create_directories(fs::path(dir) / "tiles");
    std::ofstream out(fs::path(dir) / manifest_name);
    if (!out) throw std::runtime_error("cannot write manifest in " + dir);
    out << "ppm_path,label_id,split\n";
    for (std::size_t i = 0; i < data.size(); ++i) {
        std::ostringstream name;
        name << "tiles/img_" << i << "_c" << data.labels[i] << ".ppm";
        write_ppm(data.images[i], (fs::path(dir) / name.str()).string());
        out << name.str() << ',' << data.labels[i] << ',' << split_name(data.splits[i]) << '\n';
    }
}

LabeledDataset load_corpus(const std::string& manifest_path) {
    std::ifstream in(manifest_path);
    if (!in) throw std::runtime_error("cannot open manifest: " + manifest_path);
    const fs::path base = fs::path(manifest_path).parent_path();
    LabeledDataset data;
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string path, label, split;
        if (!std::getline(ss, path, ',') || !std::getline(ss, label, ',') || !std::getline(ss, split))
            throw std::runtime_error("bad manifest row: " + line);
        data.push(read_ppm((base / path).string()), std::stoi(label), split_from_name(split));
    }
    return data;
}

}  // namespace parce
