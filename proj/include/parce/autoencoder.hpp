// Linear autoencoder: empirical mean plus a truncated orthonormal basis of the
// centered training images (top right singular vectors). Provides the
// full-image reconstruction loss, masked-segment inpainting loss, and a
// visible-pixels-only loss used when part of an image (the sky band) must be
// excluded from the statistics.
//
// All losses are mean squared error per pixel-channel on [0,1] data.
#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>

#include "parce/dataset.hpp"
#include "parce/image.hpp"

namespace parce {

struct ReconLoss {
    double value = 0.0;  // nonnegative, finite
};

struct LinearAutoencoder {
    Eigen::VectorXd mean;    // d = w*h*3
    Eigen::MatrixXd basis;   // d x r, orthonormal columns
    Eigen::MatrixXd gram;    // basis^T basis, cached at fit/load (near identity)
    int input_width = 0;
    int input_height = 0;

    int rank() const { return static_cast<int>(basis.cols()); }
    int dim() const { return static_cast<int>(basis.rows()); }
};

struct ReconResult {
    Image image;     // decode, clamped to [0,1] for display
    ReconLoss loss;  // computed pre-clamp
};

// Ridge term for the masked least-squares latent fit.
constexpr double kInpaintRidge = 1e-6;

// Fits mean + top-`rank` right singular vectors of the centered data matrix.
// Sign convention: each basis column's largest-magnitude entry is positive.
// Throws when rank < 1 or rank > min(dim, n_train).
LinearAutoencoder fit_autoencoder(const LabeledDataset& train, int rank, std::uint64_t seed);

// Orthogonal projection onto the affine span; loss over all pixel-channels.
ReconResult reconstruct(const LinearAutoencoder& ae, const Image& img);

// Latent code fit by least squares on VISIBLE pixel-channels only (ridge
// regularized); loss over MISSING pixel-channels. The returned image keeps
// visible pixels and fills missing ones from the decode.
// Throws for all-missing or all-visible masks.
ReconResult inpaint(const LinearAutoencoder& ae, const Image& img, const PixelMask& mask);

// Least-squares code on valid (= non-masked-out) pixels, loss over the same
// valid pixels. Used to score rendered scenes with the sky band excluded.
// An empty `invalid` mask gives the plain reconstruction loss semantics.
ReconLoss visible_recon_loss(const LinearAutoencoder& ae, const Image& img,
                             const std::vector<std::uint8_t>& invalid);

// Flat binary persistence: magic "PARCEAE0", dims, mean, basis (float64 LE).
void save_autoencoder(const LinearAutoencoder& ae, const std::string& path);
LinearAutoencoder load_autoencoder(const std::string& path);

}  // namespace parce
