#include "parce/autoencoder.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace parce {

namespace {

Eigen::Map<const Eigen::VectorXd> as_vector(const Image& img) {
    return {img.px.data(), static_cast<Eigen::Index>(img.px.size())};
}

void check_shape(const LinearAutoencoder& ae, const Image& img, const char* op) {
    if (img.width != ae.input_width || img.height != ae.input_height)
        throw std::invalid_argument(std::string(op) + ": image shape mismatch");
}

Image decode_to_image(const Eigen::VectorXd& flat, int w, int h) {
    Image img(w, h);
    for (std::size_t i = 0; i < img.px.size(); ++i) img.px[i] = std::clamp(flat[i], 0.0, 1.0);
    return img;
}

// Deterministic orthonormal completion for zero-variance directions: first
// canonical basis vector not already represented, orthogonalized.
Eigen::VectorXd orthonormal_filler(const Eigen::MatrixXd& basis, int filled_cols) {
    const int d = static_cast<int>(basis.rows());
    for (int cand = 0; cand < d; ++cand) {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(d);
        v[cand] = 1.0;
        for (int j = 0; j < filled_cols; ++j) v -= basis.col(j).dot(v) * basis.col(j);
        const double n = v.norm();
        if (n > 1e-6) return v / n;
    }
    throw std::runtime_error("fit_autoencoder: cannot complete basis");
}

}  // namespace

LinearAutoencoder fit_autoencoder(const LabeledDataset& train, int rank, std::uint64_t /*seed*/) {
    if (train.size() == 0) throw std::invalid_argument("fit_autoencoder: empty dataset");
    const int n = static_cast<int>(train.size());
    const int d = static_cast<int>(train.images[0].px.size());
    if (rank < 1 || rank > std::min(d, n))
        throw std::invalid_argument("fit_autoencoder: rank out of range");

    LinearAutoencoder ae;
    ae.input_width = train.images[0].width;
    ae.input_height = train.images[0].height;

    Eigen::MatrixXd X(n, d);
    for (int i = 0; i < n; ++i) {
        if (!train.images[i].same_shape(train.images[0]))
            throw std::invalid_argument("fit_autoencoder: mixed image shapes");
        X.row(i) = as_vector(train.images[i]).transpose();
    }
    ae.mean = X.colwise().mean().transpose();
    X.rowwise() -= ae.mean.transpose();

    // Right singular vectors via the n x n Gram matrix (n << d here).
    const Eigen::MatrixXd G = X * X.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(G);
    if (eig.info() != Eigen::Success) throw std::runtime_error("fit_autoencoder: eigensolver failed");
    const Eigen::VectorXd evals = eig.eigenvalues();  // ascending
    const Eigen::MatrixXd evecs = eig.eigenvectors();
    const double tol = std::max(evals[n - 1], 1.0) * 1e-12;

    ae.basis.resize(d, rank);
    for (int j = 0; j < rank; ++j) {
        const int src = n - 1 - j;  // descending eigenvalue order
        if (src >= 0 && evals[src] > tol) {
            Eigen::VectorXd v = X.transpose() * evecs.col(src) / std::sqrt(evals[src]);
            v /= v.norm();  // guard against roundoff in the Gram route
            ae.basis.col(j) = v;
        } else {
            ae.basis.col(j) = orthonormal_filler(ae.basis, j);
        }
        // Sign convention: largest-magnitude component positive.
        int imax = 0;
        for (int i = 1; i < d; ++i)
            if (std::abs(ae.basis(i, j)) > std::abs(ae.basis(imax, j))) imax = i;
        if (ae.basis(imax, j) < 0) ae.basis.col(j) = -ae.basis.col(j);
    }
    ae.gram = ae.basis.transpose() * ae.basis;
    return ae;
}

ReconResult reconstruct(const LinearAutoencoder& ae, const Image& img) {
    check_shape(ae, img, "reconstruct");
    const Eigen::VectorXd y = as_vector(img) - ae.mean;
    const Eigen::VectorXd code = ae.basis.transpose() * y;
    const Eigen::VectorXd decode = ae.mean + ae.basis * code;
    ReconResult out;
    out.loss.value = (as_vector(img) - decode).squaredNorm() / static_cast<double>(ae.dim());
    out.image = decode_to_image(decode, ae.input_width, ae.input_height);
    return out;
}

ReconResult inpaint(const LinearAutoencoder& ae, const Image& img, const PixelMask& mask) {
    check_shape(ae, img, "inpaint");
    if (mask.width != img.width || mask.height != img.height)
        throw std::invalid_argument("inpaint: mask shape mismatch");
    const std::size_t n_missing = mask.count();
    if (n_missing == 0) throw std::invalid_argument("inpaint: mask has no missing pixels");
    if (n_missing == mask.bits.size()) throw std::invalid_argument("inpaint: mask has no visible pixels");

    const int r = ae.rank();
    const Eigen::VectorXd y = as_vector(img) - ae.mean;

    // Normal equations over visible channels, written as (full - missing):
    // basis_vis^T basis_vis = gram - basis_miss^T basis_miss, and likewise for
    // the right-hand side. Cheap because the missing block is small.
    Eigen::MatrixXd gram_missing = Eigen::MatrixXd::Zero(r, r);
    Eigen::VectorXd rhs_missing = Eigen::VectorXd::Zero(r);
    for (std::size_t p = 0; p < mask.bits.size(); ++p) {
        if (!mask.bits[p]) continue;
        for (int c = 0; c < 3; ++c) {
            const auto row = static_cast<Eigen::Index>(p * 3 + c);
            gram_missing.noalias() += ae.basis.row(row).transpose() * ae.basis.row(row);
            rhs_missing.noalias() += ae.basis.row(row).transpose() * y[row];
        }
    }
    Eigen::MatrixXd lhs = ae.gram - gram_missing;
    lhs.diagonal().array() += kInpaintRidge;
    const Eigen::VectorXd rhs = ae.basis.transpose() * y - rhs_missing;
    const Eigen::VectorXd code = lhs.ldlt().solve(rhs);
    const Eigen::VectorXd decode = ae.mean + ae.basis * code;

    ReconResult out;
    out.image = img;
    double err2 = 0.0;
    for (std::size_t p = 0; p < mask.bits.size(); ++p) {
        if (!mask.bits[p]) continue;
        for (int c = 0; c < 3; ++c) {
            const std::size_t i = p * 3 + c;
            const double e = img.px[i] - decode[static_cast<Eigen::Index>(i)];
            err2 += e * e;
            out.image.px[i] = std::clamp(decode[static_cast<Eigen::Index>(i)], 0.0, 1.0);
        }
    }
    out.loss.value = err2 / static_cast<double>(n_missing * 3);
    return out;
}

ReconLoss visible_recon_loss(const LinearAutoencoder& ae, const Image& img,
                             const std::vector<std::uint8_t>& invalid) {
    check_shape(ae, img, "visible_recon_loss");
    if (!invalid.empty() && invalid.size() != img.n_pixels())
        throw std::invalid_argument("visible_recon_loss: mask size mismatch");

    const int r = ae.rank();
    const Eigen::VectorXd y = as_vector(img) - ae.mean;

    Eigen::MatrixXd gram_invalid = Eigen::MatrixXd::Zero(r, r);
    Eigen::VectorXd rhs_invalid = Eigen::VectorXd::Zero(r);
    std::size_t n_invalid = 0;
    for (std::size_t p = 0; p < invalid.size(); ++p) {
        if (!invalid[p]) continue;
        ++n_invalid;
        for (int c = 0; c < 3; ++c) {
            const auto row = static_cast<Eigen::Index>(p * 3 + c);
            gram_invalid.noalias() += ae.basis.row(row).transpose() * ae.basis.row(row);
            rhs_invalid.noalias() += ae.basis.row(row).transpose() * y[row];
        }
    }
    const std::size_t n_valid = img.n_pixels() - n_invalid;
    if (n_valid == 0) throw std::invalid_argument("visible_recon_loss: no valid pixels");

    Eigen::MatrixXd lhs = ae.gram - gram_invalid;
    lhs.diagonal().array() += kInpaintRidge;
    const Eigen::VectorXd code = lhs.ldlt().solve(ae.basis.transpose() * y - rhs_invalid);
    const Eigen::VectorXd resid = y - ae.basis * code;

    double err2 = 0.0;
    for (std::size_t p = 0; p < img.n_pixels(); ++p) {
        if (!invalid.empty() && invalid[p]) continue;
        for (int c = 0; c < 3; ++c) {
            const double e = resid[static_cast<Eigen::Index>(p * 3 + c)];
            err2 += e * e;
        }
    }
    return {err2 / static_cast<double>(n_valid * 3)};
}

void save_autoencoder(const LinearAutoencoder& ae, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for write: " + path);
    out.write("PARCEAE0", 8);
    auto write_u64 = [&](std::uint64_t v) {
        unsigned char buf[8];
        for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
        out.write(reinterpret_cast<const char*>(buf), 8);
    };
    write_u64(static_cast<std::uint64_t>(ae.input_width));
    write_u64(static_cast<std::uint64_t>(ae.input_height));
    write_u64(static_cast<std::uint64_t>(ae.rank()));
    out.write(reinterpret_cast<const char*>(ae.mean.data()),
              static_cast<std::streamsize>(sizeof(double) * ae.mean.size()));
    for (int j = 0; j < ae.basis.cols(); ++j)
        out.write(reinterpret_cast<const char*>(ae.basis.col(j).data()),
                  static_cast<std::streamsize>(sizeof(double) * ae.basis.rows()));
    if (!out) throw std::runtime_error("write failed: " + path);
}

LinearAutoencoder load_autoencoder(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    char magic[8];
    in.read(magic, 8);
    if (std::string(magic, 8) != "PARCEAE0") throw std::runtime_error("bad autoencoder file: " + path);
    auto read_u64 = [&]() {
        unsigned char buf[8];
        in.read(reinterpret_cast<char*>(buf), 8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
        return v;
    };
    LinearAutoencoder ae;
    ae.input_width = static_cast<int>(read_u64());
    ae.input_height = static_cast<int>(read_u64());
    const auto rank = static_cast<int>(read_u64());
    const int d = ae.input_width * ae.input_height * 3;
    if (d <= 0 || rank <= 0 || rank > d) throw std::runtime_error("inconsistent autoencoder dims: " + path);
    ae.mean.resize(d);
    in.read(reinterpret_cast<char*>(ae.mean.data()), static_cast<std::streamsize>(sizeof(double) * d));
    ae.basis.resize(d, rank);
    for (int j = 0; j < rank; ++j)
        in.read(reinterpret_cast<char*>(ae.basis.col(j).data()),
                static_cast<std::streamsize>(sizeof(double) * d));
    if (!in) throw std::runtime_error("truncated autoencoder file: " + path);
    ae.gram = ae.basis.transpose() * ae.basis;
    return ae;
}

}  // namespace parce
