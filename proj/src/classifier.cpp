#include "parce/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "parce/rng.hpp"
#include "parce/world.hpp"

namespace parce {

int feature_dim(int width, int height) { return width * height * 3 + 6; }

Eigen::VectorXd image_features(const Image& img) {
    const int npx = static_cast<int>(img.n_pixels());
    const int d = feature_dim(img.width, img.height);
    Eigen::VectorXd f(d);
    const double scale = 1.0 / std::sqrt(static_cast<double>(npx) * 3.0);
    double mean[3] = {0, 0, 0}, m2[3] = {0, 0, 0};
    for (int i = 0; i < npx; ++i)
        for (int c = 0; c < 3; ++c) {
            const double v = img.px[static_cast<std::size_t>(i) * 3 + c];
            f[i * 3 + c] = v * scale;
            mean[c] += v;
            m2[c] += v * v;
        }
    for (int c = 0; c < 3; ++c) {
        mean[c] /= npx;
        f[npx * 3 + c] = mean[c];
        f[npx * 3 + 3 + c] = m2[c] / npx - mean[c] * mean[c];  // population variance
    }
    return f;
}

namespace {

Eigen::VectorXd softmax_stable(const Eigen::VectorXd& logits) {
    const double m = logits.maxCoeff();
    Eigen::VectorXd e = (logits.array() - m).exp();
    return e / e.sum();
}

int argmax_of(const Eigen::VectorXd& v) {
    int best = 0;
    for (int i = 1; i < v.size(); ++i)
        if (v[i] > v[best]) best = i;
    return best;
}

Eigen::MatrixXd feature_matrix(const LabeledDataset& data) {
    const int n = static_cast<int>(data.size());
    const int d = feature_dim(data.images[0].width, data.images[0].height);
    Eigen::MatrixXd X(n, d);
    for (int i = 0; i < n; ++i) X.row(i) = image_features(data.images[i]).transpose();
    return X;
}

}  // namespace

Classifier train_classifier(const LabeledDataset& train, int epochs, double learning_rate,
                            std::uint64_t seed, std::vector<double>* loss_history) {
    if (train.size() == 0) throw std::invalid_argument("train_classifier: empty dataset");
    if (learning_rate <= 0) throw std::invalid_argument("train_classifier: learning rate must be positive");

    int n_classes = 0;
    for (int l : train.labels) n_classes = std::max(n_classes, l + 1);
    const auto counts = train.class_counts(n_classes);
    for (int c = 0; c < n_classes; ++c)
        if (counts[c] == 0)
            throw std::invalid_argument("train_classifier: class " + std::to_string(c) + " has no examples");

    const int n = static_cast<int>(train.size());
    const Eigen::MatrixXd X = feature_matrix(train);
    const int d = static_cast<int>(X.cols());

    Eigen::MatrixXd Y = Eigen::MatrixXd::Zero(n, n_classes);
    for (int i = 0; i < n; ++i) Y(i, train.labels[i]) = 1.0;

    Classifier clf;
    clf.input_width = train.images[0].width;
    clf.input_height = train.images[0].height;
    clf.weights.resize(n_classes, d);
    Rng rng(seed);
    for (int r = 0; r < n_classes; ++r)
        for (int c = 0; c < d; ++c) clf.weights(r, c) = rng.uniform(-1e-3, 1e-3);
    clf.bias = Eigen::VectorXd::Zero(n_classes);
    for (int c = 0; c < n_classes; ++c)
        clf.class_names.push_back(c < n_terrain_classes() ? terrain_classes()[c].name
                                                          : "class-" + std::to_string(c));

    Eigen::MatrixXd P(n, n_classes);
    for (int epoch = 0; epoch < epochs; ++epoch) {
        Eigen::MatrixXd Z = X * clf.weights.transpose();
        Z.rowwise() += clf.bias.transpose();
        double loss = 0.0;
        for (int i = 0; i < n; ++i) {
            const double m = Z.row(i).maxCoeff();
            const Eigen::ArrayXd e = (Z.row(i).transpose().array() - m).exp();
            const double s = e.sum();
            P.row(i) = (e / s).transpose();
            loss -= std::log(std::max(P(i, train.labels[i]), 1e-300));
        }
        if (loss_history) loss_history->push_back(loss / n);

        const Eigen::MatrixXd G = (P - Y).transpose() * X / n;
        clf.weights -= learning_rate * G;
        clf.bias -= learning_rate * (P - Y).colwise().mean().transpose();
    }
    return clf;
}

ClassPosterior predict(const Classifier& clf, const Image& img) {
    if (img.width != clf.input_width || img.height != clf.input_height)
        throw std::invalid_argument("predict: image shape mismatch");
    ClassPosterior out;
    out.logits = clf.weights * image_features(img) + clf.bias;
    out.probs = softmax_stable(out.logits);
    out.argmax = argmax_of(out.logits);
    return out;
}

double cross_entropy(const Classifier& clf, const LabeledDataset& data) {
    double loss = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const ClassPosterior p = predict(clf, data.images[i]);
        loss -= std::log(std::max(p.probs[data.labels[i]], 1e-300));
    }
    return loss / static_cast<double>(data.size());
}

double accuracy(const Classifier& clf, const LabeledDataset& data) {
    std::size_t correct = 0;
    for (std::size_t i = 0; i < data.size(); ++i)
        if (predict(clf, data.images[i]).argmax == data.labels[i]) ++correct;
    return static_cast<double>(correct) / static_cast<double>(data.size());
}

double fit_temperature(const Classifier& clf, const LabeledDataset& holdout) {
    std::vector<Eigen::VectorXd> logits;
    logits.reserve(holdout.size());
    for (const Image& img : holdout.images) logits.push_back(predict(clf, img).logits);

    auto nll = [&](double T) {
        double loss = 0.0;
        for (std::size_t i = 0; i < logits.size(); ++i) {
            const Eigen::VectorXd p = softmax_stable(logits[i] / T);
            loss -= std::log(std::max(p[holdout.labels[i]], 1e-300));
        }
        return loss / static_cast<double>(logits.size());
    };

    // Golden-section search on [0.05, 20].
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = 0.05, b = 20.0;
    double c = b - phi * (b - a), d = a + phi * (b - a);
    double fc = nll(c), fd = nll(d);
    for (int it = 0; it < 200 && (b - a) > 1e-9; ++it) {
        if (fc < fd) {
            b = d; d = c; fd = fc;
            c = b - phi * (b - a);
            fc = nll(c);
        } else {
            a = c; c = d; fc = fd;
            d = a + phi * (b - a);
            fd = nll(d);
        }
    }
    return 0.5 * (a + b);
}

namespace {

void write_u64(std::ofstream& out, std::uint64_t v) {
    unsigned char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    out.write(reinterpret_cast<const char*>(buf), 8);
}

std::uint64_t read_u64(std::ifstream& in) {
    unsigned char buf[8];
    in.read(reinterpret_cast<char*>(buf), 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
    return v;
}

void write_doubles(std::ofstream& out, const double* p, std::size_t n) {
    // Assumes little-endian IEEE-754 host, which covers every platform this
    // project targets; the format is defined as little-endian on disk.
    out.write(reinterpret_cast<const char*>(p), static_cast<std::streamsize>(n * sizeof(double)));
}

void read_doubles(std::ifstream& in, double* p, std::size_t n) {
    in.read(reinterpret_cast<char*>(p), static_cast<std::streamsize>(n * sizeof(double)));
    if (in.gcount() != static_cast<std::streamsize>(n * sizeof(double)))
        throw std::runtime_error("truncated model file");
}

}  // namespace

void save_classifier(const Classifier& clf, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for write: " + path);
    out.write("PARCECLF", 8);
    write_u64(out, static_cast<std::uint64_t>(clf.weights.rows()));
    write_u64(out, static_cast<std::uint64_t>(clf.weights.cols()));
    write_u64(out, static_cast<std::uint64_t>(clf.input_width));
    write_u64(out, static_cast<std::uint64_t>(clf.input_height));
    // Row-major so the file layout is independent of Eigen's default ordering.
    for (int r = 0; r < clf.weights.rows(); ++r)
        for (int c = 0; c < clf.weights.cols(); ++c) {
            const double v = clf.weights(r, c);
            write_doubles(out, &v, 1);
        }
    write_doubles(out, clf.bias.data(), static_cast<std::size_t>(clf.bias.size()));
    if (!out) throw std::runtime_error("write failed: " + path);
}

Classifier load_classifier(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    char magic[8];
    in.read(magic, 8);
    if (std::string(magic, 8) != "PARCECLF") throw std::runtime_error("bad classifier file: " + path);
    Classifier clf;
    const auto rows = static_cast<int>(read_u64(in));
    const auto cols = static_cast<int>(read_u64(in));
    clf.input_width = static_cast<int>(read_u64(in));
    clf.input_height = static_cast<int>(read_u64(in));
    if (rows <= 0 || cols <= 0 || feature_dim(clf.input_width, clf.input_height) != cols)
        throw std::runtime_error("inconsistent classifier dims: " + path);
    clf.weights.resize(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) read_doubles(in, &clf.weights(r, c), 1);
    clf.bias.resize(rows);
    read_doubles(in, clf.bias.data(), static_cast<std::size_t>(rows));
    for (int c = 0; c < rows; ++c)
        clf.class_names.push_back(c < n_terrain_classes() ? terrain_classes()[c].name
                                                          : "class-" + std::to_string(c));
    return clf;
}

}  // namespace parce
