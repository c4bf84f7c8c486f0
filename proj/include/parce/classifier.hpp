// Softmax terrain classifier over raw pixels.
//
// Feature map: [pixels / sqrt(n_pixels*3) ; per-channel mean ; per-channel
// variance]. The pixel block is scaled by a constant so full-batch gradient
// descent is well conditioned at ordinary learning rates; the scaling is part
// of the model definition and applied identically at train and predict time.
#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "parce/dataset.hpp"
#include "parce/image.hpp"

namespace parce {

struct ClassPosterior {
    Eigen::VectorXd probs;   // >= 0, sums to 1
    Eigen::VectorXd logits;  // pre-softmax
    int argmax = 0;

    double max_prob() const { return probs[argmax]; }
};

struct Classifier {
    Eigen::MatrixXd weights;          // n_classes x feature_dim
    Eigen::VectorXd bias;             // n_classes
    std::vector<std::string> class_names;
    int input_width = 0;
    int input_height = 0;

    int n_classes() const { return static_cast<int>(weights.rows()); }
};

// Feature vector for one image (see header comment for the layout).
Eigen::VectorXd image_features(const Image& img);
int feature_dim(int width, int height);

// Full-batch gradient descent on the multinomial cross-entropy. Deterministic
// for a fixed seed (tiny uniform weight init). Throws if any class has no
// training examples. Optionally reports the per-epoch mean cross-entropy.
Classifier train_classifier(const LabeledDataset& train, int epochs, double learning_rate,
                            std::uint64_t seed, std::vector<double>* loss_history = nullptr);

ClassPosterior predict(const Classifier& clf, const Image& img);

// Mean cross-entropy of the classifier on a dataset.
double cross_entropy(const Classifier& clf, const LabeledDataset& data);
double accuracy(const Classifier& clf, const LabeledDataset& data);

// Single-scalar temperature fitted on a holdout set by golden-section search
// on the negative log-likelihood.
double fit_temperature(const Classifier& clf, const LabeledDataset& holdout);

// Flat binary persistence: magic "PARCECLF", dims, little-endian float64.
void save_classifier(const Classifier& clf, const std::string& path);
Classifier load_classifier(const std::string& path);

}  // namespace parce
