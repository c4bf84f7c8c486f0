// Probabilistic reconstruction-based competency estimation.
//
// The overall score multiplies the classifier's confidence in its predicted
// class by a mixture, over classes, of the probability that the image's
// reconstruction loss is consistent with that class's training-loss Gaussian:
//
//   score(X) = p_max * sum_c p_c * (1 - Phi((loss(X) - 2*mu_c)/sigma_c - z))
//
// where (mu_c, sigma_c) are calibrated on a holdout set and z is the normal
// quantile of the configured confidence percentage. The regional variant
// applies the same form per image segment, with the loss replaced by the
// masked-segment inpainting loss.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "parce/autoencoder.hpp"
#include "parce/classifier.hpp"
#include "parce/dataset.hpp"
#include "parce/segmentation.hpp"

namespace parce {

// Standard normal CDF (erf-based, |err| <= 1e-9).
double gaussian_cdf(double x);

// Solves gaussian_cdf(z) = percent/100 by bisection to 1e-9.
// Throws unless 0 < percent < 100.
double z_from_confidence(double percent);

struct ClassLossStats {
    double mu = 0.0;
    double sigma = 0.0;  // clamped upward to sigma_min
    std::size_t n_samples = 0;
};

struct ClassLossModel {
    std::vector<ClassLossStats> per_class;

    int n_classes() const { return static_cast<int>(per_class.size()); }
};

// Lower clamp applied to calibrated sigmas so degenerate holdout classes
// cannot divide by zero.
constexpr double kSigmaMin = 1e-6;

struct CompetencyConfig {
    double confidence_overall = 95.0;   // percent
    double confidence_regional = 95.0;  // percent
    double threshold_overall = 0.8;
    double threshold_regional = 0.8;

    double z_overall() const { return z_from_confidence(confidence_overall); }
    double z_regional() const { return z_from_confidence(confidence_regional); }
};

// Sample mean / stddev (n-1 denominator) of losses grouped by true label.
// Throws std::runtime_error naming the class when some class has < 2 samples.
ClassLossModel fit_loss_model(const std::vector<double>& losses, const std::vector<int>& labels,
                              int n_classes);

// Full-image reconstruction losses of the holdout set, grouped by true label.
ClassLossModel calibrate_overall(const LinearAutoencoder& ae, const LabeledDataset& holdout,
                                 int n_classes);

// Per-segment inpainting losses of the holdout set (mask = segment), pooled by
// the true label of the source image.
ClassLossModel calibrate_regional(const LinearAutoencoder& ae, const LabeledDataset& holdout,
                                  int n_classes, const FhParams& fh);

// P(in-distribution | class c) for a given loss: 1 - Phi((loss - 2mu)/sigma - z).
double p_id_given_class(double loss, const ClassLossStats& stats, double z);

// Overall competency score (in [0, max posterior prob]).
double overall_score(const ClassPosterior& posterior, double loss, const ClassLossModel& model,
                     double z);

struct CompetencyRecord {
    double overall = 1.0;
    int map_width = 0;
    int map_height = 0;
    std::vector<double> regional;        // per-pixel, segment-constant, in [0,1]
    std::vector<double> segment_scores;  // per segment id
    std::vector<double> segment_losses;  // inpainting loss per segment

    bool has_regional() const { return !regional.empty(); }
    double regional_at(int x, int y) const {
        return regional[static_cast<std::size_t>(y) * map_width + x];
    }
};

// Per-pixel regional map: every pixel of a segment carries that segment's
// score; sky-masked pixels score 1.0. The posterior is the whole-image softmax
// output. Segments that lie entirely inside the sky mask score 1.0 and skip
// inpainting. Throws if the segment map and image disagree in shape.
void regional_map(const Image& img, const ClassPosterior& posterior, const LinearAutoencoder& ae,
                  const SegmentMap& segs, const ClassLossModel& model, double z_regional,
                  const std::vector<std::uint8_t>& sky, CompetencyRecord& out);

// Bundled estimator used by the navigation stack and the CLI.
class CompetencyEstimator {
public:
    CompetencyEstimator(Classifier clf, LinearAutoencoder ae, ClassLossModel overall,
                        ClassLossModel regional, CompetencyConfig cfg, FhParams fh);

    // Scores one image. `sky` may be empty (no exclusion); when present, sky
    // pixels are excluded from the overall loss and fixed to 1.0 in the map.
    CompetencyRecord score(const Image& img, const std::vector<std::uint8_t>& sky,
                           bool want_regional) const;

    const Classifier& classifier() const { return clf_; }
    const LinearAutoencoder& autoencoder() const { return ae_; }
    const CompetencyConfig& config() const { return cfg_; }
    const FhParams& fh_params() const { return fh_; }
    const ClassLossModel& overall_model() const { return overall_; }
    const ClassLossModel& regional_model() const { return regional_; }

private:
    Classifier clf_;
    LinearAutoencoder ae_;
    ClassLossModel overall_;
    ClassLossModel regional_;
    CompetencyConfig cfg_;
    FhParams fh_;
    double z_ovl_, z_reg_;
};

// Cheap logit-based baseline scorers, oriented so higher = more confident.
enum class BaselineMethod { msp, temperature, entropy, energy };

double score_baseline(BaselineMethod method, const ClassPosterior& posterior, double temperature = 1.0);

// Calibration persistence: CSV rows (class_id, mu, sigma, n).
void save_loss_model(const ClassLossModel& model, const std::string& path);
ClassLossModel load_loss_model(const std::string& path);

// Map export: PGM (score*255) and CSV of exact values.
void write_map_pgm(const CompetencyRecord& rec, const std::string& path);
void write_map_csv(const CompetencyRecord& rec, const std::string& path);

}  // namespace parce
