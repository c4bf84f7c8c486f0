#include "parce/competency.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace parce {

double gaussian_cdf(double x) { return 0.5 * std::erfc(-x * M_SQRT1_2); }

double z_from_confidence(double percent) {
    if (!(percent > 0.0 && percent < 100.0))
        throw std::invalid_argument("z_from_confidence: percent must be in (0, 100)");
    const double target = percent / 100.0;
    double lo = -40.0, hi = 40.0;
    while (hi - lo > 1e-9) {
        const double mid = 0.5 * (lo + hi);
        if (gaussian_cdf(mid) < target)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

ClassLossModel fit_loss_model(const std::vector<double>& losses, const std::vector<int>& labels,
                              int n_classes) {
    if (losses.size() != labels.size()) throw std::invalid_argument("fit_loss_model: size mismatch");
    ClassLossModel model;
    model.per_class.resize(n_classes);
    std::vector<double> sum(n_classes, 0.0);
    std::vector<std::size_t> count(n_classes, 0);
    for (std::size_t i = 0; i < losses.size(); ++i) {
        const int c = labels[i];
        if (c < 0 || c >= n_classes) throw std::invalid_argument("fit_loss_model: label out of range");
        sum[c] += losses[i];
        ++count[c];
    }
    for (int c = 0; c < n_classes; ++c)
        if (count[c] < 2)
            throw std::runtime_error("calibration: class " + std::to_string(c) +
                                     " has fewer than 2 loss samples");
    std::vector<double> ss(n_classes, 0.0);
    for (std::size_t i = 0; i < losses.size(); ++i) {
        const int c = labels[i];
        const double d = losses[i] - sum[c] / count[c];
        ss[c] += d * d;
    }
    for (int c = 0; c < n_classes; ++c) {
        model.per_class[c].mu = sum[c] / count[c];
        model.per_class[c].sigma = std::max(std::sqrt(ss[c] / (count[c] - 1)), kSigmaMin);
        model.per_class[c].n_samples = count[c];
    }
    return model;
}

ClassLossModel calibrate_overall(const LinearAutoencoder& ae, const LabeledDataset& holdout,
                                 int n_classes) {
    std::vector<double> losses;
    losses.reserve(holdout.size());
    for (const Image& img : holdout.images) losses.push_back(reconstruct(ae, img).loss.value);
    return fit_loss_model(losses, holdout.labels, n_classes);
}

namespace {

PixelMask mask_from_segment(const SegmentMap& segs, int id) {
    PixelMask mask(segs.width, segs.height, false);
    for (std::size_t p = 0; p < segs.segment_id.size(); ++p)
        if (segs.segment_id[p] == id) mask.bits[p] = 1;
    return mask;
}

// Inpainting loss of one segment; a segment covering the whole image falls
// back to the zero-code decode (distance to the mean image), the limit of the
// visible least squares as the visible set empties.
double segment_inpaint_loss(const LinearAutoencoder& ae, const Image& img, const PixelMask& mask) {
    const std::size_t n_missing = mask.count();
    if (n_missing == mask.bits.size()) {
        double err2 = 0.0;
        for (std::size_t i = 0; i < img.px.size(); ++i) {
            const double e = img.px[i] - ae.mean[static_cast<Eigen::Index>(i)];
            err2 += e * e;
        }
        return err2 / static_cast<double>(img.px.size());
    }
    return inpaint(ae, img, mask).loss.value;
}

}  // namespace

ClassLossModel calibrate_regional(const LinearAutoencoder& ae, const LabeledDataset& holdout,
                                  int n_classes, const FhParams& fh) {
    std::vector<double> losses;
    std::vector<int> labels;
    for (std::size_t i = 0; i < holdout.size(); ++i) {
        const SegmentMap segs = segment(holdout.images[i], fh);
        for (int s = 0; s < segs.n_segments; ++s) {
            losses.push_back(segment_inpaint_loss(ae, holdout.images[i], mask_from_segment(segs, s)));
            labels.push_back(holdout.labels[i]);
        }
    }
    return fit_loss_model(losses, labels, n_classes);
}

double p_id_given_class(double loss, const ClassLossStats& stats, double z) {
    if (stats.sigma <= 0.0) throw std::invalid_argument("p_id_given_class: sigma must be positive");
    const double p = 1.0 - gaussian_cdf((loss - 2.0 * stats.mu) / stats.sigma - z);
    return std::clamp(p, 0.0, 1.0);
}

double overall_score(const ClassPosterior& posterior, double loss, const ClassLossModel& model,
                     double z) {
    if (posterior.probs.size() != model.n_classes())
        throw std::invalid_argument("overall_score: posterior/model class count mismatch");
    double mix = 0.0;
    for (int c = 0; c < model.n_classes(); ++c)
        mix += posterior.probs[c] * p_id_given_class(loss, model.per_class[c], z);
    return std::clamp(posterior.max_prob() * mix, 0.0, 1.0);
}

void regional_map(const Image& img, const ClassPosterior& posterior, const LinearAutoencoder& ae,
                  const SegmentMap& segs, const ClassLossModel& model, double z_regional,
                  const std::vector<std::uint8_t>& sky, CompetencyRecord& out) {
    if (segs.width != img.width || segs.height != img.height)
        throw std::invalid_argument("regional_map: segment map shape mismatch");
    if (!sky.empty() && sky.size() != img.n_pixels())
        throw std::invalid_argument("regional_map: sky mask shape mismatch");

    out.map_width = img.width;
    out.map_height = img.height;
    out.segment_scores.assign(segs.n_segments, 1.0);
    out.segment_losses.assign(segs.n_segments, 0.0);
    out.regional.assign(img.n_pixels(), 1.0);

    auto is_sky = [&](std::size_t p) { return !sky.empty() && sky[p] != 0; };

    // Neutralize sky pixels up front: setting them to the model mean zeroes
    // their residual, so they neither pull the latent fit nor enter any loss.
    Image masked = img;
    if (!sky.empty()) {
        for (std::size_t p = 0; p < sky.size(); ++p)
            if (sky[p])
                for (int c = 0; c < 3; ++c)
                    masked.px[p * 3 + c] = ae.mean[static_cast<Eigen::Index>(p * 3 + c)];
    }

    for (int s = 0; s < segs.n_segments; ++s) {
        // The scored region is the segment minus the sky band.
        PixelMask mask(img.width, img.height, false);
        std::size_t n_ground = 0;
        for (std::size_t p = 0; p < segs.segment_id.size(); ++p)
            if (segs.segment_id[p] == s && !is_sky(p)) {
                mask.bits[p] = 1;
                ++n_ground;
            }
        if (n_ground == 0) continue;  // all-sky segment keeps score 1.0

        const double loss = segment_inpaint_loss(ae, masked, mask);
        double mix = 0.0;
        for (int c = 0; c < model.n_classes(); ++c)
            mix += posterior.probs[c] * p_id_given_class(loss, model.per_class[c], z_regional);
        const double score = std::clamp(posterior.max_prob() * mix, 0.0, 1.0);
        out.segment_scores[s] = score;
        out.segment_losses[s] = loss;
        for (std::size_t p = 0; p < segs.segment_id.size(); ++p)
            if (segs.segment_id[p] == s && !is_sky(p)) out.regional[p] = score;
    }
}

CompetencyEstimator::CompetencyEstimator(Classifier clf, LinearAutoencoder ae, ClassLossModel overall,
                                         ClassLossModel regional, CompetencyConfig cfg, FhParams fh)
    : clf_(std::move(clf)),
      ae_(std::move(ae)),
      overall_(std::move(overall)),
      regional_(std::move(regional)),
      cfg_(cfg),
      fh_(fh),
      z_ovl_(cfg.z_overall()),
      z_reg_(cfg.z_regional()) {}

CompetencyRecord CompetencyEstimator::score(const Image& img, const std::vector<std::uint8_t>& sky,
                                            bool want_regional) const {
    const ClassPosterior posterior = predict(clf_, img);
    CompetencyRecord rec;
    const double loss = visible_recon_loss(ae_, img, sky).value;
    rec.overall = overall_score(posterior, loss, overall_, z_ovl_);
    if (want_regional) {
        const SegmentMap segs = segment(img, fh_);
        regional_map(img, posterior, ae_, segs, regional_, z_reg_, sky, rec);
    }
    return rec;
}

double score_baseline(BaselineMethod method, const ClassPosterior& posterior, double temperature) {
    switch (method) {
        case BaselineMethod::msp:
            return posterior.max_prob();
        case BaselineMethod::temperature: {
            if (temperature <= 0.0) throw std::invalid_argument("score_baseline: T must be positive");
            const Eigen::VectorXd scaled = posterior.logits / temperature;
            const double m = scaled.maxCoeff();
            const Eigen::ArrayXd e = (scaled.array() - m).exp();
            return (e / e.sum()).maxCoeff();
        }
        case BaselineMethod::entropy: {
            double h = 0.0;
            for (int c = 0; c < posterior.probs.size(); ++c) {
                const double p = posterior.probs[c];
                if (p > 0.0) h -= p * std::log(p);
            }
            return -h;  // negated: higher = more confident
        }
        case BaselineMethod::energy: {
            const double m = posterior.logits.maxCoeff();
            return m + std::log((posterior.logits.array() - m).exp().sum());
        }
    }
    throw std::invalid_argument("score_baseline: unknown method");
}

void save_loss_model(const ClassLossModel& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for write: " + path);
    out << "class_id,mu,sigma,n\n";
    out.precision(17);
    for (int c = 0; c < model.n_classes(); ++c) {
        const ClassLossStats& s = model.per_class[c];
        out << c << ',' << s.mu << ',' << s.sigma << ',' << s.n_samples << '\n';
    }
}

ClassLossModel load_loss_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    ClassLossModel model;
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string id, mu, sigma, n;
        if (!std::getline(ss, id, ',') || !std::getline(ss, mu, ',') || !std::getline(ss, sigma, ',') ||
            !std::getline(ss, n))
            throw std::runtime_error("bad calibration row: " + line);
        const int c = std::stoi(id);
        if (c != static_cast<int>(model.per_class.size()))
            throw std::runtime_error("calibration rows out of order in " + path);
        model.per_class.push_back({std::stod(mu), std::stod(sigma), static_cast<std::size_t>(std::stoul(n))});
    }
    return model;
}

void write_map_pgm(const CompetencyRecord& rec, const std::string& path) {
    write_pgm(rec.regional, rec.map_width, rec.map_height, path);
}

void write_map_csv(const CompetencyRecord& rec, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for write: " + path);
    out.precision(17);
    out << "overall," << rec.overall << "\n";
    for (int y = 0; y < rec.map_height; ++y) {
        for (int x = 0; x < rec.map_width; ++x) {
            if (x) out << ',';
            out << rec.regional[static_cast<std::size_t>(y) * rec.map_width + x];
        }
        out << '\n';
    }
}

}  // namespace parce
