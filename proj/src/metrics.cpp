#include "parce/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace parce {

namespace {

void require_nonempty(const std::vector<double>& v, const char* op) {
    if (v.empty()) throw std::invalid_argument(std::string(op) + ": empty sample set");
}

}  // namespace

double ks_distance(std::vector<double> a, std::vector<double> b) {
    require_nonempty(a, "ks_distance");
    require_nonempty(b, "ks_distance");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double best = 0.0;
    while (i < a.size() || j < b.size()) {
        double t;
        if (j >= b.size() || (i < a.size() && a[i] <= b[j]))
            t = a[i];
        else
            t = b[j];
        while (i < a.size() && a[i] <= t) ++i;
        while (j < b.size() && b[j] <= t) ++j;
        best = std::max(best, std::abs(i / na - j / nb));
    }
    return best;
}

double auroc(std::vector<double> pos, std::vector<double> neg) {
    require_nonempty(pos, "auroc");
    require_nonempty(neg, "auroc");
    std::sort(pos.begin(), pos.end());
    double pairs = 0.0;
    for (double v : neg) {
        const auto below = std::lower_bound(pos.begin(), pos.end(), v) - pos.begin();
        const auto at_or_below = std::upper_bound(pos.begin(), pos.end(), v) - pos.begin();
        pairs += static_cast<double>(below) + 0.5 * static_cast<double>(at_or_below - below);
    }
    return pairs / (static_cast<double>(pos.size()) * static_cast<double>(neg.size()));
}

double fpr_at_tpr(std::vector<double> pos, std::vector<double> neg, double tpr_target) {
    require_nonempty(pos, "fpr_at_tpr");
    require_nonempty(neg, "fpr_at_tpr");
    std::sort(pos.begin(), pos.end());
    const std::size_t n = pos.size();
    // Smallest count k with k/n >= target (guarding float fuzz at exact
    // multiples), then the threshold is the k-th smallest positive.
    auto k = static_cast<std::size_t>(std::ceil(tpr_target * static_cast<double>(n) - 1e-9));
    k = std::min(std::max<std::size_t>(k, 1), n);
    const double threshold = pos[k - 1];
    std::size_t fp = 0;
    for (double v : neg)
        if (v <= threshold) ++fp;
    return static_cast<double>(fp) / static_cast<double>(neg.size());
}

}  // namespace parce
