// Distribution-separation metrics for competency scores: Kolmogorov-Smirnov
// distance, AUROC, and FPR at a fixed TPR.
//
// Orientation convention: `pos` is the set to detect (misclassified / OOD /
// unfamiliar) and detection fires on LOW competency values. All operations
// throw std::invalid_argument on empty inputs.
#pragma once

#include <vector>

namespace parce {

// sup_t |F_a(t) - F_b(t)| over the merged sample values.
double ks_distance(std::vector<double> a, std::vector<double> b);

// Mann-Whitney statistic (#pairs pos < neg + 0.5 * #ties) / (|pos|*|neg|);
// 1.0 means every positive scores below every negative.
double auroc(std::vector<double> pos, std::vector<double> neg);

// Smallest threshold t (among the positive sample values) with
// P(pos <= t) >= tpr_target; returns P(neg <= t).
double fpr_at_tpr(std::vector<double> pos, std::vector<double> neg, double tpr_target = 0.95);

}  // namespace parce
