#pragma once

#include <vector>

namespace pupolicy {

struct ScoredLabels {
    std::vector<double> scores;
    std::vector<int> labels;  // {0,1}
};

// Fraction with (score >= cutoff) == label.
double accuracy(const ScoredLabels& sl, double cutoff = 0.5);

// P(score_pos > score_neg) + 0.5 P(tie), via midranks.
// Throws UndefinedMetricError if only one class is present.
double roc_auc(const ScoredLabels& sl);

// Average precision with tied scores grouped.
// Throws UndefinedMetricError if there are no positives.
double pr_auc(const ScoredLabels& sl);

// Fraction of unlabeled examples whose hardened action matches the hidden
// label. Continuous actions are thresholded at 0.5.
double assignment_rate(const std::vector<double>& actions,
                       const std::vector<int>& hidden_labels);

}  // namespace pupolicy
