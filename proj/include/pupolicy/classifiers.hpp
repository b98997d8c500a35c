#pragma once

#include <span>
#include <vector>

namespace pupolicy {

struct LossBreakdown {
    double total = 0.0;
    double positive_term = 0.0;
    double unlabeled_or_negative_term = 0.0;
    bool correction_active = false;   // nnPU only
    bool positive_side_empty = false; // separator/PN with no positive members
};

struct PriorSpec {
    double alpha = 0.5;           // class prior, in (0,1)
    double label_frequency = 1.0; // c = p(s=1 | y=1), in (0,1]
};

// Every loss returns per-set-mean terms plus the gradient of the optimization
// objective with respect to each prediction, in input order. The objective is
// `total` everywhere except under the nnPU correction, where only the clipped
// surrogate term is optimized.
struct LossResult {
    LossBreakdown breakdown;
    std::vector<double> grad_first;  // d total / d yhat for the first span
    std::vector<double> grad_second; // ... for the second span
};

// Weighted cross-entropy: P examples count as positives with weight 1,
// each U example as a positive with weight w and a negative with 1-w.
LossResult loss_weighter(std::span<const double> yhat_P,
                         std::span<const double> yhat_U,
                         std::span<const double> weights);

// Standard cross-entropy over policy-assigned positives (P plus P') and
// negatives (N').
LossResult loss_separator(std::span<const double> yhat_pos,
                          std::span<const double> yhat_neg);

// U treated as negative outright.
LossResult loss_biased(std::span<const double> yhat_P,
                       std::span<const double> yhat_U);

// Non-negative PU risk with logistic log-loss: when the surrogate negative
// risk goes below zero, only the clipped term is optimized (in the direction
// that shrinks its magnitude) and correction_active is set.
LossResult loss_nnpu(std::span<const double> yhat_P,
                     std::span<const double> yhat_U, const PriorSpec& prior);

// Fully supervised cross-entropy; oracle baseline only.
LossResult loss_pn(std::span<const double> yhat_pos,
                   std::span<const double> yhat_neg);

// p(y=1|x) = min(1, p(s=1|x) / c).
double elkan_adjust(double p_s, double label_frequency);

}  // namespace pupolicy
