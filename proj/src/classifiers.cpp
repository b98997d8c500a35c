#include "pupolicy/classifiers.hpp"

#include <cmath>

#include "pupolicy/errors.hpp"

namespace pupolicy {

namespace {

double mean_or_zero(double sum, std::size_t n) {
    return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

}  // namespace

LossResult loss_weighter(std::span<const double> yhat_P,
                         std::span<const double> yhat_U,
                         std::span<const double> weights) {
    if (weights.size() != yhat_U.size())
        throw ConfigError("loss_weighter: one weight per unlabeled prediction");
    for (double w : weights)
        if (!(w >= 0.0 && w <= 1.0))
            throw ConfigError("loss_weighter: weight outside [0,1]");

    LossResult out;
    out.grad_first.assign(yhat_P.size(), 0.0);
    out.grad_second.assign(yhat_U.size(), 0.0);

    const double inv_p = yhat_P.empty() ? 0.0 : 1.0 / static_cast<double>(yhat_P.size());
    double pos_sum = 0.0;
    for (std::size_t i = 0; i < yhat_P.size(); ++i) {
        pos_sum += -std::log(yhat_P[i]);
        out.grad_first[i] = -inv_p / yhat_P[i];
    }

    const double inv_u = yhat_U.empty() ? 0.0 : 1.0 / static_cast<double>(yhat_U.size());
    double unl_sum = 0.0;
    for (std::size_t i = 0; i < yhat_U.size(); ++i) {
        const double y = yhat_U[i];
        const double w = weights[i];
        unl_sum += -(w * std::log(y) + (1.0 - w) * std::log(1.0 - y));
        out.grad_second[i] = -inv_u * (w / y - (1.0 - w) / (1.0 - y));
    }

    out.breakdown.positive_term = mean_or_zero(pos_sum, yhat_P.size());
    out.breakdown.unlabeled_or_negative_term = mean_or_zero(unl_sum, yhat_U.size());
    out.breakdown.positive_side_empty = yhat_P.empty();
    out.breakdown.total =
        out.breakdown.positive_term + out.breakdown.unlabeled_or_negative_term;
    return out;
}

LossResult loss_separator(std::span<const double> yhat_pos,
                          std::span<const double> yhat_neg) {
    LossResult out;
    out.grad_first.assign(yhat_pos.size(), 0.0);
    out.grad_second.assign(yhat_neg.size(), 0.0);

    const double inv_p = yhat_pos.empty() ? 0.0 : 1.0 / static_cast<double>(yhat_pos.size());
    double pos_sum = 0.0;
    for (std::size_t i = 0; i < yhat_pos.size(); ++i) {
        pos_sum += -std::log(yhat_pos[i]);
        out.grad_first[i] = -inv_p / yhat_pos[i];
    }

    const double inv_n = yhat_neg.empty() ? 0.0 : 1.0 / static_cast<double>(yhat_neg.size());
    double neg_sum = 0.0;
    for (std::size_t i = 0; i < yhat_neg.size(); ++i) {
        neg_sum += -std::log(1.0 - yhat_neg[i]);
        out.grad_second[i] = inv_n / (1.0 - yhat_neg[i]);
    }

    out.breakdown.positive_term = mean_or_zero(pos_sum, yhat_pos.size());
    out.breakdown.unlabeled_or_negative_term = mean_or_zero(neg_sum, yhat_neg.size());
    out.breakdown.positive_side_empty = yhat_pos.empty();
    out.breakdown.total =
        out.breakdown.positive_term + out.breakdown.unlabeled_or_negative_term;
    return out;
}

LossResult loss_biased(std::span<const double> yhat_P,
                       std::span<const double> yhat_U) {
    return loss_separator(yhat_P, yhat_U);
}

LossResult loss_nnpu(std::span<const double> yhat_P,
                     std::span<const double> yhat_U, const PriorSpec& prior) {
    const double alpha = prior.alpha;
    if (!(alpha > 0.0 && alpha < 1.0))
        throw ConfigError("loss_nnpu: class prior alpha must lie in (0,1)");

    LossResult out;
    out.grad_first.assign(yhat_P.size(), 0.0);
    out.grad_second.assign(yhat_U.size(), 0.0);

    const double inv_p = yhat_P.empty() ? 0.0 : 1.0 / static_cast<double>(yhat_P.size());
    const double inv_u = yhat_U.empty() ? 0.0 : 1.0 / static_cast<double>(yhat_U.size());

    // l(+) = -log yhat, l(-) = -log(1 - yhat).
    double pos_risk = 0.0;       // alpha * mean_P l(+)
    double p_neg_risk = 0.0;     // mean_P l(-)
    for (double y : yhat_P) {
        pos_risk += -std::log(y);
        p_neg_risk += -std::log(1.0 - y);
    }
    pos_risk = alpha * mean_or_zero(pos_risk, yhat_P.size());
    p_neg_risk = mean_or_zero(p_neg_risk, yhat_P.size());

    double u_neg_risk = 0.0;     // mean_U l(-)
    for (double y : yhat_U) u_neg_risk += -std::log(1.0 - y);
    u_neg_risk = mean_or_zero(u_neg_risk, yhat_U.size());

    const double surrogate = u_neg_risk - alpha * p_neg_risk;

    out.breakdown.positive_term = pos_risk;
    if (surrogate < 0.0) {
        // Non-negative correction: descend -surrogate only.
        out.breakdown.correction_active = true;
        out.breakdown.unlabeled_or_negative_term = -surrogate;
        out.breakdown.total = pos_risk - surrogate;
        for (std::size_t i = 0; i < yhat_P.size(); ++i)
            out.grad_first[i] = alpha * inv_p / (1.0 - yhat_P[i]);
        for (std::size_t i = 0; i < yhat_U.size(); ++i)
            out.grad_second[i] = -inv_u / (1.0 - yhat_U[i]);
    } else {
        out.breakdown.unlabeled_or_negative_term = surrogate;
        out.breakdown.total = pos_risk + surrogate;
        for (std::size_t i = 0; i < yhat_P.size(); ++i)
            out.grad_first[i] =
                -alpha * inv_p / yhat_P[i] - alpha * inv_p / (1.0 - yhat_P[i]);
        for (std::size_t i = 0; i < yhat_U.size(); ++i)
            out.grad_second[i] = inv_u / (1.0 - yhat_U[i]);
    }
    return out;
}

LossResult loss_pn(std::span<const double> yhat_pos,
                   std::span<const double> yhat_neg) {
    return loss_separator(yhat_pos, yhat_neg);
}

double elkan_adjust(double p_s, double label_frequency) {
    if (!(label_frequency > 0.0 && label_frequency <= 1.0))
        throw ConfigError("elkan_adjust: label frequency must lie in (0,1]");
    if (!(p_s >= 0.0 && p_s <= 1.0))
        throw ConfigError("elkan_adjust: p(s=1|x) must lie in [0,1]");
    return std::min(1.0, p_s / label_frequency);
}

}  // namespace pupolicy
