#include "pupolicy/metrics.hpp"

#include <algorithm>
#include <numeric>

#include "pupolicy/errors.hpp"

namespace pupolicy {

double accuracy(const ScoredLabels& sl, double cutoff) {
    if (sl.scores.size() != sl.labels.size() || sl.scores.empty())
        throw UndefinedMetricError("accuracy: empty or mismatched input");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < sl.scores.size(); ++i)
        if ((sl.scores[i] >= cutoff ? 1 : 0) == sl.labels[i]) ++hits;
    return static_cast<double>(hits) / static_cast<double>(sl.scores.size());
}

double roc_auc(const ScoredLabels& sl) {
    const std::size_t n = sl.scores.size();
    if (n != sl.labels.size() || n == 0)
        throw UndefinedMetricError("roc_auc: empty or mismatched input");
    std::size_t n_pos = 0;
    for (int y : sl.labels) n_pos += y;
    const std::size_t n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0)
        throw UndefinedMetricError("roc_auc: needs both classes");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return sl.scores[a] < sl.scores[b]; });

    // Midrank correction over tie groups.
    double pos_rank_sum = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && sl.scores[order[j]] == sl.scores[order[i]]) ++j;
        const double midrank = 0.5 * static_cast<double>(i + 1 + j);  // 1-based
        for (std::size_t k = i; k < j; ++k)
            if (sl.labels[order[k]] == 1) pos_rank_sum += midrank;
        i = j;
    }
    const double np = static_cast<double>(n_pos);
    const double nn = static_cast<double>(n_neg);
    return (pos_rank_sum - np * (np + 1.0) / 2.0) / (np * nn);
}

double pr_auc(const ScoredLabels& sl) {
    const std::size_t n = sl.scores.size();
    if (n != sl.labels.size() || n == 0)
        throw UndefinedMetricError("pr_auc: empty or mismatched input");
    std::size_t n_pos = 0;
    for (int y : sl.labels) n_pos += y;
    if (n_pos == 0) throw UndefinedMetricError("pr_auc: needs at least one positive");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return sl.scores[a] > sl.scores[b]; });

    // Average precision, sweeping descending score with tie groups merged:
    // AP = sum over groups of dRecall * precision at the group boundary.
    double ap = 0.0;
    std::size_t tp = 0, seen = 0, i = 0;
    while (i < n) {
        std::size_t j = i;
        std::size_t group_tp = 0;
        while (j < n && sl.scores[order[j]] == sl.scores[order[i]]) {
            group_tp += sl.labels[order[j]];
            ++j;
        }
        tp += group_tp;
        seen = j;
        const double precision = static_cast<double>(tp) / static_cast<double>(seen);
        ap += precision * static_cast<double>(group_tp) / static_cast<double>(n_pos);
        i = j;
    }
    return ap;
}

double assignment_rate(const std::vector<double>& actions,
                       const std::vector<int>& hidden_labels) {
    if (actions.size() != hidden_labels.size() || actions.empty())
        throw UndefinedMetricError("assignment_rate: empty or mismatched input");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < actions.size(); ++i)
        if ((actions[i] >= 0.5 ? 1 : 0) == hidden_labels[i]) ++hits;
    return static_cast<double>(hits) / static_cast<double>(actions.size());
}

}  // namespace pupolicy
