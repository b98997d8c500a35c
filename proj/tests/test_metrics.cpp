#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "pupolicy/errors.hpp"
#include "pupolicy/metrics.hpp"
#include "pupolicy/rng.hpp"

using namespace pupolicy;

namespace {

// All-pairs oracle: P(score_pos > score_neg) + 0.5 P(tie).
double roc_auc_oracle(const ScoredLabels& sl) {
    double wins = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < sl.labels.size(); ++i) {
        if (sl.labels[i] != 1) continue;
        for (std::size_t j = 0; j < sl.labels.size(); ++j) {
            if (sl.labels[j] != 0) continue;
            ++pairs;
            if (sl.scores[i] > sl.scores[j]) wins += 1.0;
            else if (sl.scores[i] == sl.scores[j]) wins += 0.5;
        }
    }
    return wins / static_cast<double>(pairs);
}

// From-definition average precision: for every distinct threshold taken in
// descending order, precision at that cut times the recall it adds.
double pr_auc_oracle(const ScoredLabels& sl) {
    std::vector<double> cuts = sl.scores;
    std::sort(cuts.begin(), cuts.end(), std::greater<>());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    std::size_t n_pos = 0;
    for (int y : sl.labels) n_pos += y;

    double ap = 0.0;
    double prev_recall = 0.0;
    for (double cut : cuts) {
        std::size_t tp = 0, predicted = 0;
        for (std::size_t i = 0; i < sl.scores.size(); ++i)
            if (sl.scores[i] >= cut) {
                ++predicted;
                tp += sl.labels[i];
            }
        const double recall = static_cast<double>(tp) / static_cast<double>(n_pos);
        const double precision = static_cast<double>(tp) / static_cast<double>(predicted);
        ap += (recall - prev_recall) * precision;
        prev_recall = recall;
    }
    return ap;
}

ScoredLabels random_input(Rng& rng, std::size_t max_n, bool force_both_classes) {
    std::uniform_int_distribution<std::size_t> size_dist(2, max_n);
    std::uniform_real_distribution<double> score_dist(0.0, 1.0);
    std::bernoulli_distribution label_dist(0.5);
    // Coarse grid so ties actually occur.
    std::uniform_int_distribution<int> grid(0, 9);
    std::bernoulli_distribution use_grid(0.5);

    ScoredLabels sl;
    const std::size_t n = size_dist(rng);
    const bool gridded = use_grid(rng);
    for (std::size_t i = 0; i < n; ++i) {
        sl.scores.push_back(gridded ? grid(rng) / 10.0 : score_dist(rng));
        sl.labels.push_back(label_dist(rng) ? 1 : 0);
    }
    if (force_both_classes) {
        sl.labels[0] = 1;
        sl.labels[1] = 0;
    }
    return sl;
}

}  // namespace

TEST_CASE("accuracy: hand cases") {
    CHECK(accuracy({{1.0, 0.0, 1.0}, {1, 0, 1}}) == 1.0);
    CHECK(accuracy({{0.0, 1.0}, {1, 0}}) == 0.0);
    CHECK(accuracy({{0.6, 0.4, 0.7}, {1, 1, 0}}) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("roc_auc: hand cases") {
    CHECK(roc_auc({{0.9, 0.8, 0.2, 0.1}, {1, 1, 0, 0}}) == 1.0);
    CHECK(roc_auc({{0.5, 0.5, 0.5, 0.5}, {1, 0, 1, 0}}) == 0.5);
    CHECK(roc_auc({{0.9, 0.3, 0.8}, {1, 1, 0}}) == 0.5);
    CHECK_THROWS_AS(roc_auc({{0.1, 0.2}, {1, 1}}), UndefinedMetricError);
}

TEST_CASE("roc_auc: equals the all-pairs oracle exactly") {
    Rng rng(2024);
    for (int trial = 0; trial < 500; ++trial) {
        const ScoredLabels sl = random_input(rng, 200, true);
        CHECK(roc_auc(sl) == roc_auc_oracle(sl));  // bitwise
    }
}

TEST_CASE("roc_auc: complement symmetry") {
    Rng rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        const ScoredLabels sl = random_input(rng, 100, true);
        ScoredLabels flipped = sl;
        for (int& y : flipped.labels) y = 1 - y;
        CHECK(roc_auc(sl) + roc_auc(flipped) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("pr_auc: hand cases") {
    CHECK(pr_auc({{0.9, 0.8, 0.2, 0.1}, {1, 1, 0, 0}}) == 1.0);
    CHECK(pr_auc({{0.9, 0.8, 0.7, 0.1}, {0, 0, 0, 1}}) == doctest::Approx(0.25));
    CHECK(pr_auc({{0.4, 0.6, 0.5}, {1, 1, 1}}) == 1.0);
    CHECK_THROWS_AS(pr_auc({{0.1, 0.2}, {0, 0}}), UndefinedMetricError);
}

TEST_CASE("pr_auc: matches the from-definition oracle") {
    Rng rng(11);
    for (int trial = 0; trial < 500; ++trial) {
        const ScoredLabels sl = random_input(rng, 200, true);
        CHECK(pr_auc(sl) == doctest::Approx(pr_auc_oracle(sl)).epsilon(1e-12));
    }
}

TEST_CASE("pr_auc: constant scores hit the prevalence lower bound") {
    const ScoredLabels sl{{0.3, 0.3, 0.3, 0.3}, {1, 0, 0, 1}};
    CHECK(pr_auc(sl) == doctest::Approx(0.5));
}

TEST_CASE("rank invariance under strictly monotone transforms") {
    Rng rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        const ScoredLabels sl = random_input(rng, 80, true);
        ScoredLabels warped = sl;
        for (double& s : warped.scores) s = std::exp(3.0 * s) - 0.5;
        CHECK(roc_auc(sl) == doctest::Approx(roc_auc(warped)).epsilon(1e-12));
        CHECK(pr_auc(sl) == doctest::Approx(pr_auc(warped)).epsilon(1e-12));
    }
}

TEST_CASE("assignment_rate: counting") {
    CHECK(assignment_rate({1.0, 0.0, 1.0}, {1, 0, 1}) == 1.0);
    CHECK(assignment_rate({0.0, 1.0}, {1, 0}) == 0.0);
    CHECK(assignment_rate({1.0, 0.0}, {1, 1}) == 0.5);
    // Continuous actions hardened at 0.5.
    CHECK(assignment_rate({0.7, 0.2}, {1, 0}) == 1.0);
}
