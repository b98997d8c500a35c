#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "pupolicy/nn.hpp"
#include "pupolicy/rng.hpp"

namespace pupolicy {

enum class Membership { Positive, Unlabeled };

// One sampled action for one batch member; the reward is filled in after the
// classifier step of the same mini-batch.
struct ActionRecord {
    std::size_t index = 0;   // row within the mini-batch
    Membership membership = Membership::Unlabeled;
    double action = 0.0;     // weight in (0,1) for Weighter, {0,1} for Separator
    double log_prob = 0.0;   // under the sampling (target) policy
    double reward = 0.0;
};

// Live policy plus the periodically synced target used for action sampling.
struct PolicyPair {
    MLPModel live;
    MLPModel target;
    std::size_t sync_period = 3;  // epochs
};

struct ThresholdState {
    double threshold = 0.5;
    double thresh_min = 0.0;
};

// Hard assignment: a ~ Bernoulli(p). Returns (a, log pi(a)).
std::pair<double, double> act_separator(double p, Rng& rng);

// Soft label: w ~ Beta(nu*p, nu*(1-p)), mean p. Returns (w, log density at w).
std::pair<double, double> act_weighter(double p, double concentration, Rng& rng);

// Log density of the Beta action distribution; shapes below 1e-3 are clamped.
double beta_log_pdf(double w, double p, double concentration);

// thresh_min = min prediction over labeled batch members; the threshold is
// the mean prediction over P and the unlabeled members at or above
// thresh_min. A batch without labeled members keeps the previous threshold.
void compute_threshold(std::span<const double> yhat_P,
                       std::span<const double> yhat_U, ThresholdState& state);

// Classification-coherence reward: the classifier's confidence in the label
// the threshold implies.
double compute_reward(double yhat, Membership membership, double threshold);

std::vector<double> compute_rewards(const std::vector<double>& yhat,
                                    const std::vector<Membership>& memberships,
                                    double threshold);

// REINFORCE gradient of the negated objective -1/m sum log pi(a_i|x_i) R_i,
// with log pi re-evaluated under the given (live) policy.
Gradients reinforce_gradient(const MLPModel& policy, const Matrix& states,
                             const std::vector<ActionRecord>& records,
                             bool continuous_actions, double concentration);

// One Adam step on the negated objective.
void reinforce_update(MLPModel& policy, AdamState& optimizer, const Matrix& states,
                      const std::vector<ActionRecord>& records,
                      bool continuous_actions, double concentration);

// Theta' <- Theta whenever the sync period divides the epoch.
void sync_target(PolicyPair& pair, std::size_t epoch);

// Deterministic evaluation-time actions: the mean weight (Weighter) or the
// 0.5-thresholded assignment (Separator).
std::vector<double> deterministic_actions(const MLPModel& policy, const Matrix& states,
                                          bool continuous_actions);

}  // namespace pupolicy
