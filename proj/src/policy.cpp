#include "pupolicy/policy.hpp"

#include <algorithm>
#include <cmath>

#include "pupolicy/errors.hpp"

namespace pupolicy {

namespace {

constexpr double kMinShape = 1e-3;   // degenerate Beta shapes are clamped here
constexpr double kActionClip = 1e-9; // keeps sampled w strictly inside (0,1)

double digamma(double x) {
    // Recurrence into the asymptotic regime, then the standard expansion.
    double result = 0.0;
    while (x < 6.0) {
        result -= 1.0 / x;
        x += 1.0;
    }
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    result += std::log(x) - 0.5 * inv -
              inv2 * (1.0 / 12.0 - inv2 * (1.0 / 120.0 - inv2 / 252.0));
    return result;
}

struct BetaShape {
    double alpha;
    double beta;
    bool alpha_clamped;
    bool beta_clamped;
};

BetaShape beta_shape(double p, double concentration) {
    if (!(concentration > 0.0))
        throw ConfigError("act_weighter: concentration must be positive");
    BetaShape s{};
    s.alpha = concentration * p;
    s.beta = concentration * (1.0 - p);
    s.alpha_clamped = s.alpha < kMinShape;
    s.beta_clamped = s.beta < kMinShape;
    s.alpha = std::max(s.alpha, kMinShape);
    s.beta = std::max(s.beta, kMinShape);
    return s;
}

}  // namespace

std::pair<double, double> act_separator(double p, Rng& rng) {
    std::bernoulli_distribution coin(p);
    const double a = coin(rng) ? 1.0 : 0.0;
    const double log_prob = a > 0.5 ? std::log(p) : std::log(1.0 - p);
    return {a, log_prob};
}

double beta_log_pdf(double w, double p, double concentration) {
    const BetaShape s = beta_shape(p, concentration);
    w = std::clamp(w, kActionClip, 1.0 - kActionClip);
    return std::lgamma(s.alpha + s.beta) - std::lgamma(s.alpha) - std::lgamma(s.beta) +
           (s.alpha - 1.0) * std::log(w) + (s.beta - 1.0) * std::log(1.0 - w);
}

std::pair<double, double> act_weighter(double p, double concentration, Rng& rng) {
    const BetaShape s = beta_shape(p, concentration);
    std::gamma_distribution<double> ga(s.alpha, 1.0);
    std::gamma_distribution<double> gb(s.beta, 1.0);
    const double x = ga(rng);
    const double y = gb(rng);
    double w = (x + y) > 0.0 ? x / (x + y) : 0.5;
    w = std::clamp(w, kActionClip, 1.0 - kActionClip);
    return {w, beta_log_pdf(w, p, concentration)};
}

void compute_threshold(std::span<const double> yhat_P,
                       std::span<const double> yhat_U, ThresholdState& state) {
    if (yhat_P.empty()) return;  // carry the previous threshold forward

    double min_p = yhat_P[0];
    for (double y : yhat_P) min_p = std::min(min_p, y);
    state.thresh_min = min_p;

    double sum = 0.0;
    std::size_t count = 0;
    for (double y : yhat_P) {
        sum += y;
        ++count;
    }
    for (double y : yhat_U)
        if (y >= min_p) {
            sum += y;
            ++count;
        }
    state.threshold = sum / static_cast<double>(count);
}

double compute_reward(double yhat, Membership membership, double threshold) {
    if (membership == Membership::Positive) return yhat;
    return yhat >= threshold ? yhat : 1.0 - yhat;
}

std::vector<double> compute_rewards(const std::vector<double>& yhat,
                                    const std::vector<Membership>& memberships,
                                    double threshold) {
    if (yhat.size() != memberships.size())
        throw ConfigError("compute_rewards: size mismatch");
    std::vector<double> rewards(yhat.size());
    for (std::size_t i = 0; i < yhat.size(); ++i)
        rewards[i] = compute_reward(yhat[i], memberships[i], threshold);
    return rewards;
}

namespace {

// d log pi(a|p) / dp at the sampled action.
double log_prob_grad(double p, double action, bool continuous, double concentration) {
    if (!continuous)
        return action > 0.5 ? 1.0 / p : -1.0 / (1.0 - p);

    const BetaShape s = beta_shape(p, concentration);
    const double w = std::clamp(action, kActionClip, 1.0 - kActionClip);
    const double psi_ab = digamma(s.alpha + s.beta);
    double g = 0.0;
    if (!s.alpha_clamped)
        g += concentration * (psi_ab - digamma(s.alpha) + std::log(w));
    if (!s.beta_clamped)
        g -= concentration * (psi_ab - digamma(s.beta) + std::log(1.0 - w));
    return g;
}

}  // namespace

Gradients reinforce_gradient(const MLPModel& policy, const Matrix& states,
                             const std::vector<ActionRecord>& records,
                             bool continuous_actions, double concentration) {
    ForwardCache cache;
    const std::vector<double> probs = forward(policy, states, &cache);
    std::vector<double> output_grad(states.rows, 0.0);
    const double inv_m = records.empty() ? 0.0 : 1.0 / static_cast<double>(records.size());
    for (const ActionRecord& rec : records) {
        const double p = probs[rec.index];
        // Negated objective: descend on -(1/m) R dlog pi/dp.
        output_grad[rec.index] -=
            inv_m * rec.reward *
            log_prob_grad(p, rec.action, continuous_actions, concentration);
    }
    return backward(policy, cache, output_grad);
}

void reinforce_update(MLPModel& policy, AdamState& optimizer, const Matrix& states,
                      const std::vector<ActionRecord>& records,
                      bool continuous_actions, double concentration) {
    const Gradients g =
        reinforce_gradient(policy, states, records, continuous_actions, concentration);
    adam_step(policy, g, optimizer);
}

void sync_target(PolicyPair& pair, std::size_t epoch) {
    if (pair.sync_period == 0) throw ConfigError("sync_target: period must be >= 1");
    if (epoch % pair.sync_period == 0) pair.target = pair.live;
}

std::vector<double> deterministic_actions(const MLPModel& policy, const Matrix& states,
                                          bool continuous_actions) {
    std::vector<double> probs = forward(policy, states);
    if (continuous_actions) return probs;
    for (double& p : probs) p = p >= 0.5 ? 1.0 : 0.0;
    return probs;
}

}  // namespace pupolicy
