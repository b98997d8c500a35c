#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pupolicy/classifiers.hpp"
#include "pupolicy/data.hpp"
#include "pupolicy/nn.hpp"
#include "pupolicy/policy.hpp"

namespace pupolicy {

enum class Variant { Weighter, Separator, Biased, Nnpu, PnOracle };

std::string to_string(Variant v);
Variant variant_from_string(const std::string& name);

struct TrainConfig {
    Variant variant = Variant::Weighter;
    std::size_t epochs = 50;
    std::size_t batch = 128;
    double learning_rate = 1e-3;
    std::size_t sync_period = 3;              // k, epochs between target syncs
    std::size_t pretrain_classifier_epochs = 5;
    std::size_t pretrain_policy_epochs = 5;
    double classifier_decay = 2.0;
    double policy_decay = 2.0;
    double concentration = 10.0;              // Beta concentration for Weighter
    std::optional<double> alpha;              // class prior, required for nnPU
    std::uint64_t seed = 1;
    std::size_t eval_every = 1;
    bool weighter_uses_sampled_action = true; // false: deterministic w = pi(x)
};

// Throws ConfigError on invalid combinations (e.g. nnPU without alpha).
void validate(const TrainConfig& config);

// Training inputs plus the held-out test set. Features are raw; run()
// standardizes with train statistics.
struct DataBundle {
    PUDataset train;
    Matrix test_features;
    std::vector<int> test_y;
};

// One per evaluated epoch; NaN marks a column that does not apply.
struct EpochMetrics {
    std::size_t epoch = 0;
    double accuracy = 0.0;
    double roc_auc = 0.0;
    double pr_auc = 0.0;
    double assignment_rate = 0.0;
    double threshold = 0.0;
    double mean_reward = 0.0;
    double loss_total = 0.0;
    double loss_pos = 0.0;
    double loss_unl = 0.0;
    double nn_correction_rate = 0.0;
};

struct RunState {
    MLPModel classifier;
    AdamState classifier_opt;
    std::optional<PolicyPair> policies;  // absent for baselines
    AdamState policy_opt;
    ThresholdState threshold;
    Rng action_rng;
    std::size_t epoch = 0;
    std::vector<EpochMetrics> history;
    // PN-oracle training labels; populated at setup from the ground truth.
    std::vector<int> pn_labels;
    // Per-epoch accumulators.
    double epoch_loss_total = 0.0, epoch_loss_pos = 0.0, epoch_loss_unl = 0.0;
    double epoch_reward_sum = 0.0;
    std::size_t epoch_batches = 0, epoch_corrections = 0, epoch_reward_count = 0;
};

// Test-only instrumentation: called with the stage name as a step executes.
using StageHook = std::function<void(std::string_view)>;

struct RunResult {
    std::vector<EpochMetrics> history;
    MLPModel classifier;
    std::optional<PolicyPair> policies;
};

RunState init_state(const TrainConfig& config, const DataBundle& data,
                    const std::vector<std::size_t>& classifier_hidden,
                    const std::vector<std::size_t>& policy_hidden);

// Biased-PU classifier warmup, then policy warmup against thresholded
// classifier predictions, then a target sync.
void pretrain(RunState& state, const DataBundle& data, const TrainConfig& config);

// One mini-batch: sample actions from the target policy, one Adam step on
// the classifier, re-predict, update the threshold, compute rewards, then
// the REINFORCE step on the live policy. Baselines only take the
// classifier step.
void train_step(RunState& state, const std::vector<std::size_t>& batch,
                const DataBundle& data, const TrainConfig& config,
                const StageHook& hook = nullptr);

EpochMetrics evaluate(const RunState& state, const DataBundle& data,
                      const TrainConfig& config);

RunResult run(const TrainConfig& config, const DataBundle& data,
              const std::vector<std::size_t>& classifier_hidden,
              const std::vector<std::size_t>& policy_hidden,
              const StageHook& hook = nullptr);

void write_metrics_csv(const std::filesystem::path& path,
                       const std::vector<EpochMetrics>& history,
                       const std::string& variant_name);

}  // namespace pupolicy
