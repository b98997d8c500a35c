#include "pupolicy/trainer.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "pupolicy/errors.hpp"
#include "pupolicy/metrics.hpp"

namespace pupolicy {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool has_policy(Variant v) {
    return v == Variant::Weighter || v == Variant::Separator;
}

std::vector<std::size_t> full_dims(std::size_t input,
                                   const std::vector<std::size_t>& hidden) {
    std::vector<std::size_t> dims;
    dims.push_back(input);
    dims.insert(dims.end(), hidden.begin(), hidden.end());
    dims.push_back(1);
    return dims;
}

}  // namespace

std::string to_string(Variant v) {
    switch (v) {
        case Variant::Weighter: return "weighter";
        case Variant::Separator: return "separator";
        case Variant::Biased: return "biased";
        case Variant::Nnpu: return "nnpu";
        case Variant::PnOracle: return "pn_oracle";
    }
    return "unknown";
}

Variant variant_from_string(const std::string& name) {
    if (name == "weighter") return Variant::Weighter;
    if (name == "separator") return Variant::Separator;
    if (name == "biased") return Variant::Biased;
    if (name == "nnpu") return Variant::Nnpu;
    if (name == "pn_oracle") return Variant::PnOracle;
    throw ConfigError("unknown variant '" + name + "'");
}

void validate(const TrainConfig& config) {
    if (config.batch < 1) throw ConfigError("batch size must be >= 1");
    if (config.sync_period < 1) throw ConfigError("sync period k must be >= 1");
    if (config.eval_every < 1) throw ConfigError("eval_every must be >= 1");
    if (!(config.learning_rate >= 0.0)) throw ConfigError("learning rate must be >= 0");
    if (!(config.concentration > 0.0)) throw ConfigError("concentration must be > 0");
    if (config.variant == Variant::Nnpu) {
        if (!config.alpha)
            throw ConfigError("variant=nnpu requires key 'alpha' (class prior)");
        if (!(*config.alpha > 0.0 && *config.alpha < 1.0))
            throw ConfigError("alpha must lie in (0,1)");
    }
}

RunState init_state(const TrainConfig& config, const DataBundle& data,
                    const std::vector<std::size_t>& classifier_hidden,
                    const std::vector<std::size_t>& policy_hidden) {
    validate(config);
    const std::size_t d = data.train.features.cols;

    RunState state;
    state.classifier =
        make_mlp(full_dims(d, classifier_hidden), derive_seed(config.seed, "init_classifier"));
    state.classifier_opt =
        make_adam(state.classifier, config.learning_rate, config.classifier_decay);
    if (has_policy(config.variant)) {
        PolicyPair pair;
        pair.live = make_mlp(full_dims(d, policy_hidden),
                             derive_seed(config.seed, "init_policy"));
        pair.target = pair.live;
        pair.sync_period = config.sync_period;
        state.policy_opt = make_adam(pair.live, config.learning_rate, config.policy_decay);
        state.policies = std::move(pair);
    }
    if (config.variant == Variant::PnOracle) state.pn_labels = data.train.oracle_labels();
    state.action_rng.seed(derive_seed(config.seed, "actions"));
    return state;
}

namespace {

struct BatchView {
    Matrix features;
    std::vector<Membership> memberships;
    std::vector<std::size_t> pos_rows;  // rows within the batch with s=1
    std::vector<std::size_t> unl_rows;
};

BatchView make_batch_view(const std::vector<std::size_t>& batch, const PUDataset& train) {
    BatchView view;
    view.features = train.features.take_rows(batch);
    view.memberships.reserve(batch.size());
    for (std::size_t row = 0; row < batch.size(); ++row) {
        const bool labeled = train.s[batch[row]] == 1;
        view.memberships.push_back(labeled ? Membership::Positive : Membership::Unlabeled);
        (labeled ? view.pos_rows : view.unl_rows).push_back(row);
    }
    return view;
}

std::vector<double> gather(const std::vector<double>& values,
                           const std::vector<std::size_t>& rows) {
    std::vector<double> out;
    out.reserve(rows.size());
    for (std::size_t r : rows) out.push_back(values[r]);
    return out;
}

void scatter(std::vector<double>& dest, const std::vector<std::size_t>& rows,
             const std::vector<double>& grads) {
    for (std::size_t i = 0; i < rows.size(); ++i) dest[rows[i]] += grads[i];
}

void record_loss(RunState& state, const LossBreakdown& b) {
    state.epoch_loss_total += b.total;
    state.epoch_loss_pos += b.positive_term;
    state.epoch_loss_unl += b.unlabeled_or_negative_term;
    if (b.correction_active) ++state.epoch_corrections;
    ++state.epoch_batches;
}

}  // namespace

void pretrain(RunState& state, const DataBundle& data, const TrainConfig& config) {
    const std::size_t n = data.train.features.rows;

    // Classifier warmup: unlabeled examples as negatives.
    for (std::size_t epoch = 1; epoch <= config.pretrain_classifier_epochs; ++epoch) {
        const auto batches =
            minibatches(n, config.batch, derive_seed(config.seed, "pre_shuffle_c", epoch));
        for (const auto& batch : batches) {
            BatchView view = make_batch_view(batch, data.train);
            ForwardCache cache;
            const auto yhat = forward(state.classifier, view.features, &cache);
            const LossResult loss = loss_biased(gather(yhat, view.pos_rows),
                                                gather(yhat, view.unl_rows));
            std::vector<double> dout(batch.size(), 0.0);
            scatter(dout, view.pos_rows, loss.grad_first);
            scatter(dout, view.unl_rows, loss.grad_second);
            adam_step(state.classifier, backward(state.classifier, cache, dout),
                      state.classifier_opt);
        }
    }

    if (!state.policies) return;

    // Policy warmup: cross-entropy towards the classifier's thresholded
    // predictions (labeled members always count as positive).
    for (std::size_t epoch = 1; epoch <= config.pretrain_policy_epochs; ++epoch) {
        const auto batches =
            minibatches(n, config.batch, derive_seed(config.seed, "pre_shuffle_p", epoch));
        for (const auto& batch : batches) {
            BatchView view = make_batch_view(batch, data.train);
            const auto yhat = forward(state.classifier, view.features);
            compute_threshold(gather(yhat, view.pos_rows), gather(yhat, view.unl_rows),
                              state.threshold);

            ForwardCache cache;
            const auto p = forward(state.policies->live, view.features, &cache);
            std::vector<double> dout(batch.size(), 0.0);
            const double inv_m = 1.0 / static_cast<double>(batch.size());
            for (std::size_t row = 0; row < batch.size(); ++row) {
                const double target =
                    view.memberships[row] == Membership::Positive
                        ? 1.0
                        : (yhat[row] >= state.threshold.threshold ? 1.0 : 0.0);
                dout[row] = inv_m * (-target / p[row] + (1.0 - target) / (1.0 - p[row]));
            }
            adam_step(state.policies->live, backward(state.policies->live, cache, dout),
                      state.policy_opt);
        }
    }
    state.policies->target = state.policies->live;
}

void train_step(RunState& state, const std::vector<std::size_t>& batch,
                const DataBundle& data, const TrainConfig& config,
                const StageHook& hook) {
    BatchView view = make_batch_view(batch, data.train);
    const std::size_t m = batch.size();
    const bool weighter = config.variant == Variant::Weighter;
    const bool separator = config.variant == Variant::Separator;

    // (1) Actions from the target policy.
    std::vector<ActionRecord> records;
    if (state.policies) {
        if (hook) hook("sample_actions");
        const auto target_p = forward(state.policies->target, view.features);
        records.reserve(m);
        for (std::size_t row = 0; row < m; ++row) {
            ActionRecord rec;
            rec.index = row;
            rec.membership = view.memberships[row];
            if (weighter) {
                std::tie(rec.action, rec.log_prob) =
                    act_weighter(target_p[row], config.concentration, state.action_rng);
            } else {
                std::tie(rec.action, rec.log_prob) =
                    act_separator(target_p[row], state.action_rng);
            }
            records.push_back(rec);
        }
    }

    // (2) One classifier step on the variant's loss.
    if (hook) hook("classifier_update");
    ForwardCache cache;
    const auto yhat = forward(state.classifier, view.features, &cache);
    std::vector<double> dout(m, 0.0);
    if (weighter) {
        std::vector<double> weights;
        weights.reserve(view.unl_rows.size());
        for (std::size_t row : view.unl_rows) {
            const ActionRecord& rec = records[row];
            weights.push_back(config.weighter_uses_sampled_action
                                  ? rec.action
                                  : forward(state.policies->target,
                                            view.features.take_rows({row}))[0]);
        }
        const LossResult loss = loss_weighter(gather(yhat, view.pos_rows),
                                              gather(yhat, view.unl_rows), weights);
        scatter(dout, view.pos_rows, loss.grad_first);
        scatter(dout, view.unl_rows, loss.grad_second);
        record_loss(state, loss.breakdown);
    } else if (separator) {
        std::vector<std::size_t> assigned_pos = view.pos_rows, assigned_neg;
        for (std::size_t row : view.unl_rows)
            (records[row].action > 0.5 ? assigned_pos : assigned_neg).push_back(row);
        const LossResult loss = loss_separator(gather(yhat, assigned_pos),
                                               gather(yhat, assigned_neg));
        scatter(dout, assigned_pos, loss.grad_first);
        scatter(dout, assigned_neg, loss.grad_second);
        record_loss(state, loss.breakdown);
    } else if (config.variant == Variant::Biased) {
        const LossResult loss =
            loss_biased(gather(yhat, view.pos_rows), gather(yhat, view.unl_rows));
        scatter(dout, view.pos_rows, loss.grad_first);
        scatter(dout, view.unl_rows, loss.grad_second);
        record_loss(state, loss.breakdown);
    } else if (config.variant == Variant::Nnpu) {
        PriorSpec prior;
        prior.alpha = *config.alpha;
        const LossResult loss = loss_nnpu(gather(yhat, view.pos_rows),
                                          gather(yhat, view.unl_rows), prior);
        scatter(dout, view.pos_rows, loss.grad_first);
        scatter(dout, view.unl_rows, loss.grad_second);
        record_loss(state, loss.breakdown);
    } else {  // PN oracle
        std::vector<std::size_t> true_pos, true_neg;
        for (std::size_t row = 0; row < m; ++row)
            (state.pn_labels[batch[row]] == 1 ? true_pos : true_neg).push_back(row);
        const LossResult loss =
            loss_pn(gather(yhat, true_pos), gather(yhat, true_neg));
        scatter(dout, true_pos, loss.grad_first);
        scatter(dout, true_neg, loss.grad_second);
        record_loss(state, loss.breakdown);
    }
    adam_step(state.classifier, backward(state.classifier, cache, dout),
              state.classifier_opt);

    if (!state.policies) return;

    // (3) Predictions from the just-updated classifier.
    if (hook) hook("predict");
    const auto yhat_new = forward(state.classifier, view.features);

    // (4) Threshold, (5) rewards.
    if (hook) hook("threshold");
    compute_threshold(gather(yhat_new, view.pos_rows), gather(yhat_new, view.unl_rows),
                      state.threshold);
    if (hook) hook("rewards");
    for (ActionRecord& rec : records) {
        rec.reward = compute_reward(yhat_new[rec.index], rec.membership,
                                    state.threshold.threshold);
        state.epoch_reward_sum += rec.reward;
        ++state.epoch_reward_count;
    }

    // (6) REINFORCE on the live policy.
    if (hook) hook("policy_update");
    reinforce_update(state.policies->live, state.policy_opt, view.features, records,
                     weighter, config.concentration);
}

EpochMetrics evaluate(const RunState& state, const DataBundle& data,
                      const TrainConfig& config) {
    EpochMetrics m;
    m.epoch = state.epoch;
    ScoredLabels sl{forward(state.classifier, data.test_features), data.test_y};
    m.accuracy = accuracy(sl);
    m.roc_auc = roc_auc(sl);
    m.pr_auc = pr_auc(sl);

    if (state.policies) {
        const Matrix u_features =
            data.train.features.take_rows(data.train.unlabeled_indices);
        const auto actions = deterministic_actions(
            state.policies->live, u_features, config.variant == Variant::Weighter);
        std::vector<int> hidden;
        hidden.reserve(data.train.unlabeled_indices.size());
        for (std::size_t i : data.train.unlabeled_indices)
            hidden.push_back(data.train.oracle_labels()[i]);
        m.assignment_rate = assignment_rate(actions, hidden);
        m.threshold = state.threshold.threshold;
    } else {
        m.assignment_rate = kNaN;
        m.threshold = kNaN;
    }
    m.mean_reward = kNaN;
    m.loss_total = m.loss_pos = m.loss_unl = m.nn_correction_rate = kNaN;
    return m;
}

RunResult run(const TrainConfig& config, const DataBundle& data,
              const std::vector<std::size_t>& classifier_hidden,
              const std::vector<std::size_t>& policy_hidden,
              const StageHook& hook) {
    validate(config);

    // Standardize with train statistics only.
    const Standardizer stats = fit_standardizer(data.train.features);
    DataBundle scaled;
    scaled.train = data.train;
    scaled.train.features = stats.apply(data.train.features);
    scaled.test_features = stats.apply(data.test_features);
    scaled.test_y = data.test_y;

    RunState state = init_state(config, scaled, classifier_hidden, policy_hidden);
    pretrain(state, scaled, config);
    state.history.push_back(evaluate(state, scaled, config));

    const std::size_t n = scaled.train.features.rows;
    for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
        state.epoch = epoch;
        state.epoch_loss_total = state.epoch_loss_pos = state.epoch_loss_unl = 0.0;
        state.epoch_reward_sum = 0.0;
        state.epoch_batches = state.epoch_corrections = state.epoch_reward_count = 0;

        const auto batches =
            minibatches(n, config.batch, derive_seed(config.seed, "shuffle", epoch));
        for (std::size_t b = 0; b < batches.size(); ++b) {
            try {
                train_step(state, batches[b], scaled, config, hook);
            } catch (const NumericError& e) {
                throw NumericError("epoch " + std::to_string(epoch) + " batch " +
                                   std::to_string(b) + ": " + e.what());
            }
        }
        if (state.policies) sync_target(*state.policies, epoch);

        if (epoch % config.eval_every == 0 || epoch == config.epochs) {
            EpochMetrics m = evaluate(state, scaled, config);
            const double nb = static_cast<double>(state.epoch_batches);
            m.loss_total = state.epoch_loss_total / nb;
            m.loss_pos = state.epoch_loss_pos / nb;
            m.loss_unl = state.epoch_loss_unl / nb;
            m.nn_correction_rate = static_cast<double>(state.epoch_corrections) / nb;
            m.mean_reward = state.epoch_reward_count
                                ? state.epoch_reward_sum /
                                      static_cast<double>(state.epoch_reward_count)
                                : kNaN;
            state.history.push_back(m);
        }
    }

    RunResult result;
    result.history = std::move(state.history);
    result.classifier = std::move(state.classifier);
    result.policies = std::move(state.policies);
    return result;
}

namespace {

std::string cell(double v) {
    if (std::isnan(v)) return "";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

}  // namespace

void write_metrics_csv(const std::filesystem::path& path,
                       const std::vector<EpochMetrics>& history,
                       const std::string& variant_name) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("cannot open for writing: " + path.string());
    os << "epoch,split,variant,accuracy,roc_auc,pr_auc,assignment_rate,threshold,"
          "mean_reward,loss_total,loss_pos,loss_unl,nn_correction_rate\r\n";
    for (const EpochMetrics& m : history) {
        os << m.epoch << ",train," << variant_name << ",,,," << cell(m.assignment_rate)
           << "," << cell(m.threshold) << "," << cell(m.mean_reward) << ","
           << cell(m.loss_total) << "," << cell(m.loss_pos) << "," << cell(m.loss_unl)
           << "," << cell(m.nn_correction_rate) << "\r\n";
        os << m.epoch << ",test," << variant_name << "," << cell(m.accuracy) << ","
           << cell(m.roc_auc) << "," << cell(m.pr_auc) << ",,,,,,,\r\n";
    }
}

}  // namespace pupolicy
