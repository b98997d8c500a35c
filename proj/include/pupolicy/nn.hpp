#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "pupolicy/matrix.hpp"
#include "pupolicy/rng.hpp"

namespace pupolicy {

// Emitted probabilities are clipped into [kProbClip, 1 - kProbClip] so that
// every downstream log() is finite.
inline constexpr double kProbClip = 1e-7;

inline double clip_prob(double p) {
    if (p < kProbClip) return kProbClip;
    if (p > 1.0 - kProbClip) return 1.0 - kProbClip;
    return p;
}

// Fixed-shape dense feedforward net: ReLU on hidden layers, sigmoid on the
// single output unit. Holds either the classifier or the policy parameters.
struct MLPModel {
    std::vector<std::size_t> dims;   // input, hidden..., 1
    std::vector<Matrix> weights;     // weights[l]: dims[l] x dims[l+1]
    std::vector<std::vector<double>> biases;

    std::size_t input_dim() const { return dims.front(); }
    std::size_t layer_count() const { return weights.size(); }
    std::size_t parameter_count() const;
};

// He-uniform on ReLU layers, Xavier-uniform on the sigmoid output, zero biases.
MLPModel make_mlp(const std::vector<std::size_t>& dims, std::uint64_t seed);

struct ForwardCache {
    Matrix input;
    std::vector<Matrix> activations;    // post-activation per layer
    std::vector<double> output_sigmoid; // unclipped sigmoid values
};

// Returns one clipped probability per batch row. Cache is optional; required
// for backward().
std::vector<double> forward(const MLPModel& model, const Matrix& batch,
                            ForwardCache* cache = nullptr);

struct Gradients {
    std::vector<Matrix> weights;
    std::vector<std::vector<double>> biases;
};

Gradients zero_gradients(const MLPModel& model);
void accumulate(Gradients& acc, const Gradients& g, double scale = 1.0);

// output_gradient holds dLoss/dprob per batch row, matching the cache.
Gradients backward(const MLPModel& model, const ForwardCache& cache,
                   const std::vector<double>& output_gradient);

struct AdamState {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    double learning_rate = 1e-3;
    double weight_decay = 0.0;  // decoupled; applied as theta *= 1 - lr*decay
    std::uint64_t step = 0;
    Gradients first_moment;
    Gradients second_moment;
};

AdamState make_adam(const MLPModel& model, double learning_rate, double weight_decay);

// Standard bias-corrected Adam step followed by decoupled weight decay.
// Throws NumericError on non-finite gradients.
void adam_step(MLPModel& model, const Gradients& grads, AdamState& state);

// Versioned little-endian checkpoint ("PUPN" magic).
void save_model(const std::filesystem::path& path, const MLPModel& model);
MLPModel load_model(const std::filesystem::path& path);

}  // namespace pupolicy
