#include "pupolicy/nn.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include "pupolicy/errors.hpp"

namespace pupolicy {

std::size_t MLPModel::parameter_count() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l < weights.size(); ++l)
        n += weights[l].data.size() + biases[l].size();
    return n;
}

MLPModel make_mlp(const std::vector<std::size_t>& dims, std::uint64_t seed) {
    if (dims.size() < 2) throw ConfigError("MLP needs at least input and output dims");
    if (dims.back() != 1) throw ConfigError("MLP output layer width must be 1");
    for (std::size_t d : dims)
        if (d == 0) throw ConfigError("MLP layer width must be positive");

    MLPModel model;
    model.dims = dims;
    Rng rng(seed);
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        const std::size_t fan_in = dims[l];
        const std::size_t fan_out = dims[l + 1];
        const bool output_layer = (l + 2 == dims.size());
        // He-uniform for ReLU layers, Xavier-uniform for the sigmoid output.
        const double limit = output_layer
                                 ? std::sqrt(6.0 / static_cast<double>(fan_in + fan_out))
                                 : std::sqrt(6.0 / static_cast<double>(fan_in));
        std::uniform_real_distribution<double> dist(-limit, limit);
        Matrix w(fan_in, fan_out);
        for (double& v : w.data) v = dist(rng);
        model.weights.push_back(std::move(w));
        model.biases.emplace_back(fan_out, 0.0);
    }
    return model;
}

std::vector<double> forward(const MLPModel& model, const Matrix& batch,
                            ForwardCache* cache) {
    if (batch.cols != model.input_dim())
        throw ConfigError("forward: batch has " + std::to_string(batch.cols) +
                          " columns, model expects " + std::to_string(model.input_dim()));

    const std::size_t m = batch.rows;
    const std::size_t layers = model.layer_count();
    Matrix current = batch;
    if (cache) {
        cache->input = batch;
        cache->activations.clear();
        cache->output_sigmoid.assign(m, 0.0);
    }

    std::vector<double> probs(m);
    for (std::size_t l = 0; l < layers; ++l) {
        const Matrix& w = model.weights[l];
        const std::vector<double>& b = model.biases[l];
        Matrix next(m, w.cols);
        for (std::size_t i = 0; i < m; ++i) {
            const double* in = current.row(i);
            double* out = next.row(i);
            for (std::size_t c = 0; c < w.cols; ++c) out[c] = b[c];
            for (std::size_t k = 0; k < w.rows; ++k) {
                const double v = in[k];
                if (v == 0.0) continue;
                const double* wrow = w.row(k);
                for (std::size_t c = 0; c < w.cols; ++c) out[c] += v * wrow[c];
            }
        }
        if (l + 1 < layers) {
            for (double& v : next.data)
                if (v < 0.0) v = 0.0;
            if (cache) cache->activations.push_back(next);
            current = std::move(next);
        } else {
            for (std::size_t i = 0; i < m; ++i) {
                const double s = 1.0 / (1.0 + std::exp(-next.at(i, 0)));
                if (cache) cache->output_sigmoid[i] = s;
                probs[i] = clip_prob(s);
            }
            if (cache) {
                Matrix out(m, 1);
                for (std::size_t i = 0; i < m; ++i) out.at(i, 0) = cache->output_sigmoid[i];
                cache->activations.push_back(std::move(out));
            }
        }
    }
    return probs;
}

Gradients zero_gradients(const MLPModel& model) {
    Gradients g;
    for (std::size_t l = 0; l < model.layer_count(); ++l) {
        g.weights.emplace_back(model.weights[l].rows, model.weights[l].cols);
        g.biases.emplace_back(model.biases[l].size(), 0.0);
    }
    return g;
}

void accumulate(Gradients& acc, const Gradients& g, double scale) {
    for (std::size_t l = 0; l < acc.weights.size(); ++l) {
        for (std::size_t i = 0; i < acc.weights[l].data.size(); ++i)
            acc.weights[l].data[i] += scale * g.weights[l].data[i];
        for (std::size_t i = 0; i < acc.biases[l].size(); ++i)
            acc.biases[l][i] += scale * g.biases[l][i];
    }
}

Gradients backward(const MLPModel& model, const ForwardCache& cache,
                   const std::vector<double>& output_gradient) {
    const std::size_t layers = model.layer_count();
    const std::size_t m = cache.input.rows;
    if (cache.activations.size() != layers || cache.output_sigmoid.size() != m)
        throw NumericError("backward: cache does not match model/batch");
    if (output_gradient.size() != m)
        throw NumericError("backward: output gradient length mismatch");

    Gradients grads = zero_gradients(model);

    // dLoss/dz at the sigmoid output.
    Matrix delta(m, 1);
    for (std::size_t i = 0; i < m; ++i) {
        const double s = cache.output_sigmoid[i];
        delta.at(i, 0) = output_gradient[i] * s * (1.0 - s);
    }

    for (std::size_t l = layers; l-- > 0;) {
        const Matrix& below = (l == 0) ? cache.input : cache.activations[l - 1];
        Matrix& gw = grads.weights[l];
        std::vector<double>& gb = grads.biases[l];
        for (std::size_t i = 0; i < m; ++i) {
            const double* a = below.row(i);
            const double* d = delta.row(i);
            for (std::size_t r = 0; r < gw.rows; ++r) {
                const double av = a[r];
                if (av == 0.0) continue;
                double* grow = gw.row(r);
                for (std::size_t c = 0; c < gw.cols; ++c) grow[c] += av * d[c];
            }
            for (std::size_t c = 0; c < gb.size(); ++c) gb[c] += d[c];
        }
        if (l == 0) break;
        // Propagate through W[l] and the ReLU of the layer below.
        const Matrix& w = model.weights[l];
        Matrix prev(m, w.rows);
        for (std::size_t i = 0; i < m; ++i) {
            const double* d = delta.row(i);
            const double* a = below.row(i);
            double* p = prev.row(i);
            for (std::size_t r = 0; r < w.rows; ++r) {
                if (a[r] <= 0.0) {
                    p[r] = 0.0;
                    continue;
                }
                const double* wrow = w.row(r);
                double acc = 0.0;
                for (std::size_t c = 0; c < w.cols; ++c) acc += wrow[c] * d[c];
                p[r] = acc;
            }
        }
        delta = std::move(prev);
    }
    return grads;
}

AdamState make_adam(const MLPModel& model, double learning_rate, double weight_decay) {
    AdamState state;
    state.learning_rate = learning_rate;
    state.weight_decay = weight_decay;
    state.first_moment = zero_gradients(model);
    state.second_moment = zero_gradients(model);
    return state;
}

namespace {

void adam_update_span(double* theta, double* m1, double* m2, const double* g,
                      std::size_t n, const AdamState& s, double corr1, double corr2) {
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(g[i]))
            throw NumericError("adam_step: non-finite gradient component");
        m1[i] = s.beta1 * m1[i] + (1.0 - s.beta1) * g[i];
        m2[i] = s.beta2 * m2[i] + (1.0 - s.beta2) * g[i] * g[i];
        const double mhat = m1[i] / corr1;
        const double vhat = m2[i] / corr2;
        theta[i] -= s.learning_rate * mhat / (std::sqrt(vhat) + s.epsilon);
        theta[i] *= 1.0 - s.learning_rate * s.weight_decay;
    }
}

}  // namespace

void adam_step(MLPModel& model, const Gradients& grads, AdamState& state) {
    state.step += 1;
    const double corr1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
    const double corr2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
    for (std::size_t l = 0; l < model.layer_count(); ++l) {
        adam_update_span(model.weights[l].data.data(),
                         state.first_moment.weights[l].data.data(),
                         state.second_moment.weights[l].data.data(),
                         grads.weights[l].data.data(), model.weights[l].data.size(),
                         state, corr1, corr2);
        adam_update_span(model.biases[l].data(), state.first_moment.biases[l].data(),
                         state.second_moment.biases[l].data(), grads.biases[l].data(),
                         model.biases[l].size(), state, corr1, corr2);
    }
}

namespace {

constexpr char kMagic[4] = {'P', 'U', 'P', 'N'};
constexpr std::uint32_t kFormatVersion = 1;

void write_u32(std::ostream& os, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16),
                          static_cast<unsigned char>(v >> 24)};
    os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t read_u32(std::istream& is, std::size_t& offset) {
    unsigned char b[4];
    if (!is.read(reinterpret_cast<char*>(b), 4))
        throw ParseError("checkpoint truncated", offset);
    offset += 4;
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) |
           (static_cast<std::uint32_t>(b[3]) << 24);
}

}  // namespace

void save_model(const std::filesystem::path& path, const MLPModel& model) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("cannot open checkpoint for writing: " + path.string());
    os.write(kMagic, 4);
    write_u32(os, kFormatVersion);
    write_u32(os, static_cast<std::uint32_t>(model.layer_count()));
    for (std::size_t l = 0; l < model.layer_count(); ++l) {
        write_u32(os, static_cast<std::uint32_t>(model.weights[l].rows));
        write_u32(os, static_cast<std::uint32_t>(model.weights[l].cols));
    }
    // Raw little-endian doubles; this code only targets little-endian hosts.
    for (std::size_t l = 0; l < model.layer_count(); ++l) {
        os.write(reinterpret_cast<const char*>(model.weights[l].data.data()),
                 static_cast<std::streamsize>(model.weights[l].data.size() * sizeof(double)));
        os.write(reinterpret_cast<const char*>(model.biases[l].data()),
                 static_cast<std::streamsize>(model.biases[l].size() * sizeof(double)));
    }
    if (!os) throw ConfigError("checkpoint write failed: " + path.string());
}

MLPModel load_model(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("cannot open checkpoint: " + path.string());
    std::size_t offset = 0;
    char magic[4];
    if (!is.read(magic, 4)) throw ParseError("checkpoint truncated", offset);
    offset += 4;
    if (std::memcmp(magic, kMagic, 4) != 0)
        throw ParseError("bad checkpoint magic", 0);
    const std::uint32_t version = read_u32(is, offset);
    if (version != kFormatVersion)
        throw ParseError("unsupported checkpoint version " + std::to_string(version), 4);
    const std::uint32_t layers = read_u32(is, offset);

    MLPModel model;
    for (std::uint32_t l = 0; l < layers; ++l) {
        const std::uint32_t r = read_u32(is, offset);
        const std::uint32_t c = read_u32(is, offset);
        model.weights.emplace_back(r, c);
        model.biases.emplace_back(c, 0.0);
        if (l == 0) model.dims.push_back(r);
        model.dims.push_back(c);
    }
    for (std::uint32_t l = 0; l < layers; ++l) {
        auto& w = model.weights[l];
        if (!is.read(reinterpret_cast<char*>(w.data.data()),
                     static_cast<std::streamsize>(w.data.size() * sizeof(double))))
            throw ParseError("checkpoint payload truncated", offset);
        offset += w.data.size() * sizeof(double);
        auto& b = model.biases[l];
        if (!is.read(reinterpret_cast<char*>(b.data()),
                     static_cast<std::streamsize>(b.size() * sizeof(double))))
            throw ParseError("checkpoint payload truncated", offset);
        offset += b.size() * sizeof(double);
    }
    return model;
}

}  // namespace pupolicy
