#include "pupolicy/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "pupolicy/errors.hpp"

namespace pupolicy {

std::vector<int> binarize(const std::vector<int>& labels,
                          const std::set<int>& positive_digits) {
    std::vector<int> y(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] < 0 || labels[i] > 9)
            throw ConfigError("binarize: label " + std::to_string(labels[i]) +
                              " outside 0..9");
        y[i] = positive_digits.count(labels[i]) ? 1 : 0;
    }
    return y;
}

LabeledDataset gen_gaussians(std::size_t n_per_class, std::size_t dim,
                             double separation, std::uint64_t seed) {
    if (n_per_class == 0 || dim == 0)
        throw ConfigError("gen_gaussians: n_per_class and dim must be positive");

    LabeledDataset out;
    out.features = Matrix(2 * n_per_class, dim);
    out.y.assign(2 * n_per_class, 0);
    Rng rng(seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    const double mu = separation / 2.0;
    for (std::size_t i = 0; i < 2 * n_per_class; ++i) {
        const int label = i < n_per_class ? 1 : 0;
        const double center = label == 1 ? mu : -mu;
        out.y[i] = label;
        for (std::size_t c = 0; c < dim; ++c) out.features.at(i, c) = center + noise(rng);
    }
    return out;
}

PUDataset make_pu(const LabeledDataset& source, const PUSplitSpec& spec) {
    const std::size_t u_size = spec.u_multiplier * spec.n_l;
    // Round-half-up; the protocol only gives a ratio.
    const std::size_t u_pos =
        static_cast<std::size_t>(std::floor(spec.rho * static_cast<double>(u_size) + 0.5));
    const std::size_t u_neg = u_size - u_pos;

    std::vector<std::size_t> positives, negatives;
    for (std::size_t i = 0; i < source.y.size(); ++i)
        (source.y[i] == 1 ? positives : negatives).push_back(i);

    if (positives.size() < spec.n_l + u_pos)
        throw ConfigError("make_pu: need " + std::to_string(spec.n_l + u_pos) +
                          " positives, source has " + std::to_string(positives.size()) +
                          " (short by " +
                          std::to_string(spec.n_l + u_pos - positives.size()) + ")");
    if (negatives.size() < u_neg)
        throw ConfigError("make_pu: need " + std::to_string(u_neg) +
                          " negatives, source has " + std::to_string(negatives.size()) +
                          " (short by " + std::to_string(u_neg - negatives.size()) + ")");

    Rng rng(spec.seed);
    std::shuffle(positives.begin(), positives.end(), rng);
    std::shuffle(negatives.begin(), negatives.end(), rng);

    std::vector<std::size_t> rows(positives.begin(), positives.begin() + spec.n_l);
    std::vector<std::size_t> u_rows(positives.begin() + spec.n_l,
                                    positives.begin() + spec.n_l + u_pos);
    u_rows.insert(u_rows.end(), negatives.begin(), negatives.begin() + u_neg);
    std::shuffle(u_rows.begin(), u_rows.end(), rng);
    rows.insert(rows.end(), u_rows.begin(), u_rows.end());

    PUDataset out;
    out.features = source.features.take_rows(rows);
    out.s.assign(rows.size(), 0);
    out.hidden_y.resize(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out.hidden_y[i] = source.y[rows[i]];
        if (i < spec.n_l) {
            out.s[i] = 1;
            out.positive_indices.push_back(i);
        } else {
            out.unlabeled_indices.push_back(i);
        }
    }
    return out;
}

Standardizer fit_standardizer(const Matrix& train_features) {
    const std::size_t n = train_features.rows;
    const std::size_t d = train_features.cols;
    Standardizer s;
    s.mean.assign(d, 0.0);
    s.stddev.assign(d, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < d; ++c) s.mean[c] += train_features.at(i, c);
    for (double& m : s.mean) m /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < d; ++c) {
            const double diff = train_features.at(i, c) - s.mean[c];
            s.stddev[c] += diff * diff;
        }
    for (double& v : s.stddev) v = std::sqrt(v / static_cast<double>(n));
    return s;
}

Matrix Standardizer::apply(const Matrix& features) const {
    if (features.cols != mean.size())
        throw ConfigError("standardize: dimension mismatch");
    Matrix out(features.rows, features.cols);
    for (std::size_t i = 0; i < features.rows; ++i)
        for (std::size_t c = 0; c < features.cols; ++c) {
            const double sd = stddev[c];
            out.at(i, c) = sd > 0.0 ? (features.at(i, c) - mean[c]) / sd : 0.0;
        }
    return out;
}

std::vector<std::vector<std::size_t>> minibatches(std::size_t n, std::size_t m,
                                                  std::uint64_t epoch_seed) {
    if (m == 0) throw ConfigError("minibatches: batch size must be >= 1");
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(epoch_seed);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<std::vector<std::size_t>> batches;
    for (std::size_t start = 0; start < n; start += m) {
        const std::size_t end = std::min(n, start + m);
        batches.emplace_back(order.begin() + start, order.begin() + end);
    }
    return batches;
}

void write_pu_csv(const std::filesystem::path& path, const PUDataset& data) {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot open for writing: " + path.string());
    for (std::size_t c = 0; c < data.features.cols; ++c) os << "feature_" << c << ",";
    os << "s,hidden_y\r\n";
    char buf[64];
    for (std::size_t i = 0; i < data.features.rows; ++i) {
        for (std::size_t c = 0; c < data.features.cols; ++c) {
            std::snprintf(buf, sizeof(buf), "%.17g", data.features.at(i, c));
            os << buf << ",";
        }
        os << data.s[i] << "," << data.hidden_y[i] << "\r\n";
    }
}

}  // namespace pupolicy
