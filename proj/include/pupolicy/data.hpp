#pragma once

#include <cstdint>
#include <filesystem>
#include <set>
#include <vector>

#include "pupolicy/matrix.hpp"
#include "pupolicy/rng.hpp"

namespace pupolicy {

// Fully labeled data; source material for PU splits and held-out test sets.
struct LabeledDataset {
    Matrix features;
    std::vector<int> y;  // {0,1}
};

// PU training data. s is the observed label (s=1 implies y=1); the hidden
// ground truth is kept for evaluation only and must not reach any training
// code path. Access goes through oracle_labels() so the leakage test can
// account for every reader.
struct PUDataset {
    Matrix features;
    std::vector<int> s;
    std::vector<std::size_t> positive_indices;
    std::vector<std::size_t> unlabeled_indices;

    const std::vector<int>& oracle_labels() const { return hidden_y; }
    std::vector<int> hidden_y;  // evaluation only
};

struct PUSplitSpec {
    std::size_t n_l = 300;
    double rho = 0.3;           // fraction of positives inside U
    std::size_t u_multiplier = 3;  // |U| = u_multiplier * n_l
    std::uint64_t seed = 0;
};

// y=1 iff label is in the positive digit set.
std::vector<int> binarize(const std::vector<int>& labels,
                          const std::set<int>& positive_digits);

// Two spherical Gaussians: class 1 at +mu, class 0 at -mu, with
// |mu_i| = separation/2 on every axis. Deterministic under seed.
LabeledDataset gen_gaussians(std::size_t n_per_class, std::size_t dim,
                             double separation, std::uint64_t seed);

// SCAR split: n_l labeled positives drawn uniformly from all positives,
// U holds round(rho*|U|) positives plus negatives, disjoint from P.
PUDataset make_pu(const LabeledDataset& source, const PUSplitSpec& spec);

struct Standardizer {
    std::vector<double> mean;
    std::vector<double> stddev;  // zero-variance dims keep stddev 0 and map to 0
    Matrix apply(const Matrix& features) const;
};

// Statistics from training features only; population std.
Standardizer fit_standardizer(const Matrix& train_features);

// Seeded shuffle of [0,n) chunked into batches of m; last batch may be short.
std::vector<std::vector<std::size_t>> minibatches(std::size_t n, std::size_t m,
                                                  std::uint64_t epoch_seed);

// Debug dump: feature_0..feature_{d-1}, s, hidden_y.
void write_pu_csv(const std::filesystem::path& path, const PUDataset& data);

}  // namespace pupolicy
