#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "pupolicy/trainer.hpp"

namespace pupolicy {

struct DatasetSpec {
    std::string source = "gaussians";  // gaussians | mnist-idx
    // gaussians
    std::size_t train_per_class = 2000;
    std::size_t test_per_class = 1000;
    std::size_t dim = 10;
    double separation = 4.0;
    // mnist-idx
    std::filesystem::path train_images, train_labels, test_images, test_labels;
    std::set<int> positive_digits = {0, 2, 4, 6, 8};
    // PU split
    std::size_t n_l = 300;
    double rho = 0.3;
    std::size_t u_multiplier = 3;
};

struct ModelSpec {
    std::vector<std::size_t> classifier_hidden = {32, 16};
    std::vector<std::size_t> policy_hidden = {16};
};

struct ExperimentSpec {
    DatasetSpec dataset;
    ModelSpec model;
    TrainConfig train;
    std::vector<std::uint64_t> grid_seeds;  // used by --grid
    std::filesystem::path out_dir = "runs/run";
};

// Sectioned key=value text. Unknown sections/keys are rejected with the
// offending line number.
ExperimentSpec parse_experiment(const std::string& text);
ExperimentSpec parse_experiment_file(const std::filesystem::path& path);

// Canonical form; re-parsing yields a semantically identical spec.
std::string serialize_experiment(const ExperimentSpec& spec);

// Builds the train/test bundle. IDX paths that do not exist as given are
// retried under the PUPOLICY_DATA_DIR root.
DataBundle build_bundle(const ExperimentSpec& spec);

}  // namespace pupolicy
