#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "pupolicy/trainer.hpp"

namespace pupolicy {

struct RunData {
    std::string variant;
    std::vector<EpochMetrics> history;
    // Dataset+model portion of the config snapshot; runs with different
    // fingerprints must not be aggregated together.
    std::string fingerprint;
};

// Inverse of write_metrics_csv.
std::vector<EpochMetrics> load_metrics_csv(const std::filesystem::path& path,
                                           std::string* variant_name = nullptr);

// Reads config.ini + metrics.csv from a completed run directory.
RunData load_run(const std::filesystem::path& run_dir);

// summary.csv: per-variant final-epoch mean and sample std over runs.
// curves.csv: long format (variant, epoch, metric, value), value averaged
// over runs, sorted by (variant, epoch).
void write_report(const std::vector<std::filesystem::path>& run_dirs,
                  const std::filesystem::path& out_dir);

}  // namespace pupolicy
