#include "pupolicy/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "pupolicy/config.hpp"
#include "pupolicy/errors.hpp"

namespace pupolicy {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

double field_value(const std::string& s) {
    return s.empty() ? kNaN : std::stod(s);
}

std::string cell(double v) {
    if (std::isnan(v)) return "";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

}  // namespace

std::vector<EpochMetrics> load_metrics_csv(const std::filesystem::path& path,
                                           std::string* variant_name) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open metrics file: " + path.string());
    std::string line;
    if (!std::getline(is, line)) throw ConfigError("empty metrics file: " + path.string());

    std::map<std::size_t, EpochMetrics> by_epoch;
    while (std::getline(is, line)) {
        if (line.empty() || line == "\r") continue;
        const auto f = split_csv_line(line);
        if (f.size() != 13)
            throw ConfigError("malformed metrics row in " + path.string());
        const std::size_t epoch = static_cast<std::size_t>(std::stoull(f[0]));
        EpochMetrics& m = by_epoch[epoch];
        m.epoch = epoch;
        if (variant_name) *variant_name = f[2];
        if (f[1] == "test") {
            m.accuracy = field_value(f[3]);
            m.roc_auc = field_value(f[4]);
            m.pr_auc = field_value(f[5]);
        } else {
            m.assignment_rate = field_value(f[6]);
            m.threshold = field_value(f[7]);
            m.mean_reward = field_value(f[8]);
            m.loss_total = field_value(f[9]);
            m.loss_pos = field_value(f[10]);
            m.loss_unl = field_value(f[11]);
            m.nn_correction_rate = field_value(f[12]);
        }
    }
    std::vector<EpochMetrics> out;
    for (auto& [_, m] : by_epoch) out.push_back(m);
    return out;
}

RunData load_run(const std::filesystem::path& run_dir) {
    RunData data;
    data.history = load_metrics_csv(run_dir / "metrics.csv", &data.variant);
    if (data.history.empty())
        throw ConfigError("run has no metrics rows: " + run_dir.string());

    const ExperimentSpec spec = parse_experiment_file(run_dir / "config.ini");
    std::string serialized = serialize_experiment(spec);
    const auto cut = serialized.find("\n[train]");
    data.fingerprint = cut == std::string::npos ? serialized : serialized.substr(0, cut);
    return data;
}

void write_report(const std::vector<std::filesystem::path>& run_dirs,
                  const std::filesystem::path& out_dir) {
    if (run_dirs.empty()) throw ConfigError("report: need at least one run directory");

    std::vector<RunData> runs;
    for (const auto& dir : run_dirs) runs.push_back(load_run(dir));
    for (const RunData& r : runs)
        if (r.fingerprint != runs.front().fingerprint)
            throw ConfigError(
                "report: run directories mix incompatible dataset/model specs; "
                "aggregate only runs that share [dataset] and [model]");

    std::filesystem::create_directories(out_dir);

    // Final-epoch summary per variant.
    struct Acc {
        std::vector<double> accuracy, roc, pr;
    };
    std::map<std::string, Acc> by_variant;
    for (const RunData& r : runs) {
        const EpochMetrics& last = r.history.back();
        Acc& a = by_variant[r.variant];
        a.accuracy.push_back(last.accuracy);
        a.roc.push_back(last.roc_auc);
        a.pr.push_back(last.pr_auc);
    }

    auto mean_of = [](const std::vector<double>& v) {
        double s = 0.0;
        for (double x : v) s += x;
        return s / static_cast<double>(v.size());
    };
    auto std_of = [&](const std::vector<double>& v) {
        if (v.size() < 2) return kNaN;
        const double m = mean_of(v);
        double s = 0.0;
        for (double x : v) s += (x - m) * (x - m);
        return std::sqrt(s / static_cast<double>(v.size() - 1));
    };

    std::ofstream summary(out_dir / "summary.csv", std::ios::binary);
    summary << "variant,runs,accuracy_mean,accuracy_std,roc_auc_mean,roc_auc_std,"
               "pr_auc_mean,pr_auc_std\r\n";
    for (const auto& [variant, a] : by_variant) {
        summary << variant << "," << a.accuracy.size() << "," << cell(mean_of(a.accuracy))
                << "," << cell(std_of(a.accuracy)) << "," << cell(mean_of(a.roc)) << ","
                << cell(std_of(a.roc)) << "," << cell(mean_of(a.pr)) << ","
                << cell(std_of(a.pr)) << "\r\n";
    }

    // Long-format curves, averaged over runs per (variant, epoch, metric).
    struct Key {
        std::string variant;
        std::size_t epoch;
        std::string metric;
        bool operator<(const Key& o) const {
            if (variant != o.variant) return variant < o.variant;
            if (epoch != o.epoch) return epoch < o.epoch;
            return metric < o.metric;
        }
    };
    std::map<Key, std::vector<double>> curves;
    for (const RunData& r : runs)
        for (const EpochMetrics& m : r.history) {
            const std::pair<const char*, double> cols[] = {
                {"accuracy", m.accuracy},        {"roc_auc", m.roc_auc},
                {"pr_auc", m.pr_auc},            {"assignment_rate", m.assignment_rate},
                {"threshold", m.threshold},      {"mean_reward", m.mean_reward},
                {"loss_total", m.loss_total},
            };
            for (const auto& [name, value] : cols)
                if (!std::isnan(value)) curves[{r.variant, m.epoch, name}].push_back(value);
        }

    std::ofstream curve_file(out_dir / "curves.csv", std::ios::binary);
    curve_file << "variant,epoch,metric,value\r\n";
    for (const auto& [key, values] : curves)
        curve_file << key.variant << "," << key.epoch << "," << key.metric << ","
                   << cell(mean_of(values)) << "\r\n";
}

}  // namespace pupolicy
