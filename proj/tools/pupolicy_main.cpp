#include <CLI11.hpp>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>
#include <vector>

#include "pupolicy/config.hpp"
#include "pupolicy/errors.hpp"
#include "pupolicy/report.hpp"
#include "pupolicy/trainer.hpp"

namespace fs = std::filesystem;
using namespace pupolicy;

namespace {

constexpr int kExitConfig = 2;

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("cannot open for writing: " + path.string());
    os << text;
}

// Executes one experiment into out_dir: config snapshot, metrics.csv,
// final-epoch checkpoints.
void execute_run(ExperimentSpec spec, const fs::path& out_dir) {
    spec.out_dir = out_dir;
    fs::create_directories(out_dir);
    write_text(out_dir / "config.ini", serialize_experiment(spec));

    const DataBundle bundle = build_bundle(spec);
    const RunResult result =
        run(spec.train, bundle, spec.model.classifier_hidden, spec.model.policy_hidden);

    write_metrics_csv(out_dir / "metrics.csv", result.history, to_string(spec.train.variant));
    save_model(out_dir / "classifier.ckpt", result.classifier);
    if (result.policies) {
        save_model(out_dir / "policy.ckpt", result.policies->live);
        save_model(out_dir / "policy_target.ckpt", result.policies->target);
    }
}

int cmd_gen_data(const ExperimentSpec& spec, const fs::path& out_dir) {
    fs::create_directories(out_dir);
    const DataBundle bundle = build_bundle(spec);
    write_pu_csv(out_dir / "dataset.csv", bundle.train);

    std::ostringstream manifest;
    manifest << "source = " << spec.dataset.source << "\n";
    manifest << "seed = " << spec.train.seed << "\n";
    manifest << "n_l = " << spec.dataset.n_l << "\n";
    manifest << "rho = " << spec.dataset.rho << "\n";
    manifest << "u_multiplier = " << spec.dataset.u_multiplier << "\n";
    manifest << "labeled_count = " << bundle.train.positive_indices.size() << "\n";
    manifest << "unlabeled_count = " << bundle.train.unlabeled_indices.size() << "\n";
    manifest << "test_count = " << bundle.test_features.rows << "\n";
    if (spec.dataset.source == "mnist-idx") {
        manifest << "positive_digit_set =";
        for (int d : spec.dataset.positive_digits) manifest << " " << d;
        manifest << "\n";
    }
    write_text(out_dir / "manifest.txt", manifest.str());
    std::cout << "wrote " << (out_dir / "dataset.csv").string() << "\n";
    return 0;
}

int cmd_run(ExperimentSpec spec, const fs::path& out_dir, bool grid, unsigned jobs) {
    if (!grid) {
        execute_run(spec, out_dir);
        std::cout << "run complete: " << out_dir.string() << "\n";
        return 0;
    }

    const std::vector<Variant> variants = {Variant::Weighter, Variant::Separator,
                                           Variant::Biased, Variant::Nnpu,
                                           Variant::PnOracle};
    std::vector<std::uint64_t> seeds = spec.grid_seeds;
    if (seeds.empty()) seeds = {spec.train.seed};
    if (!spec.train.alpha)
        throw ConfigError("--grid includes variant=nnpu and requires key 'alpha'");

    struct Job {
        ExperimentSpec spec;
        fs::path dir;
    };
    std::vector<Job> pending;
    for (Variant v : variants)
        for (std::uint64_t seed : seeds) {
            Job job{spec, out_dir / (to_string(v) + "_seed" + std::to_string(seed))};
            job.spec.train.variant = v;
            job.spec.train.seed = seed;
            job.spec.grid_seeds.clear();
            pending.push_back(std::move(job));
        }

    std::atomic<std::size_t> next{0};
    std::mutex log_mutex;
    std::vector<std::string> failures;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= pending.size()) return;
            try {
                execute_run(pending[i].spec, pending[i].dir);
                std::lock_guard<std::mutex> lock(log_mutex);
                std::cout << "done: " << pending[i].dir.string() << "\n";
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(log_mutex);
                failures.push_back(pending[i].dir.string() + ": " + e.what());
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < std::max(1u, jobs); ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    for (const std::string& f : failures) std::cerr << "failed: " << f << "\n";
    return failures.empty() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"PU learning experiments: policy-gradient label assignment plus baselines"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_override;
    std::int64_t seed_override = -1;
    bool grid = false;
    unsigned jobs = 1;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "experiment config file")->required();
        cmd->add_option("--out", out_override, "output directory (overrides config)");
        cmd->add_option("--seed", seed_override, "seed override");
    };

    CLI::App* gen = app.add_subcommand("gen-data", "write dataset CSV dump and manifest");
    add_common(gen);
    CLI::App* runcmd = app.add_subcommand("run", "execute an experiment");
    add_common(runcmd);
    runcmd->add_flag("--grid", grid, "expand all variants x seeds into child runs");
    runcmd->add_option("--jobs", jobs, "parallel child runs for --grid");

    CLI::App* report = app.add_subcommand("report", "aggregate completed runs");
    std::string report_out = "report";
    std::vector<std::string> run_dirs;
    report->add_option("--out", report_out, "report output directory");
    report->add_option("dirs", run_dirs, "completed run directories")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (report->parsed()) {
            std::vector<fs::path> dirs(run_dirs.begin(), run_dirs.end());
            write_report(dirs, report_out);
            std::cout << "report written to " << report_out << "\n";
            return 0;
        }

        ExperimentSpec spec = parse_experiment_file(config_path);
        if (seed_override >= 0) spec.train.seed = static_cast<std::uint64_t>(seed_override);
        const fs::path out_dir = out_override.empty() ? spec.out_dir : fs::path(out_override);

        if (gen->parsed()) return cmd_gen_data(spec, out_dir);
        return cmd_run(std::move(spec), out_dir, grid, jobs);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
