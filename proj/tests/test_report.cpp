#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "pupolicy/config.hpp"
#include "pupolicy/errors.hpp"
#include "pupolicy/report.hpp"
#include "pupolicy/trainer.hpp"

using namespace pupolicy;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

EpochMetrics sample_metrics(std::size_t epoch, double accuracy) {
    EpochMetrics m;
    m.epoch = epoch;
    m.accuracy = accuracy;
    m.roc_auc = 0.9;
    m.pr_auc = 0.8;
    m.assignment_rate = 0.75;
    m.threshold = 0.6;
    m.mean_reward = 0.7;
    m.loss_total = 0.5;
    m.loss_pos = 0.2;
    m.loss_unl = 0.3;
    m.nn_correction_rate = std::numeric_limits<double>::quiet_NaN();
    return m;
}

// A run directory as cmd_run would leave it: config snapshot plus metrics.
void make_run_dir(const fs::path& dir, const ExperimentSpec& spec,
                  const std::string& variant, double final_accuracy) {
    fs::create_directories(dir);
    std::ofstream cfg(dir / "config.ini", std::ios::binary);
    cfg << serialize_experiment(spec);
    cfg.close();
    write_metrics_csv(dir / "metrics.csv",
                      {sample_metrics(0, 0.5), sample_metrics(1, final_accuracy)},
                      variant);
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string("\"") + PUPOLICY_CLI_PATH + "\" " + args +
                            " >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

TEST_CASE("metrics csv round trip") {
    const auto path = fs::temp_directory_path() / "pupolicy_report_rt.csv";
    write_metrics_csv(path, {sample_metrics(0, 0.5), sample_metrics(4, 0.875)},
                      "separator");
    std::string variant;
    const auto history = load_metrics_csv(path, &variant);
    CHECK(variant == "separator");
    REQUIRE(history.size() == 2);
    CHECK(history[0].epoch == 0);
    CHECK(history[1].epoch == 4);
    CHECK(history[1].accuracy == doctest::Approx(0.875).epsilon(1e-9));
    CHECK(history[1].assignment_rate == doctest::Approx(0.75).epsilon(1e-9));
    CHECK(history[1].loss_unl == doctest::Approx(0.3).epsilon(1e-9));
    CHECK(std::isnan(history[1].nn_correction_rate));
    fs::remove(path);
}

TEST_CASE("write_report: summary statistics and curves") {
    const auto root = fs::temp_directory_path() / "pupolicy_report_test";
    fs::remove_all(root);
    ExperimentSpec spec;  // default gaussians dataset/model fingerprint
    make_run_dir(root / "sep_seed1", spec, "separator", 0.90);
    make_run_dir(root / "sep_seed2", spec, "separator", 0.80);
    make_run_dir(root / "bias_seed1", spec, "biased", 0.70);

    write_report({root / "sep_seed1", root / "sep_seed2", root / "bias_seed1"},
                 root / "out");

    const std::string summary = slurp(root / "out" / "summary.csv");
    CHECK(summary.find("variant,runs,accuracy_mean,accuracy_std,roc_auc_mean,"
                       "roc_auc_std,pr_auc_mean,pr_auc_std\r\n") == 0);
    // mean(0.9, 0.8) = 0.85, sample std ~= 0.0707; single run -> empty std.
    CHECK(summary.find("separator,2,0.85,0.07071067812,") != std::string::npos);
    CHECK(summary.find("biased,1,0.7,,") != std::string::npos);

    const std::string curves = slurp(root / "out" / "curves.csv");
    CHECK(curves.find("variant,epoch,metric,value\r\n") == 0);
    CHECK(curves.find("separator,1,accuracy,0.85\r\n") != std::string::npos);
    CHECK(curves.find("biased,0,assignment_rate,0.75\r\n") != std::string::npos);

    // Runs whose dataset/model sections differ must not be aggregated.
    ExperimentSpec other = spec;
    other.dataset.dim = 99;
    make_run_dir(root / "mismatch", other, "separator", 0.9);
    CHECK_THROWS_AS(write_report({root / "sep_seed1", root / "mismatch"}, root / "out2"),
                    ConfigError);
    fs::remove_all(root);
}

TEST_CASE("cli: gen-data, run, and report work end to end") {
    const auto root = fs::temp_directory_path() / "pupolicy_cli_test";
    fs::remove_all(root);
    fs::create_directories(root);
    const auto cfg = root / "exp.ini";
    {
        std::ofstream os(cfg);
        os << "[dataset]\nsource = gaussians\ntrain_per_class = 200\n"
              "test_per_class = 100\ndim = 4\nseparation = 4\nn_l = 40\nrho = 0.3\n\n"
              "[model]\nclassifier_hidden = 8\npolicy_hidden = 8\n\n"
              "[train]\nvariant = separator\nepochs = 2\nseed = 3\n";
    }

    CHECK(run_cli("gen-data --config " + cfg.string() + " --out " +
                  (root / "data").string()) == 0);
    CHECK(fs::exists(root / "data" / "dataset.csv"));
    CHECK(slurp(root / "data" / "manifest.txt").find("labeled_count = 40") !=
          std::string::npos);

    for (const char* name : {"r1", "r2"})
        CHECK(run_cli("run --config " + cfg.string() + " --out " +
                      (root / name).string()) == 0);
    CHECK(fs::exists(root / "r1" / "metrics.csv"));
    CHECK(fs::exists(root / "r1" / "classifier.ckpt"));
    CHECK(fs::exists(root / "r1" / "policy.ckpt"));

    CHECK(run_cli("report --out " + (root / "rep").string() + " " +
                  (root / "r1").string() + " " + (root / "r2").string()) == 0);
    CHECK(slurp(root / "rep" / "summary.csv").find("separator,2,") != std::string::npos);

    // Seed override lands in the snapshot.
    CHECK(run_cli("run --config " + cfg.string() + " --seed 9 --out " +
                  (root / "r9").string()) == 0);
    CHECK(slurp(root / "r9" / "config.ini").find("seed = 9") != std::string::npos);

    fs::remove_all(root);
}

TEST_CASE("cli: invalid configuration exits with code 2") {
    const auto root = fs::temp_directory_path() / "pupolicy_cli_err";
    fs::remove_all(root);
    fs::create_directories(root);
    const auto cfg = root / "bad.ini";
    {
        std::ofstream os(cfg);
        os << "[train]\nvariant = nnpu\n";  // missing alpha
    }
    CHECK(run_cli("run --config " + cfg.string() + " --out " + (root / "x").string()) == 2);

    {
        std::ofstream os(cfg);
        os << "[train]\nbogus_key = 1\n";
    }
    CHECK(run_cli("run --config " + cfg.string() + " --out " + (root / "x").string()) == 2);
    fs::remove_all(root);
}
