#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "pupolicy/data.hpp"
#include "pupolicy/errors.hpp"
#include "pupolicy/idx.hpp"

using namespace pupolicy;

TEST_CASE("parse_idx: label payload") {
    const std::vector<std::uint8_t> bytes = {0, 0, 8, 1, 0, 0, 0, 2, 5, 9};
    CHECK(parse_idx_labels(bytes) == std::vector<int>{5, 9});
}

TEST_CASE("parse_idx: image payload scaled to [0,1]") {
    const std::vector<std::uint8_t> bytes = {0, 0, 8, 3, 0, 0, 0, 1, 0, 0, 0, 2,
                                             0, 0, 0, 2, 0, 255, 0, 255};
    const Matrix img = parse_idx_images(bytes);
    REQUIRE(img.rows == 1);
    REQUIRE(img.cols == 4);
    CHECK(img.data == std::vector<double>{0.0, 1.0, 0.0, 1.0});
}

TEST_CASE("parse_idx: truncated header reports the offset") {
    const std::vector<std::uint8_t> bytes = {0, 0, 8, 1, 0, 0, 0};
    try {
        parse_idx_labels(bytes);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.offset() == 7);
    }
}

TEST_CASE("parse_idx: wrong magic rejected") {
    const std::vector<std::uint8_t> bytes = {0, 0, 8, 2, 0, 0, 0, 0};
    CHECK_THROWS_AS(parse_idx_labels(bytes), ParseError);
    CHECK_THROWS_AS(parse_idx_images(bytes), ParseError);
}

TEST_CASE("binarize: even digits positive") {
    CHECK(binarize({0, 1, 2, 3}, {0, 2, 4, 6, 8}) == std::vector<int>{1, 0, 1, 0});
    CHECK(binarize({3, 7}, {}) == std::vector<int>{0, 0});
    CHECK(binarize({1, 2}, {0, 1, 2, 3, 4, 5, 6, 7, 8, 9}) == std::vector<int>{1, 1});
}

TEST_CASE("gen_gaussians: deterministic under seed") {
    const LabeledDataset a = gen_gaussians(50, 3, 2.0, 123);
    const LabeledDataset b = gen_gaussians(50, 3, 2.0, 123);
    CHECK(a.features.data == b.features.data);
    CHECK(a.y == b.y);
    const LabeledDataset c = gen_gaussians(50, 3, 2.0, 124);
    CHECK(a.features.data != c.features.data);
}

TEST_CASE("gen_gaussians: well-separated classes split by the midpoint plane") {
    // separation 10 puts the class means 10 apart per axis; the zero
    // hyperplane classifies essentially perfectly.
    const LabeledDataset d = gen_gaussians(500, 2, 10.0, 9);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < d.y.size(); ++i) {
        double s = 0.0;
        for (std::size_t c = 0; c < d.features.cols; ++c) s += d.features.at(i, c);
        if ((s > 0.0 ? 1 : 0) == d.y[i]) ++correct;
    }
    CHECK(static_cast<double>(correct) / static_cast<double>(d.y.size()) >= 0.99);
}

TEST_CASE("make_pu: split counts follow the protocol") {
    const LabeledDataset source = gen_gaussians(1500, 4, 3.0, 5);
    PUSplitSpec spec;
    spec.n_l = 300;
    spec.rho = 0.3;
    spec.seed = 17;
    const PUDataset pu = make_pu(source, spec);
    CHECK(pu.positive_indices.size() == 300);
    CHECK(pu.unlabeled_indices.size() == 900);
    std::size_t hidden_pos = 0;
    for (std::size_t i : pu.unlabeled_indices) hidden_pos += pu.oracle_labels()[i];
    CHECK(hidden_pos == 270);
    for (std::size_t i : pu.positive_indices) {
        CHECK(pu.s[i] == 1);
        CHECK(pu.oracle_labels()[i] == 1);  // s=1 implies y=1
    }
}

TEST_CASE("make_pu: rho edge cases") {
    const LabeledDataset source = gen_gaussians(50, 2, 3.0, 5);
    PUSplitSpec spec;
    spec.n_l = 10;
    spec.rho = 0.0;
    spec.seed = 1;
    const PUDataset all_neg = make_pu(source, spec);
    for (std::size_t i : all_neg.unlabeled_indices)
        CHECK(all_neg.oracle_labels()[i] == 0);

    spec.n_l = 1;
    spec.rho = 1.0;
    const PUDataset all_pos = make_pu(source, spec);
    CHECK(all_pos.unlabeled_indices.size() == 3);
    for (std::size_t i : all_pos.unlabeled_indices)
        CHECK(all_pos.oracle_labels()[i] == 1);
}

TEST_CASE("make_pu: shortfall reported") {
    const LabeledDataset source = gen_gaussians(10, 2, 3.0, 5);
    PUSplitSpec spec;
    spec.n_l = 50;
    spec.rho = 0.3;
    CHECK_THROWS_AS(make_pu(source, spec), ConfigError);
}

TEST_CASE("make_pu: SCAR selection is a uniform subsample of positives") {
    // Chi-square over 5 equal-count bins of the first feature, aggregated
    // across 200 seeded splits; df=4, critical value at p=0.01 is 13.277.
    const LabeledDataset source = gen_gaussians(1000, 2, 2.0, 33);
    std::vector<double> pos_feature;
    for (std::size_t i = 0; i < source.y.size(); ++i)
        if (source.y[i] == 1) pos_feature.push_back(source.features.at(i, 0));
    std::vector<double> sorted = pos_feature;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n_bins = 5;
    std::vector<double> edges;
    for (std::size_t b = 1; b < n_bins; ++b)
        edges.push_back(sorted[b * sorted.size() / n_bins]);
    auto bin_of = [&](double v) {
        std::size_t b = 0;
        while (b < edges.size() && v >= edges[b]) ++b;
        return b;
    };

    std::vector<double> expected(n_bins, 0.0), observed(n_bins, 0.0);
    for (double v : pos_feature)
        expected[bin_of(v)] += 1.0 / static_cast<double>(pos_feature.size());

    PUSplitSpec spec;
    spec.n_l = 100;
    spec.rho = 0.3;
    std::size_t total = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        spec.seed = seed;
        const PUDataset pu = make_pu(source, spec);
        for (std::size_t i : pu.positive_indices) {
            observed[bin_of(pu.features.at(i, 0))] += 1.0;
            ++total;
        }
    }
    double chi2 = 0.0;
    for (std::size_t b = 0; b < n_bins; ++b) {
        const double exp_count = expected[b] * static_cast<double>(total);
        chi2 += (observed[b] - exp_count) * (observed[b] - exp_count) / exp_count;
    }
    CHECK(chi2 < 13.277);
}

TEST_CASE("standardize: train statistics, applied to test") {
    Matrix train(2, 2);
    train.at(0, 0) = 0.0;
    train.at(1, 0) = 2.0;
    train.at(0, 1) = 5.0;
    train.at(1, 1) = 5.0;  // constant column
    const Standardizer s = fit_standardizer(train);
    const Matrix out = s.apply(train);
    CHECK(out.at(0, 0) == doctest::Approx(-1.0));
    CHECK(out.at(1, 0) == doctest::Approx(1.0));
    CHECK(out.at(0, 1) == 0.0);
    CHECK(out.at(1, 1) == 0.0);

    Matrix test(1, 2);
    test.at(0, 0) = 4.0;  // transformed with train stats: (4-1)/1 = 3
    test.at(0, 1) = 9.0;
    const Matrix tout = s.apply(test);
    CHECK(tout.at(0, 0) == doctest::Approx(3.0));
    CHECK(tout.at(0, 1) == 0.0);
}

TEST_CASE("minibatches: seeded permutation covering every index once") {
    const auto batches = minibatches(4, 2, 99);
    REQUIRE(batches.size() == 2);
    std::set<std::size_t> seen;
    for (const auto& b : batches) seen.insert(b.begin(), b.end());
    CHECK(seen == std::set<std::size_t>{0, 1, 2, 3});

    const auto single = minibatches(5, 10, 1);
    REQUIRE(single.size() == 1);
    CHECK(single[0].size() == 5);

    CHECK(minibatches(100, 7, 42) == minibatches(100, 7, 42));
    CHECK(minibatches(100, 7, 42) != minibatches(100, 7, 43));

    // Short final batch kept.
    const auto uneven = minibatches(10, 3, 5);
    REQUIRE(uneven.size() == 4);
    CHECK(uneven.back().size() == 1);
}

TEST_CASE("leakage guard: hidden labels only reach sanctioned readers") {
    // The ground truth is only exposed through oracle_labels(); every caller
    // outside this allow-list is a leak.
    const std::set<std::string> allowed = {
        "src/trainer.cpp",  // evaluate() and PN-oracle setup
    };
    const std::filesystem::path root = PUPOLICY_SOURCE_DIR;
    std::size_t checked = 0;
    for (const auto& entry : std::filesystem::recursive_directory_iterator(root / "src")) {
        if (entry.path().extension() != ".cpp") continue;
        ++checked;
        std::ifstream is(entry.path());
        std::stringstream ss;
        ss << is.rdbuf();
        const bool uses_oracle = ss.str().find("oracle_labels") != std::string::npos;
        const std::string rel = "src/" + entry.path().filename().string();
        if (uses_oracle) CHECK_MESSAGE(allowed.count(rel) == 1, "leak in ", rel);
    }
    CHECK(checked >= 8);
}

TEST_CASE("write_pu_csv: header and row count") {
    const LabeledDataset source = gen_gaussians(20, 3, 2.0, 2);
    PUSplitSpec spec;
    spec.n_l = 4;
    spec.rho = 0.5;
    spec.seed = 3;
    const PUDataset pu = make_pu(source, spec);
    const auto path = std::filesystem::temp_directory_path() / "pupolicy_dump.csv";
    write_pu_csv(path, pu);
    std::ifstream is(path);
    std::string line;
    std::getline(is, line);
    CHECK(line.find("feature_0,feature_1,feature_2,s,hidden_y") == 0);
    std::size_t rows = 0;
    while (std::getline(is, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 16);
    std::filesystem::remove(path);
}
