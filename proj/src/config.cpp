#include "pupolicy/config.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "pupolicy/errors.hpp"
#include "pupolicy/idx.hpp"

namespace pupolicy {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

[[noreturn]] void bad_key(const std::string& section, const std::string& key,
                          std::size_t line) {
    throw ConfigError("line " + std::to_string(line) + ": unknown key '" + key +
                      "' in section [" + section + "]");
}

double parse_real(const std::string& v, std::size_t line) {
    try {
        std::size_t pos = 0;
        const double r = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return r;
    } catch (const std::exception&) {
        throw ConfigError("line " + std::to_string(line) + ": expected number, got '" +
                          v + "'");
    }
}

std::uint64_t parse_count(const std::string& v, std::size_t line) {
    try {
        std::size_t pos = 0;
        const long long r = std::stoll(v, &pos);
        if (pos != v.size() || r < 0) throw std::invalid_argument(v);
        return static_cast<std::uint64_t>(r);
    } catch (const std::exception&) {
        throw ConfigError("line " + std::to_string(line) +
                          ": expected non-negative integer, got '" + v + "'");
    }
}

bool parse_bool(const std::string& v, std::size_t line) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError("line " + std::to_string(line) + ": expected true/false, got '" +
                      v + "'");
}

template <typename T, typename F>
std::vector<T> parse_list(const std::string& v, std::size_t line, F item) {
    std::vector<T> out;
    std::stringstream ss(v);
    std::string part;
    while (std::getline(ss, part, ',')) out.push_back(item(trim(part), line));
    if (out.empty())
        throw ConfigError("line " + std::to_string(line) + ": empty list");
    return out;
}

std::string fmt_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

template <typename Seq>
std::string join(const Seq& seq) {
    std::string out;
    for (const auto& v : seq) {
        if (!out.empty()) out += ",";
        out += std::to_string(v);
    }
    return out;
}

}  // namespace

ExperimentSpec parse_experiment(const std::string& text) {
    ExperimentSpec spec;
    std::istringstream is(text);
    std::string raw;
    std::string section;
    std::size_t line_no = 0;
    bool alpha_seen = false;

    while (std::getline(is, raw)) {
        ++line_no;
        std::string line = trim(raw);
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = trim(line.substr(0, hash));
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("line " + std::to_string(line_no) +
                                  ": malformed section header");
            section = line.substr(1, line.size() - 2);
            if (section != "dataset" && section != "model" && section != "train" &&
                section != "output")
                throw ConfigError("line " + std::to_string(line_no) +
                                  ": unknown section [" + section + "]");
            continue;
        }

        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(line_no) + ": expected key=value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (section.empty())
            throw ConfigError("line " + std::to_string(line_no) +
                              ": key outside any [section]");

        auto count_item = [](const std::string& v, std::size_t l) {
            return static_cast<std::size_t>(parse_count(v, l));
        };

        if (section == "dataset") {
            auto& d = spec.dataset;
            if (key == "source") {
                if (value != "gaussians" && value != "mnist-idx")
                    throw ConfigError("line " + std::to_string(line_no) +
                                      ": source must be gaussians or mnist-idx");
                d.source = value;
            } else if (key == "train_per_class") d.train_per_class = parse_count(value, line_no);
            else if (key == "test_per_class") d.test_per_class = parse_count(value, line_no);
            else if (key == "dim") d.dim = parse_count(value, line_no);
            else if (key == "separation") d.separation = parse_real(value, line_no);
            else if (key == "train_images") d.train_images = value;
            else if (key == "train_labels") d.train_labels = value;
            else if (key == "test_images") d.test_images = value;
            else if (key == "test_labels") d.test_labels = value;
            else if (key == "positive_digits") {
                d.positive_digits.clear();
                for (auto v : parse_list<std::size_t>(value, line_no, count_item))
                    d.positive_digits.insert(static_cast<int>(v));
            } else if (key == "n_l") d.n_l = parse_count(value, line_no);
            else if (key == "rho") d.rho = parse_real(value, line_no);
            else if (key == "u_multiplier") d.u_multiplier = parse_count(value, line_no);
            else bad_key(section, key, line_no);
        } else if (section == "model") {
            auto& m = spec.model;
            if (key == "classifier_hidden")
                m.classifier_hidden = parse_list<std::size_t>(value, line_no, count_item);
            else if (key == "policy_hidden")
                m.policy_hidden = parse_list<std::size_t>(value, line_no, count_item);
            else bad_key(section, key, line_no);
        } else if (section == "train") {
            auto& t = spec.train;
            if (key == "variant") t.variant = variant_from_string(value);
            else if (key == "epochs") t.epochs = parse_count(value, line_no);
            else if (key == "batch") t.batch = parse_count(value, line_no);
            else if (key == "learning_rate") t.learning_rate = parse_real(value, line_no);
            else if (key == "sync_period") t.sync_period = parse_count(value, line_no);
            else if (key == "pretrain_classifier_epochs")
                t.pretrain_classifier_epochs = parse_count(value, line_no);
            else if (key == "pretrain_policy_epochs")
                t.pretrain_policy_epochs = parse_count(value, line_no);
            else if (key == "classifier_decay") t.classifier_decay = parse_real(value, line_no);
            else if (key == "policy_decay") t.policy_decay = parse_real(value, line_no);
            else if (key == "concentration") t.concentration = parse_real(value, line_no);
            else if (key == "alpha") {
                t.alpha = parse_real(value, line_no);
                alpha_seen = true;
            } else if (key == "seed") t.seed = parse_count(value, line_no);
            else if (key == "seeds") {
                spec.grid_seeds = parse_list<std::uint64_t>(
                    value, line_no,
                    [](const std::string& v, std::size_t l) { return parse_count(v, l); });
            } else if (key == "eval_every") t.eval_every = parse_count(value, line_no);
            else if (key == "weighter_uses_sampled_action")
                t.weighter_uses_sampled_action = parse_bool(value, line_no);
            else bad_key(section, key, line_no);
        } else {  // output
            if (key == "dir") spec.out_dir = value;
            else bad_key(section, key, line_no);
        }
    }

    if (spec.train.variant == Variant::Nnpu && !alpha_seen)
        throw ConfigError("variant=nnpu requires key 'alpha' in [train]");
    if (spec.dataset.source == "mnist-idx") {
        for (const auto* p : {&spec.dataset.train_images, &spec.dataset.train_labels,
                              &spec.dataset.test_images, &spec.dataset.test_labels})
            if (p->empty())
                throw ConfigError(
                    "mnist-idx source needs train_images, train_labels, test_images "
                    "and test_labels");
    }
    validate(spec.train);
    return spec;
}

ExperimentSpec parse_experiment_file(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config: " + path.string());
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_experiment(ss.str());
}

std::string serialize_experiment(const ExperimentSpec& spec) {
    std::ostringstream os;
    const auto& d = spec.dataset;
    os << "[dataset]\n";
    os << "source = " << d.source << "\n";
    if (d.source == "gaussians") {
        os << "train_per_class = " << d.train_per_class << "\n";
        os << "test_per_class = " << d.test_per_class << "\n";
        os << "dim = " << d.dim << "\n";
        os << "separation = " << fmt_real(d.separation) << "\n";
    } else {
        os << "train_images = " << d.train_images.string() << "\n";
        os << "train_labels = " << d.train_labels.string() << "\n";
        os << "test_images = " << d.test_images.string() << "\n";
        os << "test_labels = " << d.test_labels.string() << "\n";
        os << "positive_digits = " << join(d.positive_digits) << "\n";
    }
    os << "n_l = " << d.n_l << "\n";
    os << "rho = " << fmt_real(d.rho) << "\n";
    os << "u_multiplier = " << d.u_multiplier << "\n";

    os << "\n[model]\n";
    os << "classifier_hidden = " << join(spec.model.classifier_hidden) << "\n";
    os << "policy_hidden = " << join(spec.model.policy_hidden) << "\n";

    const auto& t = spec.train;
    os << "\n[train]\n";
    os << "variant = " << to_string(t.variant) << "\n";
    os << "epochs = " << t.epochs << "\n";
    os << "batch = " << t.batch << "\n";
    os << "learning_rate = " << fmt_real(t.learning_rate) << "\n";
    os << "sync_period = " << t.sync_period << "\n";
    os << "pretrain_classifier_epochs = " << t.pretrain_classifier_epochs << "\n";
    os << "pretrain_policy_epochs = " << t.pretrain_policy_epochs << "\n";
    os << "classifier_decay = " << fmt_real(t.classifier_decay) << "\n";
    os << "policy_decay = " << fmt_real(t.policy_decay) << "\n";
    os << "concentration = " << fmt_real(t.concentration) << "\n";
    if (t.alpha) os << "alpha = " << fmt_real(*t.alpha) << "\n";
    os << "seed = " << t.seed << "\n";
    if (!spec.grid_seeds.empty()) os << "seeds = " << join(spec.grid_seeds) << "\n";
    os << "eval_every = " << t.eval_every << "\n";
    os << "weighter_uses_sampled_action = "
       << (t.weighter_uses_sampled_action ? "true" : "false") << "\n";

    os << "\n[output]\n";
    os << "dir = " << spec.out_dir.string() << "\n";
    return os.str();
}

namespace {

std::filesystem::path resolve_data_path(const std::filesystem::path& path) {
    if (std::filesystem::exists(path)) return path;
    if (const char* root = std::getenv("PUPOLICY_DATA_DIR")) {
        const auto candidate = std::filesystem::path(root) / path;
        if (std::filesystem::exists(candidate)) return candidate;
    }
    throw ConfigError("dataset file not found: " + path.string() +
                      " (also tried under PUPOLICY_DATA_DIR)");
}

}  // namespace

DataBundle build_bundle(const ExperimentSpec& spec) {
    const auto& d = spec.dataset;
    PUSplitSpec split;
    split.n_l = d.n_l;
    split.rho = d.rho;
    split.u_multiplier = d.u_multiplier;
    split.seed = derive_seed(spec.train.seed, "split");

    DataBundle bundle;
    if (d.source == "gaussians") {
        const LabeledDataset train = gen_gaussians(d.train_per_class, d.dim, d.separation,
                                                   derive_seed(spec.train.seed, "gen_train"));
        const LabeledDataset test = gen_gaussians(d.test_per_class, d.dim, d.separation,
                                                  derive_seed(spec.train.seed, "gen_test"));
        bundle.train = make_pu(train, split);
        bundle.test_features = test.features;
        bundle.test_y = test.y;
    } else {
        LabeledDataset train;
        train.features = parse_idx_images(read_idx_file(resolve_data_path(d.train_images)));
        train.y = binarize(parse_idx_labels(read_idx_file(resolve_data_path(d.train_labels))),
                           d.positive_digits);
        if (train.features.rows != train.y.size())
            throw ConfigError("mnist-idx: train image/label counts differ");
        bundle.train = make_pu(train, split);
        bundle.test_features =
            parse_idx_images(read_idx_file(resolve_data_path(d.test_images)));
        bundle.test_y =
            binarize(parse_idx_labels(read_idx_file(resolve_data_path(d.test_labels))),
                     d.positive_digits);
        if (bundle.test_features.rows != bundle.test_y.size())
            throw ConfigError("mnist-idx: test image/label counts differ");
    }
    return bundle;
}

}  // namespace pupolicy
