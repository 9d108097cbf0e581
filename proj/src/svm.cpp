#include "fixlab/svm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <set>

#include <json.hpp>

#include "binio.hpp"
#include "fixlab/errors.hpp"
#include "fixlab/io.hpp"

namespace fixlab {

double TrainedModel::score(size_t k, const std::vector<double>& x) const {
    const std::vector<double>& w = weights[k];
    if (x.size() + 1 != w.size())
        throw ValidationError("sample dimension " + std::to_string(x.size()) +
                              " does not match model dimension " + std::to_string(w.size() - 1));
    double s = w.back();  // bias
    for (size_t i = 0; i < x.size(); ++i) s += w[i] * x[i];
    return s;
}

std::string TrainedModel::predict(const std::vector<double>& x) const {
    if (class_labels.empty()) throw StateError("model has no classes");
    size_t best = 0;
    double best_score = score(0, x);
    for (size_t k = 1; k < class_labels.size(); ++k) {
        const double s = score(k, x);
        if (s > best_score) {  // ties keep the earlier class
            best_score = s;
            best = k;
        }
    }
    return class_labels[best];
}

TrainedModel train_svm(const std::vector<std::pair<std::vector<double>, std::string>>& samples,
                       const SvmConfig& cfg) {
    if (samples.empty()) throw ValidationError("training needs at least one sample");
    if (cfg.c_reg <= 0.0) throw ValidationError("regularization constant must be positive");
    if (cfg.epochs <= 0) throw ValidationError("epoch count must be positive");
    const size_t dim = samples.front().first.size();
    if (dim == 0) throw ValidationError("training samples must be non-empty vectors");
    std::set<std::string> labels;
    for (const auto& [x, label] : samples) {
        if (x.size() != dim) throw ValidationError("training samples must share one dimension");
        labels.insert(label);
    }
    if (labels.size() < 2)
        throw ValidationError("training needs at least two classes, got " +
                              std::to_string(labels.size()));

    TrainedModel model;
    model.class_labels.assign(labels.begin(), labels.end());
    model.config = cfg;
    model.weights.assign(model.class_labels.size(), std::vector<double>(dim + 1, 0.0));

    const size_t n = samples.size();
    const double lambda = 1.0 / (cfg.c_reg * static_cast<double>(n));

#pragma omp parallel for schedule(static)
    for (long long k = 0; k < static_cast<long long>(model.class_labels.size()); ++k) {
        const std::string& positive = model.class_labels[k];
        std::vector<double>& w = model.weights[k];
        std::mt19937_64 rng(cfg.seed ^ (0x9e3779b97f4a7c15ULL * static_cast<uint64_t>(k + 1)));
        std::vector<size_t> order(n);
        std::iota(order.begin(), order.end(), size_t{0});

        uint64_t t = 0;
        for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
            for (size_t i = 0; i + 1 < n; ++i) {
                const size_t span = n - i;
                std::swap(order[i], order[i + static_cast<size_t>(rng() % span)]);
            }
            for (size_t idx : order) {
                ++t;
                const auto& [x, label] = samples[idx];
                const double y = label == positive ? 1.0 : -1.0;
                double s = w[dim];
                for (size_t j = 0; j < dim; ++j) s += w[j] * x[j];

                const double keep = 1.0 - 1.0 / static_cast<double>(t);
                for (double& wj : w) wj *= keep;
                if (y * s < 1.0) {
                    const double step = y / (lambda * static_cast<double>(t));
                    for (size_t j = 0; j < dim; ++j) w[j] += step * x[j];
                    w[dim] += step;  // bias rides along as a constant-1 feature
                }
            }
        }
    }
    return model;
}

void save_model(const std::string& path, const TrainedModel& m) {
    if (m.class_labels.empty() || m.weights.size() != m.class_labels.size())
        throw ValidationError("model has inconsistent class data");
    std::string s;
    s += "GSVM";
    binio::put_u32le(s, static_cast<uint32_t>(m.class_labels.size()));
    binio::put_u32le(s, static_cast<uint32_t>(m.dim()));
    for (const auto& w : m.weights) {
        if (w.size() != m.dim() + 1) throw ValidationError("model weight dimensions disagree");
        for (double v : w) binio::put_f32le(s, static_cast<float>(v));
    }
    write_file_atomic(path, s);

    nlohmann::json side;
    side["classes"] = m.class_labels;
    side["c_reg"] = m.config.c_reg;
    side["epochs"] = m.config.epochs;
    side["seed"] = m.config.seed;
    write_file_atomic(path + ".json", side.dump(2) + "\n");
}

TrainedModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open '" + path + "'");
    binio::expect_magic(in, "GSVM", path);
    const uint32_t classes = binio::get_u32le(in, "GSVM class count");
    const uint32_t dim = binio::get_u32le(in, "GSVM dimension");
    if (classes < 2 || dim == 0) throw FormatError("'" + path + "' has invalid header fields");

    TrainedModel m;
    m.weights.assign(classes, std::vector<double>(dim + 1));
    for (auto& w : m.weights)
        for (double& v : w) v = binio::get_f32le(in, "GSVM weight");

    std::ifstream side_in(path + ".json");
    if (!side_in) throw FormatError("cannot open model sidecar '" + path + ".json'");
    nlohmann::json side;
    try {
        side_in >> side;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("model sidecar '" + path + ".json' is not valid JSON: " + e.what());
    }
    if (!side.contains("classes") || !side["classes"].is_array() ||
        side["classes"].size() != classes)
        throw FormatError("model sidecar class list does not match '" + path + "'");
    for (const auto& c : side["classes"]) m.class_labels.push_back(c.get<std::string>());
    if (side.contains("c_reg")) m.config.c_reg = side["c_reg"].get<double>();
    if (side.contains("epochs")) m.config.epochs = side["epochs"].get<int>();
    if (side.contains("seed")) m.config.seed = side["seed"].get<uint64_t>();
    return m;
}

}  // namespace fixlab
