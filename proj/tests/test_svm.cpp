#include <doctest.h>

#include <random>
#include <string>
#include <vector>

#include "fixlab/errors.hpp"
#include "fixlab/svm.hpp"
#include "support/fixtures.hpp"

using namespace fixlab;
using testsupport::temp_dir;

namespace {

using Samples = std::vector<std::pair<std::vector<double>, std::string>>;

// Three well-separated clusters on the coordinate axes.
Samples cluster_samples(int per_class, double spread, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-spread, spread);
    const std::vector<std::pair<std::vector<double>, std::string>> centers = {
        {{4.0, 0.0, 0.0}, "ant"}, {{0.0, 4.0, 0.0}, "bee"}, {{0.0, 0.0, 4.0}, "cat"}};
    Samples out;
    for (const auto& [c, label] : centers)
        for (int i = 0; i < per_class; ++i)
            out.push_back({{c[0] + u(rng), c[1] + u(rng), c[2] + u(rng)}, label});
    return out;
}

double accuracy(const TrainedModel& m, const Samples& samples) {
    int hit = 0;
    for (const auto& [x, label] : samples)
        if (m.predict(x) == label) ++hit;
    return static_cast<double>(hit) / static_cast<double>(samples.size());
}

} // namespace

TEST_CASE("separable clusters train to perfect accuracy") {
    const Samples train = cluster_samples(30, 0.5, 61);
    const Samples test = cluster_samples(20, 0.5, 62);
    const TrainedModel m = train_svm(train, SvmConfig{});
    CHECK(m.class_labels == std::vector<std::string>{"ant", "bee", "cat"});
    CHECK(m.dim() == 3);
    CHECK(accuracy(m, train) == doctest::Approx(1.0));
    CHECK(accuracy(m, test) == doctest::Approx(1.0));
}

TEST_CASE("training is deterministic for a fixed seed") {
    const Samples train = cluster_samples(20, 1.0, 63);
    SvmConfig cfg;
    cfg.seed = 5;
    const TrainedModel a = train_svm(train, cfg);
    const TrainedModel b = train_svm(train, cfg);
    REQUIRE(a.weights.size() == b.weights.size());
    for (size_t k = 0; k < a.weights.size(); ++k) CHECK(a.weights[k] == b.weights[k]);
}

TEST_CASE("class labels are sorted regardless of sample order") {
    Samples train;
    train.push_back({{1.0, 0.0}, "zebra"});
    train.push_back({{0.0, 1.0}, "ant"});
    train.push_back({{1.1, 0.1}, "zebra"});
    train.push_back({{0.1, 1.1}, "ant"});
    const TrainedModel m = train_svm(train, SvmConfig{});
    CHECK(m.class_labels == std::vector<std::string>{"ant", "zebra"});
}

TEST_CASE("score ties resolve to the earlier class label") {
    TrainedModel m;
    m.class_labels = {"alpha", "beta"};
    m.weights = {{1.0, 0.0}, {1.0, 0.0}}; // identical scores everywhere
    CHECK(m.predict({2.0}) == "alpha");
}

TEST_CASE("training requires at least two classes") {
    Samples one;
    one.push_back({{1.0}, "only"});
    one.push_back({{2.0}, "only"});
    CHECK_THROWS_AS(train_svm(one, SvmConfig{}), ValidationError);
    CHECK_THROWS_AS(train_svm(Samples{}, SvmConfig{}), ValidationError);
}

TEST_CASE("mismatched sample dimensions are rejected") {
    Samples bad;
    bad.push_back({{1.0, 2.0}, "a"});
    bad.push_back({{1.0}, "b"});
    CHECK_THROWS_AS(train_svm(bad, SvmConfig{}), ValidationError);
}

TEST_CASE("model files round-trip predictions") {
    const Samples train = cluster_samples(25, 0.8, 64);
    SvmConfig cfg;
    cfg.c_reg = 2.0;
    cfg.epochs = 40;
    cfg.seed = 9;
    const TrainedModel m = train_svm(train, cfg);
    const std::string dir = temp_dir("gsvm");
    const std::string path = dir + "/model.gsvm";
    save_model(path, m);
    const TrainedModel back = load_model(path);
    CHECK(back.class_labels == m.class_labels);
    CHECK(back.dim() == m.dim());
    CHECK(back.config.c_reg == m.config.c_reg);
    CHECK(back.config.epochs == m.config.epochs);
    const Samples test = cluster_samples(15, 0.8, 65);
    for (const auto& [x, label] : test) CHECK(back.predict(x) == m.predict(x));
}

TEST_CASE("bias weight lets shifted clusters separate") {
    // One-dimensional classes at 3 and 7: without a bias the boundary
    // through the origin cannot split them.
    Samples train;
    std::mt19937_64 rng(66);
    std::uniform_real_distribution<double> u(-0.4, 0.4);
    for (int i = 0; i < 40; ++i) {
        train.push_back({{3.0 + u(rng)}, "low"});
        train.push_back({{7.0 + u(rng)}, "high"});
    }
    const TrainedModel m = train_svm(train, SvmConfig{});
    CHECK(accuracy(m, train) == doctest::Approx(1.0));
}
