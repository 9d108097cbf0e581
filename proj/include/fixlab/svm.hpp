#ifndef FIXLAB_SVM_HPP
#define FIXLAB_SVM_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace fixlab {

struct SvmConfig {
    double c_reg = 1.0;
    int epochs = 50;
    uint64_t seed = 1;
};

// One-vs-rest linear classifier. weights[k] has dimension dim+1 (bias
// last); prediction is the argmax over class scores, ties broken by
// class order.
struct TrainedModel {
    std::vector<std::string> class_labels; // sorted, defines tie order
    std::vector<std::vector<double>> weights;
    SvmConfig config;

    size_t dim() const { return weights.empty() ? 0 : weights.front().size() - 1; }
    double score(size_t k, const std::vector<double>& x) const;
    std::string predict(const std::vector<double>& x) const;
};

// L2-regularized hinge loss trained per class by seeded stochastic
// subgradient descent (Pegasos steps, fixed epoch count, decaying step
// 1/(lambda*t) with lambda = 1/(c_reg*n)). Deterministic for a fixed
// seed; classes are independent. Throws ValidationError with fewer than
// two distinct labels.
TrainedModel train_svm(const std::vector<std::pair<std::vector<double>, std::string>>& samples,
                       const SvmConfig& cfg);

// Model file "GSVM": u32 classes, u32 dim, weights f32 LE, plus a JSON
// sidecar (<path>.json) carrying the class labels and config.
void save_model(const std::string& path, const TrainedModel& m);
TrainedModel load_model(const std::string& path);

}  // namespace fixlab

#endif
