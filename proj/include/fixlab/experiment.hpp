#ifndef FIXLAB_EXPERIMENT_HPP
#define FIXLAB_EXPERIMENT_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fixlab/descriptors.hpp"
#include "fixlab/pooling.hpp"
#include "fixlab/sparse_coding.hpp"
#include "fixlab/stats.hpp"
#include "fixlab/svm.hpp"
#include "fixlab/types.hpp"

namespace fixlab {

enum class Strategy { PyramidMax, PyramidAvg, FixationMax, FixationAvg };

const char* strategy_code(Strategy s); // pyramid-max, pyramid-avg, fix-max, fix-avg
Strategy strategy_from_code(const std::string& code);
bool strategy_uses_fixations(Strategy s);
PoolingStrategyKind strategy_pool_kind(Strategy s);

// One labeled image with its descriptors and available scanpaths.
struct ClassifiedImage {
    std::string image_id;
    std::string label;
    int width = 0, height = 0;
    std::vector<LocalDescriptor> descriptors;
    std::vector<ScanPath> scanpaths; // preprocessed, non-empty
};

struct ClassificationDataset {
    std::vector<ClassifiedImage> images;
};

struct ExperimentConfig {
    Strategy strategy = Strategy::PyramidMax;
    std::optional<Condition> condition; // nullopt = union of conditions
    int repetitions = 5;
    uint64_t seed = 1;
    int dict_size = 256;
    size_t dict_pool = 50000; // training descriptors sampled for learning
    SparseCodingConfig coding;
    SvmConfig svm;
    int window_px = 30;
    std::vector<int> pyramid_levels = {1, 2, 4};
    bool fallback_pyramid = false;
};

struct EvalReport {
    std::map<std::string, MeanStd> per_class_accuracy;
    MeanStd average_accuracy; // unweighted mean of per-class accuracies
    MeanStd pooled_accuracy;  // fraction of all test images correct
    int repetitions = 0;
};

// Per repetition: seeded stratified 50/50 split, dictionary learned on a
// subsample of training descriptors only, all images encoded and pooled
// under the strategy, one-vs-rest SVM trained and evaluated on the test
// half. Images lacking gaze data under a fixation strategy raise
// CoverageError listing the ids unless fallback_pyramid is set.
EvalReport run_experiment(const ClassificationDataset& ds, const ExperimentConfig& cfg);

// Pooling regions for one image under a strategy. Fixation strategies
// take the windows around the union of all available scanpaths'
// fixations for the requested condition; when an image has none and
// fallback_pyramid is set, the fallback is the whole-image region so
// the representation keeps a uniform dimension.
std::vector<PoolingRegion> regions_for_image(const ClassifiedImage& img,
                                             const ExperimentConfig& cfg,
                                             bool* missing_gaze = nullptr);

// Fixed-dimension image representation. Pyramid strategies concatenate
// the per-cell pools (dimension regions * l); fixation strategies pool
// once over the codes lying inside at least one window (dimension l,
// each code counted once however many windows cover it), then
// L2-normalize. Window counts vary per image, so concatenation is not
// an option there.
std::vector<double> image_representation(const ClassifiedImage& img,
                                         const std::vector<PlacedCode>& placed,
                                         const ExperimentConfig& cfg, int l);

}  // namespace fixlab

#endif
