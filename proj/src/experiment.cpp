#include "fixlab/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "fixlab/errors.hpp"

namespace fixlab {

const char* strategy_code(Strategy s) {
    switch (s) {
        case Strategy::PyramidMax: return "pyramid-max";
        case Strategy::PyramidAvg: return "pyramid-avg";
        case Strategy::FixationMax: return "fix-max";
        case Strategy::FixationAvg: return "fix-avg";
    }
    return "pyramid-max";
}

Strategy strategy_from_code(const std::string& code) {
    if (code == "pyramid-max") return Strategy::PyramidMax;
    if (code == "pyramid-avg") return Strategy::PyramidAvg;
    if (code == "fix-max") return Strategy::FixationMax;
    if (code == "fix-avg") return Strategy::FixationAvg;
    throw ValidationError("unknown strategy '" + code +
                          "' (expected pyramid-max|pyramid-avg|fix-max|fix-avg)");
}

bool strategy_uses_fixations(Strategy s) {
    return s == Strategy::FixationMax || s == Strategy::FixationAvg;
}

PoolingStrategyKind strategy_pool_kind(Strategy s) {
    return (s == Strategy::PyramidMax || s == Strategy::FixationMax) ? PoolingStrategyKind::Max
                                                                     : PoolingStrategyKind::Average;
}

std::vector<PoolingRegion> regions_for_image(const ClassifiedImage& img,
                                             const ExperimentConfig& cfg, bool* missing_gaze) {
    if (missing_gaze) *missing_gaze = false;
    if (!strategy_uses_fixations(cfg.strategy))
        return pyramid_regions(img.width, img.height, cfg.pyramid_levels);

    std::vector<Fixation> fixations;
    for (const ScanPath& sp : img.scanpaths) {
        if (cfg.condition && sp.condition != *cfg.condition) continue;
        fixations.insert(fixations.end(), sp.fixations.begin(), sp.fixations.end());
    }
    if (fixations.empty()) {
        if (missing_gaze) *missing_gaze = true;
        return pyramid_regions(img.width, img.height, {1});
    }
    return fixation_regions(fixations, cfg.window_px, img.width, img.height);
}

std::vector<double> image_representation(const ClassifiedImage& img,
                                         const std::vector<PlacedCode>& placed,
                                         const ExperimentConfig& cfg, int l) {
    const PoolingStrategyKind kind = strategy_pool_kind(cfg.strategy);
    const std::vector<PoolingRegion> regions = regions_for_image(img, cfg);
    if (!strategy_uses_fixations(cfg.strategy))
        return build_representation(placed, regions, kind, l).values;

    std::vector<double> out(static_cast<size_t>(l), 0.0);
    size_t m = 0;
    for (const PlacedCode& pc : placed) {
        bool member = false;
        for (const PoolingRegion& r : regions) {
            if (r.contains(pc.x, pc.y)) {
                member = true;
                break;
            }
        }
        if (!member) continue;
        if (static_cast<int>(pc.code.size()) != l)
            throw ValidationError("code dimension does not match pool dimension");
        ++m;
        if (kind == PoolingStrategyKind::Max) {
            for (int k = 0; k < l; ++k) out[k] = std::max(out[k], std::abs(pc.code[k]));
        } else {
            for (int k = 0; k < l; ++k) out[k] += pc.code[k];
        }
    }
    if (kind == PoolingStrategyKind::Average && m > 0) {
        const double inv = 1.0 / static_cast<double>(m);
        for (double& v : out) v *= inv;
    }
    double n2 = 0.0;
    for (double v : out) n2 += v * v;
    if (n2 > 0.0) {
        const double inv = 1.0 / std::sqrt(n2);
        for (double& v : out) v *= inv;
    }
    return out;
}

namespace {

void shuffle_prefix(std::vector<size_t>& v, size_t take, std::mt19937_64& rng) {
    const size_t limit = std::min(take, v.empty() ? 0 : v.size() - 1);
    for (size_t i = 0; i < limit; ++i) {
        const size_t span = v.size() - i;
        std::swap(v[i], v[i + static_cast<size_t>(rng() % span)]);
    }
}

}  // namespace

EvalReport run_experiment(const ClassificationDataset& ds, const ExperimentConfig& cfg) {
    if (ds.images.empty()) throw ValidationError("experiment needs at least one image");
    if (cfg.repetitions <= 0) throw ValidationError("repetitions must be positive");
    if (cfg.dict_size <= 0) throw ValidationError("dictionary size must be positive");

    std::map<std::string, std::vector<size_t>> by_class;
    for (size_t i = 0; i < ds.images.size(); ++i) {
        const ClassifiedImage& img = ds.images[i];
        if (img.label.empty())
            throw ValidationError("image '" + img.image_id + "' has no class label");
        if (img.width <= 0 || img.height <= 0)
            throw ValidationError("image '" + img.image_id + "' has invalid dimensions");
        by_class[img.label].push_back(i);
    }
    if (by_class.size() < 2) throw ValidationError("experiment needs at least two classes");
    for (const auto& [label, idxs] : by_class) {
        if (idxs.size() < 2)
            throw ValidationError("class '" + label +
                                  "' needs at least two images for a train/test split");
    }

    int d = -1;
    for (const ClassifiedImage& img : ds.images) {
        for (const LocalDescriptor& desc : img.descriptors) {
            if (d < 0)
                d = static_cast<int>(desc.values.size());
            else if (static_cast<int>(desc.values.size()) != d)
                throw ValidationError("descriptor dimensions differ across images");
        }
    }
    if (d <= 0) throw ValidationError("experiment needs at least one descriptor");

    if (strategy_uses_fixations(cfg.strategy) && !cfg.fallback_pyramid) {
        std::vector<std::string> missing;
        for (const ClassifiedImage& img : ds.images) {
            bool gap = false;
            regions_for_image(img, cfg, &gap);
            if (gap) missing.push_back(img.image_id);
        }
        if (!missing.empty()) {
            std::string msg = "no usable fixations for " + std::to_string(missing.size()) +
                              " image(s) under strategy " + strategy_code(cfg.strategy) + ":";
            const size_t shown = std::min<size_t>(missing.size(), 20);
            for (size_t i = 0; i < shown; ++i) msg += " " + missing[i];
            if (missing.size() > shown)
                msg += " (+" + std::to_string(missing.size() - shown) + " more)";
            throw CoverageError(msg);
        }
    }

    std::vector<std::string> classes;
    for (const auto& [label, idxs] : by_class) classes.push_back(label);

    std::map<std::string, std::vector<double>> class_acc;
    std::vector<double> avg_acc, pooled_acc;

    for (int rep = 0; rep < cfg.repetitions; ++rep) {
        const uint64_t rep_seed = cfg.seed + static_cast<uint64_t>(rep);
        std::mt19937_64 rng(rep_seed ^ 0x7a5f9c3b2d1e8740ULL);

        // Stratified 50/50 split (train takes the extra image of odd classes).
        std::vector<char> in_train(ds.images.size(), 0);
        for (const auto& [label, idxs] : by_class) {
            std::vector<size_t> shuffled = idxs;
            shuffle_prefix(shuffled, shuffled.size(), rng);
            const size_t n_train = (shuffled.size() + 1) / 2;
            for (size_t i = 0; i < n_train; ++i) in_train[shuffled[i]] = 1;
        }

        // Dictionary training pool from the training half only.
        std::vector<std::vector<double>> pool_descs;
        for (size_t i = 0; i < ds.images.size(); ++i) {
            if (!in_train[i]) continue;
            for (const LocalDescriptor& desc : ds.images[i].descriptors)
                pool_descs.emplace_back(desc.values.begin(), desc.values.end());
        }
        if (static_cast<int>(pool_descs.size()) < cfg.dict_size)
            throw ValidationError("training half holds " + std::to_string(pool_descs.size()) +
                                  " descriptors, fewer than the dictionary size " +
                                  std::to_string(cfg.dict_size));
        if (pool_descs.size() > cfg.dict_pool) {
            std::vector<size_t> order(pool_descs.size());
            std::iota(order.begin(), order.end(), size_t{0});
            shuffle_prefix(order, cfg.dict_pool, rng);
            std::vector<std::vector<double>> subset;
            subset.reserve(cfg.dict_pool);
            for (size_t i = 0; i < cfg.dict_pool; ++i)
                subset.push_back(std::move(pool_descs[order[i]]));
            pool_descs = std::move(subset);
        }

        SparseCodingConfig coding = cfg.coding;
        coding.seed = rep_seed;
        const LearnResult learned = learn_dictionary(pool_descs, cfg.dict_size, coding);
        const Dictionary& D = learned.dictionary;
        const int l = D.l;

        std::vector<std::vector<double>> reps(ds.images.size());
        for (size_t i = 0; i < ds.images.size(); ++i) {
            const ClassifiedImage& img = ds.images[i];
            std::vector<std::vector<double>> xs;
            xs.reserve(img.descriptors.size());
            for (const LocalDescriptor& desc : img.descriptors)
                xs.emplace_back(desc.values.begin(), desc.values.end());
            const std::vector<std::vector<double>> codes = encode_all(xs, D, coding);
            std::vector<PlacedCode> placed(codes.size());
            for (size_t c = 0; c < codes.size(); ++c)
                placed[c] = {img.descriptors[c].center_x, img.descriptors[c].center_y, codes[c]};
            reps[i] = image_representation(img, placed, cfg, l);
        }

        SvmConfig svm_cfg = cfg.svm;
        svm_cfg.seed = rep_seed;
        std::vector<std::pair<std::vector<double>, std::string>> train_samples;
        for (size_t i = 0; i < ds.images.size(); ++i)
            if (in_train[i]) train_samples.emplace_back(reps[i], ds.images[i].label);
        const TrainedModel model = train_svm(train_samples, svm_cfg);

        std::map<std::string, std::pair<int, int>> counts;  // correct, total per class
        int correct = 0, total = 0;
        for (size_t i = 0; i < ds.images.size(); ++i) {
            if (in_train[i]) continue;
            const std::string& truth = ds.images[i].label;
            auto& [ok, tot] = counts[truth];
            ++tot;
            ++total;
            if (model.predict(reps[i]) == truth) {
                ++ok;
                ++correct;
            }
        }
        double acc_sum = 0.0;
        for (const std::string& cls : classes) {
            const auto& [ok, tot] = counts[cls];
            const double acc = static_cast<double>(ok) / tot;  // tot >= 1 by the class-size check
            class_acc[cls].push_back(acc);
            acc_sum += acc;
        }
        avg_acc.push_back(acc_sum / static_cast<double>(classes.size()));
        pooled_acc.push_back(static_cast<double>(correct) / total);
    }

    EvalReport report;
    report.repetitions = cfg.repetitions;
    for (const auto& [cls, vals] : class_acc) report.per_class_accuracy[cls] = mean_std(vals);
    report.average_accuracy = mean_std(avg_acc);
    report.pooled_accuracy = mean_std(pooled_acc);
    return report;
}

}  // namespace fixlab
