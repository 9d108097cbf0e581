#include "fixlab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/distributions/students_t.hpp>

#include "fixlab/errors.hpp"

namespace fixlab {

MeanStd mean_std(const std::vector<double>& xs) {
    MeanStd r;
    r.n = xs.size();
    if (xs.empty()) return r;
    double sum = 0.0;
    for (double x : xs) sum += x;
    r.mean = sum / static_cast<double>(xs.size());
    if (xs.size() >= 2) {
        double ss = 0.0;
        for (double x : xs) ss += (x - r.mean) * (x - r.mean);
        r.std = std::sqrt(ss / static_cast<double>(xs.size() - 1));
    }
    return r;
}

namespace {

void require_preprocessed(const ScanPath& sp) {
    if (!sp.preprocessed)
        throw StateError("scanpath (" + sp.image_id + ", " + sp.subject_id +
                         ") must be preprocessed first");
}

}  // namespace

std::vector<Fixation> first_k_fixations(const ScanPath& sp, size_t k) {
    require_preprocessed(sp);
    if (k < 1) throw ValidationError("k must be >= 1");
    const size_t n = std::min(k, sp.fixations.size());
    return {sp.fixations.begin(), sp.fixations.begin() + static_cast<ptrdiff_t>(n)};
}

std::optional<double> in_box_proportion(const ScanPath& sp, const ImageAnnotation& ann,
                                        size_t k) {
    require_preprocessed(sp);
    if (sp.empty()) return std::nullopt;
    const auto firsts = first_k_fixations(sp, k);
    const auto targets = ann.target_boxes();
    size_t hits = 0;
    for (const Fixation& f : firsts) {
        for (const BoundingBox* b : targets) {
            if (b->contains(f.x, f.y)) {
                ++hits;
                break;
            }
        }
    }
    return static_cast<double>(hits) / static_cast<double>(firsts.size());
}

std::optional<double> targets_fixated_proportion(const ScanPath& sp, const ImageAnnotation& ann,
                                                 size_t k) {
    require_preprocessed(sp);
    const auto targets = ann.target_boxes();
    if (targets.empty()) return std::nullopt;
    const auto firsts = first_k_fixations(sp, k);
    size_t fixated = 0;
    for (const BoundingBox* b : targets) {
        for (const Fixation& f : firsts) {
            if (b->contains(f.x, f.y)) {
                ++fixated;
                break;
            }
        }
    }
    return static_cast<double>(fixated) / static_cast<double>(targets.size());
}

std::optional<double> saccadic_latency(const ScanPath& sp, const ImageAnnotation& ann) {
    require_preprocessed(sp);
    const auto targets = ann.target_boxes();
    if (targets.empty()) return std::nullopt;
    const size_t needed = (targets.size() + 1) / 2; // ceil(T/2)
    std::vector<bool> hit(targets.size(), false);
    size_t distinct = 0;
    for (const Fixation& f : sp.fixations) {
        for (size_t t = 0; t < targets.size(); ++t) {
            if (!hit[t] && targets[t]->contains(f.x, f.y)) {
                hit[t] = true;
                ++distinct;
            }
        }
        if (distinct >= needed) return f.onset;
    }
    return std::nullopt;
}

std::optional<double> per_target_fixation_duration(const ScanPath& sp,
                                                   const ImageAnnotation& ann) {
    require_preprocessed(sp);
    const auto targets = ann.target_boxes();
    double total = 0.0;
    size_t count = 0;
    for (const Fixation& f : sp.fixations) {
        for (const BoundingBox* b : targets) {
            if (b->contains(f.x, f.y)) {
                total += f.duration;
                ++count;
                break;
            }
        }
    }
    if (count == 0) return std::nullopt;
    return total / static_cast<double>(count);
}

ScanPathStats scanpath_stats(const ScanPath& sp, const ImageAnnotation& ann, size_t k) {
    ScanPathStats s;
    s.in_box_proportion = in_box_proportion(sp, ann, k).value_or(0.0);
    s.targets_fixated_proportion = targets_fixated_proportion(sp, ann, k).value_or(0.0);
    s.saccadic_latency = saccadic_latency(sp, ann);
    s.per_target_fixation_duration = per_target_fixation_duration(sp, ann);
    return s;
}

std::vector<MeanStd> per_fixation_duration_curve(const std::vector<ScanPath>& paths,
                                                 size_t max_index) {
    std::vector<std::vector<double>> per_index;
    for (const auto& sp : paths) {
        const size_t upto = std::min(max_index, sp.fixations.size());
        if (per_index.size() < upto) per_index.resize(upto);
        for (size_t i = 0; i < upto; ++i) per_index[i].push_back(sp.fixations[i].duration);
    }
    std::vector<MeanStd> out;
    out.reserve(per_index.size());
    for (const auto& xs : per_index) out.push_back(mean_std(xs));
    return out;
}

std::map<std::string, std::map<Condition, MeanStd>> classwise_in_box(const Dataset& ds,
                                                                     size_t k) {
    std::map<std::string, std::map<Condition, std::vector<double>>> buckets;
    for (const auto& sp : ds.scanpaths) {
        if (sp.empty()) continue;
        const auto& ann = ds.annotations.at(sp.image_id);
        const auto classes = ann.present_target_classes();
        if (classes.size() != 1) continue; // single-class images only
        auto p = in_box_proportion(sp, ann, k);
        if (p) buckets[*classes.begin()][sp.condition].push_back(*p);
    }
    std::map<std::string, std::map<Condition, MeanStd>> out;
    for (const auto& [cls, per_cond] : buckets)
        for (const auto& [cond, xs] : per_cond) out[cls][cond] = mean_std(xs);
    return out;
}

ConditionSamples collect_condition_samples(const Dataset& ds, Condition condition, size_t k) {
    ConditionSamples cs;
    for (const auto& sp : ds.scanpaths) {
        if (sp.condition != condition || sp.empty()) continue;
        const auto& ann = ds.annotations.at(sp.image_id);
        if (ann.target_boxes().empty()) continue;
        ++cs.n;
        const ScanPathStats s = scanpath_stats(sp, ann, k);
        cs.in_box_proportion.push_back(s.in_box_proportion);
        cs.targets_fixated_proportion.push_back(s.targets_fixated_proportion);
        if (s.saccadic_latency) cs.saccadic_latency.push_back(*s.saccadic_latency);
        if (s.per_target_fixation_duration)
            cs.per_target_fixation_duration.push_back(*s.per_target_fixation_duration);
    }
    return cs;
}

ConditionSummary summarize_condition(const Dataset& ds, Condition condition, size_t k) {
    const ConditionSamples cs = collect_condition_samples(ds, condition, k);
    ConditionSummary sum;
    sum.condition = condition;
    sum.n = cs.n;
    sum.in_box_proportion = mean_std(cs.in_box_proportion);
    sum.targets_fixated_proportion = mean_std(cs.targets_fixated_proportion);
    sum.saccadic_latency = mean_std(cs.saccadic_latency);
    sum.per_target_fixation_duration = mean_std(cs.per_target_fixation_duration);
    return sum;
}

TTestResult welch_t_test(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() < 2 || b.size() < 2)
        throw ValidationError("welch_t_test requires at least two observations per sample");
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    const MeanStd ma = mean_std(a);
    const MeanStd mb = mean_std(b);
    const double va = ma.std * ma.std;
    const double vb = mb.std * mb.std;
    const double sa = va / na;
    const double sb = vb / nb;
    const double se2 = sa + sb;
    TTestResult r;
    if (se2 == 0.0) {
        if (ma.mean == mb.mean)
            throw DegenerateError("welch_t_test: zero variance in both samples with equal means");
        r.t_statistic = ma.mean > mb.mean ? std::numeric_limits<double>::infinity()
                                          : -std::numeric_limits<double>::infinity();
        r.degrees_of_freedom = na + nb - 2.0;
        r.p_value = 0.0;
        return r;
    }
    r.t_statistic = (ma.mean - mb.mean) / std::sqrt(se2);
    r.degrees_of_freedom = se2 * se2 / (sa * sa / (na - 1.0) + sb * sb / (nb - 1.0));
    const boost::math::students_t dist(r.degrees_of_freedom);
    r.p_value = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(r.t_statistic)));
    return r;
}

}  // namespace fixlab
