#ifndef FIXLAB_STATS_HPP
#define FIXLAB_STATS_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fixlab/types.hpp"

namespace fixlab {

// Per-scanpath statistics. Latency is absent when the half-targets
// threshold is never reached; per-target duration is absent when no
// fixation lands on any target box.
struct ScanPathStats {
    double in_box_proportion = 0.0;
    double targets_fixated_proportion = 0.0;
    std::optional<double> saccadic_latency; // s
    std::optional<double> per_target_fixation_duration; // s
};

struct MeanStd {
    double mean = 0.0;
    double std = 0.0; // sample std (n-1); 0 when n < 2
    size_t n = 0;
};

MeanStd mean_std(const std::vector<double>& xs);

struct ConditionSummary {
    Condition condition = Condition::FreeViewing;
    MeanStd in_box_proportion;
    MeanStd targets_fixated_proportion;
    MeanStd saccadic_latency;
    MeanStd per_target_fixation_duration;
    size_t n = 0; // scanpaths contributing to this condition
};

struct TTestResult {
    double t_statistic = 0.0;
    double degrees_of_freedom = 0.0;
    double p_value = 1.0;
};

// First min(k, |fixations|) fixations. Requires preprocessed sp, k >= 1.
std::vector<Fixation> first_k_fixations(const ScanPath& sp, size_t k);

// Fraction of the first k fixations inside (edge-inclusive) any target
// box. nullopt for an empty path.
std::optional<double> in_box_proportion(const ScanPath& sp, const ImageAnnotation& ann, size_t k);

// Fraction of target boxes hit by at least one of the first k fixations.
// A fixation inside overlapping boxes credits every containing box.
// nullopt when the annotation has no targets.
std::optional<double> targets_fixated_proportion(const ScanPath& sp, const ImageAnnotation& ann,
                                                 size_t k);

// Onset of the earliest fixation at which ceil(T/2) distinct targets
// have been fixated, using all fixations. nullopt if never reached.
std::optional<double> saccadic_latency(const ScanPath& sp, const ImageAnnotation& ann);

// Mean duration of fixations landing inside any target box (all
// fixations). nullopt when none land on a target.
std::optional<double> per_target_fixation_duration(const ScanPath& sp, const ImageAnnotation& ann);

ScanPathStats scanpath_stats(const ScanPath& sp, const ImageAnnotation& ann, size_t k);

// Entry i aggregates the duration of the i-th fixation over all paths
// having more than i fixations; entries stop at the longest path (at
// most max_index entries). Empty paths are skipped.
std::vector<MeanStd> per_fixation_duration_curve(const std::vector<ScanPath>& paths,
                                                 size_t max_index);

// in_box_proportion over single-class images, grouped by that class and
// condition. Classes with no qualifying scanpaths are omitted.
std::map<std::string, std::map<Condition, MeanStd>> classwise_in_box(const Dataset& ds, size_t k);

// Per-path metric values of one condition in dataset order, under the
// same inclusion rules as summarize_condition: non-empty preprocessed
// paths on images with at least one target; the optional metrics
// contribute only where present.
struct ConditionSamples {
    std::vector<double> in_box_proportion;
    std::vector<double> targets_fixated_proportion;
    std::vector<double> saccadic_latency;
    std::vector<double> per_target_fixation_duration;
    size_t n = 0;
};

ConditionSamples collect_condition_samples(const Dataset& ds, Condition condition, size_t k);

// Aggregates scanpath_stats over all non-empty preprocessed paths of one
// condition; images without targets contribute nothing.
ConditionSummary summarize_condition(const Dataset& ds, Condition condition, size_t k);

// Welch unequal-variance two-sample t-test, two-sided p from the
// Student-t CDF. Requires |a|,|b| >= 2. Throws DegenerateError when both
// samples have zero variance and equal means.
TTestResult welch_t_test(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace fixlab

#endif
