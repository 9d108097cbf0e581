// fixlab command-line front end: one subcommand per pipeline stage.
#include <algorithm>
#include <array>
#include <cerrno>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fixlab/descriptors.hpp"
#include "fixlab/errors.hpp"
#include "fixlab/experiment.hpp"
#include "fixlab/geometry.hpp"
#include "fixlab/io.hpp"
#include "fixlab/multimatch.hpp"
#include "fixlab/pooling.hpp"
#include "fixlab/preprocess.hpp"
#include "fixlab/report.hpp"
#include "fixlab/rqa.hpp"
#include "fixlab/sparse_coding.hpp"
#include "fixlab/stats.hpp"
#include "fixlab/svm.hpp"
#include "fixlab/types.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string default_out() {
    const char* env = std::getenv("FIXLAB_OUT");
    return (env != nullptr && *env != '\0') ? std::string(env) : std::string(".");
}

struct Opts {
    std::string fixations;
    std::string annotations;
    std::string images;
    std::string descriptors;
    std::string dictionary;
    std::string out = default_out();
    std::string condition = "both";
    std::string strategy = "pyramid-max";
    std::string pairing = "all";
    std::string image_ids;
    size_t k = 5;
    double bandwidth_deg = 2.0;
    bool duration_weighted = false;
    double radius_px = 0.0; // 0 = derive from 2 deg of visual angle
    int min_line = 2;
    double lambda1 = 0.15;
    int dict_size = 256;
    int dict_iters = 15;
    size_t dict_pool = 50000;
    int window_px = 30;
    int reps = 5;
    uint64_t seed = 1;
    int jobs = 0;
    bool fallback_pyramid = false;
    double mm_amplitude_px = -1.0; // negative = 10% of the screen diagonal
    double mm_direction_deg = 45.0;
    bool no_simplify = false;
    double c_reg = 1.0;
    int epochs = 50;
    fixlab::DescriptorGridConfig grid;
    fixlab::ViewingGeometry geom;
};

// Collects the option values that shape a run into a canonical sorted
// key=value block; its hash goes into every report header.
class ProvBuilder {
public:
    explicit ProvBuilder(std::string subcommand) : sub_(std::move(subcommand)) {}

    ProvBuilder& add(const std::string& key, const std::string& v) {
        kv_[key] = v;
        return *this;
    }
    ProvBuilder& add(const std::string& key, const char* v) { return add(key, std::string(v)); }
    ProvBuilder& add(const std::string& key, double v) { return add(key, fixlab::format_double(v)); }
    ProvBuilder& add(const std::string& key, bool v) {
        return add(key, std::string(v ? "true" : "false"));
    }
    template <typename T>
    ProvBuilder& add(const std::string& key, T v)
        requires std::is_integral_v<T>
    {
        return add(key, std::to_string(v));
    }

    fixlab::Provenance make(uint64_t seed) const {
        std::string text = sub_;
        text += '\n';
        for (const auto& [key, value] : kv_) {
            text += key;
            text += '=';
            text += value;
            text += '\n';
        }
        fixlab::Provenance p;
        p.hash = fixlab::config_hash(text);
        p.seed = seed;
        return p;
    }

private:
    std::string sub_;
    std::map<std::string, std::string> kv_;
};

std::string hash_hex(uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

json prov_json(const fixlab::Provenance& p) {
    return json{{"config_hash", hash_hex(p.hash)}, {"seed", p.seed}, {"version", fixlab::kVersion}};
}

std::string out_path(const Opts& o, const std::string& name) {
    fs::create_directories(o.out);
    return (fs::path(o.out) / name).string();
}

std::set<std::string> parse_id_set(const std::string& csv) {
    std::set<std::string> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.insert(item);
    return out;
}

std::optional<fixlab::Condition> condition_filter(const std::string& c) {
    if (c == "fv") return fixlab::Condition::FreeViewing;
    if (c == "vs") return fixlab::Condition::VisualSearch;
    return std::nullopt;
}

std::vector<fixlab::Condition> selected_conditions(const std::string& c) {
    if (c == "fv") return {fixlab::Condition::FreeViewing};
    if (c == "vs") return {fixlab::Condition::VisualSearch};
    return {fixlab::Condition::FreeViewing, fixlab::Condition::VisualSearch};
}

bool condition_matches(const fixlab::ScanPath& sp, const std::optional<fixlab::Condition>& f) {
    return !f.has_value() || sp.condition == *f;
}

// Loads, optionally filters by --image-ids, validates, preprocesses.
fixlab::Dataset load_gaze(const Opts& o) {
    fixlab::Dataset ds;
    ds.annotations = fixlab::load_annotations(o.annotations);
    ds.scanpaths = fixlab::load_fixation_log(o.fixations);
    if (!o.image_ids.empty()) {
        const std::set<std::string> keep = parse_id_set(o.image_ids);
        std::vector<fixlab::ScanPath> kept;
        for (fixlab::ScanPath& sp : ds.scanpaths)
            if (keep.count(sp.image_id) > 0) kept.push_back(std::move(sp));
        ds.scanpaths = std::move(kept);
        if (ds.scanpaths.empty())
            throw fixlab::ValidationError("--image-ids filter matched no scanpaths");
    }
    ds.validate();
    return fixlab::preprocess_dataset(ds);
}

void append_mean_std(std::string& s, const fixlab::MeanStd& m) {
    s += fixlab::format_double(m.mean);
    s += ',';
    s += fixlab::format_double(m.std);
    s += ',';
    s += std::to_string(m.n);
}

std::string pm_cell(const fixlab::MeanStd& m) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f±%.3f", m.mean, m.std);
    return buf;
}

// Seeded partial Fisher-Yates; keeps the first `take` elements.
template <typename T>
void subsample(std::vector<T>& v, size_t take, uint64_t seed) {
    if (v.size() <= take) return;
    std::mt19937_64 rng(seed);
    for (size_t i = 0; i < take; ++i) {
        const size_t span = v.size() - i;
        std::swap(v[i], v[i + static_cast<size_t>(rng() % span)]);
    }
    v.resize(take);
}

std::vector<std::vector<double>> as_doubles(const std::vector<fixlab::LocalDescriptor>& descs) {
    std::vector<std::vector<double>> xs;
    xs.reserve(descs.size());
    for (const fixlab::LocalDescriptor& d : descs)
        xs.emplace_back(d.values.begin(), d.values.end());
    return xs;
}

// ---------------------------------------------------------------- ingest

void run_ingest(const Opts& o) {
    const fixlab::Provenance prov = ProvBuilder("ingest")
                                        .add("fixations", o.fixations)
                                        .add("annotations", o.annotations)
                                        .add("image_ids", o.image_ids)
                                        .add("seed", o.seed)
                                        .make(o.seed);
    fixlab::Dataset raw;
    raw.annotations = fixlab::load_annotations(o.annotations);
    raw.scanpaths = fixlab::load_fixation_log(o.fixations);
    if (!o.image_ids.empty()) {
        const std::set<std::string> keep = parse_id_set(o.image_ids);
        std::vector<fixlab::ScanPath> kept;
        for (fixlab::ScanPath& sp : raw.scanpaths)
            if (keep.count(sp.image_id) > 0) kept.push_back(std::move(sp));
        raw.scanpaths = std::move(kept);
        if (raw.scanpaths.empty())
            throw fixlab::ValidationError("--image-ids filter matched no scanpaths");
    }
    raw.validate();

    size_t raw_fixations = 0;
    for (const fixlab::ScanPath& sp : raw.scanpaths) raw_fixations += sp.size();

    const fixlab::Dataset pre = fixlab::preprocess_dataset(raw);
    size_t kept_fixations = 0, empty_paths = 0, n_fv = 0, n_vs = 0;
    for (const fixlab::ScanPath& sp : pre.scanpaths) {
        kept_fixations += sp.size();
        if (sp.empty()) ++empty_paths;
        if (sp.condition == fixlab::Condition::FreeViewing)
            ++n_fv;
        else
            ++n_vs;
    }

    fixlab::save_fixation_log(out_path(o, "preprocessed_fixations.csv"), pre.scanpaths,
                              prov.csv_header());
    const json summary = {{"provenance", prov_json(prov)},
                          {"images", pre.annotations.size()},
                          {"scanpaths", pre.scanpaths.size()},
                          {"scanpaths_fv", n_fv},
                          {"scanpaths_vs", n_vs},
                          {"raw_fixations", raw_fixations},
                          {"kept_fixations", kept_fixations},
                          {"empty_scanpaths", empty_paths}};
    fixlab::write_file_atomic(out_path(o, "ingest_summary.json"), summary.dump(2) + "\n");
    std::cout << "ingest: " << pre.scanpaths.size() << " scanpaths, " << kept_fixations << "/"
              << raw_fixations << " fixations kept, " << empty_paths << " empty\n";
}

// ----------------------------------------------------------------- stats

const std::array<const char*, 4> kMetricNames = {
    "in_box_proportion", "targets_fixated_proportion", "saccadic_latency_s",
    "per_target_fixation_duration_s"};

void run_stats(const Opts& o) {
    const fixlab::Provenance prov = ProvBuilder("stats")
                                        .add("fixations", o.fixations)
                                        .add("annotations", o.annotations)
                                        .add("image_ids", o.image_ids)
                                        .add("condition", o.condition)
                                        .add("k", o.k)
                                        .add("seed", o.seed)
                                        .make(o.seed);
    const fixlab::Dataset ds = load_gaze(o);
    const std::optional<fixlab::Condition> filt = condition_filter(o.condition);
    const std::vector<fixlab::Condition> conds = selected_conditions(o.condition);

    std::string paths_csv = prov.csv_header();
    paths_csv +=
        "image_id,subject_id,condition,n_fixations,in_box_proportion,"
        "targets_fixated_proportion,saccadic_latency_s,per_target_fixation_duration_s\n";
    size_t rows = 0;
    for (const fixlab::ScanPath& sp : ds.scanpaths) {
        if (sp.empty() || !condition_matches(sp, filt)) continue;
        const fixlab::ImageAnnotation& ann = ds.annotations.at(sp.image_id);
        if (ann.target_count() == 0) continue;
        const auto in_box = fixlab::in_box_proportion(sp, ann, o.k);
        const auto fixated = fixlab::targets_fixated_proportion(sp, ann, o.k);
        const auto latency = fixlab::saccadic_latency(sp, ann);
        const auto per_target = fixlab::per_target_fixation_duration(sp, ann);
        paths_csv += sp.image_id + ',' + sp.subject_id + ',' +
                     fixlab::condition_code(sp.condition) + ',' + std::to_string(sp.size()) + ',';
        paths_csv += in_box ? fixlab::format_double(*in_box) : "";
        paths_csv += ',';
        paths_csv += fixated ? fixlab::format_double(*fixated) : "";
        paths_csv += ',';
        paths_csv += latency ? fixlab::format_double(*latency) : "";
        paths_csv += ',';
        paths_csv += per_target ? fixlab::format_double(*per_target) : "";
        paths_csv += '\n';
        ++rows;
    }
    fixlab::write_file_atomic(out_path(o, "stats_paths.csv"), paths_csv);

    std::string summary_csv = prov.csv_header();
    summary_csv += "metric,condition,mean,std,n\n";
    for (const fixlab::Condition c : conds) {
        const fixlab::ConditionSummary s = fixlab::summarize_condition(ds, c, o.k);
        const std::array<const fixlab::MeanStd*, 4> ms = {
            &s.in_box_proportion, &s.targets_fixated_proportion, &s.saccadic_latency,
            &s.per_target_fixation_duration};
        for (size_t i = 0; i < ms.size(); ++i) {
            summary_csv += std::string(kMetricNames[i]) + ',' + fixlab::condition_code(c) + ',';
            append_mean_std(summary_csv, *ms[i]);
            summary_csv += '\n';
        }
    }
    fixlab::write_file_atomic(out_path(o, "stats_summary.csv"), summary_csv);

    if (!filt.has_value()) {
        const fixlab::ConditionSamples a =
            fixlab::collect_condition_samples(ds, fixlab::Condition::FreeViewing, o.k);
        const fixlab::ConditionSamples b =
            fixlab::collect_condition_samples(ds, fixlab::Condition::VisualSearch, o.k);
        const std::array<const std::vector<double>*, 4> av = {
            &a.in_box_proportion, &a.targets_fixated_proportion, &a.saccadic_latency,
            &a.per_target_fixation_duration};
        const std::array<const std::vector<double>*, 4> bv = {
            &b.in_box_proportion, &b.targets_fixated_proportion, &b.saccadic_latency,
            &b.per_target_fixation_duration};
        json tests = json::array();
        for (size_t i = 0; i < av.size(); ++i) {
            json rec = {{"metric", kMetricNames[i]},
                        {"n_fv", av[i]->size()},
                        {"n_vs", bv[i]->size()}};
            if (av[i]->size() < 2 || bv[i]->size() < 2) {
                rec["skipped"] = "need at least two samples per condition";
            } else {
                try {
                    const fixlab::TTestResult r = fixlab::welch_t_test(*av[i], *bv[i]);
                    rec["t"] = r.t_statistic;
                    rec["df"] = r.degrees_of_freedom;
                    rec["p"] = r.p_value;
                } catch (const fixlab::DegenerateError& e) {
                    rec["degenerate"] = e.what();
                }
            }
            tests.push_back(std::move(rec));
        }
        const json doc = {{"provenance", prov_json(prov)}, {"k", o.k}, {"tests", tests}};
        fixlab::write_file_atomic(out_path(o, "stats_tests.json"), doc.dump(2) + "\n");
    }

    std::string class_csv = prov.csv_header();
    class_csv += "class,condition,mean,std,n\n";
    const auto classwise = fixlab::classwise_in_box(ds, o.k);
    for (const auto& [label, per_cond] : classwise) {
        for (const fixlab::Condition c : conds) {
            const auto it = per_cond.find(c);
            if (it == per_cond.end()) continue;
            class_csv += label + ',' + fixlab::condition_code(c) + ',';
            append_mean_std(class_csv, it->second);
            class_csv += '\n';
        }
    }
    fixlab::write_file_atomic(out_path(o, "stats_classwise.csv"), class_csv);

    std::string curve_csv = prov.csv_header();
    curve_csv += "condition,fix_index,mean_duration_s,std,n\n";
    for (const fixlab::Condition c : conds) {
        std::vector<fixlab::ScanPath> sel;
        for (const fixlab::ScanPath& sp : ds.scanpaths)
            if (!sp.empty() && sp.condition == c) sel.push_back(sp);
        if (sel.empty()) continue;
        const std::vector<fixlab::MeanStd> curve = fixlab::per_fixation_duration_curve(sel, 32);
        for (size_t i = 0; i < curve.size(); ++i) {
            if (curve[i].n == 0) continue;
            curve_csv += std::string(fixlab::condition_code(c)) + ',' + std::to_string(i) + ',';
            append_mean_std(curve_csv, curve[i]);
            curve_csv += '\n';
        }
    }
    fixlab::write_file_atomic(out_path(o, "stats_duration_curve.csv"), curve_csv);

    std::cout << "stats: " << rows << " scanpaths summarized (k=" << o.k << ")\n";
}

// ---------------------------------------------------------------- density

void run_density(const Opts& o) {
    const fixlab::Provenance prov = ProvBuilder("density")
                                        .add("fixations", o.fixations)
                                        .add("annotations", o.annotations)
                                        .add("image_ids", o.image_ids)
                                        .add("condition", o.condition)
                                        .add("bandwidth_deg", o.bandwidth_deg)
                                        .add("duration_weighted", o.duration_weighted)
                                        .add("distance_cm", o.geom.viewing_distance_cm)
                                        .add("screen_width_cm", o.geom.screen_width_cm)
                                        .add("screen_height_cm", o.geom.screen_height_cm)
                                        .add("resolution_x", o.geom.resolution_x)
                                        .add("resolution_y", o.geom.resolution_y)
                                        .add("seed", o.seed)
                                        .make(o.seed);
    const fixlab::Dataset ds = load_gaze(o);
    const std::optional<fixlab::Condition> filt = condition_filter(o.condition);

    std::map<std::string, std::vector<fixlab::Fixation>> by_image;
    for (const fixlab::ScanPath& sp : ds.scanpaths) {
        if (sp.empty() || !condition_matches(sp, filt)) continue;
        auto& dst = by_image[sp.image_id];
        dst.insert(dst.end(), sp.fixations.begin(), sp.fixations.end());
    }

    fs::create_directories(fs::path(o.out) / "density");
    std::string index = prov.csv_header();
    index += "image_id,n_fixations,sigma_px,mass\n";
    size_t written = 0;
    for (const auto& [id, ann] : ds.annotations) {
        const auto it = by_image.find(id);
        if (it == by_image.end() || it->second.empty()) continue;
        const fixlab::DensityMap dm =
            fixlab::density_map(it->second, ann, o.geom, o.bandwidth_deg, o.duration_weighted);
        fixlab::write_gmat((fs::path(o.out) / "density" / (id + ".gmat")).string(), dm);
        fixlab::write_density_pgm((fs::path(o.out) / "density" / (id + ".pgm")).string(), dm);
        index += id + ',' + std::to_string(it->second.size()) + ',' +
                 fixlab::format_double(dm.sigma_px) + ',' + fixlab::format_double(dm.sum()) + '\n';
        ++written;
    }
    if (written == 0)
        throw fixlab::ValidationError("no scanpaths matched the condition filter; nothing to map");
    fixlab::write_file_atomic(out_path(o, "density_index.csv"), index);
    std::cout << "density: " << written << " maps under " << (fs::path(o.out) / "density").string()
              << "\n";
}

// -------------------------------------------------------------- multimatch

void run_multimatch(const Opts& o) {
    if (o.pairing == "cross" && o.condition != "both")
        throw fixlab::ValidationError("--pairing cross compares conditions; use --condition both");
    const fixlab::Provenance prov = ProvBuilder("multimatch")
                                        .add("fixations", o.fixations)
                                        .add("annotations", o.annotations)
                                        .add("image_ids", o.image_ids)
                                        .add("condition", o.condition)
                                        .add("pairing", o.pairing)
                                        .add("mm_amplitude_px", o.mm_amplitude_px)
                                        .add("mm_direction_deg", o.mm_direction_deg)
                                        .add("simplify", !o.no_simplify)
                                        .add("resolution_x", o.geom.resolution_x)
                                        .add("resolution_y", o.geom.resolution_y)
                                        .add("seed", o.seed)
                                        .make(o.seed);
    const fixlab::Dataset ds = load_gaze(o);
    const std::optional<fixlab::Condition> filt = condition_filter(o.condition);
    const double diagonal = std::hypot(static_cast<double>(o.geom.resolution_x),
                                       static_cast<double>(o.geom.resolution_y));
    fixlab::MultiMatchConfig cfg = fixlab::MultiMatchConfig::defaults(diagonal);
    if (o.mm_amplitude_px >= 0.0) cfg.amplitude_threshold_px = o.mm_amplitude_px;
    cfg.direction_threshold_deg = o.mm_direction_deg;
    cfg.simplification_enabled = !o.no_simplify;

    std::map<std::string, std::vector<const fixlab::ScanPath*>> by_image;
    for (const fixlab::ScanPath& sp : ds.scanpaths) {
        if (sp.size() < 2 || !condition_matches(sp, filt)) continue;
        by_image[sp.image_id].push_back(&sp);
    }

    std::string pairs_csv = prov.csv_header();
    pairs_csv +=
        "image_id,subject_a,subject_b,condition_a,condition_b,"
        "shape,length,direction,position,duration\n";
    std::array<std::vector<double>, 5> dims;
    size_t n_pairs = 0;
    for (auto& [id, paths] : by_image) {
        std::sort(paths.begin(), paths.end(),
                  [](const fixlab::ScanPath* a, const fixlab::ScanPath* b) {
                      const int ca = static_cast<int>(a->condition);
                      const int cb = static_cast<int>(b->condition);
                      return std::tie(a->subject_id, ca) < std::tie(b->subject_id, cb);
                  });
        for (size_t i = 0; i < paths.size(); ++i) {
            for (size_t j = i + 1; j < paths.size(); ++j) {
                const fixlab::ScanPath& a = *paths[i];
                const fixlab::ScanPath& b = *paths[j];
                if (o.pairing == "cross" && a.condition == b.condition) continue;
                const fixlab::MultiMatchScore s = fixlab::compare(a, b, cfg);
                pairs_csv += id + ',' + a.subject_id + ',' + b.subject_id + ',' +
                             fixlab::condition_code(a.condition) + ',' +
                             fixlab::condition_code(b.condition) + ',' +
                             fixlab::format_double(s.shape) + ',' + fixlab::format_double(s.length) +
                             ',' + fixlab::format_double(s.direction) + ',' +
                             fixlab::format_double(s.position) + ',' +
                             fixlab::format_double(s.duration) + '\n';
                dims[0].push_back(s.shape);
                dims[1].push_back(s.length);
                dims[2].push_back(s.direction);
                dims[3].push_back(s.position);
                dims[4].push_back(s.duration);
                ++n_pairs;
            }
        }
    }
    fixlab::write_file_atomic(out_path(o, "multimatch_pairs.csv"), pairs_csv);

    static const std::array<const char*, 5> kDims = {"shape", "length", "direction", "position",
                                                     "duration"};
    std::string summary = prov.csv_header();
    summary += "dimension,mean,std,n\n";
    for (size_t i = 0; i < kDims.size(); ++i) {
        summary += std::string(kDims[i]) + ',';
        append_mean_std(summary, fixlab::mean_std(dims[i]));
        summary += '\n';
    }
    fixlab::write_file_atomic(out_path(o, "multimatch_summary.csv"), summary);
    std::cout << "multimatch: " << n_pairs << " pairs (" << o.pairing << " pairing)\n";
}

// ------------------------------------------------------------------- rqa

void run_rqa(const Opts& o) {
    const bool derived_radius = o.radius_px <= 0.0;
    const double radius =
        derived_radius ? fixlab::degrees_to_pixels(o.geom, 2.0) : o.radius_px;
    const fixlab::Provenance prov = ProvBuilder("rqa")
                                        .add("fixations", o.fixations)
                                        .add("annotations", o.annotations)
                                        .add("image_ids", o.image_ids)
                                        .add("condition", o.condition)
                                        .add("radius_px", radius)
                                        .add("min_line", o.min_line)
                                        .add("seed", o.seed)
                                        .make(o.seed);
    const fixlab::Dataset ds = load_gaze(o);
    const std::optional<fixlab::Condition> filt = condition_filter(o.condition);
    fixlab::RqaConfig rc;
    rc.radius_px = radius;
    rc.min_line_length = o.min_line;

    // The radius and line length are tool defaults, not dataset-derived;
    // flag them in the header so readers can judge comparability.
    std::string params = "# rqa_params: radius_px=" + fixlab::format_double(radius);
    if (derived_radius) params += " (tool default: 2 deg of visual angle)";
    params += " min_line=" + std::to_string(o.min_line) + "\n";

    std::string paths_csv = prov.csv_header() + params;
    paths_csv += "image_id,subject_id,condition,n_fixations,recurrence,determinism,laminarity,crom\n";
    std::map<fixlab::Condition, std::array<std::vector<double>, 4>> per_cond;
    size_t rows = 0;
    for (const fixlab::ScanPath& sp : ds.scanpaths) {
        if (sp.empty() || !condition_matches(sp, filt)) continue;
        const fixlab::RecurrenceMatrix m = fixlab::recurrence_matrix(sp, rc);
        const fixlab::RqaMeasures r = fixlab::rqa_measures(m, rc);
        paths_csv += sp.image_id + ',' + sp.subject_id + ',' +
                     fixlab::condition_code(sp.condition) + ',' + std::to_string(sp.size()) + ',' +
                     fixlab::format_double(r.recurrence) + ',' +
                     fixlab::format_double(r.determinism) + ',' +
                     fixlab::format_double(r.laminarity) + ',' + fixlab::format_double(r.crom) +
                     '\n';
        auto& acc = per_cond[sp.condition];
        acc[0].push_back(r.recurrence);
        acc[1].push_back(r.determinism);
        acc[2].push_back(r.laminarity);
        acc[3].push_back(r.crom);
        ++rows;
    }
    fixlab::write_file_atomic(out_path(o, "rqa_paths.csv"), paths_csv);

    static const std::array<const char*, 4> kMeasures = {"recurrence", "determinism", "laminarity",
                                                         "crom"};
    std::string summary = prov.csv_header() + params;
    summary += "measure,condition,mean,std,n\n";
    for (const fixlab::Condition c : selected_conditions(o.condition)) {
        const auto it = per_cond.find(c);
        for (size_t i = 0; i < kMeasures.size(); ++i) {
            summary += std::string(kMeasures[i]) + ',' + fixlab::condition_code(c) + ',';
            append_mean_std(summary,
                            it == per_cond.end() ? fixlab::MeanStd{} : fixlab::mean_std(it->second[i]));
            summary += '\n';
        }
    }
    fixlab::write_file_atomic(out_path(o, "rqa_summary.csv"), summary);

    if (!filt.has_value()) {
        const auto& a = per_cond[fixlab::Condition::FreeViewing];
        const auto& b = per_cond[fixlab::Condition::VisualSearch];
        json tests = json::array();
        for (size_t i = 0; i < kMeasures.size(); ++i) {
            json rec = {{"measure", kMeasures[i]}, {"n_fv", a[i].size()}, {"n_vs", b[i].size()}};
            if (a[i].size() < 2 || b[i].size() < 2) {
                rec["skipped"] = "need at least two samples per condition";
            } else {
                try {
                    const fixlab::TTestResult r = fixlab::welch_t_test(a[i], b[i]);
                    rec["t"] = r.t_statistic;
                    rec["df"] = r.degrees_of_freedom;
                    rec["p"] = r.p_value;
                } catch (const fixlab::DegenerateError& e) {
                    rec["degenerate"] = e.what();
                }
            }
            tests.push_back(std::move(rec));
        }
        const json doc = {{"provenance", prov_json(prov)},
                          {"radius_px", radius},
                          {"min_line", o.min_line},
                          {"tests", tests}};
        fixlab::write_file_atomic(out_path(o, "rqa_tests.json"), doc.dump(2) + "\n");
    }
    std::cout << "rqa: " << rows << " scanpaths (radius " << fixlab::format_double(radius)
              << " px, min line " << o.min_line << ")\n";
}

// ------------------------------------------------------------- descriptors

void run_descriptors(const Opts& o) {
    fixlab::DescriptorGridConfig cfg = o.grid;
    cfg.validate();
    const fixlab::Provenance prov = ProvBuilder("descriptors")
                                        .add("images", o.images)
                                        .add("patch_size", cfg.patch_size)
                                        .add("stride", cfg.stride)
                                        .add("cells", cfg.cells)
                                        .add("orientations", cfg.orientations)
                                        .add("seed", o.seed)
                                        .make(o.seed);
    if (!fs::is_directory(o.images))
        throw fixlab::ValidationError("--images must name a directory: " + o.images);
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(o.images)) {
        if (!entry.is_regular_file()) continue;
        const std::string ext = entry.path().extension().string();
        if (ext == ".pgm" || ext == ".ppm" || ext == ".pnm") files.push_back(entry.path());
    }
    if (files.empty())
        throw fixlab::ValidationError("no .pgm/.ppm/.pnm images found in " + o.images);
    std::sort(files.begin(), files.end());

    std::vector<std::pair<std::string, std::vector<fixlab::LocalDescriptor>>> by_image;
    std::string index = prov.csv_header();
    index += "image_id,width,height,count,dim\n";
    std::set<std::string> seen;
    size_t total = 0;
    for (const fs::path& f : files) {
        const std::string id = f.stem().string();
        if (!seen.insert(id).second)
            throw fixlab::ValidationError("duplicate image id '" + id + "' in " + o.images);
        const fixlab::GrayImage img = fixlab::load_image(f.string());
        std::vector<fixlab::LocalDescriptor> descs = fixlab::dense_descriptors(img, cfg);
        total += descs.size();
        index += id + ',' + std::to_string(img.width) + ',' + std::to_string(img.height) + ',' +
                 std::to_string(descs.size()) + ',' + std::to_string(cfg.dim()) + '\n';
        by_image.emplace_back(id, std::move(descs));
    }
    fixlab::save_descriptors(out_path(o, "descriptors.gdsc"), by_image, cfg.dim());
    fixlab::write_file_atomic(out_path(o, "descriptors_index.csv"), index);
    std::cout << "descriptors: " << by_image.size() << " images, " << total
              << " descriptors (dim " << cfg.dim() << ")\n";
}

// -------------------------------------------------------------- dict-learn

void run_dict_learn(const Opts& o) {
    const fixlab::Provenance prov = ProvBuilder("dict-learn")
                                        .add("descriptors", o.descriptors)
                                        .add("dict_size", o.dict_size)
                                        .add("lambda1", o.lambda1)
                                        .add("dict_iters", o.dict_iters)
                                        .add("dict_pool", o.dict_pool)
                                        .add("seed", o.seed)
                                        .make(o.seed);
    const auto by_image = fixlab::load_descriptors(o.descriptors);
    std::vector<std::vector<double>> pool;
    for (const auto& [id, descs] : by_image)
        for (const fixlab::LocalDescriptor& d : descs)
            pool.emplace_back(d.values.begin(), d.values.end());
    if (pool.empty()) throw fixlab::ValidationError(o.descriptors + " holds no descriptors");
    subsample(pool, o.dict_pool, o.seed);

    fixlab::SparseCodingConfig sc;
    sc.lambda1 = o.lambda1;
    sc.max_outer_iters = o.dict_iters;
    sc.seed = o.seed;
    const fixlab::LearnResult lr = fixlab::learn_dictionary(pool, o.dict_size, sc);
    fixlab::save_dictionary(out_path(o, "dictionary.gdic"), lr.dictionary, sc, lr.iterations);

    std::string obj_csv = prov.csv_header();
    obj_csv += "iteration,objective\n";
    for (size_t i = 0; i < lr.objective_per_iteration.size(); ++i)
        obj_csv += std::to_string(i + 1) + ',' +
                   fixlab::format_double(lr.objective_per_iteration[i]) + '\n';
    fixlab::write_file_atomic(out_path(o, "dict_objective.csv"), obj_csv);
    std::cout << "dict-learn: " << lr.dictionary.l << " codewords of dim " << lr.dictionary.d
              << " from " << pool.size() << " samples, " << lr.iterations << " iterations\n";
}

// ------------------------------------------------------------------ encode

void run_encode(const Opts& o) {
    const fixlab::Provenance prov = ProvBuilder("encode")
                                        .add("descriptors", o.descriptors)
                                        .add("dictionary", o.dictionary)
                                        .add("lambda1", o.lambda1)
                                        .add("seed", o.seed)
                                        .make(o.seed);
    const auto by_image = fixlab::load_descriptors(o.descriptors);
    const fixlab::Dictionary D = fixlab::load_dictionary(o.dictionary);
    fixlab::SparseCodingConfig sc;
    sc.lambda1 = o.lambda1;
    sc.seed = o.seed;

    std::vector<std::pair<std::string, std::vector<fixlab::PlacedCode>>> placed;
    std::string index = prov.csv_header();
    index += "image_id,count,mean_nonzeros\n";
    size_t total = 0;
    for (const auto& [id, descs] : by_image) {
        const std::vector<std::vector<double>> codes = fixlab::encode_all(as_doubles(descs), D, sc);
        std::vector<fixlab::PlacedCode> pcs(codes.size());
        size_t nonzeros = 0;
        for (size_t i = 0; i < codes.size(); ++i) {
            pcs[i].x = descs[i].center_x;
            pcs[i].y = descs[i].center_y;
            pcs[i].code = codes[i];
            for (double v : codes[i])
                if (v != 0.0) ++nonzeros;
        }
        const double mean_nz =
            codes.empty() ? 0.0 : static_cast<double>(nonzeros) / static_cast<double>(codes.size());
        index += id + ',' + std::to_string(codes.size()) + ',' + fixlab::format_double(mean_nz) +
                 '\n';
        total += codes.size();
        placed.emplace_back(id, std::move(pcs));
    }
    fixlab::save_codes(out_path(o, "codes.gcod"), placed, D.l);
    fixlab::write_file_atomic(out_path(o, "encode_index.csv"), index);
    std::cout << "encode: " << total << " codes of dim " << D.l << " across " << placed.size()
              << " images\n";
}

// ------------------------------------------------------------- train / eval

fixlab::ExperimentConfig make_experiment_config(const Opts& o) {
    fixlab::ExperimentConfig cfg;
    cfg.strategy = fixlab::strategy_from_code(o.strategy);
    cfg.condition = condition_filter(o.condition);
    cfg.repetitions = o.reps;
    cfg.seed = o.seed;
    cfg.dict_size = o.dict_size;
    cfg.dict_pool = o.dict_pool;
    cfg.coding.lambda1 = o.lambda1;
    cfg.coding.max_outer_iters = o.dict_iters;
    cfg.coding.seed = o.seed;
    cfg.svm.c_reg = o.c_reg;
    cfg.svm.epochs = o.epochs;
    cfg.svm.seed = o.seed;
    cfg.window_px = o.window_px;
    cfg.fallback_pyramid = o.fallback_pyramid;
    return cfg;
}

ProvBuilder classification_prov(const char* sub, const Opts& o) {
    ProvBuilder pb(sub);
    pb.add("descriptors", o.descriptors)
        .add("annotations", o.annotations)
        .add("fixations", o.fixations)
        .add("image_ids", o.image_ids)
        .add("condition", o.condition)
        .add("strategy", o.strategy)
        .add("dict_size", o.dict_size)
        .add("dict_pool", o.dict_pool)
        .add("dict_iters", o.dict_iters)
        .add("lambda1", o.lambda1)
        .add("window_px", o.window_px)
        .add("c_reg", o.c_reg)
        .add("epochs", o.epochs)
        .add("fallback_pyramid", o.fallback_pyramid)
        .add("seed", o.seed);
    return pb;
}

// Joins the descriptor file with annotations (labels, dimensions) and the
// optional fixation log. Only single-class images participate.
fixlab::ClassificationDataset build_classification(const Opts& o, bool need_gaze,
                                                   size_t* skipped_label) {
    if (need_gaze && o.fixations.empty() && !o.fallback_pyramid)
        throw fixlab::ValidationError(
            "strategy '" + o.strategy + "' needs --fixations (or --fallback-pyramid)");
    auto by_image = fixlab::load_descriptors(o.descriptors);
    const auto annotations = fixlab::load_annotations(o.annotations);

    std::map<std::string, std::vector<fixlab::ScanPath>> gaze;
    if (!o.fixations.empty()) {
        fixlab::Dataset ds;
        ds.annotations = annotations;
        ds.scanpaths = fixlab::load_fixation_log(o.fixations);
        ds = fixlab::preprocess_dataset(ds);
        for (fixlab::ScanPath& sp : ds.scanpaths)
            if (!sp.empty()) gaze[sp.image_id].push_back(std::move(sp));
    }

    const std::set<std::string> keep =
        o.image_ids.empty() ? std::set<std::string>{} : parse_id_set(o.image_ids);
    *skipped_label = 0;
    fixlab::ClassificationDataset cds;
    for (auto& [id, descs] : by_image) {
        if (!keep.empty() && keep.count(id) == 0) continue;
        const auto it = annotations.find(id);
        if (it == annotations.end())
            throw fixlab::ValidationError("descriptor file names image '" + id +
                                          "' missing from annotations");
        const std::set<std::string> classes = it->second.present_target_classes();
        if (classes.size() != 1) {
            ++*skipped_label;
            continue;
        }
        fixlab::ClassifiedImage img;
        img.image_id = id;
        img.label = *classes.begin();
        img.width = it->second.width;
        img.height = it->second.height;
        img.descriptors = std::move(descs);
        const auto git = gaze.find(id);
        if (git != gaze.end()) img.scanpaths = std::move(git->second);
        cds.images.push_back(std::move(img));
    }
    if (cds.images.empty())
        throw fixlab::ValidationError("no single-class labeled images to classify");
    return cds;
}

void run_train(const Opts& o) {
    const fixlab::ExperimentConfig cfg = make_experiment_config(o);
    const fixlab::Provenance prov = classification_prov("train", o).make(o.seed);
    size_t skipped_label = 0;
    const fixlab::ClassificationDataset cds =
        build_classification(o, fixlab::strategy_uses_fixations(cfg.strategy), &skipped_label);

    if (fixlab::strategy_uses_fixations(cfg.strategy) && !cfg.fallback_pyramid) {
        std::vector<std::string> missing;
        for (const fixlab::ClassifiedImage& img : cds.images) {
            bool missing_gaze = false;
            fixlab::regions_for_image(img, cfg, &missing_gaze);
            if (missing_gaze) missing.push_back(img.image_id);
        }
        if (!missing.empty()) {
            std::string msg = std::to_string(missing.size()) +
                              " image(s) lack gaze data for a fixation strategy:";
            const size_t shown = std::min<size_t>(missing.size(), 20);
            for (size_t i = 0; i < shown; ++i) msg += ' ' + missing[i];
            if (missing.size() > shown)
                msg += " +" + std::to_string(missing.size() - shown) + " more";
            msg += "; pass --fallback-pyramid to pool them over the whole image";
            throw fixlab::CoverageError(msg);
        }
    }

    std::vector<std::vector<double>> pool;
    for (const fixlab::ClassifiedImage& img : cds.images)
        for (const fixlab::LocalDescriptor& d : img.descriptors)
            pool.emplace_back(d.values.begin(), d.values.end());
    if (pool.empty()) throw fixlab::ValidationError(o.descriptors + " holds no descriptors");
    subsample(pool, o.dict_pool, o.seed);
    const fixlab::LearnResult lr = fixlab::learn_dictionary(pool, cfg.dict_size, cfg.coding);
    fixlab::save_dictionary(out_path(o, "dictionary.gdic"), lr.dictionary, cfg.coding,
                            lr.iterations);

    std::vector<std::pair<std::vector<double>, std::string>> samples;
    samples.reserve(cds.images.size());
    for (const fixlab::ClassifiedImage& img : cds.images) {
        const std::vector<std::vector<double>> codes =
            fixlab::encode_all(as_doubles(img.descriptors), lr.dictionary, cfg.coding);
        std::vector<fixlab::PlacedCode> placed(codes.size());
        for (size_t i = 0; i < codes.size(); ++i) {
            placed[i].x = img.descriptors[i].center_x;
            placed[i].y = img.descriptors[i].center_y;
            placed[i].code = codes[i];
        }
        samples.emplace_back(fixlab::image_representation(img, placed, cfg, lr.dictionary.l),
                             img.label);
    }
    const fixlab::TrainedModel model = fixlab::train_svm(samples, cfg.svm);
    fixlab::save_model(out_path(o, "model.gsvm"), model);

    std::map<std::string, std::pair<size_t, size_t>> per_class; // label -> (correct, total)
    size_t correct = 0;
    for (size_t i = 0; i < samples.size(); ++i) {
        auto& slot = per_class[samples[i].second];
        ++slot.second;
        if (model.predict(samples[i].first) == samples[i].second) {
            ++slot.first;
            ++correct;
        }
    }
    json class_json = json::object();
    for (const auto& [label, ct] : per_class)
        class_json[label] = {{"images", ct.second},
                             {"training_accuracy",
                              static_cast<double>(ct.first) / static_cast<double>(ct.second)}};
    const json summary = {
        {"provenance", prov_json(prov)},
        {"strategy", o.strategy},
        {"images", cds.images.size()},
        {"skipped_not_single_class", skipped_label},
        {"representation_dim", samples.front().first.size()},
        {"dictionary", {{"l", lr.dictionary.l}, {"d", lr.dictionary.d}, {"iterations", lr.iterations}}},
        {"classes", class_json},
        {"training_accuracy", static_cast<double>(correct) / static_cast<double>(samples.size())}};
    fixlab::write_file_atomic(out_path(o, "train_summary.json"), summary.dump(2) + "\n");
    std::cout << "train: " << samples.size() << " images, " << per_class.size()
              << " classes, training accuracy "
              << fixlab::format_double(static_cast<double>(correct) /
                                       static_cast<double>(samples.size()))
              << "\n";
}

void run_eval(const Opts& o) {
    const fixlab::ExperimentConfig cfg = make_experiment_config(o);
    ProvBuilder pb = classification_prov("eval", o);
    pb.add("reps", o.reps);
    const fixlab::Provenance prov = pb.make(o.seed);
    size_t skipped_label = 0;
    const fixlab::ClassificationDataset cds =
        build_classification(o, fixlab::strategy_uses_fixations(cfg.strategy), &skipped_label);
    const fixlab::EvalReport rep = fixlab::run_experiment(cds, cfg);

    std::string csv = prov.csv_header();
    csv += "strategy";
    for (const auto& [label, acc] : rep.per_class_accuracy) csv += ',' + label;
    csv += ",avg\n";
    csv += o.strategy;
    for (const auto& [label, acc] : rep.per_class_accuracy) csv += ',' + pm_cell(acc);
    csv += ',' + pm_cell(rep.average_accuracy) + '\n';
    fixlab::write_file_atomic(out_path(o, "eval_" + o.strategy + ".csv"), csv);

    json per_class = json::object();
    for (const auto& [label, acc] : rep.per_class_accuracy)
        per_class[label] = {{"mean", acc.mean}, {"std", acc.std}, {"n", acc.n}};
    const json doc = {{"provenance", prov_json(prov)},
                      {"strategy", o.strategy},
                      {"repetitions", rep.repetitions},
                      {"per_class", per_class},
                      {"average", {{"mean", rep.average_accuracy.mean},
                                   {"std", rep.average_accuracy.std},
                                   {"n", rep.average_accuracy.n}}},
                      {"pooled", {{"mean", rep.pooled_accuracy.mean},
                                  {"std", rep.pooled_accuracy.std},
                                  {"n", rep.pooled_accuracy.n}}},
                      {"images", cds.images.size()},
                      {"skipped_not_single_class", skipped_label},
                      {"config",
                       {{"condition", o.condition},
                        {"dict_size", o.dict_size},
                        {"dict_pool", o.dict_pool},
                        {"dict_iters", o.dict_iters},
                        {"lambda1", o.lambda1},
                        {"window_px", o.window_px},
                        {"c_reg", o.c_reg},
                        {"epochs", o.epochs},
                        {"fallback_pyramid", o.fallback_pyramid},
                        {"seed", o.seed}}}};
    fixlab::write_file_atomic(out_path(o, "eval_" + o.strategy + ".json"), doc.dump(2) + "\n");
    std::cout << "eval " << o.strategy << ": avg " << pm_cell(rep.average_accuracy) << ", pooled "
              << pm_cell(rep.pooled_accuracy) << " over " << rep.repetitions << " repetitions\n";
}

// ------------------------------------------------------------------ report

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(item);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

// Renders one of our own CSV files (comment lines skipped) as a markdown
// table; nullopt when the file is absent or has no data rows.
std::optional<std::string> table_from_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) return std::nullopt;
    std::string line;
    std::vector<std::vector<std::string>> rows;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        rows.push_back(split_csv_line(line));
    }
    if (rows.size() < 2) return std::nullopt;
    std::string md;
    for (size_t r = 0; r < rows.size(); ++r) {
        md += '|';
        for (const std::string& cell : rows[r]) md += ' ' + cell + " |";
        md += '\n';
        if (r == 0) {
            md += '|';
            for (size_t c = 0; c < rows[0].size(); ++c) md += " --- |";
            md += '\n';
        }
    }
    return md;
}

void run_report(const Opts& o) {
    const fixlab::Provenance prov = ProvBuilder("report").add("seed", o.seed).make(o.seed);
    const fs::path dir(o.out);
    std::string md = "# fixlab report\n\n";
    md += "- config hash: `" + hash_hex(prov.hash) + "`\n";
    md += "- seed: " + std::to_string(prov.seed) + "\n";
    md += "- version: " + std::string(fixlab::kVersion) + "\n";
    size_t sections = 0;

    {
        std::ifstream in(dir / "ingest_summary.json");
        if (in) {
            const json j = json::parse(in);
            md += "\n## Ingestion\n\n";
            md += "- images: " + j.at("images").dump() + "\n";
            md += "- scanpaths: " + j.at("scanpaths").dump() + " (fv " + j.at("scanpaths_fv").dump() +
                  ", vs " + j.at("scanpaths_vs").dump() + ")\n";
            md += "- fixations kept: " + j.at("kept_fixations").dump() + " of " +
                  j.at("raw_fixations").dump() + "\n";
            md += "- empty scanpaths after preprocessing: " + j.at("empty_scanpaths").dump() + "\n";
            ++sections;
        }
    }
    if (const auto t = table_from_csv(dir / "stats_summary.csv")) {
        md += "\n## Gaze statistics\n\n" + *t;
        ++sections;
    }
    {
        std::ifstream in(dir / "stats_tests.json");
        if (in) {
            const json j = json::parse(in);
            md += "\n## Condition contrasts (Welch t)\n\n";
            md += "| metric | t | df | p | n (fv/vs) |\n| --- | --- | --- | --- | --- |\n";
            for (const json& rec : j.at("tests")) {
                md += "| " + rec.at("metric").get<std::string>() + " | ";
                if (rec.contains("t")) {
                    md += fixlab::format_double(rec.at("t").get<double>()) + " | " +
                          fixlab::format_double(rec.at("df").get<double>()) + " | " +
                          fixlab::format_double(rec.at("p").get<double>()) + " | ";
                } else if (rec.contains("degenerate")) {
                    md += "degenerate | | | ";
                } else {
                    md += "skipped | | | ";
                }
                md += rec.at("n_fv").dump() + "/" + rec.at("n_vs").dump() + " |\n";
            }
            ++sections;
        }
    }
    if (const auto t = table_from_csv(dir / "rqa_summary.csv")) {
        md += "\n## Recurrence analysis\n\n" + *t;
        ++sections;
    }
    if (const auto t = table_from_csv(dir / "multimatch_summary.csv")) {
        md += "\n## Scan-path similarity\n\n" + *t;
        ++sections;
    }
    if (const auto t = table_from_csv(dir / "density_index.csv")) {
        size_t maps = 0;
        for (char c : *t)
            if (c == '\n') ++maps;
        md += "\n## Fixation density maps\n\n" + std::to_string(maps - 2) +
              " maps under `density/`.\n";
        ++sections;
    }
    {
        std::vector<fs::path> evals;
        if (fs::is_directory(dir))
            for (const auto& entry : fs::directory_iterator(dir)) {
                const std::string name = entry.path().filename().string();
                if (name.rfind("eval_", 0) == 0 && entry.path().extension() == ".json")
                    evals.push_back(entry.path());
            }
        std::sort(evals.begin(), evals.end());
        if (!evals.empty()) {
            std::set<std::string> labels;
            std::vector<json> docs;
            for (const fs::path& p : evals) {
                std::ifstream in(p);
                docs.push_back(json::parse(in));
                for (const auto& [label, acc] : docs.back().at("per_class").items())
                    labels.insert(label);
            }
            md += "\n## Classification accuracy\n\n| strategy |";
            for (const std::string& label : labels) md += ' ' + label + " |";
            md += " avg | pooled |\n| --- |";
            for (size_t i = 0; i < labels.size() + 2; ++i) md += " --- |";
            md += '\n';
            auto cell = [](const json& number) {
                fixlab::MeanStd m;
                m.mean = number.at("mean").get<double>();
                m.std = number.at("std").get<double>();
                return pm_cell(m);
            };
            for (const json& doc : docs) {
                md += "| " + doc.at("strategy").get<std::string>() + " |";
                for (const std::string& label : labels) {
                    md += ' ';
                    if (doc.at("per_class").contains(label))
                        md += cell(doc.at("per_class").at(label));
                    md += " |";
                }
                md += ' ' + cell(doc.at("average")) + " | " + cell(doc.at("pooled")) + " |\n";
            }
            ++sections;
        }
    }
    if (sections == 0) md += "\nNo analysis outputs found under `" + o.out + "`.\n";
    fixlab::write_file_atomic(out_path(o, "report.md"), md);
    std::cout << "report: " << sections << " sections -> "
              << (fs::path(o.out) / "report.md").string() << "\n";
}

// Flat `key = value` config files seed any option the command line left
// unset.  Problems inside the file are input errors, not usage errors.
void apply_config_file(CLI::App& cmd, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw fixlab::ValidationError("config file '" + path + "' is unreadable");
    const auto trim = [](const std::string& s) {
        const size_t b = s.find_first_not_of(" \t\r\n");
        if (b == std::string::npos) return std::string();
        return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
    };
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string entry = trim(line);
        if (entry.empty() || entry[0] == '#' || entry[0] == ';') continue;
        const std::string where = "config " + path + ':' + std::to_string(line_no);
        const size_t eq = entry.find('=');
        if (eq == std::string::npos)
            throw fixlab::ValidationError(where + ": expected key = value");
        const std::string key = trim(entry.substr(0, eq));
        std::string value = trim(entry.substr(eq + 1));
        if (key.empty()) throw fixlab::ValidationError(where + ": missing key");
        if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'') &&
            value.back() == value.front())
            value = value.substr(1, value.size() - 2);
        if (key == "config")
            throw fixlab::ValidationError(where + ": config files cannot nest");
        CLI::Option* opt = cmd.get_option_no_throw("--" + key);
        if (opt == nullptr)
            throw fixlab::ValidationError(where + ": unknown key '" + key +
                                          "' for subcommand '" + cmd.get_name() + "'");
        if (opt->count() > 0) continue; // explicit flag wins
        try {
            if (opt->get_expected_min() == 0) { // flag: accept true/false spellings
                errno = 0;
                const std::int64_t truthy = CLI::detail::to_flag_value(value);
                if (errno != 0)
                    throw fixlab::ValidationError("expected a boolean, got '" + value + "'");
                opt->add_result(truthy > 0 ? "true" : "false");
            } else {
                opt->add_result(value);
            }
            opt->run_callback();
        } catch (const std::exception& e) {
            throw fixlab::ValidationError(where + ": key '" + key + "': " + e.what());
        }
    }
}

} // namespace

int main(int argc, char** argv) {
    Opts o;
    std::string config_path;
    CLI::App app{"fixlab: gaze analysis and fixation-guided image classification"};
    app.require_subcommand(1);
    app.set_version_flag("--version", fixlab::kVersion);
    std::function<void(const Opts&)> run;

    // Required inputs may come from the flag or from --config, so they are
    // enforced after the config file has been applied, not by the parser.
    std::map<const CLI::App*, std::vector<CLI::Option*>> required;
    const auto need = [&required](CLI::App* s, CLI::Option* op) {
        op->description(op->get_description() + " (required)");
        required[s].push_back(op);
    };

    const auto add_common = [&](CLI::App* s) {
        s->add_option("--out", o.out, "output directory (default: $FIXLAB_OUT or .)")
            ->capture_default_str();
        s->add_option("--seed", o.seed, "seed for every stochastic step")->capture_default_str();
        s->add_option("--jobs", o.jobs, "worker threads (0 = all processors)")
            ->capture_default_str();
        s->add_option("--config", config_path,
                      "flat key=value file; command-line flags override it")
            ->check(CLI::ExistingFile);
    };
    const auto add_gaze = [&](CLI::App* s, bool required_inputs) {
        auto* fx = s->add_option("--fixations", o.fixations, "fixation log CSV")
                       ->check(CLI::ExistingFile);
        auto* an = s->add_option("--annotations", o.annotations, "image annotation JSON")
                       ->check(CLI::ExistingFile);
        if (required_inputs) {
            need(s, fx);
            need(s, an);
        }
        s->add_option("--image-ids", o.image_ids, "comma-separated image id filter");
    };
    const auto add_condition = [&](CLI::App* s) {
        s->add_option("--condition", o.condition, "viewing condition filter")
            ->check(CLI::IsMember({"fv", "vs", "both"}))
            ->capture_default_str();
    };
    const auto add_geometry = [&](CLI::App* s) {
        s->add_option("--distance-cm", o.geom.viewing_distance_cm, "viewing distance")
            ->capture_default_str();
        s->add_option("--screen-width-cm", o.geom.screen_width_cm, "screen width")
            ->capture_default_str();
        s->add_option("--screen-height-cm", o.geom.screen_height_cm, "screen height")
            ->capture_default_str();
        s->add_option("--resolution-x", o.geom.resolution_x, "horizontal resolution in px")
            ->capture_default_str();
        s->add_option("--resolution-y", o.geom.resolution_y, "vertical resolution in px")
            ->capture_default_str();
    };
    const auto add_coding = [&](CLI::App* s) {
        s->add_option("--lambda1", o.lambda1, "sparsity weight")->capture_default_str();
        s->add_option("--dict-size", o.dict_size, "dictionary codewords")->capture_default_str();
        s->add_option("--dict-iters", o.dict_iters, "dictionary learning alternations")
            ->capture_default_str();
        s->add_option("--dict-pool", o.dict_pool, "descriptors sampled for learning")
            ->capture_default_str();
    };
    const auto add_classification = [&](CLI::App* s) {
        need(s, s->add_option("--descriptors", o.descriptors, "descriptor file")
                    ->check(CLI::ExistingFile));
        need(s, s->add_option("--annotations", o.annotations, "image annotation JSON")
                    ->check(CLI::ExistingFile));
        s->add_option("--fixations", o.fixations,
                      "fixation log CSV (needed by fixation strategies)")
            ->check(CLI::ExistingFile);
        s->add_option("--image-ids", o.image_ids, "comma-separated image id filter");
        s->add_option("--strategy", o.strategy, "pooling strategy")
            ->check(CLI::IsMember({"pyramid-max", "pyramid-avg", "fix-max", "fix-avg"}))
            ->capture_default_str();
        s->add_option("--window-px", o.window_px, "fixation window side length in px")
            ->capture_default_str();
        s->add_flag("--fallback-pyramid", o.fallback_pyramid,
                    "pool gaze-less images over the whole image instead of failing");
        s->add_option("--c-reg", o.c_reg, "SVM regularization C")->capture_default_str();
        s->add_option("--epochs", o.epochs, "SVM training epochs")->capture_default_str();
        add_condition(s);
        add_coding(s);
    };

    {
        auto* s = app.add_subcommand("ingest", "validate and preprocess a fixation log");
        add_gaze(s, true);
        add_common(s);
        s->callback([&] { run = run_ingest; });
    }
    {
        auto* s = app.add_subcommand("stats", "first-k fixation statistics per condition");
        add_gaze(s, true);
        add_condition(s);
        s->add_option("--k", o.k, "fixations considered per scanpath")->capture_default_str();
        add_common(s);
        s->callback([&] { run = run_stats; });
    }
    {
        auto* s = app.add_subcommand("density", "Gaussian fixation density maps per image");
        add_gaze(s, true);
        add_condition(s);
        s->add_option("--bandwidth-deg", o.bandwidth_deg, "kernel bandwidth in deg of visual angle")
            ->capture_default_str();
        s->add_flag("--duration-weighted", o.duration_weighted,
                    "weight each fixation by its duration");
        add_geometry(s);
        add_common(s);
        s->callback([&] { run = run_density; });
    }
    {
        auto* s = app.add_subcommand("multimatch", "pairwise scan-path similarity per image");
        add_gaze(s, true);
        add_condition(s);
        s->add_option("--pairing", o.pairing, "which scanpath pairs to compare")
            ->check(CLI::IsMember({"all", "cross"}))
            ->capture_default_str();
        s->add_option("--mm-amplitude-px", o.mm_amplitude_px,
                      "simplification amplitude threshold (negative = 10% of diagonal)")
            ->capture_default_str();
        s->add_option("--mm-direction-deg", o.mm_direction_deg,
                      "simplification direction threshold")
            ->capture_default_str();
        s->add_flag("--no-simplify", o.no_simplify, "skip scan-path simplification");
        add_geometry(s);
        add_common(s);
        s->callback([&] { run = run_multimatch; });
    }
    {
        auto* s = app.add_subcommand("rqa", "recurrence quantification per scanpath");
        add_gaze(s, true);
        add_condition(s);
        s->add_option("--radius-px", o.radius_px,
                      "recurrence radius in px (0 = 2 deg of visual angle)")
            ->capture_default_str();
        s->add_option("--min-line", o.min_line, "minimum line length L")->capture_default_str();
        add_geometry(s);
        add_common(s);
        s->callback([&] { run = run_rqa; });
    }
    {
        auto* s = app.add_subcommand("descriptors", "dense gradient descriptors for a PGM/PPM directory");
        need(s, s->add_option("--images", o.images, "image directory")
                    ->check(CLI::ExistingDirectory));
        s->add_option("--patch-size", o.grid.patch_size, "patch side length in px")
            ->capture_default_str();
        s->add_option("--stride", o.grid.stride, "grid stride in px")->capture_default_str();
        s->add_option("--cells", o.grid.cells, "histogram cells per patch side")
            ->capture_default_str();
        s->add_option("--orientations", o.grid.orientations, "orientation bins per cell")
            ->capture_default_str();
        add_common(s);
        s->callback([&] { run = run_descriptors; });
    }
    {
        auto* s = app.add_subcommand("dict-learn", "learn a sparse coding dictionary");
        need(s, s->add_option("--descriptors", o.descriptors, "descriptor file")
                    ->check(CLI::ExistingFile));
        add_coding(s);
        add_common(s);
        s->callback([&] { run = run_dict_learn; });
    }
    {
        auto* s = app.add_subcommand("encode", "sparse-code a descriptor file");
        need(s, s->add_option("--descriptors", o.descriptors, "descriptor file")
                    ->check(CLI::ExistingFile));
        need(s, s->add_option("--dictionary", o.dictionary, "dictionary file")
                    ->check(CLI::ExistingFile));
        s->add_option("--lambda1", o.lambda1, "sparsity weight")->capture_default_str();
        add_common(s);
        s->callback([&] { run = run_encode; });
    }
    {
        auto* s = app.add_subcommand("train", "learn a dictionary and train an SVM on all images");
        add_classification(s);
        add_common(s);
        s->callback([&] { run = run_train; });
    }
    {
        auto* s = app.add_subcommand("eval", "repeated split/train/test accuracy benchmark");
        add_classification(s);
        s->add_option("--reps", o.reps, "repetitions (fresh split each)")->capture_default_str();
        add_common(s);
        s->callback([&] { run = run_eval; });
    }
    {
        auto* s = app.add_subcommand("report", "merge analysis outputs into report.md");
        add_common(s);
        s->callback([&] { run = run_report; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    CLI::App* sub = app.get_subcommands().empty() ? nullptr : app.get_subcommands().front();
    if (sub != nullptr && !config_path.empty()) {
        try {
            apply_config_file(*sub, config_path);
        } catch (const std::exception& e) {
            std::cerr << "fixlab: error: " << e.what() << "\n";
            return 1;
        }
    }
    if (sub != nullptr) {
        for (CLI::Option* op : required[sub]) {
            if (op->count() == 0) {
                std::cerr << sub->get_name() << ": " << op->get_name()
                          << " is required (pass the flag or set it in --config)\n"
                          << "Run with --help for more information.\n";
                return 2;
            }
        }
    }
    try {
        fixlab::set_jobs(o.jobs);
        if (run) run(o);
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "fixlab: error: " << e.what() << "\n";
        return 1;
    }
}
