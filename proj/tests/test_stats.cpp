#include <doctest.h>

#include <cmath>

#include "fixlab/errors.hpp"
#include "fixlab/stats.hpp"
#include "support/fixtures.hpp"

using namespace fixlab;
using testsupport::box;
using testsupport::fx;
using testsupport::make_ann;
using testsupport::make_path;

namespace {

Dataset planted_dataset() {
    Dataset ds;
    ds.annotations["img"] = make_ann("img", 640, 480, {box("cat", 100, 100, 200, 200)});
    return ds;
}

} // namespace

TEST_CASE("sample mean and standard deviation use n-1") {
    const MeanStd m = mean_std({1.0, 2.0, 3.0});
    CHECK(m.mean == doctest::Approx(2.0));
    CHECK(m.std == doctest::Approx(1.0));
    CHECK(m.n == 3);
    CHECK(mean_std({5.0}).std == 0.0);
    CHECK(mean_std({}).n == 0);
}

TEST_CASE("first-k truncates and demands preprocessed input") {
    auto sp = make_path("img", "s", Condition::FreeViewing, {fx(1, 1), fx(2, 2), fx(3, 3)});
    CHECK(first_k_fixations(sp, 2).size() == 2);
    CHECK(first_k_fixations(sp, 9).size() == 3);
    CHECK_THROWS_AS(first_k_fixations(sp, 0), ValidationError);
    sp.preprocessed = false;
    CHECK_THROWS_AS(first_k_fixations(sp, 2), StateError);
}

TEST_CASE("exactly three of the first five fixations in-box gives 0.6") {
    const Dataset ds = planted_dataset();
    const auto& ann = ds.annotations.at("img");
    const auto sp = make_path("img", "s", Condition::FreeViewing,
                              {fx(150, 150), fx(10, 10), fx(120, 180), fx(300, 300), fx(200, 200),
                               fx(150, 150)}); // sixth in-box fixation must not count
    const auto p = in_box_proportion(sp, ann, 5);
    REQUIRE(p.has_value());
    CHECK(*p == doctest::Approx(0.6));
    CHECK_FALSE(in_box_proportion(make_path("img", "s", Condition::FreeViewing, {}), ann, 5)
                    .has_value());
}

TEST_CASE("overlapping boxes credit every containing target") {
    auto ann = make_ann("img", 640, 480,
                        {box("cat", 0, 0, 100, 100), box("dog", 50, 50, 150, 150)});
    const auto sp = make_path("img", "s", Condition::VisualSearch, {fx(75, 75)});
    const auto p = targets_fixated_proportion(sp, ann, 5);
    REQUIRE(p.has_value());
    CHECK(*p == doctest::Approx(1.0)); // one fixation inside both boxes
}

TEST_CASE("targets-fixated ignores fixations beyond the first k") {
    auto ann = make_ann("img", 640, 480,
                        {box("cat", 0, 0, 50, 50), box("dog", 300, 300, 400, 400)});
    const auto sp = make_path("img", "s", Condition::VisualSearch,
                              {fx(25, 25), fx(200, 200), fx(350, 350)});
    CHECK(*targets_fixated_proportion(sp, ann, 2) == doctest::Approx(0.5));
    CHECK(*targets_fixated_proportion(sp, ann, 3) == doctest::Approx(1.0));
    CHECK_FALSE(targets_fixated_proportion(sp, make_ann("img", 640, 480), 3).has_value());
}

TEST_CASE("saccadic latency is the planted onset reaching half the targets") {
    auto ann = make_ann("img", 640, 480,
                        {box("cat", 0, 0, 50, 50), box("dog", 100, 0, 150, 50),
                         box("bird", 200, 0, 250, 50), box("cow", 300, 0, 350, 50)});
    // 4 targets -> need ceil(4/2) = 2 distinct ones.
    const auto sp = make_path("img", "s", Condition::VisualSearch,
                              {fx(25, 25, 0.10), fx(25, 30, 0.35), fx(125, 25, 0.62),
                               fx(225, 25, 0.90)});
    const auto lat = saccadic_latency(sp, ann);
    REQUIRE(lat.has_value());
    CHECK(*lat == doctest::Approx(0.62)); // second distinct target, not first repeat
    // Never reaching half the targets yields no latency.
    const auto sp2 = make_path("img", "s", Condition::VisualSearch, {fx(25, 25, 0.1)});
    CHECK_FALSE(saccadic_latency(sp2, ann).has_value());
}

TEST_CASE("latency uses all fixations, not only the first k") {
    auto ann = make_ann("img", 640, 480,
                        {box("cat", 0, 0, 50, 50), box("dog", 100, 0, 150, 50)});
    std::vector<Fixation> fxs;
    for (int i = 0; i < 7; ++i) fxs.push_back(fx(500, 400, 0.2 * i));
    fxs.push_back(fx(25, 25, 1.4));  // 8th fixation hits target 1
    fxs.push_back(fx(125, 25, 1.6)); // 9th hits target 2 -> half of 2 is 1, reached at 1.4
    const auto sp = make_path("img", "s", Condition::VisualSearch, fxs);
    CHECK(*saccadic_latency(sp, ann) == doctest::Approx(1.4));
}

TEST_CASE("per-target fixation duration averages in-target fixations only") {
    const Dataset ds = planted_dataset();
    const auto& ann = ds.annotations.at("img");
    const auto sp = make_path("img", "s", Condition::FreeViewing,
                              {fx(150, 150, 0.0, 0.30), fx(10, 10, 0.5, 0.99),
                               fx(180, 120, 1.0, 0.10)});
    CHECK(*per_target_fixation_duration(sp, ann) == doctest::Approx(0.2));
    const auto sp2 = make_path("img", "s", Condition::FreeViewing, {fx(10, 10, 0.0, 0.5)});
    CHECK_FALSE(per_target_fixation_duration(sp2, ann).has_value());
}

TEST_CASE("identical fixations across conditions give identical summaries") {
    Dataset ds = planted_dataset();
    const std::vector<Fixation> fxs = {fx(150, 150, 0.0, 0.2), fx(10, 10, 0.4, 0.25),
                                       fx(120, 180, 0.9, 0.15)};
    ds.scanpaths.push_back(make_path("img", "s1", Condition::FreeViewing, fxs));
    ds.scanpaths.push_back(make_path("img", "s2", Condition::FreeViewing, fxs));
    ds.scanpaths.push_back(make_path("img", "s1", Condition::VisualSearch, fxs));
    ds.scanpaths.push_back(make_path("img", "s2", Condition::VisualSearch, fxs));
    const ConditionSummary a = summarize_condition(ds, Condition::FreeViewing, 5);
    const ConditionSummary b = summarize_condition(ds, Condition::VisualSearch, 5);
    CHECK(a.n == 2);
    CHECK(a.in_box_proportion.mean == b.in_box_proportion.mean);
    CHECK(a.targets_fixated_proportion.mean == b.targets_fixated_proportion.mean);
    CHECK(a.saccadic_latency.mean == b.saccadic_latency.mean);
    CHECK(a.per_target_fixation_duration.mean == b.per_target_fixation_duration.mean);
    CHECK(a.in_box_proportion.std == b.in_box_proportion.std);
}

TEST_CASE("condition samples skip empty paths, target-free images, absent metrics") {
    Dataset ds;
    ds.annotations["with"] = make_ann("with", 640, 480, {box("cat", 0, 0, 50, 50)});
    ds.annotations["without"] = make_ann("without", 640, 480, {box("chair", 0, 0, 50, 50)});
    ds.scanpaths.push_back(make_path("with", "s1", Condition::FreeViewing,
                                     {fx(25, 25, 0.1, 0.2), fx(300, 300, 0.5, 0.2)}));
    ds.scanpaths.push_back(make_path("with", "s2", Condition::FreeViewing,
                                     {fx(300, 300, 0.1, 0.2)})); // never in-box
    ds.scanpaths.push_back(make_path("with", "s3", Condition::FreeViewing, {}));
    ds.scanpaths.push_back(make_path("without", "s1", Condition::FreeViewing, {fx(25, 25)}));
    const ConditionSamples cs = collect_condition_samples(ds, Condition::FreeViewing, 5);
    CHECK(cs.n == 2);
    CHECK(cs.in_box_proportion.size() == 2);
    CHECK(cs.targets_fixated_proportion.size() == 2);
    CHECK(cs.saccadic_latency.size() == 1);              // s2 never reaches a target
    CHECK(cs.per_target_fixation_duration.size() == 1); // s2 has no in-target fixation
}

TEST_CASE("classwise in-box splits by the single present class") {
    Dataset ds;
    ds.annotations["cat_img"] = make_ann("cat_img", 640, 480, {box("cat", 0, 0, 100, 100)});
    ds.annotations["dog_img"] = make_ann("dog_img", 640, 480, {box("dog", 0, 0, 100, 100)});
    ds.annotations["multi"] = make_ann("multi", 640, 480,
                                       {box("cat", 0, 0, 50, 50), box("dog", 60, 60, 100, 100)});
    ds.scanpaths.push_back(make_path("cat_img", "s", Condition::FreeViewing, {fx(50, 50)}));
    ds.scanpaths.push_back(make_path("dog_img", "s", Condition::FreeViewing, {fx(500, 400)}));
    ds.scanpaths.push_back(make_path("multi", "s", Condition::FreeViewing, {fx(25, 25)}));
    const auto cw = classwise_in_box(ds, 5);
    REQUIRE(cw.count("cat") == 1);
    REQUIRE(cw.count("dog") == 1);
    CHECK(cw.size() == 2); // the two-class image contributes nowhere
    CHECK(cw.at("cat").at(Condition::FreeViewing).mean == doctest::Approx(1.0));
    CHECK(cw.at("dog").at(Condition::FreeViewing).mean == doctest::Approx(0.0));
}

TEST_CASE("per-fixation duration curve aggregates by index") {
    std::vector<ScanPath> paths;
    paths.push_back(make_path("img", "s1", Condition::FreeViewing,
                              {fx(1, 1, 0.0, 0.10), fx(2, 2, 0.5, 0.30)}));
    paths.push_back(make_path("img", "s2", Condition::FreeViewing, {fx(1, 1, 0.0, 0.20)}));
    const auto curve = per_fixation_duration_curve(paths, 8);
    REQUIRE(curve.size() == 2);
    CHECK(curve[0].mean == doctest::Approx(0.15));
    CHECK(curve[0].n == 2);
    CHECK(curve[1].mean == doctest::Approx(0.30));
    CHECK(curve[1].n == 1);
}

TEST_CASE("Welch t-test on identical samples gives t=0, p=1") {
    const std::vector<double> a = {0.3, 0.5, 0.7, 0.9};
    const TTestResult r = welch_t_test(a, a);
    CHECK(r.t_statistic == doctest::Approx(0.0));
    CHECK(r.p_value == doctest::Approx(1.0));
}

// Reference values computed with an arbitrary-precision implementation
// of the Welch statistic and the regularized-incomplete-beta t CDF.
TEST_CASE("Welch t-test matches the high-precision reference") {
    {
        const TTestResult r = welch_t_test({1, 2, 3}, {11, 12, 13});
        CHECK(r.t_statistic == doctest::Approx(-12.247448713915890491).epsilon(1e-12));
        CHECK(r.degrees_of_freedom == doctest::Approx(4.0).epsilon(1e-12));
        CHECK(r.p_value == doctest::Approx(2.552167494419267413e-4).epsilon(1e-6));
    }
    {
        const TTestResult r =
            welch_t_test({0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5}, {2.2, 2.9, 3.1, 4.4});
        CHECK(r.t_statistic == doctest::Approx(-1.871713455173666815).epsilon(1e-12));
        CHECK(r.degrees_of_freedom == doctest::Approx(7.3281077027461336519).epsilon(1e-12));
        CHECK(r.p_value == doctest::Approx(0.10153158344693412287).epsilon(1e-6));
    }
}

TEST_CASE("ten-sigma separation is highly significant") {
    std::vector<double> a, b;
    for (int i = 0; i < 10; ++i) {
        a.push_back(0.0 + 0.01 * i); // sd ~ 0.03
        b.push_back(1.0 + 0.01 * i);
    }
    const TTestResult r = welch_t_test(a, b);
    CHECK(r.p_value < 1e-6);
}

TEST_CASE("Welch t-test edge cases") {
    CHECK_THROWS_AS(welch_t_test({1.0}, {1.0, 2.0}), ValidationError);
    CHECK_THROWS_AS(welch_t_test({2.0, 2.0}, {2.0, 2.0}), DegenerateError);
    const TTestResult r = welch_t_test({2.0, 2.0}, {3.0, 3.0}); // zero variance, unequal means
    CHECK(std::isinf(r.t_statistic));
    CHECK(r.p_value == 0.0);
}
