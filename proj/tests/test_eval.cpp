#include <doctest.h>

#include <algorithm>
#include <sstream>

#include "dnsbot/error.hpp"
#include "dnsbot/eval.hpp"
#include "helpers.hpp"

using namespace dnsbot;
using dnsbot::testing::blobs;
using dnsbot::testing::make_dataset;

namespace {

ConfusionMatrix matrix(std::size_t tn, std::size_t fp, std::size_t fn, std::size_t tp) {
    ConfusionMatrix m;
    m.counts = {{{tn, fp}, {fn, tp}}};
    return m;
}

}  // namespace

TEST_SUITE("eval") {

TEST_CASE("metric arithmetic on a 90-row matrix") {
    auto r = report_from_confusion(matrix(85, 5, 5, 5));
    CHECK(r.accuracy == doctest::Approx(0.90));
    CHECK(r.malicious().precision == doctest::Approx(0.5));
    CHECK(r.malicious().recall == doctest::Approx(0.5));
    CHECK(r.malicious().f_score == doctest::Approx(0.5));
    CHECK(r.per_class[kBenign].precision == doctest::Approx(85.0 / 90.0));
    CHECK(r.per_class[kBenign].recall == doctest::Approx(85.0 / 90.0));
    CHECK(r.macro.f_score == doctest::Approx((0.5 + 85.0 / 90.0) / 2.0));
    CHECK(r.confusion.total() == 100);
}

TEST_CASE("perfect predictions") {
    auto r = report_from_confusion(matrix(40, 0, 0, 10));
    CHECK(r.accuracy == 1.0);
    for (const auto& c : r.per_class) {
        CHECK(c.precision == 1.0);
        CHECK(c.recall == 1.0);
        CHECK(c.f_score == 1.0);
    }
    CHECK(r.macro.f_score == 1.0);
}

TEST_CASE("all-benign predictor on 99:1 data has high accuracy and zero recall") {
    std::vector<int> truth(100, kBenign), pred(100, kBenign);
    truth[17] = kMalicious;
    auto m = confusion_from(truth, pred);
    auto r = report_from_confusion(m);
    CHECK(r.accuracy == doctest::Approx(0.99));
    CHECK(r.malicious().recall == 0.0);
    CHECK(r.malicious().precision == 0.0);
    CHECK(r.malicious().f_score == 0.0);
    CHECK(macro_f_score(truth, pred) == doctest::Approx(r.macro.f_score));
}

TEST_CASE("confusion rows are truth and columns are predictions") {
    std::vector<int> truth{0, 0, 1, 1, 1}, pred{0, 1, 0, 1, 1};
    auto m = confusion_from(truth, pred);
    CHECK(m == matrix(1, 1, 1, 2));
    CHECK(m.correct() == 3);
    CHECK_THROWS_AS(confusion_from(truth, std::vector<int>{0}), InvalidArgument);
}

TEST_CASE("per-class recall does not depend on row order") {
    std::vector<int> truth{0, 1, 1, 0, 1, 0, 0}, pred{0, 1, 0, 0, 1, 1, 0};
    auto a = report_from_confusion(confusion_from(truth, pred));
    std::reverse(truth.begin(), truth.end());
    std::reverse(pred.begin(), pred.end());
    auto b = report_from_confusion(confusion_from(truth, pred));
    CHECK(a.per_class[0].recall == b.per_class[0].recall);
    CHECK(a.per_class[1].recall == b.per_class[1].recall);
}

TEST_CASE("evaluate scores raw rows with the stored normalization") {
    auto d = blobs(40, 2, 3.0, 2);
    HyperParams p;
    p.n_trees = 5;
    auto model = train_forest(d, p, 1);
    model.normalization = {d.feature_names, {0, 0}, {1, 1}};
    auto r = evaluate(model, d);
    CHECK(r.confusion.total() == 80);
    CHECK(r.accuracy >= 0.95);

    // Shift the raw data and store the matching normalization: same result.
    auto shifted = d;
    for (auto& v : shifted.values) v = v * 2.0 + 10.0;
    auto m2 = model;
    m2.normalization = {d.feature_names, {10, 10}, {2, 2}};
    CHECK(evaluate(m2, shifted).confusion == r.confusion);

    CHECK_THROWS_AS(evaluate(model, make_dataset({{1, 2}})), InvalidArgument);
    auto renamed = d;
    renamed.feature_names = {"x", "y"};
    CHECK_THROWS(evaluate(model, renamed));
}

TEST_CASE("report printing and CSV") {
    auto r = report_from_confusion(matrix(85, 5, 5, 5));
    std::ostringstream text, csv;
    print_report(r, text);
    write_report_csv(r, csv);
    CHECK(text.str().find("accuracy") != std::string::npos);
    CHECK(csv.str().find("accuracy,0.9") != std::string::npos);
    CHECK(csv.str().find("malicious_recall,0.5") != std::string::npos);
}

}
