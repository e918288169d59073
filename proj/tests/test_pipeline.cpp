#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "dnsbot/features.hpp"
#include "dnsbot/ingest.hpp"
#include "dnsbot/pipeline.hpp"
#include "dnsbot/synth.hpp"

using namespace dnsbot;

namespace {

RunConfig quick_config() {
    RunConfig c;
    c.synth.n_benign_hosts = 400;
    c.synth.n_malicious_hosts = 20;
    c.ga.population_size = 4;
    c.ga.generations = 2;
    c.ga.cv_folds = 3;
    c.ga.fitness_sample_rows = 200;
    c.ga.grids.n_trees = {5, 10};
    return c;
}

Dataset synthetic_dataset(const RunConfig& c) {
    std::stringstream log, labels;
    generate(c.synth, log, labels);
    auto lab = load_label_sidecar(labels);
    return featurize(aggregate_windows(parse_query_log(log), c.window_length), &lab);
}

}  // namespace

TEST_SUITE("pipeline") {

TEST_CASE("stratified split keeps class shares and covers every row once") {
    std::vector<int> y(100, kBenign);
    for (int i = 0; i < 10; ++i) y[i * 7] = kMalicious;
    auto s = stratified_split(y, 0.3, 5);
    CHECK(s.test.size() == 30);
    CHECK(s.train.size() == 70);
    std::size_t mal_test = 0;
    for (auto i : s.test) mal_test += y[i] == kMalicious;
    CHECK(mal_test == 3);
    std::set<std::size_t> all(s.train.begin(), s.train.end());
    all.insert(s.test.begin(), s.test.end());
    CHECK(all.size() == 100);
    CHECK_THROWS_AS(stratified_split(y, 1.5, 5), InvalidArgument);
}

TEST_CASE("optimized run keeps test rows out of every fitting stage") {
    const auto c = quick_config();
    const auto d = synthetic_dataset(c);
    auto r = run_pipeline(d, c);
    CHECK(r.audit.test.size() == r.split.test.size());
    CHECK_FALSE(r.audit.smote.empty());
    CHECK_FALSE(r.audit.ranking.empty());
    CHECK_FALSE(r.audit.fitness.empty());
    CHECK(r.audit.leaked().empty());
    CHECK(r.features_in == 25);
    CHECK(r.features_out == 10);
    CHECK(r.feature_reduction() == doctest::Approx(0.6));
    CHECK(r.model.feature_names == r.ranking->top_names(10));
    CHECK(r.tuning->history.size() == 2);
    CHECK(r.report.confusion.total() == r.split.test.size());
}

TEST_CASE("baseline keeps every feature and skips tuning") {
    const auto c = quick_config();
    const auto d = synthetic_dataset(c);
    auto r = run_pipeline(d, c, {true});
    CHECK(r.features_out == 25);
    CHECK_FALSE(r.ranking.has_value());
    CHECK_FALSE(r.tuning.has_value());
    CHECK(r.model.params == default_forest_params());
    CHECK(r.audit.smote.empty());
    CHECK(r.audit.leaked().empty());
}

TEST_CASE("an injected leak is detected") {
    PipelineAudit a;
    a.test = {{"h1", 0}};
    a.smote = {{"h1", 0}, {"h2", 0}};
    CHECK(a.leaked() == std::set<RowKey>{{"h1", 0}});
}

TEST_CASE("runs are deterministic and artifacts are written") {
    const auto c = quick_config();
    const auto d = synthetic_dataset(c);
    auto a = run_pipeline(d, c);
    auto b = run_pipeline(d, c);
    CHECK(a.model == b.model);
    CHECK(a.report.confusion == b.report.confusion);

    const auto dir = std::filesystem::temp_directory_path() / "dnsbot_pipeline_test";
    std::filesystem::remove_all(dir);
    write_artifacts(a, d, c, dir.string());
    for (const char* f : {"config.conf", "split.csv", "ranking.csv", "history.csv", "best_params.conf", "model.json",
                          "report.txt", "report.csv"}) {
        CHECK(std::filesystem::exists(dir / f));
    }
    std::ifstream model(dir / "model.json");
    CHECK(load_model(model) == a.model);
    std::filesystem::remove_all(dir);
}

TEST_CASE("invalid configs and unlabeled data are rejected") {
    auto c = quick_config();
    const auto d = synthetic_dataset(c);
    auto unlabeled = d;
    unlabeled.labels.reset();
    CHECK_THROWS_AS(run_pipeline(unlabeled, c), InvalidArgument);
    c.split.test_fraction = 1.5;
    CHECK_THROWS_AS(run_pipeline(d, c), ConfigError);
}

}
