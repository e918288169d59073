#include <doctest.h>

#include <algorithm>
#include <sstream>

#include "dnsbot/config.hpp"

using namespace dnsbot;

namespace {

RunConfig parse(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

std::vector<std::string> problems_of(const std::string& text) {
    try {
        parse(text);
    } catch (const ConfigError& e) {
        return e.problems();
    }
    return {};
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("empty text yields the defaults") {
    CHECK(parse("") == RunConfig{});
    CHECK(validate(RunConfig{}).empty());
}

TEST_CASE("checked-in default config equals the built-in defaults") {
    CHECK(load_config_file(std::string(DNSBOT_SOURCE_DIR) + "/config/default.conf") == RunConfig{});
}

TEST_CASE("assignments, comments and whitespace") {
    auto c = parse(
        "# comment\n"
        "  seed = 7   # trailing\n"
        "\n"
        "forest.max_depth = 12\n"
        "forest.feature_subsample = log2\n"
        "ga.grid.max_depth = 4, unlimited\n"
        "synth.n_malicious_hosts = 3\n");
    CHECK(c.seed == 7);
    CHECK(c.forest.max_depth == std::optional<std::size_t>(12));
    CHECK(c.forest.feature_subsample == FeatureSubsample::log2);
    CHECK(c.ga.grids.max_depth == std::vector<std::optional<std::size_t>>{4, std::nullopt});
    CHECK(c.synth.n_malicious_hosts == 3);
}

TEST_CASE("write then parse is the identity") {
    RunConfig c;
    c.seed = 99;
    c.forest.max_depth = 8;
    c.forest.n_trees = 25;
    c.select.k = 5;
    c.ga.grids.n_trees = {3, 4};
    c.synth.botnet_failure_rate = 0.125;
    c.paths.dataset = "data.csv";
    std::stringstream buf;
    write_config(c, buf);
    CHECK(parse_config(buf) == c);
}

TEST_CASE("every key is written") {
    std::ostringstream out;
    write_config(RunConfig{}, out);
    for (const auto& k : config_keys()) CHECK(out.str().find(k + " =") != std::string::npos);
}

TEST_CASE("every problem is listed with its line") {
    auto problems = problems_of("seed = x\nno_equals\nunknown.key = 1\nsplit.test_fraction = 1.5\n");
    REQUIRE(problems.size() == 4);
    CHECK(problems[0].rfind("line 1", 0) == 0);
    CHECK(problems[1].rfind("line 2", 0) == 0);
    CHECK(problems[2].rfind("line 3", 0) == 0);
    CHECK(problems[3].find("test_fraction") != std::string::npos);
}

TEST_CASE("range checks") {
    RunConfig c;
    c.smote.target_ratio = 0;
    c.forest.min_samples_split = 1;
    c.ga.elitism_count = 20;
    c.synth.n_benign_hosts = 0;
    auto errs = validate(c);
    auto has = [&](const std::string& s) {
        return std::any_of(errs.begin(), errs.end(), [&](const auto& e) { return e.find(s) != std::string::npos; });
    };
    CHECK(has("smote.target_ratio"));
    CHECK(has("forest.min_samples_split"));
    CHECK(has("elitism_count"));
    CHECK(has("n_benign_hosts"));
}

TEST_CASE("single assignments") {
    RunConfig c;
    CHECK(set_config_value(c, "select.k", "4").empty());
    CHECK(c.select.k == 4);
    CHECK_FALSE(set_config_value(c, "select.k", "-1").empty());
    CHECK_FALSE(set_config_value(c, "nope", "1").empty());
    CHECK_FALSE(set_config_value(c, "forest.feature_subsample", "half").empty());
}

TEST_CASE("forest params block") {
    HyperParams p;
    p.n_trees = 50;
    p.max_depth = 8;
    std::ostringstream out;
    write_forest_params(p, out);
    CHECK(parse(out.str()).forest == p);
}

TEST_CASE("missing file is a config error") {
    CHECK_THROWS_AS(load_config_file("/nonexistent/file.conf"), ConfigError);
}

}
