#include <doctest.h>

#include <cmath>
#include <map>
#include <sstream>

#include "dnsbot/error.hpp"
#include "dnsbot/features.hpp"
#include "dnsbot/select.hpp"
#include "helpers.hpp"

using namespace dnsbot;
using dnsbot::testing::make_dataset;

namespace {

// Mutual information from the joint table of (bin, label) counts.
double joint_table_gain(const std::vector<std::size_t>& bins, const std::vector<int>& labels) {
    std::map<std::pair<std::size_t, int>, double> joint;
    std::map<std::size_t, double> pb;
    std::map<int, double> py;
    const double m = static_cast<double>(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        joint[{bins[i], labels[i]}] += 1.0 / m;
        pb[bins[i]] += 1.0 / m;
        py[labels[i]] += 1.0 / m;
    }
    double mi = 0.0;
    for (const auto& [key, p] : joint) mi += p * std::log2(p / (pb[key.first] * py[key.second]));
    return mi;
}

}  // namespace

TEST_SUITE("select") {

TEST_CASE("label entropy") {
    CHECK(label_entropy(std::vector<int>{0, 0, 1, 1}) == doctest::Approx(1.0));
    CHECK(label_entropy(std::vector<int>{0, 0, 0, 0}) == 0.0);
    CHECK(label_entropy(std::vector<int>{0, 0, 0, 1}) == doctest::Approx(0.811278).epsilon(1e-6));
    CHECK_THROWS_AS(label_entropy(std::vector<int>{}), InvalidArgument);
}

TEST_CASE("information gain examples") {
    std::vector<int> y{0, 0, 1, 1};
    CHECK(information_gain(std::vector<double>{1, 2, 3, 4}, y, 2) == doctest::Approx(1.0));
    CHECK(information_gain(std::vector<double>{7, 7, 7, 7}, y, 4) == 0.0);
    std::vector<int> skew{0, 1, 0, 0, 1, 0};
    std::vector<double> same{0, 1, 0, 0, 1, 0};
    CHECK(information_gain(same, skew, 2) == doctest::Approx(label_entropy(skew)));
    CHECK_THROWS_AS(information_gain(std::vector<double>{1, 2}, y, 2), InvalidArgument);
}

TEST_CASE("equal-frequency bins use order-statistic edges with duplicates merged") {
    CHECK(equal_frequency_bins(std::vector<double>{4, 1, 3, 2}, 2) == std::vector<std::size_t>{1, 0, 1, 0});
    CHECK(equal_frequency_bins(std::vector<double>{5, 5, 5}, 3) == std::vector<std::size_t>{0, 0, 0});
    auto b = equal_frequency_bins(std::vector<double>{1, 1, 1, 1, 2, 3}, 3);
    CHECK(b == std::vector<std::size_t>{0, 0, 0, 0, 1, 1});
}

TEST_CASE("gain matches the joint-table definition and stays within bounds") {
    Rng rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t m = 2 + rng.index(40);
        const std::size_t bins = 1 + rng.index(6);
        std::vector<double> col(m);
        std::vector<int> y(m);
        for (std::size_t i = 0; i < m; ++i) {
            col[i] = static_cast<double>(rng.index(8));
            y[i] = static_cast<int>(rng.index(2));
        }
        const double ig = information_gain(col, y, bins);
        CHECK(ig == doctest::Approx(joint_table_gain(equal_frequency_bins(col, bins), y)).epsilon(1e-12));
        CHECK(ig >= 0.0);
        CHECK(ig <= label_entropy(y) + 1e-12);
    }
}

TEST_CASE("strictly increasing transforms leave gain unchanged") {
    Rng rng(9);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> col(30), expd(30);
        std::vector<int> y(30);
        for (std::size_t i = 0; i < 30; ++i) {
            col[i] = rng.uniform(-3, 3);
            expd[i] = std::exp(col[i]);
            y[i] = static_cast<int>(rng.index(2));
        }
        CHECK(information_gain(col, y, 5) == information_gain(expd, y, 5));
    }
}

TEST_CASE("ranking puts the determining feature first and the constant last") {
    auto d = make_dataset({{0, 3, 1}, {0, 3, 2}, {0, 3, 4}, {1, 3, 3}, {1, 3, 5}, {1, 3, 6}}, {0, 0, 0, 1, 1, 1});
    auto r = rank_features(d, 2);
    REQUIRE(r.entries.size() == 3);
    CHECK(r.entries[0].name == "f0");
    CHECK(r.entries[0].gain_bits == doctest::Approx(1.0));
    CHECK(r.entries[1].gain_bits > 0.0);
    CHECK(r.entries[2].name == "f1");
    CHECK(r.entries[2].gain_bits == 0.0);
}

TEST_CASE("equal gains keep column order") {
    auto d = make_dataset({{1, 0, 1}, {2, 0, 2}, {3, 0, 3}, {4, 0, 4}}, {0, 0, 1, 1});
    auto r = rank_features(d, 2);
    CHECK(r.entries[0].gain_bits == r.entries[1].gain_bits);
    CHECK(r.top_names(3) == std::vector<std::string>{"f0", "f2", "f1"});
}

TEST_CASE("four-row ranking matches per-column recomputation") {
    auto d = make_dataset({{1, 9, 4}, {2, 8, 4}, {3, 1, 5}, {4, 7, 6}}, {0, 1, 1, 1});
    auto r = rank_features(d, 2);
    for (const auto& e : r.entries) {
        const auto c = *d.column_index(e.name);
        CHECK(e.gain_bits == doctest::Approx(joint_table_gain(equal_frequency_bins(d.column(c), 2), *d.labels)));
    }
    for (std::size_t i = 1; i < r.entries.size(); ++i) CHECK(r.entries[i - 1].gain_bits >= r.entries[i].gain_bits);
}

TEST_CASE("row order does not change the ranking") {
    Rng rng(13);
    std::vector<std::vector<double>> rows;
    std::vector<int> y;
    for (int i = 0; i < 60; ++i) {
        y.push_back(static_cast<int>(rng.index(2)));
        rows.push_back({rng.uniform01() + y.back(), rng.uniform01(), static_cast<double>(rng.index(3))});
    }
    auto d = make_dataset(rows, y);
    std::vector<std::size_t> perm(60);
    for (std::size_t i = 0; i < 60; ++i) perm[i] = i;
    for (std::size_t i = 60; i > 1; --i) std::swap(perm[i - 1], perm[rng.index(i)]);
    CHECK(rank_features(d, 10) == rank_features(take_rows(d, perm), 10));
}

TEST_CASE("top-k keeps ranking order") {
    std::vector<std::vector<double>> rows;
    std::vector<int> y;
    Rng rng(3);
    for (int i = 0; i < 40; ++i) {
        y.push_back(i % 2);
        std::vector<double> row(kFeatureCount);
        for (std::size_t c = 0; c < kFeatureCount; ++c) row[c] = rng.uniform01() + (c < 12 ? 0.1 * static_cast<double>(c) * y.back() : 0.0);
        rows.push_back(row);
    }
    auto d = make_dataset(rows, y);
    auto r = rank_features(d, 10);
    auto top10 = select_top_k(d, r, 10);
    CHECK(top10.cols() == 10);
    CHECK(1.0 - 10.0 / 25.0 == doctest::Approx(0.6));
    CHECK(top10.feature_names == r.top_names(10));
    CHECK(top10.row_keys == d.row_keys);
    CHECK(top10.labels == d.labels);
    CHECK(select_top_k(d, r, 1).feature_names == std::vector<std::string>{r.entries[0].name});
    CHECK(select_top_k(d, r, 25).cols() == 25);
    CHECK_THROWS_AS(select_top_k(d, r, 0), InvalidArgument);
    CHECK_THROWS_AS(select_top_k(d, r, 26), InvalidArgument);
}

TEST_CASE("ranking CSV") {
    FeatureRanking r{{{"a", 0.5}, {"b", 0.25}}};
    std::ostringstream out;
    write_ranking(r, out);
    CHECK(out.str() == "feature,gain_bits\na,0.5\nb,0.25\n");
}

TEST_CASE("unlabeled data cannot be ranked") {
    CHECK_THROWS_AS(rank_features(make_dataset({{1}, {2}}), 2), InvalidArgument);
}

}
