#include <doctest.h>

#include <cmath>
#include <sstream>

#include "dnsbot/error.hpp"
#include "dnsbot/eval.hpp"
#include "helpers.hpp"

using namespace dnsbot;
using dnsbot::testing::make_dataset;

namespace {

double variance(const PcaResult& p, std::size_t comp) {
    double mean = 0, sq = 0;
    for (const auto& row : p.projections) mean += row[comp];
    mean /= static_cast<double>(p.projections.size());
    for (const auto& row : p.projections) sq += (row[comp] - mean) * (row[comp] - mean);
    return sq / static_cast<double>(p.projections.size());
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

Dataset anisotropic(std::size_t m, std::uint64_t seed) {
    Rng rng(seed);
    auto gauss = [&] {
        return std::sqrt(-2.0 * std::log(1.0 - rng.uniform01())) * std::cos(6.283185307179586 * rng.uniform01());
    };
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < m; ++i) rows.push_back({3.0 * gauss(), gauss()});
    return make_dataset(rows);
}

}  // namespace

TEST_SUITE("pca") {

TEST_CASE("rank-one data has no second-component variance") {
    std::vector<std::vector<double>> rows;
    for (int i = -10; i <= 10; ++i) rows.push_back({double(i), 2.0 * i});
    auto p = pca_project(make_dataset(rows));
    CHECK(variance(p, 1) < 1e-9);
    CHECK(std::abs(p.components[0][1] / p.components[0][0] - 2.0) < 1e-9);
}

TEST_CASE("the first axis follows the larger spread") {
    auto d = anisotropic(20000, 3);
    auto p = pca_project(d);
    // Oracle: the eigenvector of the sample covariance, from the closed-form 2x2 solution.
    const auto x = d.column(0), y = d.column(1);
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
    mx /= double(x.size());
    my /= double(y.size());
    double sxx = 0, syy = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    const double analytic = 0.5 * std::atan2(2.0 * sxy, sxx - syy);
    double angle = std::atan2(p.components[0][1], p.components[0][0]);
    CHECK(std::abs(angle - analytic) < 1e-3);
    CHECK(std::abs(angle) < 0.05);
}

TEST_CASE("components are orthonormal and ordered by variance") {
    Rng rng(5);
    std::vector<std::vector<double>> rows;
    for (int i = 0; i < 300; ++i) {
        const double a = rng.uniform(-1, 1), b = rng.uniform(-1, 1);
        rows.push_back({a + 0.3 * b, 2 * a - b, rng.uniform(-0.5, 0.5), a * 0.1});
    }
    auto p = pca_project(make_dataset(rows), 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(std::abs(std::sqrt(dot(p.components[i], p.components[i])) - 1.0) < 1e-9);
        for (std::size_t j = i + 1; j < 3; ++j) CHECK(std::abs(dot(p.components[i], p.components[j])) < 1e-9);
    }
    CHECK(variance(p, 0) >= variance(p, 1));
    CHECK(variance(p, 1) >= variance(p, 2));
    CHECK(p.eigenvalues[0] == doctest::Approx(variance(p, 0)));
}

TEST_CASE("largest-magnitude entry of each component is positive") {
    std::vector<std::vector<double>> rows;
    for (int i = -5; i <= 5; ++i) rows.push_back({-3.0 * i, 0.5 * i + (i % 2)});
    auto p = pca_project(make_dataset(rows));
    for (const auto& c : p.components) {
        std::size_t arg = 0;
        for (std::size_t i = 1; i < c.size(); ++i)
            if (std::abs(c[i]) > std::abs(c[arg])) arg = i;
        CHECK(c[arg] > 0);
    }
}

TEST_CASE("PCA preconditions and CSV") {
    CHECK_THROWS_AS(pca_project(make_dataset({{1, 2}})), InvalidArgument);
    CHECK_THROWS_AS(pca_project(make_dataset({{1, 2}, {3, 4}}), 3), InvalidArgument);
    auto d = make_dataset({{0, 0}, {1, 2}, {2, 1}}, {0, 1, 0});
    auto p = pca_project(d);
    std::ostringstream out;
    write_pca_csv(p, d, out);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "pc1,pc2,label");
    int rows = 0;
    while (std::getline(in, line)) {
        ++rows;
        CHECK(line.find(rows == 2 ? "malicious" : "benign") != std::string::npos);
    }
    CHECK(rows == 3);
}

}
