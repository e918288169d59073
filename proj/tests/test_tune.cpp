#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "dnsbot/error.hpp"
#include "dnsbot/tune.hpp"
#include "helpers.hpp"

using namespace dnsbot;
using dnsbot::testing::blobs;
using dnsbot::testing::make_dataset;

namespace {

GaConfig small_ga(std::uint64_t seed) {
    GaConfig c;
    c.population_size = 6;
    c.generations = 3;
    c.cv_folds = 3;
    c.seed = seed;
    c.grids.n_trees = {3, 5};
    c.grids.max_depth = {2, 4};
    return c;
}

// Smooth single peak at n_trees=50, max_depth=8, min_samples_split=2, sqrt.
double peaked(const Chromosome& c) {
    const std::array<double, 4> peak{2, 1, 0, 0};
    double s = 0.0;
    for (std::size_t g = 0; g < 4; ++g) s += std::abs(static_cast<double>(c.genes[g]) - peak[g]);
    return 1.0 / (1.0 + s);
}

}  // namespace

TEST_SUITE("tune") {

TEST_CASE("encode and decode are inverse on the grid") {
    ParamGrids grids;
    for (std::size_t a = 0; a < 6; ++a)
        for (std::size_t b = 0; b < 6; ++b)
            for (std::size_t c = 0; c < 4; ++c)
                for (std::size_t d = 0; d < 3; ++d) {
                    Chromosome ch{{a, b, c, d}};
                    CHECK(within_bounds(ch, grids));
                    CHECK(encode(decode(ch, grids), grids) == ch);
                }
    CHECK_FALSE(within_bounds(Chromosome{{6, 0, 0, 0}}, grids));
    HyperParams off_grid;
    off_grid.n_trees = 7;
    CHECK_FALSE(encode(off_grid, grids).has_value());
    auto p = decode(Chromosome{{2, 5, 0, 0}}, grids);
    CHECK(p.n_trees == 50);
    CHECK_FALSE(p.max_depth.has_value());
}

TEST_CASE("folds deal each class round-robin") {
    std::vector<int> y{0, 1, 0, 0, 1, 1, 0, 1};
    CHECK(stratified_folds(y, 2) == std::vector<std::size_t>{0, 0, 1, 0, 1, 0, 1, 1});
}

TEST_CASE("separable blobs score near one for any grid point") {
    auto d = blobs(30, 2, 4.0, 3);
    GaConfig c;
    c.seed = 5;
    for (const auto& ch : {Chromosome{{0, 0, 0, 0}}, Chromosome{{0, 0, 3, 1}}, Chromosome{{1, 5, 1, 2}}}) {
        CHECK(fitness(ch, d, c) >= 0.95);
    }
}

TEST_CASE("shuffled labels score near chance") {
    auto d = blobs(200, 3, 0.0, 41);
    Rng rng(2);
    auto& y = *d.labels;
    for (std::size_t i = y.size(); i > 1; --i) std::swap(y[i - 1], y[rng.index(i)]);
    GaConfig c;
    c.seed = 9;
    const double f = fitness(Chromosome{{1, 5, 0, 0}}, d, c);
    CHECK(std::abs(f - 0.5) <= 0.15);
}

TEST_CASE("fitness is deterministic") {
    auto d = blobs(40, 3, 0.5, 8);
    GaConfig c;
    c.seed = 3;
    const Chromosome ch{{1, 2, 1, 0}};
    CHECK(fitness(ch, d, c) == fitness(ch, d, c));
}

TEST_CASE("fitness preconditions") {
    GaConfig c;
    CHECK_THROWS_AS(fitness(Chromosome{}, make_dataset({{1}, {2}, {3}, {4}, {5}}, {0, 0, 0, 0, 0}), c), InvalidArgument);
    CHECK_THROWS_AS(fitness(Chromosome{}, make_dataset({{1}, {2}, {3}}, {0, 1, 0}), c), InvalidArgument);
}

TEST_CASE("fitness sample is stratified and capped") {
    auto d = blobs(900, 2, 1.0, 4, 300);
    GaConfig c;
    c.seed = 1;
    auto s = fitness_sample(d, c);
    CHECK(s.rows() == 1000);
    CHECK(s.count_label(kMalicious) == 250);
    std::set<RowKey> keys(d.row_keys.begin(), d.row_keys.end());
    for (const auto& k : s.row_keys) CHECK(keys.count(k) == 1);
    CHECK(fitness_sample(d, c) == s);
    c.fitness_sample_rows = 0;
    CHECK(fitness_sample(d, c) == d);
}

TEST_CASE("elitism keeps the best fitness non-decreasing") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        GaConfig c;
        c.seed = seed;
        auto noisy = [seed](const Chromosome& ch) {
            return static_cast<double>(derive_seed(seed, {ch.genes[0], ch.genes[1], ch.genes[2], ch.genes[3]}) % 1000) / 1000.0;
        };
        auto r = evolve_with(noisy, c);
        REQUIRE(r.history.size() == c.generations);
        for (std::size_t g = 1; g < r.history.size(); ++g) CHECK(r.history[g].best_fitness >= r.history[g - 1].best_fitness);
        double best = 0;
        for (const auto& h : r.history) best = std::max(best, h.best_fitness);
        CHECK(r.best_fitness == best);
        CHECK(noisy(r.best_chromosome) == r.best_fitness);
        CHECK(r.best == decode(r.best_chromosome, c.grids));
    }
}

TEST_CASE("every chromosome stays on the grid") {
    GaConfig c;
    c.seed = 77;
    c.mutation_rate = 0.9;
    auto r = evolve_with(peaked, c);
    CHECK(r.populations.size() == c.generations);
    for (const auto& pop : r.populations) {
        CHECK(pop.size() == c.population_size);
        for (const auto& ch : pop) CHECK(within_bounds(ch, c.grids));
    }
}

TEST_CASE("no-op operators on a uniform population keep it fixed") {
    GaConfig c;
    c.seed = 1;
    c.mutation_rate = 0.0;
    c.grids.n_trees = {50};
    c.grids.max_depth = {8};
    c.grids.min_samples_split = {2};
    c.grids.feature_subsample = {FeatureSubsample::sqrt};
    auto r = evolve_with(peaked, c);
    for (const auto& pop : r.populations)
        for (const auto& ch : pop) CHECK(ch == Chromosome{});
}

TEST_CASE("the peaked objective is found in most seeds") {
    // Exhaustive search over all 432 points is the oracle.
    GaConfig c;
    Chromosome argmax;
    double best = -1;
    for (std::size_t a = 0; a < 6; ++a)
        for (std::size_t b = 0; b < 6; ++b)
            for (std::size_t s = 0; s < 4; ++s)
                for (std::size_t f = 0; f < 3; ++f) {
                    Chromosome ch{{a, b, s, f}};
                    if (peaked(ch) > best) best = peaked(ch), argmax = ch;
                }
    int hits = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        c.seed = seed;
        hits += evolve_with(peaked, c).best_chromosome == argmax;
    }
    CHECK(hits >= 16);
}

TEST_CASE("evolve is deterministic and independent of workers") {
    auto d = blobs(20, 2, 1.0, 6);
    auto c = small_ga(4);
    auto a = evolve(d, c);
    c.workers = 3;
    auto b = evolve(d, c);
    CHECK(a.best == b.best);
    CHECK(a.best_fitness == b.best_fitness);
    CHECK(a.populations == b.populations);
    REQUIRE(a.history.size() == b.history.size());
    for (std::size_t g = 0; g < a.history.size(); ++g) CHECK(a.history[g].mean_fitness == b.history[g].mean_fitness);
}

TEST_CASE("history CSV") {
    TuneResult r;
    r.history = {{0.5, 0.25}, {0.75, 0.5}};
    std::ostringstream out;
    write_history(r, out);
    CHECK(out.str() == "generation,best_f,mean_f\n0,0.5,0.25\n1,0.75,0.5\n");
}

TEST_CASE("invalid GA settings are reported") {
    GaConfig c;
    c.elitism_count = c.population_size;
    c.tournament_size = 1;
    c.grids.n_trees.clear();
    CHECK(validate(c).size() == 3);
    CHECK_THROWS_AS(evolve_with(peaked, c), InvalidArgument);
}

}
