#include "dnsbot/tune.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <map>
#include <mutex>
#include <numeric>
#include <ostream>
#include <thread>

#include "dnsbot/error.hpp"
#include "dnsbot/eval.hpp"
#include "dnsbot/random.hpp"
#include "dnsbot/text.hpp"

namespace dnsbot {

namespace {

// Stream tags for derive_seed so the GA's RNG streams never collide.
constexpr std::uint64_t kInitStream = 0x494e4954;    // "INIT"
constexpr std::uint64_t kBreedStream = 0x42524544;   // "BRED"
constexpr std::uint64_t kSampleStream = 0x53414d50;  // "SAMP"

}  // namespace

std::vector<std::string> validate(const GaConfig& c) {
    std::vector<std::string> errors;
    if (c.population_size < 1) errors.emplace_back("ga.population_size must be positive");
    if (c.generations < 1) errors.emplace_back("ga.generations must be positive");
    if (!(c.crossover_rate >= 0.0 && c.crossover_rate <= 1.0)) errors.emplace_back("ga.crossover_rate must be in [0,1]");
    if (!(c.mutation_rate >= 0.0 && c.mutation_rate <= 1.0)) errors.emplace_back("ga.mutation_rate must be in [0,1]");
    if (c.tournament_size < 2) errors.emplace_back("ga.tournament_size must be at least 2");
    if (c.elitism_count >= c.population_size) errors.emplace_back("ga.elitism_count must be below ga.population_size");
    if (c.cv_folds < 2) errors.emplace_back("ga.cv_folds must be at least 2");
    if (c.workers < 1) errors.emplace_back("ga.workers must be positive");
    if (c.grids.n_trees.empty()) errors.emplace_back("ga.grid.n_trees must not be empty");
    if (c.grids.max_depth.empty()) errors.emplace_back("ga.grid.max_depth must not be empty");
    if (c.grids.min_samples_split.empty()) errors.emplace_back("ga.grid.min_samples_split must not be empty");
    if (c.grids.feature_subsample.empty()) errors.emplace_back("ga.grid.feature_subsample must not be empty");
    for (auto t : c.grids.n_trees) {
        if (t == 0) errors.emplace_back("ga.grid.n_trees values must be positive");
    }
    for (auto d : c.grids.max_depth) {
        if (d && *d == 0) errors.emplace_back("ga.grid.max_depth values must be positive");
    }
    for (auto s : c.grids.min_samples_split) {
        if (s < 2) errors.emplace_back("ga.grid.min_samples_split values must be at least 2");
    }
    return errors;
}

bool within_bounds(const Chromosome& c, const ParamGrids& grids) {
    const auto sizes = grids.sizes();
    for (std::size_t g = 0; g < 4; ++g) {
        if (c.genes[g] >= sizes[g]) return false;
    }
    return true;
}

HyperParams decode(const Chromosome& c, const ParamGrids& grids) {
    if (!within_bounds(c, grids)) throw InvalidArgument("chromosome gene outside its grid");
    HyperParams p;
    p.n_trees = grids.n_trees[c.genes[0]];
    p.max_depth = grids.max_depth[c.genes[1]];
    p.min_samples_split = grids.min_samples_split[c.genes[2]];
    p.feature_subsample = grids.feature_subsample[c.genes[3]];
    return p;
}

std::optional<Chromosome> encode(const HyperParams& p, const ParamGrids& grids) {
    auto find = [](const auto& grid, const auto& value) -> std::optional<std::size_t> {
        const auto it = std::find(grid.begin(), grid.end(), value);
        if (it == grid.end()) return std::nullopt;
        return static_cast<std::size_t>(it - grid.begin());
    };
    const auto a = find(grids.n_trees, p.n_trees);
    const auto b = find(grids.max_depth, p.max_depth);
    const auto c = find(grids.min_samples_split, p.min_samples_split);
    const auto d = find(grids.feature_subsample, p.feature_subsample);
    if (!a || !b || !c || !d) return std::nullopt;
    return Chromosome{{*a, *b, *c, *d}};
}

std::vector<std::size_t> stratified_folds(std::span<const int> labels, std::size_t k) {
    if (k == 0) throw InvalidArgument("fold count must be positive");
    std::vector<std::size_t> fold(labels.size());
    std::array<std::size_t, 2> dealt{};
    for (std::size_t i = 0; i < labels.size(); ++i) {
        auto& n = dealt[labels[i] == kMalicious];
        fold[i] = n++ % k;
    }
    return fold;
}

namespace {

void require_cv_ready(const Dataset& train, const GaConfig& config) {
    if (!train.labeled()) throw InvalidArgument("tuning requires a labeled dataset");
    if (train.count_label(kBenign) == 0 || train.count_label(kMalicious) == 0) {
        throw InvalidArgument("tuning requires both classes");
    }
    if (config.cv_folds < 2) throw InvalidArgument("cv_folds must be at least 2");
    if (train.rows() < config.cv_folds) throw InvalidArgument("fewer rows than cv folds");
}

}  // namespace

Dataset fitness_sample(const Dataset& train, const GaConfig& config) {
    require_cv_ready(train, config);
    const std::size_t cap = config.fitness_sample_rows;
    const std::size_t m = train.rows();
    if (cap == 0 || m <= cap) return train;

    std::array<std::vector<std::size_t>, 2> by_class;
    for (std::size_t i = 0; i < m; ++i) by_class[(*train.labels)[i] == kMalicious].push_back(i);

    // Proportional quotas, keeping at least cv_folds rows of each class where possible.
    const auto proportional = static_cast<std::size_t>(
        std::llround(static_cast<double>(cap) * static_cast<double>(by_class[1].size()) / static_cast<double>(m)));
    std::size_t q1 = std::max(proportional, std::min(by_class[1].size(), config.cv_folds));
    q1 = std::min({q1, by_class[1].size(), cap - std::min(by_class[0].size(), config.cv_folds)});
    const std::size_t q0 = std::min(cap - q1, by_class[0].size());

    std::vector<std::size_t> picked;
    for (std::size_t c = 0; c < 2; ++c) {
        auto& rows = by_class[c];
        Rng rng(derive_seed(config.seed, {kSampleStream, c}));
        const std::size_t quota = c == 1 ? q1 : q0;
        for (std::size_t i = 0; i < quota; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(rng.index(rows.size() - i));
            std::swap(rows[i], rows[j]);
        }
        picked.insert(picked.end(), rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(quota));
    }
    std::sort(picked.begin(), picked.end());
    return take_rows(train, picked);
}

double fitness(const Chromosome& chromosome, const Dataset& train, const GaConfig& config) {
    require_cv_ready(train, config);
    const HyperParams params = decode(chromosome, config.grids);
    const auto folds = stratified_folds(*train.labels, config.cv_folds);

    double total = 0.0;
    std::vector<std::size_t> fit_rows;
    std::vector<std::size_t> held_rows;
    for (std::size_t f = 0; f < config.cv_folds; ++f) {
        fit_rows.clear();
        held_rows.clear();
        for (std::size_t i = 0; i < train.rows(); ++i) (folds[i] == f ? held_rows : fit_rows).push_back(i);
        const Dataset fit = take_rows(train, fit_rows);
        const ForestModel model = train_forest(fit, params, config.seed ^ f, 1);

        std::vector<int> truth;
        std::vector<int> predicted;
        for (std::size_t i : held_rows) {
            truth.push_back((*train.labels)[i]);
            predicted.push_back(predict(model, train.row(i)).label);
        }
        total += macro_f_score(truth, predicted);
    }
    return total / static_cast<double>(config.cv_folds);
}

namespace {

Chromosome random_chromosome(const ParamGrids& grids, Rng& rng) {
    Chromosome c;
    const auto sizes = grids.sizes();
    for (std::size_t g = 0; g < 4; ++g) c.genes[g] = static_cast<std::size_t>(rng.index(sizes[g]));
    return c;
}

// Strict "a ranks above b": higher fitness, ties to the lexicographically smaller chromosome.
bool ranks_above(double fa, const Chromosome& a, double fb, const Chromosome& b) {
    if (fa != fb) return fa > fb;
    return a < b;
}

std::size_t tournament(const std::vector<Chromosome>& pop, const std::vector<double>& fit,
                       std::size_t size, Rng& rng) {
    std::size_t winner = static_cast<std::size_t>(rng.index(pop.size()));
    for (std::size_t t = 1; t < size; ++t) {
        const auto challenger = static_cast<std::size_t>(rng.index(pop.size()));
        if (ranks_above(fit[challenger], pop[challenger], fit[winner], pop[winner])) winner = challenger;
    }
    return winner;
}

class FitnessCache {
public:
    FitnessCache(const FitnessFn& fn, std::size_t workers) : fn_(fn), workers_(workers) {}

    std::vector<double> score(const std::vector<Chromosome>& pop) {
        std::vector<Chromosome> pending;
        for (const auto& c : pop) {
            if (!cache_.count(c) && std::find(pending.begin(), pending.end(), c) == pending.end()) {
                pending.push_back(c);
            }
        }
        std::vector<double> values(pending.size());
        run(pending, values);
        for (std::size_t i = 0; i < pending.size(); ++i) cache_[pending[i]] = values[i];

        std::vector<double> out;
        out.reserve(pop.size());
        for (const auto& c : pop) out.push_back(cache_.at(c));
        return out;
    }

private:
    void run(const std::vector<Chromosome>& pending, std::vector<double>& values) {
        const std::size_t workers = std::min(workers_, pending.size());
        if (workers <= 1) {
            for (std::size_t i = 0; i < pending.size(); ++i) values[i] = fn_(pending[i]);
            return;
        }
        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < pending.size(); i = next++) {
                    try {
                        values[i] = fn_(pending[i]);
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure) failure = std::current_exception();
                    }
                }
            });
        }
        for (auto& t : pool) t.join();
        if (failure) std::rethrow_exception(failure);
    }

    const FitnessFn& fn_;
    std::size_t workers_;
    std::map<Chromosome, double> cache_;
};

}  // namespace

TuneResult evolve_with(const FitnessFn& fitness_fn, const GaConfig& config) {
    if (const auto errors = validate(config); !errors.empty()) throw InvalidArgument(errors.front());
    const auto sizes = config.grids.sizes();

    std::vector<Chromosome> pop(config.population_size);
    for (std::size_t i = 0; i < pop.size(); ++i) {
        Rng rng(derive_seed(config.seed, {kInitStream, i}));
        pop[i] = random_chromosome(config.grids, rng);
    }

    FitnessCache cache(fitness_fn, config.workers);
    TuneResult result;
    bool have_best = false;
    for (std::size_t gen = 0; gen < config.generations; ++gen) {
        const auto fit = cache.score(pop);
        result.populations.push_back(pop);

        std::vector<std::size_t> order(pop.size());
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return ranks_above(fit[a], pop[a], fit[b], pop[b]);
        });

        const std::size_t top = order.front();
        GenerationStats stats;
        stats.best_fitness = fit[top];
        stats.mean_fitness = std::accumulate(fit.begin(), fit.end(), 0.0) / static_cast<double>(fit.size());
        result.history.push_back(stats);
        if (!have_best || ranks_above(fit[top], pop[top], result.best_fitness, result.best_chromosome)) {
            result.best_fitness = fit[top];
            result.best_chromosome = pop[top];
            have_best = true;
        }
        if (gen + 1 == config.generations) break;

        std::vector<Chromosome> next;
        next.reserve(pop.size());
        for (std::size_t e = 0; e < config.elitism_count; ++e) next.push_back(pop[order[e]]);
        for (std::size_t i = next.size(); i < pop.size(); ++i) {
            Rng rng(derive_seed(config.seed, {kBreedStream, gen + 1, i}));
            const Chromosome& a = pop[tournament(pop, fit, config.tournament_size, rng)];
            const Chromosome& b = pop[tournament(pop, fit, config.tournament_size, rng)];
            Chromosome child = a;
            if (rng.bernoulli(config.crossover_rate)) {
                for (std::size_t g = 0; g < 4; ++g) child.genes[g] = rng.bernoulli(0.5) ? a.genes[g] : b.genes[g];
            }
            for (std::size_t g = 0; g < 4; ++g) {
                if (rng.bernoulli(config.mutation_rate)) child.genes[g] = static_cast<std::size_t>(rng.index(sizes[g]));
            }
            next.push_back(child);
        }
        pop = std::move(next);
    }
    result.best = decode(result.best_chromosome, config.grids);
    return result;
}

TuneResult evolve(const Dataset& train, const GaConfig& config) {
    const Dataset sample = fitness_sample(train, config);
    return evolve_with([&](const Chromosome& c) { return fitness(c, sample, config); }, config);
}

void write_history(const TuneResult& result, std::ostream& out) {
    out << "generation,best_f,mean_f\n";
    for (std::size_t g = 0; g < result.history.size(); ++g) {
        out << g << ',' << text::format_double(result.history[g].best_fitness) << ','
            << text::format_double(result.history[g].mean_fitness) << '\n';
    }
}

}  // namespace dnsbot
