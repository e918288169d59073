#include "dnsbot/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "dnsbot/error.hpp"
#include "dnsbot/random.hpp"

namespace dnsbot {

namespace {

constexpr std::uint64_t kSplitStream = 0x53504c54;  // "SPLT"
constexpr std::uint64_t kSmoteStream = 0x534d4f54;  // "SMOT"

void record(std::set<RowKey>& into, const Dataset& d) { into.insert(d.row_keys.begin(), d.row_keys.end()); }

std::ofstream open_out(const std::filesystem::path& p) {
    std::ofstream out(p);
    if (!out) throw Error("cannot write '" + p.string() + "'");
    return out;
}

}  // namespace

TrainTestSplit stratified_split(std::span<const int> labels, double test_fraction, std::uint64_t seed) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw InvalidArgument("test_fraction must be in (0,1)");
    std::array<std::vector<std::size_t>, 2> by_class;
    for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i] == kMalicious].push_back(i);

    TrainTestSplit split;
    for (std::size_t c = 0; c < 2; ++c) {
        auto& rows = by_class[c];
        Rng rng(derive_seed(seed, {kSplitStream, c}));
        for (std::size_t i = rows.size(); i > 1; --i) std::swap(rows[i - 1], rows[rng.index(i)]);
        const auto n_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(rows.size())));
        split.test.insert(split.test.end(), rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(n_test));
        split.train.insert(split.train.end(), rows.begin() + static_cast<std::ptrdiff_t>(n_test), rows.end());
    }
    std::sort(split.train.begin(), split.train.end());
    std::sort(split.test.begin(), split.test.end());
    return split;
}

std::set<RowKey> PipelineAudit::leaked() const {
    std::set<RowKey> out;
    for (const auto* stage : {&normalization, &ranking, &smote, &fitness}) {
        for (const auto& k : *stage) {
            if (test.count(k)) out.insert(k);
        }
    }
    return out;
}

double PipelineResult::feature_reduction() const {
    if (features_in == 0) return 0.0;
    return 1.0 - static_cast<double>(features_out) / static_cast<double>(features_in);
}

PreparedTrain prepare_train(const Dataset& raw_train, const RunConfig& config, bool baseline,
                            PipelineAudit* audit) {
    if (!raw_train.labeled()) throw InvalidArgument("training requires a labeled dataset");
    if (audit) record(audit->normalization, raw_train);
    const NormalizationParams fitted = zscore_fit(raw_train);
    Dataset normalized = zscore_apply(raw_train, fitted);

    PreparedTrain out;
    if (baseline) {
        out.normalization = fitted;
        out.data = std::move(normalized);
        return out;
    }

    if (audit) record(audit->ranking, normalized);
    out.ranking = rank_features(normalized, config.select.bins);
    const std::size_t k = std::min(config.select.k, normalized.cols());
    Dataset selected = select_top_k(normalized, *out.ranking, k);
    out.normalization = select_params(fitted, selected.feature_names);

    if (audit) record(audit->smote, selected);
    SmoteConfig sc;
    sc.k = config.smote.k;
    sc.target_ratio = config.smote.target_ratio;
    sc.seed = derive_seed(config.seed, {kSmoteStream});
    out.data = smote(selected, sc);
    return out;
}

ForestModel fit_model(const PreparedTrain& prepared, const HyperParams& params, std::uint64_t seed,
                      std::size_t workers) {
    ForestModel model = train_forest(prepared.data, params, seed, workers);
    model.normalization = prepared.normalization;
    return model;
}

GaConfig effective_ga(const RunConfig& config) {
    GaConfig ga = config.ga;
    ga.seed = config.seed;
    ga.workers = config.workers;
    return ga;
}

PipelineResult run_pipeline(const Dataset& labeled, const RunConfig& config, const PipelineOptions& options) {
    if (auto problems = validate(config); !problems.empty()) throw ConfigError(std::move(problems));
    if (!labeled.labeled()) throw InvalidArgument("the pipeline requires a labeled dataset");
    labeled.validate();

    PipelineResult result;
    result.features_in = labeled.cols();
    result.split = stratified_split(*labeled.labels, config.split.test_fraction, config.seed);
    const Dataset train = take_rows(labeled, result.split.train);
    const Dataset test = take_rows(labeled, result.split.test);
    record(result.audit.test, test);

    PreparedTrain prepared = prepare_train(train, config, options.baseline, &result.audit);
    result.ranking = prepared.ranking;
    result.features_out = prepared.data.cols();

    HyperParams params = default_forest_params();
    if (!options.baseline) {
        const GaConfig ga = effective_ga(config);
        const Dataset sample = fitness_sample(prepared.data, ga);
        record(result.audit.fitness, sample);
        result.tuning = evolve_with([&](const Chromosome& c) { return fitness(c, sample, ga); }, ga);
        params = result.tuning->best;
    }

    result.model = fit_model(prepared, params, config.seed, config.workers);
    result.report = evaluate(result.model, test);
    return result;
}

void write_artifacts(const PipelineResult& result, const Dataset& labeled, const RunConfig& config,
                     const std::string& dir) {
    namespace fs = std::filesystem;
    const fs::path root(dir);
    fs::create_directories(root);

    {
        auto out = open_out(root / "config.conf");
        write_config(config, out);
    }
    {
        auto out = open_out(root / "split.csv");
        out << "host,window_start,split\n";
        for (std::size_t i : result.split.train) {
            out << labeled.row_keys[i].host << ',' << labeled.row_keys[i].window_start << ",train\n";
        }
        for (std::size_t i : result.split.test) {
            out << labeled.row_keys[i].host << ',' << labeled.row_keys[i].window_start << ",test\n";
        }
    }
    if (result.ranking) {
        auto out = open_out(root / "ranking.csv");
        write_ranking(*result.ranking, out);
    }
    if (result.tuning) {
        auto out = open_out(root / "history.csv");
        write_history(*result.tuning, out);
        auto params = open_out(root / "best_params.conf");
        write_forest_params(result.tuning->best, params);
    }
    {
        auto out = open_out(root / "model.json");
        save_model(result.model, out);
    }
    {
        auto out = open_out(root / "report.txt");
        out << "features: " << result.features_in << " -> " << result.features_out << " ("
            << std::llround(100.0 * result.feature_reduction()) << "% reduction)\n";
        out << "forest: " << describe(result.model.params) << "\n\n";
        print_report(result.report, out);
    }
    {
        auto out = open_out(root / "report.csv");
        write_report_csv(result.report, out);
    }
}

}  // namespace dnsbot
