// Command-line front end: one subcommand per pipeline stage plus `run`.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "dnsbot/config.hpp"
#include "dnsbot/dataset.hpp"
#include "dnsbot/error.hpp"
#include "dnsbot/eval.hpp"
#include "dnsbot/features.hpp"
#include "dnsbot/forest.hpp"
#include "dnsbot/ingest.hpp"
#include "dnsbot/pipeline.hpp"
#include "dnsbot/preprocess.hpp"
#include "dnsbot/select.hpp"
#include "dnsbot/synth.hpp"
#include "dnsbot/tune.hpp"

namespace fs = std::filesystem;
using namespace dnsbot;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

struct GlobalOptions {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> workers;
    std::vector<std::string> overrides;
};

RunConfig resolve_config(const GlobalOptions& g) {
    RunConfig config = g.config_path.empty() ? RunConfig{} : load_config_file(g.config_path);
    std::vector<std::string> problems;
    for (const auto& kv : g.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) {
            problems.push_back("--set " + kv + ": expected key=value");
            continue;
        }
        if (auto err = set_config_value(config, kv.substr(0, eq), kv.substr(eq + 1)); !err.empty()) {
            problems.push_back(err);
        }
    }
    if (g.seed) config.seed = *g.seed;
    if (g.workers) config.workers = *g.workers;
    for (auto& p : validate(config)) problems.push_back(std::move(p));
    if (!problems.empty()) throw ConfigError(std::move(problems));
    return config;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path + "'");
    return in;
}

std::ofstream open_out(const std::string& path) {
    if (const auto parent = fs::path(path).parent_path(); !parent.empty()) fs::create_directories(parent);
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path + "'");
    return out;
}

Dataset read_dataset(const std::string& path) {
    auto in = open_in(path);
    return load_dataset(in);
}

Dataset featurize_files(const std::string& log_path, const std::string& labels_path, std::int64_t window_length) {
    auto log = open_in(log_path);
    const auto records = parse_query_log(log);
    const auto windows = aggregate_windows(records, window_length);
    if (labels_path.empty()) return featurize(windows);
    auto sidecar = open_in(labels_path);
    const auto labels = load_label_sidecar(sidecar);
    return featurize(windows, &labels);
}

// The labeled dataset named by the config: a dataset CSV, or a log plus sidecar.
Dataset configured_dataset(const RunConfig& config) {
    if (!config.paths.dataset.empty()) return read_dataset(config.paths.dataset);
    if (!config.paths.log.empty()) return featurize_files(config.paths.log, config.paths.labels, config.window_length);
    throw InvalidArgument("no input: set paths.dataset or paths.log (or use --synthetic)");
}

void write_with(const std::string& path, const std::function<void(std::ostream&)>& body) {
    if (path.empty() || path == "-") {
        body(std::cout);
        return;
    }
    auto out = open_out(path);
    body(out);
}

int cmd_generate(const RunConfig& config, const std::string& log_path, const std::string& labels_path) {
    auto log = open_out(log_path);
    auto labels = open_out(labels_path);
    const auto manifest = generate(config.synth, log, labels);
    std::size_t malicious = 0;
    for (int l : manifest.labels) malicious += l == kMalicious;
    std::cerr << "generated " << manifest.hosts.size() << " hosts (" << malicious << " malicious)\n";
    return kExitOk;
}

int cmd_train(const RunConfig& config, const std::string& dataset_path, const std::string& model_path, bool baseline) {
    const Dataset data = read_dataset(dataset_path);
    const PreparedTrain prepared = prepare_train(data, config, baseline);
    const HyperParams params = baseline ? default_forest_params() : config.forest;
    const ForestModel model = fit_model(prepared, params, config.seed, config.workers);
    auto out = open_out(model_path);
    save_model(model, out);
    std::cerr << "trained " << describe(params) << " on " << prepared.data.rows() << " rows, "
              << prepared.data.cols() << " features\n";
    return kExitOk;
}

int cmd_tune(const RunConfig& config, const GlobalOptions& g, const std::string& dataset_path,
             std::string config_out) {
    const Dataset data = read_dataset(dataset_path);
    const PreparedTrain prepared = prepare_train(data, config, false);
    const GaConfig ga = effective_ga(config);
    const Dataset sample = fitness_sample(prepared.data, ga);
    const TuneResult result = evolve_with([&](const Chromosome& c) { return fitness(c, sample, ga); }, ga);
    write_history(result, std::cout);

    RunConfig tuned = config;
    tuned.forest = result.best;
    if (config_out.empty()) config_out = g.config_path.empty() ? "tuned.conf" : g.config_path;
    auto out = open_out(config_out);
    write_config(tuned, out);
    std::cerr << "best " << describe(result.best) << " (fitness " << result.best_fitness << ") written to "
              << config_out << '\n';
    return kExitOk;
}

int cmd_evaluate(const std::string& model_path, const std::string& dataset_path, const std::string& csv_path) {
    auto in = open_in(model_path);
    const ForestModel model = load_model(in);
    const EvalReport report = evaluate(model, read_dataset(dataset_path));
    print_report(report, std::cout);
    if (!csv_path.empty()) {
        auto out = open_out(csv_path);
        write_report_csv(report, out);
    }
    return kExitOk;
}

int cmd_predict(const std::string& model_path, const std::string& dataset_path, const std::string& out_path) {
    auto in = open_in(model_path);
    const ForestModel model = load_model(in);
    const Dataset data = read_dataset(dataset_path);
    const auto predictions = predict_dataset(model, data);
    write_with(out_path, [&](std::ostream& out) {
        out << "host,window_start,label,score\n";
        for (std::size_t i = 0; i < predictions.size(); ++i) {
            out << data.row_keys[i].host << ',' << data.row_keys[i].window_start << ','
                << label_name(predictions[i].label) << ',' << predictions[i].score << '\n';
        }
    });
    return kExitOk;
}

int cmd_pca(const std::string& dataset_path, const std::string& out_path) {
    const Dataset data = read_dataset(dataset_path);
    const Dataset normalized = zscore_apply(data, zscore_fit(data));
    const PcaResult pca = pca_project(normalized, 2);
    write_with(out_path, [&](std::ostream& out) { write_pca_csv(pca, normalized, out); });
    return kExitOk;
}

int cmd_run(RunConfig config, bool synthetic, bool baseline, const std::string& out_override) {
    if (!out_override.empty()) config.paths.output = out_override;
    const fs::path dir(config.paths.output);
    fs::create_directories(dir);

    Dataset data;
    if (synthetic) {
        const std::string log_path = (dir / "queries.csv").string();
        const std::string labels_path = (dir / "labels.csv").string();
        {
            auto log = open_out(log_path);
            auto labels = open_out(labels_path);
            generate(config.synth, log, labels);
        }
        data = featurize_files(log_path, labels_path, config.window_length);
        auto out = open_out((dir / "dataset.csv").string());
        write_dataset(data, out);
    } else {
        data = configured_dataset(config);
    }

    PipelineOptions options;
    options.baseline = baseline;
    const PipelineResult result = run_pipeline(data, config, options);
    write_artifacts(result, data, config, dir.string());

    std::cout << "features: " << result.features_in << " -> " << result.features_out << "\n";
    std::cout << "forest: " << describe(result.model.params) << "\n\n";
    print_report(result.report, std::cout);
    std::cerr << "artifacts written to " << dir.string() << '\n';
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"DNS-based botnet detection: featurize query logs, train and evaluate a tuned random forest"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "dnsbot 1.0");

    GlobalOptions g;
    app.add_option("-c,--config", g.config_path, "key = value config file")->check(CLI::ExistingFile);
    app.add_option("--seed", g.seed, "override the run seed");
    app.add_option("--workers", g.workers, "worker threads for forest training and fitness evaluation");
    app.add_option("--set", g.overrides, "override one config key (key=value); repeatable");

    std::string log_path, labels_path, dataset_path, model_path, out_path, csv_path, config_out;
    std::optional<std::int64_t> window;
    bool baseline = false;
    bool synthetic = false;

    auto* generate_cmd = app.add_subcommand("generate", "write a synthetic query log and label sidecar");
    generate_cmd->add_option("--log", log_path, "query log output")->required();
    generate_cmd->add_option("--labels", labels_path, "host,label sidecar output")->required();

    auto* featurize_cmd = app.add_subcommand("featurize", "aggregate a query log into a feature dataset");
    featurize_cmd->add_option("--log", log_path, "query log input")->required()->check(CLI::ExistingFile);
    featurize_cmd->add_option("--labels", labels_path, "host,label sidecar")->check(CLI::ExistingFile);
    featurize_cmd->add_option("--window", window, "window length in seconds (default from config)");
    featurize_cmd->add_option("-o,--out", out_path, "dataset output (default stdout)");

    auto* rank_cmd = app.add_subcommand("rank-features", "rank features by information gain");
    rank_cmd->add_option("--dataset", dataset_path, "labeled dataset")->required()->check(CLI::ExistingFile);
    rank_cmd->add_option("-o,--out", out_path, "ranking CSV output (default stdout)");

    auto* train_cmd = app.add_subcommand("train", "train a forest on a labeled dataset");
    train_cmd->add_option("--dataset", dataset_path, "labeled dataset")->required()->check(CLI::ExistingFile);
    train_cmd->add_option("--model", model_path, "model output")->required();
    train_cmd->add_flag("--baseline", baseline, "default forest on all features, no oversampling");

    auto* tune_cmd = app.add_subcommand("tune", "search forest hyper-parameters with the genetic algorithm");
    tune_cmd->add_option("--dataset", dataset_path, "labeled dataset")->required()->check(CLI::ExistingFile);
    tune_cmd->add_option("--write-config", config_out, "config to write with the tuned forest.* keys");

    auto* evaluate_cmd = app.add_subcommand("evaluate", "score a model on a labeled dataset");
    evaluate_cmd->add_option("--model", model_path, "model file")->required()->check(CLI::ExistingFile);
    evaluate_cmd->add_option("--dataset", dataset_path, "labeled dataset")->required()->check(CLI::ExistingFile);
    evaluate_cmd->add_option("--csv", csv_path, "also write metric,value CSV here");

    auto* predict_cmd = app.add_subcommand("predict", "label every row of a dataset");
    predict_cmd->add_option("--model", model_path, "model file")->required()->check(CLI::ExistingFile);
    predict_cmd->add_option("--dataset", dataset_path, "dataset")->required()->check(CLI::ExistingFile);
    predict_cmd->add_option("-o,--out", out_path, "predictions CSV output (default stdout)");

    auto* pca_cmd = app.add_subcommand("pca", "project a normalized dataset onto two principal components");
    pca_cmd->add_option("--dataset", dataset_path, "labeled dataset")->required()->check(CLI::ExistingFile);
    pca_cmd->add_option("-o,--out", out_path, "pc1,pc2,label CSV output (default stdout)");

    auto* run_cmd = app.add_subcommand("run", "full pipeline: split, prepare, tune, train, evaluate");
    run_cmd->add_flag("--synthetic", synthetic, "generate the input from the synth.* keys");
    run_cmd->add_flag("--baseline", baseline, "default forest on all features, no oversampling or tuning");
    run_cmd->add_option("-o,--out", out_path, "output directory (default paths.output)");

    for (auto* sub : {generate_cmd, featurize_cmd, rank_cmd, train_cmd, tune_cmd, evaluate_cmd, predict_cmd, pca_cmd,
                      run_cmd}) {
        sub->fallthrough();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitValidation;
    }

    try {
        const RunConfig config = resolve_config(g);
        if (generate_cmd->parsed()) return cmd_generate(config, log_path, labels_path);
        if (featurize_cmd->parsed()) {
            const Dataset data = featurize_files(log_path, labels_path, window.value_or(config.window_length));
            write_with(out_path, [&](std::ostream& out) { write_dataset(data, out); });
            return kExitOk;
        }
        if (rank_cmd->parsed()) {
            const FeatureRanking ranking = rank_features(read_dataset(dataset_path), config.select.bins);
            write_with(out_path, [&](std::ostream& out) { write_ranking(ranking, out); });
            return kExitOk;
        }
        if (train_cmd->parsed()) return cmd_train(config, dataset_path, model_path, baseline);
        if (tune_cmd->parsed()) return cmd_tune(config, g, dataset_path, config_out);
        if (evaluate_cmd->parsed()) return cmd_evaluate(model_path, dataset_path, csv_path);
        if (predict_cmd->parsed()) return cmd_predict(model_path, dataset_path, out_path);
        if (pca_cmd->parsed()) return cmd_pca(dataset_path, out_path);
        if (run_cmd->parsed()) return cmd_run(config, synthetic, baseline, out_path);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const InvalidArgument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitRuntime;
}
