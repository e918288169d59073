#include "dnsbot/config.hpp"

#include <fstream>
#include <functional>
#include <istream>
#include <ostream>
#include <type_traits>

#include "dnsbot/text.hpp"

namespace dnsbot {

ConfigError::ConfigError(std::vector<std::string> problems)
    : Error([&] {
          std::string msg = "invalid configuration:";
          for (const auto& p : problems) msg += "\n  " + p;
          return msg;
      }()),
      problems_(std::move(problems)) {}

namespace {

// Value codecs. parse() returns false on malformed input.

bool parse(std::string_view s, std::string& out) {
    out = std::string(s);
    return true;
}

bool parse(std::string_view s, std::size_t& out) {
    const auto v = text::parse_int(s);
    if (!v || *v < 0) return false;
    out = static_cast<std::size_t>(*v);
    return true;
}

bool parse(std::string_view s, std::int64_t& out) {
    const auto v = text::parse_int(s);
    if (!v) return false;
    out = *v;
    return true;
}

bool parse_seed(std::string_view s, std::uint64_t& out) {
    s = text::trim(s);
    if (s.empty()) return false;
    std::uint64_t v = 0;
    for (char ch : s) {
        if (ch < '0' || ch > '9') return false;
        const std::uint64_t digit = static_cast<std::uint64_t>(ch - '0');
        if (v > (UINT64_MAX - digit) / 10) return false;
        v = v * 10 + digit;
    }
    out = v;
    return true;
}

bool parse(std::string_view s, double& out) {
    const auto v = text::parse_double(s);
    if (!v) return false;
    out = *v;
    return true;
}

bool parse(std::string_view s, std::optional<std::size_t>& out) {
    if (text::trim(s) == "unlimited") {
        out.reset();
        return true;
    }
    std::size_t v = 0;
    if (!parse(s, v)) return false;
    out = v;
    return true;
}

bool parse(std::string_view s, FeatureSubsample& out) {
    const auto v = parse_feature_subsample(text::trim(s));
    if (!v) return false;
    out = *v;
    return true;
}

template <typename T>
bool parse(std::string_view s, std::vector<T>& out) {
    std::vector<T> values;
    for (auto item : text::split(s, ',')) {
        T v{};
        if (!parse(text::trim(item), v)) return false;
        values.push_back(std::move(v));
    }
    out = std::move(values);
    return true;
}

std::string format(const std::string& v) { return v; }
std::string format(std::size_t v) { return std::to_string(v); }
std::string format(std::int64_t v) { return std::to_string(v); }
std::string format(double v) { return text::format_double(v); }
std::string format(FeatureSubsample v) { return std::string(to_string(v)); }
std::string format(const std::optional<std::size_t>& v) { return v ? std::to_string(*v) : "unlimited"; }

template <typename T>
std::string format(const std::vector<T>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ',';
        out += format(values[i]);
    }
    return out;
}

struct Key {
    std::string name;
    std::function<bool(RunConfig&, std::string_view)> set;
    std::function<std::string(const RunConfig&)> get;
};

template <typename Access>
Key key(std::string name, Access access) {
    Key k;
    k.name = std::move(name);
    k.set = [access](RunConfig& c, std::string_view v) { return parse(v, access(c)); };
    k.get = [access](const RunConfig& c) { return format(access(const_cast<RunConfig&>(c))); };
    return k;
}

// Seeds take the full unsigned 64-bit range, which parse_int cannot hold.
Key seed_key(std::string name, std::function<std::uint64_t&(RunConfig&)> access) {
    Key k;
    k.name = std::move(name);
    k.set = [access](RunConfig& c, std::string_view v) { return parse_seed(v, access(c)); };
    k.get = [access](const RunConfig& c) { return std::to_string(access(const_cast<RunConfig&>(c))); };
    return k;
}

#define DNSBOT_KEY(name, member) key(name, [](RunConfig& c) -> auto& { return c.member; })

const std::vector<Key>& registry() {
    static const std::vector<Key> keys = {
        DNSBOT_KEY("paths.log", paths.log),
        DNSBOT_KEY("paths.labels", paths.labels),
        DNSBOT_KEY("paths.dataset", paths.dataset),
        DNSBOT_KEY("paths.output", paths.output),
        seed_key("seed", [](RunConfig& c) -> std::uint64_t& { return c.seed; }),
        DNSBOT_KEY("workers", workers),
        DNSBOT_KEY("window_length", window_length),
        DNSBOT_KEY("split.test_fraction", split.test_fraction),
        DNSBOT_KEY("smote.k", smote.k),
        DNSBOT_KEY("smote.target_ratio", smote.target_ratio),
        DNSBOT_KEY("select.bins", select.bins),
        DNSBOT_KEY("select.k", select.k),
        DNSBOT_KEY("ga.population_size", ga.population_size),
        DNSBOT_KEY("ga.generations", ga.generations),
        DNSBOT_KEY("ga.crossover_rate", ga.crossover_rate),
        DNSBOT_KEY("ga.mutation_rate", ga.mutation_rate),
        DNSBOT_KEY("ga.tournament_size", ga.tournament_size),
        DNSBOT_KEY("ga.elitism_count", ga.elitism_count),
        DNSBOT_KEY("ga.cv_folds", ga.cv_folds),
        DNSBOT_KEY("ga.fitness_sample_rows", ga.fitness_sample_rows),
        DNSBOT_KEY("ga.grid.n_trees", ga.grids.n_trees),
        DNSBOT_KEY("ga.grid.max_depth", ga.grids.max_depth),
        DNSBOT_KEY("ga.grid.min_samples_split", ga.grids.min_samples_split),
        DNSBOT_KEY("ga.grid.feature_subsample", ga.grids.feature_subsample),
        DNSBOT_KEY("forest.n_trees", forest.n_trees),
        DNSBOT_KEY("forest.max_depth", forest.max_depth),
        DNSBOT_KEY("forest.min_samples_split", forest.min_samples_split),
        DNSBOT_KEY("forest.feature_subsample", forest.feature_subsample),
        DNSBOT_KEY("synth.n_benign_hosts", synth.n_benign_hosts),
        DNSBOT_KEY("synth.n_malicious_hosts", synth.n_malicious_hosts),
        DNSBOT_KEY("synth.window_length", synth.window_length),
        DNSBOT_KEY("synth.windows", synth.windows),
        DNSBOT_KEY("synth.start_time", synth.start_time),
        seed_key("synth.seed", [](RunConfig& c) -> std::uint64_t& { return c.synth.seed; }),
        DNSBOT_KEY("synth.benign_rate_min", synth.benign_rate_min),
        DNSBOT_KEY("synth.benign_rate_max", synth.benign_rate_max),
        DNSBOT_KEY("synth.benign_domain_pool", synth.benign_domain_pool),
        DNSBOT_KEY("synth.benign_zipf_exponent", synth.benign_zipf_exponent),
        DNSBOT_KEY("synth.benign_failure_rate", synth.benign_failure_rate),
        DNSBOT_KEY("synth.benign_cdn_rate", synth.benign_cdn_rate),
        DNSBOT_KEY("synth.benign_noisy_fraction", synth.benign_noisy_fraction),
        DNSBOT_KEY("synth.benign_noisy_failure_rate", synth.benign_noisy_failure_rate),
        DNSBOT_KEY("synth.benign_cdn_heavy_fraction", synth.benign_cdn_heavy_fraction),
        DNSBOT_KEY("synth.benign_mail_fraction", synth.benign_mail_fraction),
        DNSBOT_KEY("synth.public_resolver_rate", synth.public_resolver_rate),
        DNSBOT_KEY("synth.resolver_pool", synth.resolver_pool),
        DNSBOT_KEY("synth.botnet_activity_min", synth.botnet_activity_min),
        DNSBOT_KEY("synth.botnet_activity_max", synth.botnet_activity_max),
        DNSBOT_KEY("synth.botnet_beacon_jitter", synth.botnet_beacon_jitter),
        DNSBOT_KEY("synth.botnet_domain_pool", synth.botnet_domain_pool),
        DNSBOT_KEY("synth.botnet_failure_rate", synth.botnet_failure_rate),
        DNSBOT_KEY("synth.botnet_public_resolver_rate", synth.botnet_public_resolver_rate),
    };
    return keys;
}

#undef DNSBOT_KEY

const Key* find_key(std::string_view name) {
    for (const auto& k : registry()) {
        if (k.name == name) return &k;
    }
    return nullptr;
}

}  // namespace

std::vector<std::string> config_keys() {
    std::vector<std::string> names;
    for (const auto& k : registry()) names.push_back(k.name);
    return names;
}

std::string set_config_value(RunConfig& config, std::string_view key_name, std::string_view value) {
    const Key* k = find_key(text::trim(key_name));
    if (!k) return "unknown key '" + std::string(text::trim(key_name)) + "'";
    if (!k->set(config, text::trim(value))) {
        return k->name + ": cannot parse '" + std::string(text::trim(value)) + "'";
    }
    return {};
}

RunConfig parse_config(std::istream& source) {
    RunConfig config;
    std::vector<std::string> problems;
    std::string line;
    std::size_t line_no = 0;
    while (text::read_line(source, line)) {
        ++line_no;
        std::string_view body = line;
        if (const auto hash = body.find('#'); hash != std::string_view::npos) body = body.substr(0, hash);
        body = text::trim(body);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string_view::npos) {
            problems.push_back("line " + std::to_string(line_no) + ": expected key=value");
            continue;
        }
        if (auto err = set_config_value(config, body.substr(0, eq), body.substr(eq + 1)); !err.empty()) {
            problems.push_back("line " + std::to_string(line_no) + ": " + err);
        }
    }
    for (auto& p : validate(config)) problems.push_back(std::move(p));
    if (!problems.empty()) throw ConfigError(std::move(problems));
    return config;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError({"cannot open config file '" + path + "'"});
    return parse_config(in);
}

std::vector<std::string> validate(const RunConfig& c) {
    std::vector<std::string> errors;
    if (c.window_length <= 0) errors.emplace_back("window_length must be positive");
    if (c.workers < 1) errors.emplace_back("workers must be positive");
    if (!(c.split.test_fraction > 0.0 && c.split.test_fraction < 1.0)) {
        errors.emplace_back("split.test_fraction must be in (0,1)");
    }
    if (c.smote.k < 1) errors.emplace_back("smote.k must be at least 1");
    if (!(c.smote.target_ratio > 0.0 && c.smote.target_ratio <= 1.0)) {
        errors.emplace_back("smote.target_ratio must be in (0,1]");
    }
    if (c.select.bins < 1) errors.emplace_back("select.bins must be at least 1");
    if (c.select.k < 1) errors.emplace_back("select.k must be at least 1");
    if (c.forest.n_trees < 1) errors.emplace_back("forest.n_trees must be positive");
    if (c.forest.max_depth && *c.forest.max_depth < 1) errors.emplace_back("forest.max_depth must be positive");
    if (c.forest.min_samples_split < 2) errors.emplace_back("forest.min_samples_split must be at least 2");
    for (auto& e : validate(c.ga)) errors.push_back(std::move(e));
    for (auto& e : validate(c.synth)) errors.push_back(std::move(e));
    return errors;
}

void write_config(const RunConfig& config, std::ostream& sink) {
    for (const auto& k : registry()) sink << k.name << " = " << k.get(config) << '\n';
}

void write_forest_params(const HyperParams& params, std::ostream& sink) {
    RunConfig c;
    c.forest = params;
    for (const auto& k : registry()) {
        if (k.name.rfind("forest.", 0) == 0) sink << k.name << " = " << k.get(c) << '\n';
    }
}

}  // namespace dnsbot
