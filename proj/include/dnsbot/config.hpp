#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "dnsbot/error.hpp"
#include "dnsbot/forest.hpp"
#include "dnsbot/preprocess.hpp"
#include "dnsbot/synth.hpp"
#include "dnsbot/tune.hpp"

namespace dnsbot {

/// Everything one pipeline run needs. Every field has a default, so an
/// empty config file is a valid config.
struct RunConfig {
    struct Paths {
        std::string log;
        std::string labels;
        std::string dataset;
        std::string output = "out";
        bool operator==(const Paths&) const = default;
    } paths;
    std::int64_t window_length = 86400;
    struct Smote {
        std::size_t k = 5;
        double target_ratio = 1.0;
        bool operator==(const Smote&) const = default;
    } smote;
    struct Select {
        std::size_t bins = 10;
        std::size_t k = 10;
        bool operator==(const Select&) const = default;
    } select;
    GaConfig ga;
    struct Split {
        double test_fraction = 0.3;
        bool operator==(const Split&) const = default;
    } split;
    /// Forest trained by `train`; `tune` writes its winner here.
    HyperParams forest = default_forest_params();
    SynthConfig synth;
    std::uint64_t seed = 42;
    std::size_t workers = 1;

    bool operator==(const RunConfig&) const = default;
};

/// Raised when a config fails to parse or validate; lists every problem.
class ConfigError : public Error {
public:
    explicit ConfigError(std::vector<std::string> problems);
    const std::vector<std::string>& problems() const noexcept { return problems_; }

private:
    std::vector<std::string> problems_;
};

/// Names of all recognised keys, in the order write_config emits them.
std::vector<std::string> config_keys();

/// Applies one `key=value` assignment; returns an error message or "".
std::string set_config_value(RunConfig& config, std::string_view key, std::string_view value);

/// Parses `key = value` lines (`#` starts a comment) over the defaults.
/// Throws ConfigError listing every bad line and every failed check.
RunConfig parse_config(std::istream& source);
RunConfig load_config_file(const std::string& path);

/// Every violated constraint; empty when valid. Input paths are not checked.
std::vector<std::string> validate(const RunConfig& config);

/// Writes every key, so the output re-parses to an equal config.
void write_config(const RunConfig& config, std::ostream& sink);

/// Writes only the forest.* keys.
void write_forest_params(const HyperParams& params, std::ostream& sink);

}  // namespace dnsbot
