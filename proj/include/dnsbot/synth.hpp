#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace dnsbot {

/// Knobs for the synthetic query-log generator. The checked-in
/// config/default.conf carries the same values under the `synth.` prefix.
struct SynthConfig {
    std::size_t n_benign_hosts = 7863;
    std::size_t n_malicious_hosts = 100;
    std::int64_t window_length = 86400;
    std::size_t windows = 1;                   ///< observation windows per host
    std::int64_t start_time = 1461801600;      ///< 2016-04-28T00:00:00Z
    std::uint64_t seed = 2016;

    // Benign hosts: Poisson-spaced lookups over a Zipf-weighted pool.
    double benign_rate_min = 20.0;             ///< queries per window
    double benign_rate_max = 160.0;
    std::size_t benign_domain_pool = 4000;
    double benign_zipf_exponent = 1.0;
    double benign_failure_rate = 0.03;         ///< mean per-host failure share
    double benign_cdn_rate = 0.05;             ///< share of lookups to random-looking CDN names
    double benign_noisy_fraction = 0.05;       ///< hosts with failure-heavy traffic
    double benign_noisy_failure_rate = 0.3;    ///< upper bound of a noisy host's failure share
    double benign_cdn_heavy_fraction = 0.05;   ///< hosts with six times the CDN share
    double benign_mail_fraction = 0.03;        ///< hosts with heavy MX and TXT traffic
    double public_resolver_rate = 0.15;        ///< hosts that also use a public resolver
    std::size_t resolver_pool = 6;

    // Botnet hosts: ordinary background plus jittered C2 beacons. Families
    // rotate through DGA, TXT tunnel, fast-flux and resolver-hopping styles.
    double botnet_activity_min = 0.3;          ///< beacons per background lookup
    double botnet_activity_max = 0.5;
    double botnet_beacon_jitter = 0.3;         ///< uniform +- share of the beacon period
    std::size_t botnet_domain_pool = 500;      ///< generated names per DGA family
    double botnet_failure_rate = 0.4;          ///< failed share of beacon lookups
    double botnet_public_resolver_rate = 0.3;  ///< beacons sent through a public resolver

    bool operator==(const SynthConfig&) const = default;
};

/// Every violated constraint, one message each; empty when valid.
std::vector<std::string> validate(const SynthConfig& config);

/// Host identifiers and their labels, in emission order.
struct SynthManifest {
    std::vector<std::string> hosts;
    std::vector<int> labels;
};

/// Writes a query log (ingest CSV format) and the `host,label` sidecar.
/// Output is a pure function of the config.
SynthManifest generate(const SynthConfig& config, std::ostream& log, std::ostream& labels);

}  // namespace dnsbot
