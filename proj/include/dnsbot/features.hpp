#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dnsbot/dataset.hpp"
#include "dnsbot/ingest.hpp"

namespace dnsbot {

inline constexpr std::size_t kFeatureCount = 25;

/// Canonical per-window feature schema, in column order.
inline constexpr std::array<std::string_view, kFeatureCount> kFeatureNames = {
    "window_start_hour",
    "num_requests",
    "num_distinct_requests",
    "max_requests_single_domain",
    "avg_requests_per_minute",
    "max_requests_per_minute",
    "num_type_a_requests",
    "num_distinct_tlds",
    "num_distinct_slds",
    "num_distinct_servers",
    "num_type_aaaa_requests",
    "num_type_mx_requests",
    "num_type_txt_requests",
    "num_type_ptr_requests",
    "avg_qname_length",
    "max_qname_length",
    "avg_qname_entropy",
    "num_failed_responses",
    "ratio_failed_responses",
    "avg_response_ttl",
    "min_response_ttl",
    "num_distinct_resolved_ips",
    "max_ips_single_domain",
    "avg_domains_per_ip",
    "num_distinct_resolved_subnets",
};

/// Zero-based column positions in kFeatureNames.
namespace feature {
enum : std::size_t {
    window_start_hour,
    num_requests,
    num_distinct_requests,
    max_requests_single_domain,
    avg_requests_per_minute,
    max_requests_per_minute,
    num_type_a_requests,
    num_distinct_tlds,
    num_distinct_slds,
    num_distinct_servers,
    num_type_aaaa_requests,
    num_type_mx_requests,
    num_type_txt_requests,
    num_type_ptr_requests,
    avg_qname_length,
    max_qname_length,
    avg_qname_entropy,
    num_failed_responses,
    ratio_failed_responses,
    avg_response_ttl,
    min_response_ttl,
    num_distinct_resolved_ips,
    max_ips_single_domain,
    avg_domains_per_ip,
    num_distinct_resolved_subnets,
};
}  // namespace feature

std::vector<std::string> canonical_feature_names();

struct HostFeatureVector {
    std::string host;
    std::int64_t window_start = 0;
    std::array<double, kFeatureCount> features{};
    std::optional<int> label;
};

/// Shannon entropy, in bits, of the character distribution of `s`.
double string_entropy_bits(std::string_view s);

/// Last dot-separated label ("com" for "a.example.com").
std::string_view top_level_domain(std::string_view qname);

/// Last two labels ("example.com" for "a.example.com"); the whole name if it
/// has a single label.
std::string_view second_level_domain(std::string_view qname);

/// Computes the canonical 25-feature vector. Throws InvalidArgument on an
/// empty window. Independent of record order within the window.
HostFeatureVector extract_features(const HostWindow& window);

/// Reads the `host,label` sidecar; a header line `host,label` is optional.
std::map<std::string, int> load_label_sidecar(std::istream& source);

/// Featurizes every window and assembles a dataset sorted by row key.
/// When `labels` is given, every host must appear in it.
Dataset featurize(const std::vector<HostWindow>& windows,
                  const std::map<std::string, int>* labels = nullptr);

}  // namespace dnsbot
