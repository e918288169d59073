#include "dnsbot/features.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <set>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

#include "dnsbot/error.hpp"
#include "dnsbot/text.hpp"

namespace dnsbot {

std::vector<std::string> canonical_feature_names() {
    return {kFeatureNames.begin(), kFeatureNames.end()};
}

double string_entropy_bits(std::string_view s) {
    if (s.empty()) return 0.0;
    std::array<std::size_t, 256> counts{};
    for (char c : s) ++counts[static_cast<unsigned char>(c)];
    const double n = static_cast<double>(s.size());
    double h = 0.0;
    for (std::size_t c : counts) {
        if (c == 0) continue;
        const double p = static_cast<double>(c) / n;
        h -= p * std::log2(p);
    }
    return h;
}

std::string_view top_level_domain(std::string_view qname) {
    const auto dot = qname.rfind('.');
    return dot == std::string_view::npos ? qname : qname.substr(dot + 1);
}

std::string_view second_level_domain(std::string_view qname) {
    const auto last = qname.rfind('.');
    if (last == std::string_view::npos || last == 0) return qname;
    const auto prev = qname.rfind('.', last - 1);
    return prev == std::string_view::npos ? qname : qname.substr(prev + 1);
}

namespace {

std::string_view subnet24(std::string_view ip) {
    const auto dot = ip.rfind('.');
    return dot == std::string_view::npos ? ip : ip.substr(0, dot);
}

// Summation over sorted terms, so the result does not depend on record order.
double ordered_sum(std::vector<double>& terms) {
    std::sort(terms.begin(), terms.end());
    return std::accumulate(terms.begin(), terms.end(), 0.0);
}

}  // namespace

HostFeatureVector extract_features(const HostWindow& window) {
    if (window.records.empty()) throw InvalidArgument("cannot featurize an empty window");
    if (window.window_length <= 0) throw InvalidArgument("window_length must be positive");

    const auto& recs = window.records;
    const double n = static_cast<double>(recs.size());

    std::unordered_map<std::string_view, std::size_t> per_domain;
    std::unordered_map<std::string_view, std::unordered_set<std::string_view>> ips_per_domain;
    std::unordered_set<std::string_view> tlds, slds, servers, ips, subnets;
    std::map<std::int64_t, std::size_t> per_minute;
    std::array<std::size_t, 6> per_type{};
    std::size_t failed = 0;
    std::size_t max_len = 0;
    std::size_t total_len = 0;
    std::vector<double> entropies;
    std::vector<double> ttls;
    entropies.reserve(recs.size());
    std::int64_t min_ttl = std::numeric_limits<std::int64_t>::max();

    for (const auto& r : recs) {
        ++per_domain[r.qname];
        tlds.insert(top_level_domain(r.qname));
        slds.insert(second_level_domain(r.qname));
        servers.insert(r.server);
        ++per_minute[(r.timestamp - window.window_start) / 60];
        ++per_type[static_cast<std::size_t>(r.qtype)];
        total_len += r.qname.size();
        max_len = std::max(max_len, r.qname.size());
        entropies.push_back(string_entropy_bits(r.qname));
        if (r.rcode != ResponseCode::NOERROR) {
            ++failed;
        } else {
            ttls.push_back(static_cast<double>(r.ttl));
            min_ttl = std::min(min_ttl, r.ttl);
        }
        auto& dom_ips = ips_per_domain[r.qname];
        for (const auto& ip : r.resolved_ips) {
            ips.insert(ip);
            subnets.insert(subnet24(ip));
            dom_ips.insert(ip);
        }
    }

    std::size_t max_single = 0;
    for (const auto& [_, c] : per_domain) max_single = std::max(max_single, c);
    std::size_t max_minute = 0;
    for (const auto& [_, c] : per_minute) max_minute = std::max(max_minute, c);
    std::size_t max_ips = 0;
    for (const auto& [_, s] : ips_per_domain) max_ips = std::max(max_ips, s.size());

    HostFeatureVector out;
    out.host = window.host;
    out.window_start = window.window_start;
    auto& f = out.features;
    const double distinct = static_cast<double>(per_domain.size());

    f[feature::window_start_hour] = static_cast<double>((window.window_start % 86400) / 3600);
    f[feature::num_requests] = n;
    f[feature::num_distinct_requests] = distinct;
    f[feature::max_requests_single_domain] = static_cast<double>(max_single);
    f[feature::avg_requests_per_minute] = n / (static_cast<double>(window.window_length) / 60.0);
    f[feature::max_requests_per_minute] = static_cast<double>(max_minute);
    f[feature::num_type_a_requests] = static_cast<double>(per_type[static_cast<std::size_t>(QueryType::A)]);
    f[feature::num_distinct_tlds] = static_cast<double>(tlds.size());
    f[feature::num_distinct_slds] = static_cast<double>(slds.size());
    f[feature::num_distinct_servers] = static_cast<double>(servers.size());
    f[feature::num_type_aaaa_requests] = static_cast<double>(per_type[static_cast<std::size_t>(QueryType::AAAA)]);
    f[feature::num_type_mx_requests] = static_cast<double>(per_type[static_cast<std::size_t>(QueryType::MX)]);
    f[feature::num_type_txt_requests] = static_cast<double>(per_type[static_cast<std::size_t>(QueryType::TXT)]);
    f[feature::num_type_ptr_requests] = static_cast<double>(per_type[static_cast<std::size_t>(QueryType::PTR)]);
    f[feature::avg_qname_length] = static_cast<double>(total_len) / n;
    f[feature::max_qname_length] = static_cast<double>(max_len);
    f[feature::avg_qname_entropy] = ordered_sum(entropies) / n;
    f[feature::num_failed_responses] = static_cast<double>(failed);
    f[feature::ratio_failed_responses] = static_cast<double>(failed) / n;
    f[feature::avg_response_ttl] = ttls.empty() ? 0.0 : ordered_sum(ttls) / static_cast<double>(ttls.size());
    f[feature::min_response_ttl] = ttls.empty() ? 0.0 : static_cast<double>(min_ttl);
    f[feature::num_distinct_resolved_ips] = static_cast<double>(ips.size());
    f[feature::max_ips_single_domain] = static_cast<double>(max_ips);
    f[feature::avg_domains_per_ip] = ips.empty() ? 0.0 : distinct / static_cast<double>(ips.size());
    f[feature::num_distinct_resolved_subnets] = static_cast<double>(subnets.size());
    return out;
}

std::map<std::string, int> load_label_sidecar(std::istream& source) {
    std::map<std::string, int> labels;
    std::string line;
    std::size_t line_no = 0;
    while (text::read_line(source, line)) {
        ++line_no;
        if (line_no == 1 && text::trim(line) == "host,label") continue;
        if (text::trim(line).empty()) continue;
        const auto cols = text::split(line, ',');
        if (cols.size() != 2) throw ParseError(line_no, "expected host,label");
        const auto label = text::trim(cols[1]);
        int value = 0;
        if (label == "benign") {
            value = kBenign;
        } else if (label == "malicious") {
            value = kMalicious;
        } else {
            throw ParseError(line_no, "unknown label '" + std::string(label) + "'");
        }
        labels[std::string(text::trim(cols[0]))] = value;
    }
    return labels;
}

Dataset featurize(const std::vector<HostWindow>& windows, const std::map<std::string, int>* labels) {
    std::vector<HostFeatureVector> vectors;
    vectors.reserve(windows.size());
    for (const auto& w : windows) vectors.push_back(extract_features(w));
    std::sort(vectors.begin(), vectors.end(), [](const auto& a, const auto& b) {
        return std::tie(a.host, a.window_start) < std::tie(b.host, b.window_start);
    });

    Dataset d;
    d.feature_names = canonical_feature_names();
    d.values.reserve(vectors.size() * kFeatureCount);
    if (labels) d.labels.emplace().reserve(vectors.size());
    for (const auto& v : vectors) {
        d.row_keys.push_back({v.host, v.window_start});
        d.values.insert(d.values.end(), v.features.begin(), v.features.end());
        if (labels) {
            const auto it = labels->find(v.host);
            if (it == labels->end()) throw InvalidArgument("no label for host '" + v.host + "'");
            d.labels->push_back(it->second);
        }
    }
    return d;
}

}  // namespace dnsbot
