#include <doctest.h>

#include <set>
#include <sstream>

#include "dnsbot/features.hpp"
#include "dnsbot/ingest.hpp"
#include "dnsbot/synth.hpp"

using namespace dnsbot;

namespace {

struct Generated {
    std::string log;
    std::string labels;
    SynthManifest manifest;
};

Generated run(const SynthConfig& c) {
    std::ostringstream log, labels;
    Generated g;
    g.manifest = generate(c, log, labels);
    g.log = log.str();
    g.labels = labels.str();
    return g;
}

SynthConfig small() {
    SynthConfig c;
    c.n_benign_hosts = 300;
    c.n_malicious_hosts = 20;
    return c;
}

}  // namespace

TEST_SUITE("synth") {

TEST_CASE("defaults produce 7963 hosts with an exact label split") {
    auto g = run(SynthConfig{});
    std::istringstream lab(g.labels);
    auto labels = load_label_sidecar(lab);
    CHECK(labels.size() == 7963);
    std::size_t mal = 0;
    for (const auto& [_, l] : labels) mal += l == kMalicious;
    CHECK(mal == 100);
    CHECK(labels.size() - mal == 7863);

    std::istringstream log(g.log);
    auto recs = parse_query_log(log);
    std::set<std::string> hosts;
    for (const auto& r : recs) hosts.insert(r.host);
    CHECK(hosts.size() == 7963);
}

TEST_CASE("same seed gives byte-identical output") {
    auto a = run(small());
    auto b = run(small());
    CHECK(a.log == b.log);
    CHECK(a.labels == b.labels);
    auto other = small();
    other.seed += 1;
    CHECK(run(other).log != a.log);
}

TEST_CASE("records satisfy the log invariants") {
    auto c = small();
    c.windows = 2;
    auto g = run(c);
    std::istringstream log(g.log);
    auto recs = parse_query_log(log);
    CHECK_FALSE(recs.empty());
    for (const auto& r : recs) {
        CHECK(r.timestamp >= c.start_time);
        CHECK(r.timestamp < c.start_time + 2 * c.window_length);
        if (r.rcode != ResponseCode::NOERROR) CHECK(r.resolved_ips.empty());
    }
    auto wins = aggregate_windows(recs, c.window_length);
    CHECK(wins.size() == 2 * (c.n_benign_hosts + c.n_malicious_hosts));
}

TEST_CASE("bots reach more second-level domains than benign hosts on average") {
    auto g = run(small());
    std::istringstream log(g.log), lab(g.labels);
    auto labels = load_label_sidecar(lab);
    auto d = featurize(aggregate_windows(parse_query_log(log), small().window_length), &labels);
    const auto col = *d.column_index("num_distinct_slds");
    double sum[2] = {0, 0}, n[2] = {0, 0};
    for (std::size_t r = 0; r < d.rows(); ++r) {
        sum[(*d.labels)[r]] += d.at(r, col);
        n[(*d.labels)[r]] += 1;
    }
    CHECK(sum[1] / n[1] > sum[0] / n[0]);
}

TEST_CASE("invalid knobs are reported") {
    SynthConfig c;
    c.n_benign_hosts = 0;
    c.benign_rate_min = 0;
    c.botnet_beacon_jitter = 2;
    CHECK(validate(c).size() >= 3);
    CHECK(validate(SynthConfig{}).empty());
}

}
