#include "dnsbot/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <ostream>
#include <string_view>

#include "dnsbot/error.hpp"
#include "dnsbot/ingest.hpp"
#include "dnsbot/random.hpp"

namespace dnsbot {

std::vector<std::string> validate(const SynthConfig& c) {
    std::vector<std::string> errors;
    auto positive = [&](double v, const char* name) {
        if (!(v > 0.0)) errors.push_back(std::string("synth.") + name + " must be positive");
    };
    auto unit = [&](double v, const char* name) {
        if (!(v >= 0.0 && v <= 1.0)) errors.push_back(std::string("synth.") + name + " must be in [0,1]");
    };
    positive(static_cast<double>(c.n_benign_hosts), "n_benign_hosts");
    positive(static_cast<double>(c.n_malicious_hosts), "n_malicious_hosts");
    positive(static_cast<double>(c.window_length), "window_length");
    positive(static_cast<double>(c.windows), "windows");
    if (c.start_time < 0) errors.emplace_back("synth.start_time must be non-negative");
    positive(c.benign_rate_min, "benign_rate_min");
    positive(c.benign_rate_max, "benign_rate_max");
    if (c.benign_rate_max < c.benign_rate_min) errors.emplace_back("synth.benign_rate_max must be >= benign_rate_min");
    positive(static_cast<double>(c.benign_domain_pool), "benign_domain_pool");
    positive(c.benign_zipf_exponent, "benign_zipf_exponent");
    unit(2.0 * c.benign_failure_rate, "benign_failure_rate (doubled)");
    unit(c.benign_cdn_rate, "benign_cdn_rate");
    unit(c.benign_noisy_fraction, "benign_noisy_fraction");
    unit(c.benign_noisy_failure_rate, "benign_noisy_failure_rate");
    unit(c.benign_cdn_heavy_fraction, "benign_cdn_heavy_fraction");
    unit(c.benign_mail_fraction, "benign_mail_fraction");
    if (c.benign_noisy_fraction + c.benign_cdn_heavy_fraction + c.benign_mail_fraction > 1.0) {
        errors.emplace_back("synth.benign_*_fraction values must sum to at most 1");
    }
    unit(c.public_resolver_rate, "public_resolver_rate");
    positive(static_cast<double>(c.resolver_pool), "resolver_pool");
    positive(c.botnet_activity_min, "botnet_activity_min");
    positive(c.botnet_activity_max, "botnet_activity_max");
    unit(c.botnet_beacon_jitter, "botnet_beacon_jitter");
    if (c.botnet_activity_max < c.botnet_activity_min) {
        errors.emplace_back("synth.botnet_activity_max must be >= botnet_activity_min");
    }
    positive(static_cast<double>(c.botnet_domain_pool), "botnet_domain_pool");
    unit(c.botnet_failure_rate, "botnet_failure_rate");
    unit(c.botnet_public_resolver_rate, "botnet_public_resolver_rate");
    return errors;
}

namespace {

constexpr std::size_t kBotFamilies = 4;

struct Domain {
    std::string name;
    std::vector<std::string> ips;
    std::int64_t ttl = 300;
};

std::string ipv4(std::uint32_t a, std::uint32_t b, std::uint32_t c, std::uint32_t d) {
    return std::to_string(a) + '.' + std::to_string(b) + '.' + std::to_string(c) + '.' + std::to_string(d);
}

std::string host_name(std::size_t i) {
    const auto n = static_cast<std::uint32_t>(i + 1);
    return ipv4(10, (n >> 16) & 0xff, (n >> 8) & 0xff, n & 0xff);
}

// Pronounceable, low-entropy names built from consonant-vowel syllables.
std::string word(Rng& rng) {
    static constexpr std::string_view consonants = "bcdfghklmnprstv";
    static constexpr std::string_view vowels = "aeiou";
    std::string w;
    const std::size_t syllables = 2 + rng.index(3);
    for (std::size_t s = 0; s < syllables; ++s) {
        w += consonants[rng.index(consonants.size())];
        w += vowels[rng.index(vowels.size())];
    }
    return w;
}

std::string random_label(Rng& rng, std::size_t min_len, std::size_t max_len, std::string_view alphabet) {
    const std::size_t len = min_len + rng.index(max_len - min_len + 1);
    std::string s;
    for (std::size_t i = 0; i < len; ++i) s += alphabet[rng.index(alphabet.size())];
    return s;
}

std::string random_public_ip(Rng& rng) {
    return ipv4(static_cast<std::uint32_t>(23 + rng.index(180)), static_cast<std::uint32_t>(rng.index(256)),
                static_cast<std::uint32_t>(rng.index(256)), static_cast<std::uint32_t>(1 + rng.index(254)));
}

std::vector<std::string> resolved_block(Rng& rng, std::size_t count) {
    const auto a = static_cast<std::uint32_t>(23 + rng.index(180));
    const auto b = static_cast<std::uint32_t>(rng.index(256));
    const auto c = static_cast<std::uint32_t>(rng.index(256));
    std::vector<std::string> ips;
    for (std::size_t i = 0; i < count; ++i) ips.push_back(ipv4(a, b, c, static_cast<std::uint32_t>(1 + rng.index(254))));
    std::sort(ips.begin(), ips.end());
    ips.erase(std::unique(ips.begin(), ips.end()), ips.end());
    return ips;
}

struct World {
    std::vector<Domain> benign;
    std::vector<double> benign_cdf;
    std::vector<std::string> cdn_suffixes;
    std::vector<std::string> resolvers;
    std::vector<std::string> public_resolvers;
    std::array<std::vector<Domain>, kBotFamilies> families;
};

World build_world(const SynthConfig& c, Rng& rng) {
    static constexpr std::array<std::string_view, 20> benign_tlds = {
        "com", "com", "com", "com", "com", "com", "com", "com", "com", "com",
        "net", "net", "org", "org", "io", "de", "info", "biz", "ru", "top"};
    static constexpr std::array<std::string_view, 7> dga_tlds = {"com", "net", "org", "info", "biz", "ru", "top"};
    static constexpr std::array<std::int64_t, 5> ttls = {60, 300, 600, 3600, 86400};
    World w;
    double total = 0.0;
    for (std::size_t i = 0; i < c.benign_domain_pool; ++i) {
        Domain d;
        const std::string base = word(rng) + "." + std::string(benign_tlds[rng.index(benign_tlds.size())]);
        d.name = rng.bernoulli(0.7) ? "www." + base : base;
        d.ips = resolved_block(rng, 1 + rng.index(3));
        d.ttl = ttls[rng.index(ttls.size())];
        w.benign.push_back(std::move(d));
        total += 1.0 / std::pow(static_cast<double>(i + 1), c.benign_zipf_exponent);
        w.benign_cdf.push_back(total);
    }
    for (double& x : w.benign_cdf) x /= total;
    for (std::size_t i = 0; i < 5; ++i) w.cdn_suffixes.push_back("cdn" + std::to_string(i + 1) + "-edge.net");
    for (std::size_t i = 0; i < c.resolver_pool; ++i) w.resolvers.push_back(ipv4(192, 168, 0, static_cast<std::uint32_t>(53 + i)));
    w.public_resolvers = {"8.8.8.8", "8.8.4.4", "1.1.1.1", "9.9.9.9"};

    for (auto& family : w.families) {
        const auto c2 = resolved_block(rng, 4);
        for (std::size_t i = 0; i < c.botnet_domain_pool; ++i) {
            Domain d;
            d.name = random_label(rng, 8, 14, "abcdefghijklmnopqrstuvwxyz0123456789") + "." +
                     std::string(dga_tlds[rng.index(dga_tlds.size())]);
            d.ips = {c2[rng.index(c2.size())]};
            d.ttl = 60;
            family.push_back(std::move(d));
        }
    }
    return w;
}

enum class Profile { normal, noisy, cdn_heavy, mail };

// Per-host record-type mix: A, AAAA, MX, TXT, PTR, OTHER.
using TypeMix = std::array<double, 6>;

TypeMix draw_type_mix(Profile p, Rng& rng) {
    TypeMix m = {rng.uniform(0.5, 0.9), rng.uniform(0.05, 0.25), rng.uniform(0.0, 0.04),
                 rng.uniform(0.0, 0.03), rng.uniform(0.0, 0.05), rng.uniform(0.0, 0.03)};
    if (p == Profile::mail) {
        m[2] += rng.uniform(0.1, 0.3);
        m[3] += rng.uniform(0.05, 0.2);
    }
    double total = 0.0;
    for (double& x : m) total += x;
    double acc = 0.0;
    for (double& x : m) x = (acc += x / total);
    return m;
}

QueryType draw_qtype(const TypeMix& cdf, Rng& rng) {
    static constexpr std::array<QueryType, 6> types = {QueryType::A,   QueryType::AAAA, QueryType::MX,
                                                       QueryType::TXT, QueryType::PTR,  QueryType::OTHER};
    const double u = rng.uniform01();
    for (std::size_t i = 0; i + 1 < cdf.size(); ++i) {
        if (u < cdf[i]) return types[i];
    }
    return types.back();
}

void fill_response(DnsQueryRecord& r, const Domain& d, double failure_rate, Rng& rng) {
    if (rng.bernoulli(failure_rate)) {
        r.rcode = rng.bernoulli(0.8) ? ResponseCode::NXDOMAIN : ResponseCode::SERVFAIL;
        r.ttl = 0;
        return;
    }
    r.rcode = ResponseCode::NOERROR;
    r.ttl = d.ttl;
    if (r.qtype == QueryType::A) r.resolved_ips = d.ips;
}

struct HostProfile {
    std::string name;
    bool malicious = false;
    Profile profile = Profile::normal;
    double rate = 0.0;
    double failure_rate = 0.0;
    double cdn_rate = 0.0;
    double repeat_rate = 0.0;
    std::vector<std::size_t> favourites;
    TypeMix type_mix{};
    std::vector<std::string> resolvers;
    std::size_t family = 0;
    double activity = 0.0;
};

HostProfile draw_profile(const SynthConfig& c, const World& w, Rng& rng) {
    HostProfile h;
    h.rate = rng.uniform(c.benign_rate_min, c.benign_rate_max);
    const double u = rng.uniform01();
    if (u < c.benign_noisy_fraction) {
        h.profile = Profile::noisy;
    } else if (u < c.benign_noisy_fraction + c.benign_cdn_heavy_fraction) {
        h.profile = Profile::cdn_heavy;
    } else if (u < c.benign_noisy_fraction + c.benign_cdn_heavy_fraction + c.benign_mail_fraction) {
        h.profile = Profile::mail;
    }
    h.failure_rate = h.profile == Profile::noisy ? rng.uniform(0.0, c.benign_noisy_failure_rate)
                                                 : rng.uniform(0.0, 2.0 * c.benign_failure_rate);
    h.cdn_rate = h.profile == Profile::cdn_heavy ? std::min(1.0, 6.0 * c.benign_cdn_rate)
                                                 : rng.uniform(0.0, 2.0 * c.benign_cdn_rate);
    h.type_mix = draw_type_mix(h.profile, rng);
    // A few favourite names re-queried throughout the window.
    h.repeat_rate = rng.uniform(0.0, 0.4);
    for (std::size_t k = 0, n = 1 + rng.index(5); k < n; ++k) h.favourites.push_back(rng.index(w.benign.size()));
    const std::size_t n_resolvers = 1 + rng.index(std::min<std::size_t>(3, w.resolvers.size()));
    for (std::size_t k = 0; k < n_resolvers; ++k) h.resolvers.push_back(w.resolvers[rng.index(w.resolvers.size())]);
    if (rng.bernoulli(c.public_resolver_rate)) {
        h.resolvers.push_back(w.public_resolvers[rng.index(w.public_resolvers.size())]);
    }
    return h;
}

void emit_background(const SynthConfig& c, const World& w, const HostProfile& h, std::int64_t start,
                     Rng& rng, std::vector<DnsQueryRecord>& out) {
    const double per_second = h.rate / static_cast<double>(c.window_length);
    const double horizon = static_cast<double>(c.window_length);
    auto emit = [&](double t) {
        DnsQueryRecord r;
        r.timestamp = start + static_cast<std::int64_t>(t);
        r.host = h.name;
        r.server = h.resolvers[rng.index(h.resolvers.size())];
        r.qtype = draw_qtype(h.type_mix, rng);
        if (rng.bernoulli(h.cdn_rate)) {
            Domain cdn;
            cdn.name = random_label(rng, 8, 14, "0123456789abcdef") + "." + w.cdn_suffixes[rng.index(w.cdn_suffixes.size())];
            cdn.ips = resolved_block(rng, 1 + rng.index(4));
            cdn.ttl = 20;
            r.qname = cdn.name;
            fill_response(r, cdn, h.failure_rate, rng);
        } else if (rng.bernoulli(h.repeat_rate)) {
            const Domain& d = w.benign[h.favourites[rng.index(h.favourites.size())]];
            r.qname = d.name;
            fill_response(r, d, h.failure_rate, rng);
        } else {
            const double u = rng.uniform01();
            const auto idx = static_cast<std::size_t>(
                std::upper_bound(w.benign_cdf.begin(), w.benign_cdf.end(), u) - w.benign_cdf.begin());
            const Domain& d = w.benign[std::min(idx, w.benign.size() - 1)];
            r.qname = d.name;
            fill_response(r, d, h.failure_rate, rng);
        }
        out.push_back(std::move(r));
    };
    std::size_t emitted = 0;
    for (double t = rng.exponential(per_second); t < horizon; t += rng.exponential(per_second)) {
        emit(t);
        ++emitted;
    }
    // Every host shows up in every window.
    if (emitted == 0) emit(rng.uniform(0.0, horizon));
}

void emit_beacon(const SynthConfig& c, const World& w, const HostProfile& h, DnsQueryRecord& r, Rng& rng) {
    const auto& pool = w.families[h.family];
    r.server = rng.bernoulli(c.botnet_public_resolver_rate) ? w.public_resolvers[rng.index(w.public_resolvers.size())]
                                                            : h.resolvers[rng.index(h.resolvers.size())];
    r.qtype = rng.bernoulli(0.25) ? QueryType::TXT : QueryType::A;
    Domain d = pool[rng.index(pool.size())];
    // Answers rotate across unrelated networks.
    if (rng.bernoulli(0.5)) d.ips.push_back(random_public_ip(rng));
    r.qname = d.name;
    fill_response(r, d, c.botnet_failure_rate, rng);
}

// Periodic lookups, `activity` of them per background lookup, each slot
// displaced by up to `jitter` of the period.
void emit_beacons(const SynthConfig& c, const World& w, const HostProfile& h, std::int64_t start, Rng& rng,
                  std::vector<DnsQueryRecord>& out) {
    const double horizon = static_cast<double>(c.window_length);
    const double period = horizon / std::max(1.0, h.activity * h.rate);
    const double spread = c.botnet_beacon_jitter * period;
    for (double slot = rng.uniform(0.0, period); slot < horizon; slot += period) {
        const double t = std::clamp(slot + rng.uniform(-spread, spread), 0.0, horizon - 1.0);
        DnsQueryRecord r;
        r.timestamp = start + static_cast<std::int64_t>(t);
        r.host = h.name;
        emit_beacon(c, w, h, r, rng);
        out.push_back(std::move(r));
    }
}

}  // namespace

SynthManifest generate(const SynthConfig& c, std::ostream& log, std::ostream& labels) {
    if (const auto errors = validate(c); !errors.empty()) throw InvalidArgument(errors.front());
    Rng rng(c.seed);
    const World world = build_world(c, rng);

    const std::size_t n_hosts = c.n_benign_hosts + c.n_malicious_hosts;
    std::vector<std::size_t> order(n_hosts);
    for (std::size_t i = 0; i < n_hosts; ++i) order[i] = i;
    for (std::size_t i = n_hosts; i > 1; --i) std::swap(order[i - 1], order[rng.index(i)]);
    std::vector<bool> malicious(n_hosts, false);
    for (std::size_t i = 0; i < c.n_malicious_hosts; ++i) malicious[order[i]] = true;

    SynthManifest manifest;
    log << kQueryLogHeader << '\n';
    labels << "host,label\n";
    std::vector<DnsQueryRecord> records;
    std::size_t next_family = 0;
    for (std::size_t i = 0; i < n_hosts; ++i) {
        HostProfile h = draw_profile(c, world, rng);
        h.name = host_name(i);
        h.malicious = malicious[i];
        if (h.malicious) {
            h.family = next_family++ % kBotFamilies;
            h.activity = rng.uniform(c.botnet_activity_min, c.botnet_activity_max);
        }

        for (std::size_t win = 0; win < c.windows; ++win) {
            const std::int64_t start = c.start_time + static_cast<std::int64_t>(win) * c.window_length;
            records.clear();
            emit_background(c, world, h, start, rng, records);
            if (h.malicious) emit_beacons(c, world, h, start, rng, records);
            std::stable_sort(records.begin(), records.end(),
                             [](const auto& a, const auto& b) { return a.timestamp < b.timestamp; });
            for (const auto& r : records) log << format_query_record(r) << '\n';
        }
        labels << h.name << ',' << (h.malicious ? "malicious" : "benign") << '\n';
        manifest.hosts.push_back(h.name);
        manifest.labels.push_back(h.malicious ? 1 : 0);
    }
    return manifest;
}

}  // namespace dnsbot
