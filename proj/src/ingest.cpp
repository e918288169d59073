#include "dnsbot/ingest.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <ostream>
#include <utility>

#include "dnsbot/error.hpp"
#include "dnsbot/text.hpp"

namespace dnsbot {

QueryType parse_query_type(std::string_view token) {
    const std::string t = text::to_lower(text::trim(token));
    if (t == "a") return QueryType::A;
    if (t == "aaaa") return QueryType::AAAA;
    if (t == "mx") return QueryType::MX;
    if (t == "txt") return QueryType::TXT;
    if (t == "ptr") return QueryType::PTR;
    return QueryType::OTHER;
}

ResponseCode parse_response_code(std::string_view token) {
    const std::string t = text::to_lower(text::trim(token));
    if (t == "noerror") return ResponseCode::NOERROR;
    if (t == "nxdomain") return ResponseCode::NXDOMAIN;
    if (t == "servfail") return ResponseCode::SERVFAIL;
    return ResponseCode::OTHER;
}

std::string_view to_string(QueryType t) {
    switch (t) {
        case QueryType::A: return "A";
        case QueryType::AAAA: return "AAAA";
        case QueryType::MX: return "MX";
        case QueryType::TXT: return "TXT";
        case QueryType::PTR: return "PTR";
        case QueryType::OTHER: break;
    }
    return "OTHER";
}

std::string_view to_string(ResponseCode r) {
    switch (r) {
        case ResponseCode::NOERROR: return "NOERROR";
        case ResponseCode::NXDOMAIN: return "NXDOMAIN";
        case ResponseCode::SERVFAIL: return "SERVFAIL";
        case ResponseCode::OTHER: break;
    }
    return "OTHER";
}

namespace {

DnsQueryRecord parse_record(std::string_view line, std::size_t line_no) {
    const auto cols = text::split(line, ',');
    if (cols.size() != 8) {
        throw ParseError(line_no, "expected 8 columns, found " + std::to_string(cols.size()));
    }
    DnsQueryRecord rec;
    const auto ts = text::parse_int(cols[0]);
    if (!ts) throw ParseError(line_no, "timestamp is not an integer");
    if (*ts < 0) throw ParseError(line_no, "timestamp is negative");
    rec.timestamp = *ts;
    rec.host = std::string(text::trim(cols[1]));
    rec.server = std::string(text::trim(cols[2]));
    rec.qname = text::to_lower(text::trim(cols[3]));
    if (rec.qname.empty()) throw ParseError(line_no, "empty qname");
    rec.qtype = parse_query_type(cols[4]);
    rec.rcode = parse_response_code(cols[5]);

    const auto ttl_field = text::trim(cols[6]);
    if (!ttl_field.empty()) {
        const auto ttl = text::parse_int(ttl_field);
        if (!ttl) throw ParseError(line_no, "ttl is not an integer");
        if (*ttl < 0) throw ParseError(line_no, "ttl is negative");
        rec.ttl = *ttl;
    }

    const auto ips_field = text::trim(cols[7]);
    if (!ips_field.empty() && rec.rcode == ResponseCode::NOERROR) {
        for (auto ip : text::split(ips_field, ';')) {
            ip = text::trim(ip);
            if (!ip.empty()) rec.resolved_ips.emplace_back(ip);
        }
    }
    return rec;
}

}  // namespace

std::vector<DnsQueryRecord> parse_query_log(std::istream& source) {
    std::vector<DnsQueryRecord> records;
    std::string line;
    std::size_t line_no = 0;
    while (text::read_line(source, line)) {
        ++line_no;
        if (line_no == 1 && text::trim(line) == kQueryLogHeader) continue;
        if (text::trim(line).empty()) continue;
        records.push_back(parse_record(line, line_no));
    }
    return records;
}

std::string format_query_record(const DnsQueryRecord& r) {
    std::string out;
    out.reserve(64 + r.qname.size());
    out += std::to_string(r.timestamp);
    out += ',';
    out += r.host;
    out += ',';
    out += r.server;
    out += ',';
    out += r.qname;
    out += ',';
    out += to_string(r.qtype);
    out += ',';
    out += to_string(r.rcode);
    out += ',';
    out += std::to_string(r.ttl);
    out += ',';
    for (std::size_t i = 0; i < r.resolved_ips.size(); ++i) {
        if (i) out += ';';
        out += r.resolved_ips[i];
    }
    return out;
}

void write_query_log(const std::vector<DnsQueryRecord>& records, std::ostream& sink) {
    sink << kQueryLogHeader << '\n';
    for (const auto& r : records) sink << format_query_record(r) << '\n';
}

std::vector<HostWindow> aggregate_windows(const std::vector<DnsQueryRecord>& records,
                                          std::int64_t window_length) {
    if (window_length <= 0) throw InvalidArgument("window_length must be positive");

    // Timestamps are non-negative, so integer division is the floor.
    std::map<std::pair<std::string, std::int64_t>, std::vector<const DnsQueryRecord*>> groups;
    for (const auto& r : records) {
        const std::int64_t start = (r.timestamp / window_length) * window_length;
        groups[{r.host, start}].push_back(&r);
    }

    std::vector<HostWindow> windows;
    windows.reserve(groups.size());
    for (auto& [key, members] : groups) {
        std::stable_sort(members.begin(), members.end(),
                         [](const DnsQueryRecord* a, const DnsQueryRecord* b) {
                             return a->timestamp < b->timestamp;
                         });
        HostWindow w;
        w.host = key.first;
        w.window_start = key.second;
        w.window_length = window_length;
        w.records.reserve(members.size());
        for (const auto* r : members) w.records.push_back(*r);
        windows.push_back(std::move(w));
    }
    return windows;
}

}  // namespace dnsbot
