#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace dnsbot {

enum class QueryType { A, AAAA, MX, TXT, PTR, OTHER };
enum class ResponseCode { NOERROR, NXDOMAIN, SERVFAIL, OTHER };

/// Maps a log token to its enum; anything unrecognized becomes OTHER.
QueryType parse_query_type(std::string_view token);
ResponseCode parse_response_code(std::string_view token);

std::string_view to_string(QueryType t);
std::string_view to_string(ResponseCode r);

/// One DNS query event as recorded in the query log.
struct DnsQueryRecord {
    std::int64_t timestamp = 0;  ///< seconds since epoch
    std::string host;
    std::string server;
    std::string qname;  ///< lowercase
    QueryType qtype = QueryType::OTHER;
    ResponseCode rcode = ResponseCode::OTHER;
    std::int64_t ttl = 0;
    std::vector<std::string> resolved_ips;  ///< empty unless rcode is NOERROR

    bool operator==(const DnsQueryRecord&) const = default;
};

/// All records of one host that fall in [window_start, window_start + window_length).
struct HostWindow {
    std::string host;
    std::int64_t window_start = 0;
    std::int64_t window_length = 0;
    std::vector<DnsQueryRecord> records;  ///< sorted by timestamp, stable on ties
};

inline constexpr std::string_view kQueryLogHeader = "ts,host,server,qname,qtype,rcode,ttl,ips";

/// Parses the CSV query log. Empty input yields an empty list. Throws
/// ParseError (with the offending line number) on a malformed line.
std::vector<DnsQueryRecord> parse_query_log(std::istream& source);

/// Renders one record as a log line (no trailing newline).
std::string format_query_record(const DnsQueryRecord& record);

/// Writes the header line followed by one line per record.
void write_query_log(const std::vector<DnsQueryRecord>& records, std::ostream& sink);

/// Partitions records by (host, floor(timestamp / window_length)).
/// Windows come out sorted by (host, window_start).
std::vector<HostWindow> aggregate_windows(const std::vector<DnsQueryRecord>& records,
                                          std::int64_t window_length);

}  // namespace dnsbot
