#include "dnsbot/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <set>

#include "dnsbot/error.hpp"
#include "dnsbot/text.hpp"

namespace dnsbot {

std::string_view label_name(int label) { return label == kMalicious ? "malicious" : "benign"; }

std::vector<double> Dataset::column(std::size_t c) const {
    std::vector<double> out(rows());
    for (std::size_t r = 0; r < rows(); ++r) out[r] = at(r, c);
    return out;
}

std::optional<std::size_t> Dataset::column_index(std::string_view name) const {
    const auto it = std::find(feature_names.begin(), feature_names.end(), name);
    if (it == feature_names.end()) return std::nullopt;
    return static_cast<std::size_t>(it - feature_names.begin());
}

void Dataset::validate() const {
    if (values.size() != rows() * cols()) {
        throw InvalidArgument("dataset has " + std::to_string(values.size()) + " values for " +
                              std::to_string(rows()) + "x" + std::to_string(cols()));
    }
    if (labels && labels->size() != rows()) {
        throw InvalidArgument("dataset label count does not match row count");
    }
    if (labels) {
        for (int l : *labels) {
            if (l != kBenign && l != kMalicious) throw InvalidArgument("label must be 0 or 1");
        }
    }
    for (double v : values) {
        if (!std::isfinite(v)) throw InvalidArgument("dataset contains a non-finite value");
    }
}

std::size_t Dataset::count_label(int label) const {
    if (!labels) throw InvalidArgument("dataset is unlabeled");
    return static_cast<std::size_t>(std::count(labels->begin(), labels->end(), label));
}

Dataset take_rows(const Dataset& d, std::span<const std::size_t> indices) {
    Dataset out;
    out.feature_names = d.feature_names;
    out.values.reserve(indices.size() * d.cols());
    out.row_keys.reserve(indices.size());
    if (d.labels) out.labels.emplace().reserve(indices.size());
    for (std::size_t i : indices) {
        const auto r = d.row(i);
        out.values.insert(out.values.end(), r.begin(), r.end());
        out.row_keys.push_back(d.row_keys[i]);
        if (d.labels) out.labels->push_back((*d.labels)[i]);
    }
    return out;
}

Dataset take_columns(const Dataset& d, std::span<const std::string> names) {
    std::vector<std::size_t> idx;
    idx.reserve(names.size());
    for (const auto& n : names) {
        const auto c = d.column_index(n);
        if (!c) throw InvalidArgument("dataset has no column named '" + n + "'");
        idx.push_back(*c);
    }
    Dataset out;
    out.feature_names.assign(names.begin(), names.end());
    out.labels = d.labels;
    out.row_keys = d.row_keys;
    out.values.reserve(d.rows() * idx.size());
    for (std::size_t r = 0; r < d.rows(); ++r) {
        for (std::size_t c : idx) out.values.push_back(d.at(r, c));
    }
    return out;
}

Dataset load_dataset(std::istream& source) {
    std::string line;
    if (!text::read_line(source, line)) throw ParseError(1, "missing header");

    const auto header = text::split(line, ',');
    if (header.size() < 4 || text::trim(header[0]) != "host" ||
        text::trim(header[1]) != "window_start" || text::trim(header.back()) != "label") {
        throw ParseError(1, "header must be host,window_start,<features...>,label");
    }
    Dataset d;
    std::set<std::string> seen;
    for (std::size_t i = 2; i + 1 < header.size(); ++i) {
        std::string name(text::trim(header[i]));
        if (name.empty()) throw ParseError(1, "empty feature name");
        if (!seen.insert(name).second) throw ParseError(1, "duplicate feature name '" + name + "'");
        d.feature_names.push_back(std::move(name));
    }

    const std::size_t ncols = header.size();
    std::vector<int> labels;
    std::optional<bool> has_labels;
    std::size_t line_no = 1;
    while (text::read_line(source, line)) {
        ++line_no;
        if (text::trim(line).empty()) continue;
        const auto cols = text::split(line, ',');
        if (cols.size() != ncols) {
            throw ParseError(line_no, "expected " + std::to_string(ncols) + " columns, found " +
                                          std::to_string(cols.size()));
        }
        const auto ws = text::parse_int(cols[1]);
        if (!ws) throw ParseError(line_no, "window_start is not an integer");
        d.row_keys.push_back({std::string(text::trim(cols[0])), *ws});
        for (std::size_t i = 2; i + 1 < ncols; ++i) {
            const auto v = text::parse_double(cols[i]);
            if (!v) {
                throw ParseError(line_no, "column '" + d.feature_names[i - 2] +
                                              "' is not a finite number");
            }
            d.values.push_back(*v);
        }
        const auto label = text::trim(cols.back());
        const bool present = !label.empty();
        if (has_labels && *has_labels != present) {
            throw ParseError(line_no, "labels must be given for every row or for none");
        }
        has_labels = present;
        if (present) {
            if (label == "benign") {
                labels.push_back(kBenign);
            } else if (label == "malicious") {
                labels.push_back(kMalicious);
            } else {
                throw ParseError(line_no, "unknown label '" + std::string(label) + "'");
            }
        }
    }
    if (has_labels.value_or(false)) d.labels = std::move(labels);
    return d;
}

void write_dataset(const Dataset& d, std::ostream& sink) {
    d.validate();
    sink << "host,window_start";
    for (const auto& n : d.feature_names) sink << ',' << n;
    sink << ",label\n";
    for (std::size_t r = 0; r < d.rows(); ++r) {
        sink << d.row_keys[r].host << ',' << d.row_keys[r].window_start;
        for (double v : d.row(r)) sink << ',' << text::format_double(v);
        sink << ',';
        if (d.labels) sink << label_name((*d.labels)[r]);
        sink << '\n';
    }
}

}  // namespace dnsbot
