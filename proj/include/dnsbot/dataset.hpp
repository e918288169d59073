#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dnsbot {

inline constexpr int kBenign = 0;
inline constexpr int kMalicious = 1;

std::string_view label_name(int label);

/// Identifies the (host, window) a row was computed from.
struct RowKey {
    std::string host;
    std::int64_t window_start = 0;

    auto operator<=>(const RowKey&) const = default;
    bool operator==(const RowKey&) const = default;
};

/// Column-named numeric matrix with optional labels and per-row keys.
struct Dataset {
    std::vector<std::string> feature_names;
    std::vector<double> values;              ///< row-major, rows() x cols()
    std::optional<std::vector<int>> labels;  ///< 0 = benign, 1 = malicious
    std::vector<RowKey> row_keys;

    std::size_t rows() const { return row_keys.size(); }
    std::size_t cols() const { return feature_names.size(); }
    bool labeled() const { return labels.has_value(); }

    std::span<const double> row(std::size_t i) const {
        return {values.data() + i * cols(), cols()};
    }
    std::span<double> row(std::size_t i) { return {values.data() + i * cols(), cols()}; }
    double at(std::size_t r, std::size_t c) const { return values[r * cols() + c]; }

    std::vector<double> column(std::size_t c) const;
    std::optional<std::size_t> column_index(std::string_view name) const;

    /// Throws InvalidArgument if shapes disagree or a value is not finite.
    void validate() const;

    /// Number of rows per class; requires labels.
    std::size_t count_label(int label) const;

    bool operator==(const Dataset&) const = default;
};

/// Rows at the given indices, in the given order.
Dataset take_rows(const Dataset& d, std::span<const std::size_t> indices);

/// Columns with the given names, in the given order.
Dataset take_columns(const Dataset& d, std::span<const std::string> names);

/// Reads the dataset CSV: `host,window_start,<feature names...>,label`.
/// Labels are all-or-nothing: either every row carries one or none does.
Dataset load_dataset(std::istream& source);

/// Writes the dataset CSV with round-trip-exact numbers.
void write_dataset(const Dataset& dataset, std::ostream& sink);

}  // namespace dnsbot
