#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "dnsbot/dataset.hpp"
#include "dnsbot/random.hpp"

namespace dnsbot::testing {

/// Dataset from row-major values; feature names are f0, f1, ...
inline Dataset make_dataset(const std::vector<std::vector<double>>& rows, std::vector<int> labels = {}) {
    Dataset d;
    const std::size_t n = rows.empty() ? 0 : rows[0].size();
    for (std::size_t c = 0; c < n; ++c) d.feature_names.push_back("f" + std::to_string(c));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        d.values.insert(d.values.end(), rows[r].begin(), rows[r].end());
        d.row_keys.push_back({"r" + std::to_string(r), 0});
    }
    if (!labels.empty()) d.labels = std::move(labels);
    return d;
}

/// Two Gaussian blobs centred at -offset and +offset on every axis.
inline Dataset blobs(std::size_t per_class, std::size_t dims, double offset, std::uint64_t seed,
                     std::size_t minority = 0) {
    Rng rng(seed);
    auto gauss = [&] {
        const double u1 = 1.0 - rng.uniform01();
        const double u2 = rng.uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    };
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    const std::size_t n_min = minority ? minority : per_class;
    for (int cls = 0; cls < 2; ++cls) {
        const std::size_t count = cls == kMalicious ? n_min : per_class;
        for (std::size_t i = 0; i < count; ++i) {
            std::vector<double> row(dims);
            for (auto& x : row) x = (cls ? offset : -offset) + gauss();
            rows.push_back(row);
            labels.push_back(cls);
        }
    }
    return make_dataset(rows, labels);
}

}  // namespace dnsbot::testing
