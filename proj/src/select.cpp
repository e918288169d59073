#include "dnsbot/select.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>
#include <ostream>

#include "dnsbot/error.hpp"
#include "dnsbot/text.hpp"

namespace dnsbot {

namespace {

double entropy_of_counts(std::size_t c0, std::size_t c1) {
    const double n = static_cast<double>(c0 + c1);
    double h = 0.0;
    for (std::size_t c : {c0, c1}) {
        if (c == 0) continue;
        const double p = static_cast<double>(c) / n;
        h -= p * std::log2(p);
    }
    return h;
}

}  // namespace

std::vector<std::string> FeatureRanking::top_names(std::size_t k) const {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < k && i < entries.size(); ++i) out.push_back(entries[i].name);
    return out;
}

double label_entropy(std::span<const int> labels) {
    if (labels.empty()) throw InvalidArgument("entropy of an empty label list");
    const auto c1 = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), kMalicious));
    return entropy_of_counts(labels.size() - c1, c1);
}

std::vector<std::size_t> equal_frequency_bins(std::span<const double> column, std::size_t bins) {
    if (bins == 0) throw InvalidArgument("bins must be positive");
    const std::size_t m = column.size();
    std::vector<double> sorted(column.begin(), column.end());
    std::sort(sorted.begin(), sorted.end());

    std::vector<double> edges;
    for (std::size_t i = 1; i < bins && m > 0; ++i) {
        const std::size_t rank = (i * m + bins - 1) / bins;  // 1-based order statistic
        const double edge = sorted[std::max<std::size_t>(rank, 1) - 1];
        if (edges.empty() || edge != edges.back()) edges.push_back(edge);
    }

    std::vector<std::size_t> out(m);
    for (std::size_t r = 0; r < m; ++r) {
        out[r] = static_cast<std::size_t>(
            std::lower_bound(edges.begin(), edges.end(), column[r]) - edges.begin());
    }
    return out;
}

double information_gain(std::span<const double> column, std::span<const int> labels,
                        std::size_t bins) {
    if (column.size() != labels.size()) throw InvalidArgument("column and labels differ in length");
    if (column.empty()) return 0.0;
    const auto bin_of = equal_frequency_bins(column, bins);
    const std::size_t nbins = *std::max_element(bin_of.begin(), bin_of.end()) + 1;

    std::vector<std::array<std::size_t, 2>> joint(nbins, {0, 0});
    for (std::size_t r = 0; r < column.size(); ++r) ++joint[bin_of[r]][labels[r] == kMalicious];

    const double m = static_cast<double>(column.size());
    double conditional = 0.0;
    for (const auto& cell : joint) {
        const std::size_t size = cell[0] + cell[1];
        if (size == 0) continue;
        conditional += static_cast<double>(size) / m * entropy_of_counts(cell[0], cell[1]);
    }
    // Clamp rounding noise so the gain stays inside [0, H(Y)].
    const double h = label_entropy(labels);
    return std::clamp(h - conditional, 0.0, h);
}

FeatureRanking rank_features(const Dataset& d, std::size_t bins) {
    if (!d.labeled()) throw InvalidArgument("feature ranking requires a labeled dataset");
    FeatureRanking ranking;
    for (std::size_t c = 0; c < d.cols(); ++c) {
        const auto col = d.column(c);
        ranking.entries.push_back({d.feature_names[c], information_gain(col, *d.labels, bins)});
    }
    std::stable_sort(ranking.entries.begin(), ranking.entries.end(),
                     [](const auto& a, const auto& b) { return a.gain_bits > b.gain_bits; });
    return ranking;
}

Dataset select_top_k(const Dataset& d, const FeatureRanking& ranking, std::size_t k) {
    if (k < 1 || k > d.cols() || k > ranking.entries.size()) {
        throw InvalidArgument("k must be between 1 and " + std::to_string(d.cols()));
    }
    const auto names = ranking.top_names(k);
    return take_columns(d, names);
}

void write_ranking(const FeatureRanking& ranking, std::ostream& sink) {
    sink << "feature,gain_bits\n";
    for (const auto& e : ranking.entries) sink << e.name << ',' << text::format_double(e.gain_bits) << '\n';
}

}  // namespace dnsbot
