#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "dnsbot/dataset.hpp"

namespace dnsbot {

struct RankedFeature {
    std::string name;
    double gain_bits = 0.0;

    bool operator==(const RankedFeature&) const = default;
};

/// Features sorted by information gain, highest first; ties keep column order.
struct FeatureRanking {
    std::vector<RankedFeature> entries;

    std::vector<std::string> top_names(std::size_t k) const;
    bool operator==(const FeatureRanking&) const = default;
};

/// Shannon entropy of the label distribution, in bits.
double label_entropy(std::span<const int> labels);

/// Equal-frequency bin index of every value. Bin edges are the
/// ceil(i*M/bins)-th order statistics for i = 1..bins-1, with duplicate
/// edges merged; a value lands in the first bin whose edge it does not exceed.
std::vector<std::size_t> equal_frequency_bins(std::span<const double> column, std::size_t bins);

/// H(Y) - H(Y | binned column), in bits.
double information_gain(std::span<const double> column, std::span<const int> labels,
                        std::size_t bins);

FeatureRanking rank_features(const Dataset& dataset, std::size_t bins);

/// Keeps the k best-ranked features, in ranking order.
Dataset select_top_k(const Dataset& dataset, const FeatureRanking& ranking, std::size_t k);

/// `feature,gain_bits` CSV in ranking order.
void write_ranking(const FeatureRanking& ranking, std::ostream& sink);

}  // namespace dnsbot
