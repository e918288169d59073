#include "dnsbot/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "dnsbot/error.hpp"
#include "dnsbot/random.hpp"

namespace dnsbot {

NormalizationParams zscore_fit(const Dataset& d) {
    if (d.rows() == 0) throw InvalidArgument("cannot fit normalization on an empty dataset");
    const std::size_t n = d.cols();
    const double m = static_cast<double>(d.rows());
    NormalizationParams p;
    p.feature_names = d.feature_names;
    p.means.assign(n, 0.0);
    p.stds.assign(n, 0.0);
    for (std::size_t r = 0; r < d.rows(); ++r) {
        for (std::size_t c = 0; c < n; ++c) p.means[c] += d.at(r, c);
    }
    for (double& mean : p.means) mean /= m;
    // Corrected two-pass mean: fold the residual of the first estimate back in.
    std::vector<double> residual(n, 0.0);
    for (std::size_t r = 0; r < d.rows(); ++r) {
        for (std::size_t c = 0; c < n; ++c) residual[c] += d.at(r, c) - p.means[c];
    }
    for (std::size_t c = 0; c < n; ++c) p.means[c] += residual[c] / m;
    // A constant column keeps its exact value as the mean, so rounding in the
    // sum cannot produce a spurious nonzero std.
    std::vector<bool> constant(n, true);
    for (std::size_t r = 1; r < d.rows(); ++r) {
        for (std::size_t c = 0; c < n; ++c) constant[c] = constant[c] && d.at(r, c) == d.at(0, c);
    }
    for (std::size_t c = 0; c < n; ++c) {
        if (constant[c]) p.means[c] = d.at(0, c);
    }
    // Two-pass variance keeps the result accurate for large offsets.
    for (std::size_t r = 0; r < d.rows(); ++r) {
        for (std::size_t c = 0; c < n; ++c) {
            const double dev = d.at(r, c) - p.means[c];
            p.stds[c] += dev * dev;
        }
    }
    for (double& s : p.stds) s = std::sqrt(s / m);
    return p;
}

void zscore_apply_row(std::span<double> row, const NormalizationParams& p) {
    if (row.size() != p.means.size()) throw InvalidArgument("row width does not match normalization");
    for (std::size_t c = 0; c < row.size(); ++c) {
        row[c] = p.stds[c] > 0.0 ? (row[c] - p.means[c]) / p.stds[c] : 0.0;
    }
}

Dataset zscore_apply(const Dataset& d, const NormalizationParams& p) {
    if (d.feature_names != p.feature_names || p.means.size() != d.cols() ||
        p.stds.size() != d.cols()) {
        throw InvalidArgument("normalization parameters do not match dataset features");
    }
    Dataset out = d;
    for (std::size_t r = 0; r < out.rows(); ++r) zscore_apply_row(out.row(r), p);
    return out;
}

NormalizationParams select_params(const NormalizationParams& p, std::span<const std::string> names) {
    NormalizationParams out;
    for (const auto& name : names) {
        const auto it = std::find(p.feature_names.begin(), p.feature_names.end(), name);
        if (it == p.feature_names.end()) {
            throw InvalidArgument("normalization has no feature named '" + name + "'");
        }
        const auto i = static_cast<std::size_t>(it - p.feature_names.begin());
        out.feature_names.push_back(name);
        out.means.push_back(p.means[i]);
        out.stds.push_back(p.stds[i]);
    }
    return out;
}

std::size_t smote_target_count(std::size_t majority, double ratio) {
    // The small slack absorbs representation error such as 0.3 * 10 = 3.0000000000000004.
    const double exact = ratio * static_cast<double>(majority);
    return static_cast<std::size_t>(std::ceil(exact - 1e-9 * std::max(1.0, exact)));
}

SmoteResult smote_detailed(const Dataset& d, const SmoteConfig& config) {
    if (!d.labeled()) throw InvalidArgument("SMOTE requires a labeled dataset");
    if (config.k < 1) throw InvalidArgument("SMOTE k must be at least 1");
    if (!(config.target_ratio > 0.0 && config.target_ratio <= 1.0)) {
        throw InvalidArgument("SMOTE target_ratio must be in (0, 1]");
    }
    const std::size_t n_benign = d.count_label(kBenign);
    const std::size_t n_malicious = d.count_label(kMalicious);
    if (n_benign == 0 || n_malicious == 0) throw InvalidArgument("SMOTE requires both classes");

    SmoteResult result;
    result.minority_label = n_malicious <= n_benign ? kMalicious : kBenign;
    const std::size_t majority = std::max(n_benign, n_malicious);
    std::vector<std::size_t> minority;
    for (std::size_t i = 0; i < d.rows(); ++i) {
        if ((*d.labels)[i] == result.minority_label) minority.push_back(i);
    }
    if (minority.size() < 2) throw InvalidArgument("SMOTE requires at least 2 minority rows");

    result.dataset = d;
    const std::size_t target = smote_target_count(majority, config.target_ratio);
    if (target <= minority.size()) return result;
    const std::size_t needed = target - minority.size();

    const std::size_t m = minority.size();
    const std::size_t k = m > config.k ? config.k : m - 1;
    const std::size_t ncols = d.cols();

    // k nearest minority neighbours of every minority row, by squared Euclidean
    // distance with ties going to the lower row index.
    std::vector<std::vector<std::size_t>> neighbours(m);
    std::vector<std::pair<double, std::size_t>> dist;
    for (std::size_t a = 0; a < m; ++a) {
        dist.clear();
        const auto xa = d.row(minority[a]);
        for (std::size_t b = 0; b < m; ++b) {
            if (a == b) continue;
            const auto xb = d.row(minority[b]);
            double s = 0.0;
            for (std::size_t c = 0; c < ncols; ++c) {
                const double diff = xa[c] - xb[c];
                s += diff * diff;
            }
            dist.emplace_back(s, minority[b]);
        }
        std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
        for (std::size_t j = 0; j < k; ++j) neighbours[a].push_back(dist[j].second);
    }

    Rng rng(config.seed);
    auto& out = result.dataset;
    out.values.reserve(out.values.size() + needed * ncols);
    std::vector<double> synthetic(ncols);
    for (std::size_t s = 0; s < needed; ++s) {
        const std::size_t a = s % m;
        const std::size_t origin = minority[a];
        const std::size_t neighbour = neighbours[a][rng.index(k)];
        const double delta = rng.uniform_closed01();
        const auto x = d.row(origin);
        const auto z = d.row(neighbour);
        for (std::size_t c = 0; c < ncols; ++c) synthetic[c] = x[c] + delta * (z[c] - x[c]);
        out.values.insert(out.values.end(), synthetic.begin(), synthetic.end());
        out.labels->push_back(result.minority_label);
        out.row_keys.push_back({"synthetic", static_cast<std::int64_t>(s)});
        result.origins.push_back({origin, neighbour, delta});
    }
    return result;
}

Dataset smote(const Dataset& d, const SmoteConfig& config) {
    return smote_detailed(d, config).dataset;
}

}  // namespace dnsbot
