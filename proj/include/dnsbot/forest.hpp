#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dnsbot/dataset.hpp"
#include "dnsbot/preprocess.hpp"
#include "dnsbot/random.hpp"

namespace dnsbot {

enum class FeatureSubsample { sqrt, log2, all };

std::string_view to_string(FeatureSubsample s);
std::optional<FeatureSubsample> parse_feature_subsample(std::string_view s);

/// Number of candidate features drawn per node out of n.
std::size_t candidate_feature_count(FeatureSubsample s, std::size_t n);

/// Random forest configuration. An empty max_depth means unlimited.
struct HyperParams {
    std::size_t n_trees = 100;
    std::optional<std::size_t> max_depth;
    std::size_t min_samples_split = 2;
    FeatureSubsample feature_subsample = FeatureSubsample::sqrt;

    bool operator==(const HyperParams&) const = default;
};

std::string describe(const HyperParams& p);

/// The conventional out-of-the-box forest used as the comparison baseline.
inline HyperParams default_forest_params() { return {}; }

/// Flat tree node. Internal nodes route `value <= threshold` to `left`.
struct TreeNode {
    static constexpr std::uint32_t kLeaf = 0xffffffffu;

    std::uint32_t feature = kLeaf;
    double threshold = 0.0;
    std::uint32_t left = 0;
    std::uint32_t right = 0;
    std::array<std::uint32_t, 2> class_counts{};  ///< leaves only

    bool is_leaf() const { return feature == kLeaf; }
    /// Majority class of a leaf; ties go to benign.
    int majority() const { return class_counts[1] > class_counts[0] ? kMalicious : kBenign; }

    bool operator==(const TreeNode&) const = default;
};

/// Decision tree stored as a node array; nodes[0] is the root.
struct DecisionTree {
    std::vector<TreeNode> nodes;

    const TreeNode& leaf_for(std::span<const double> row) const;
    int predict(std::span<const double> row) const { return leaf_for(row).majority(); }
    std::size_t depth() const;

    bool operator==(const DecisionTree&) const = default;
};

/// What train_tree saw at one node; used to instrument training.
struct NodeTrace {
    std::size_t depth = 0;
    std::size_t samples = 0;
    std::vector<std::size_t> candidates;  ///< feature indices drawn for this node
    std::optional<std::size_t> split_feature;
};

using NodeObserver = std::function<void(const NodeTrace&)>;

/// Grows one CART tree with Gini splits on the rows `sample` (indices into
/// `data`, duplicates allowed). Throws InvalidArgument on an empty sample.
DecisionTree train_tree(const Dataset& data, std::span<const std::size_t> sample,
                        const HyperParams& params, Rng& rng,
                        const NodeObserver& observer = {});

struct ForestModel {
    std::vector<DecisionTree> trees;
    HyperParams params;
    std::vector<std::string> feature_names;
    NormalizationParams normalization;
    std::uint64_t seed = 0;
    std::vector<std::string> class_names{"benign", "malicious"};

    bool operator==(const ForestModel&) const = default;
};

/// Trains params.n_trees trees on bootstrap samples. Tree i uses an RNG
/// seeded from (seed, i), so the result does not depend on `workers`.
/// The returned model carries identity normalization; callers attach the
/// fitted params themselves.
ForestModel train_forest(const Dataset& dataset, const HyperParams& params, std::uint64_t seed,
                         std::size_t workers = 1, const NodeObserver& observer = {});

struct Prediction {
    int label = kBenign;
    double score = 0.0;  ///< fraction of trees voting malicious
};

/// Scores a row that is already normalized and ordered like feature_names.
Prediction predict(const ForestModel& model, std::span<const double> row);

/// Scores a raw row: applies the model's stored normalization first.
Prediction predict_raw(const ForestModel& model, std::span<const double> raw_row);

/// Scores every row of a raw dataset, picking the model's columns by name.
std::vector<Prediction> predict_dataset(const ForestModel& model, const Dataset& raw);

inline constexpr int kModelFormatVersion = 1;

void save_model(const ForestModel& model, std::ostream& sink);

/// Throws ParseError on malformed input or an unsupported version.
ForestModel load_model(std::istream& source);

}  // namespace dnsbot
