#include "dnsbot/forest.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <istream>
#include <mutex>
#include <numeric>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "dnsbot/error.hpp"

namespace dnsbot {

std::string_view to_string(FeatureSubsample s) {
    switch (s) {
        case FeatureSubsample::sqrt: return "sqrt";
        case FeatureSubsample::log2: return "log2";
        case FeatureSubsample::all: break;
    }
    return "all";
}

std::optional<FeatureSubsample> parse_feature_subsample(std::string_view s) {
    if (s == "sqrt") return FeatureSubsample::sqrt;
    if (s == "log2") return FeatureSubsample::log2;
    if (s == "all") return FeatureSubsample::all;
    return std::nullopt;
}

std::size_t candidate_feature_count(FeatureSubsample s, std::size_t n) {
    if (n == 0) return 0;
    std::size_t c = n;
    switch (s) {
        case FeatureSubsample::sqrt: {
            // Integer ceil(sqrt(n)).
            c = 0;
            while (c * c < n) ++c;
            break;
        }
        case FeatureSubsample::log2: {
            // Integer ceil(log2(n)).
            c = 0;
            while ((std::size_t{1} << c) < n) ++c;
            break;
        }
        case FeatureSubsample::all: break;
    }
    return std::clamp<std::size_t>(c, 1, n);
}

std::string describe(const HyperParams& p) {
    std::ostringstream os;
    os << "n_trees=" << p.n_trees << " max_depth="
       << (p.max_depth ? std::to_string(*p.max_depth) : std::string("unlimited"))
       << " min_samples_split=" << p.min_samples_split
       << " feature_subsample=" << to_string(p.feature_subsample);
    return os.str();
}

const TreeNode& DecisionTree::leaf_for(std::span<const double> row) const {
    const TreeNode* node = &nodes.front();
    while (!node->is_leaf()) {
        node = &nodes[row[node->feature] <= node->threshold ? node->left : node->right];
    }
    return *node;
}

std::size_t DecisionTree::depth() const {
    if (nodes.empty()) return 0;
    std::vector<std::pair<std::uint32_t, std::size_t>> stack{{0, 0}};
    std::size_t deepest = 0;
    while (!stack.empty()) {
        const auto [i, d] = stack.back();
        stack.pop_back();
        deepest = std::max(deepest, d);
        if (!nodes[i].is_leaf()) {
            stack.emplace_back(nodes[i].left, d + 1);
            stack.emplace_back(nodes[i].right, d + 1);
        }
    }
    return deepest;
}

namespace {

double gini(double c0, double c1) {
    const double n = c0 + c1;
    return n > 0.0 ? 1.0 - (c0 * c0 + c1 * c1) / (n * n) : 0.0;
}

struct SplitChoice {
    std::size_t feature = 0;
    double threshold = 0.0;
    double impurity = 0.0;  ///< weighted child Gini
    bool found = false;
};

class TreeBuilder {
public:
    TreeBuilder(const Dataset& data, const HyperParams& params, Rng& rng, const NodeObserver& observer)
        : data_(data), labels_(*data.labels), params_(params), rng_(rng), observer_(observer),
          n_candidates_(candidate_feature_count(params.feature_subsample, data.cols())) {}

    DecisionTree build(std::span<const std::size_t> sample) {
        idx_.assign(sample.begin(), sample.end());
        tree_.nodes.emplace_back();

        struct Task {
            std::uint32_t node;
            std::size_t begin, end, depth;
        };
        std::vector<Task> stack{{0, 0, idx_.size(), 0}};
        while (!stack.empty()) {
            const Task t = stack.back();
            stack.pop_back();
            const auto split = grow(t.node, t.begin, t.end, t.depth);
            if (!split) continue;
            const auto [mid, left, right] = *split;
            stack.push_back({right, mid, t.end, t.depth + 1});
            stack.push_back({left, t.begin, mid, t.depth + 1});
        }
        return std::move(tree_);
    }

private:
    struct Children {
        std::size_t mid;
        std::uint32_t left, right;
    };

    std::optional<Children> grow(std::uint32_t node, std::size_t begin, std::size_t end, std::size_t depth) {
        std::array<std::uint32_t, 2> counts{};
        for (std::size_t i = begin; i < end; ++i) ++counts[labels_[idx_[i]] == kMalicious];
        const std::size_t n = end - begin;

        NodeTrace trace;
        trace.depth = depth;
        trace.samples = n;

        auto make_leaf = [&] {
            tree_.nodes[node].feature = TreeNode::kLeaf;
            tree_.nodes[node].class_counts = counts;
            if (observer_) observer_(trace);
            return std::nullopt;
        };

        const bool pure = counts[0] == 0 || counts[1] == 0;
        const bool depth_capped = params_.max_depth && depth >= *params_.max_depth;
        if (pure || n < params_.min_samples_split || depth_capped) return make_leaf();

        trace.candidates = draw_candidates();
        const SplitChoice best = best_split(trace.candidates, begin, end);
        const double parent = gini(counts[0], counts[1]);
        if (!best.found || parent - best.impurity <= 1e-12) return make_leaf();

        trace.split_feature = best.feature;
        const auto mid_it = std::stable_partition(
            idx_.begin() + static_cast<std::ptrdiff_t>(begin), idx_.begin() + static_cast<std::ptrdiff_t>(end),
            [&](std::size_t r) { return data_.at(r, best.feature) <= best.threshold; });
        const auto mid = static_cast<std::size_t>(mid_it - idx_.begin());

        const auto left = static_cast<std::uint32_t>(tree_.nodes.size());
        tree_.nodes.emplace_back();
        tree_.nodes.emplace_back();
        TreeNode& self = tree_.nodes[node];
        self.feature = static_cast<std::uint32_t>(best.feature);
        self.threshold = best.threshold;
        self.left = left;
        self.right = left + 1;
        if (observer_) observer_(trace);
        return Children{mid, left, left + 1};
    }

    // Partial Fisher-Yates draw without replacement, reported in index order.
    std::vector<std::size_t> draw_candidates() {
        std::vector<std::size_t> pool(data_.cols());
        std::iota(pool.begin(), pool.end(), 0);
        for (std::size_t i = 0; i < n_candidates_; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(rng_.index(pool.size() - i));
            std::swap(pool[i], pool[j]);
        }
        pool.resize(n_candidates_);
        std::sort(pool.begin(), pool.end());
        return pool;
    }

    SplitChoice best_split(const std::vector<std::size_t>& candidates, std::size_t begin, std::size_t end) {
        SplitChoice best;
        const double n = static_cast<double>(end - begin);
        double total[2] = {0, 0};
        for (std::size_t i = begin; i < end; ++i) total[labels_[idx_[i]] == kMalicious] += 1.0;

        for (std::size_t f : candidates) {
            column_.clear();
            for (std::size_t i = begin; i < end; ++i) {
                const std::size_t r = idx_[i];
                column_.emplace_back(data_.at(r, f), labels_[r] == kMalicious);
            }
            std::sort(column_.begin(), column_.end());

            double left[2] = {0, 0};
            for (std::size_t i = 0; i + 1 < column_.size(); ++i) {
                left[column_[i].second] += 1.0;
                const double a = column_[i].first;
                const double b = column_[i + 1].first;
                if (!(a < b)) continue;
                const double nl = left[0] + left[1];
                const double nr = n - nl;
                const double r0 = total[0] - left[0];
                const double r1 = total[1] - left[1];
                const double impurity = (nl * gini(left[0], left[1]) + nr * gini(r0, r1)) / n;
                if (!best.found || impurity < best.impurity) {
                    double threshold = a + (b - a) / 2.0;
                    if (!(threshold < b)) threshold = a;
                    best = {f, threshold, impurity, true};
                }
            }
        }
        return best;
    }

    const Dataset& data_;
    const std::vector<int>& labels_;
    const HyperParams& params_;
    Rng& rng_;
    const NodeObserver& observer_;
    std::size_t n_candidates_;
    std::vector<std::size_t> idx_;
    std::vector<std::pair<double, int>> column_;
    DecisionTree tree_;
};

void require_trainable(const Dataset& d) {
    if (!d.labeled()) throw InvalidArgument("training requires a labeled dataset");
    if (d.count_label(kBenign) == 0 || d.count_label(kMalicious) == 0) {
        throw InvalidArgument("training requires both classes");
    }
}

}  // namespace

DecisionTree train_tree(const Dataset& data, std::span<const std::size_t> sample,
                        const HyperParams& params, Rng& rng, const NodeObserver& observer) {
    if (sample.empty()) throw InvalidArgument("cannot grow a tree on zero rows");
    if (!data.labeled()) throw InvalidArgument("training requires a labeled dataset");
    if (data.cols() == 0) throw InvalidArgument("training requires at least one feature");
    return TreeBuilder(data, params, rng, observer).build(sample);
}

ForestModel train_forest(const Dataset& dataset, const HyperParams& params, std::uint64_t seed,
                         std::size_t workers, const NodeObserver& observer) {
    require_trainable(dataset);
    if (params.n_trees == 0) throw InvalidArgument("n_trees must be positive");
    if (params.min_samples_split < 2) throw InvalidArgument("min_samples_split must be at least 2");
    if (params.max_depth && *params.max_depth == 0) throw InvalidArgument("max_depth must be positive");

    ForestModel model;
    model.params = params;
    model.seed = seed;
    model.feature_names = dataset.feature_names;
    model.normalization.feature_names = dataset.feature_names;
    model.normalization.means.assign(dataset.cols(), 0.0);
    model.normalization.stds.assign(dataset.cols(), 1.0);
    model.trees.resize(params.n_trees);

    const std::size_t m = dataset.rows();
    auto grow_tree = [&](std::size_t i) {
        Rng rng(derive_seed(seed, {i}));
        std::vector<std::size_t> sample(m);
        for (auto& s : sample) s = static_cast<std::size_t>(rng.index(m));
        model.trees[i] = train_tree(dataset, sample, params, rng, observer);
    };

    workers = std::clamp<std::size_t>(workers, 1, params.n_trees);
    if (workers == 1) {
        for (std::size_t i = 0; i < params.n_trees; ++i) grow_tree(i);
        return model;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < params.n_trees; i = next++) {
                try {
                    grow_tree(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
    return model;
}

Prediction predict(const ForestModel& model, std::span<const double> row) {
    if (row.size() != model.feature_names.size()) {
        throw InvalidArgument("row has " + std::to_string(row.size()) + " values, model expects " +
                              std::to_string(model.feature_names.size()));
    }
    std::size_t malicious = 0;
    for (const auto& tree : model.trees) malicious += tree.predict(row) == kMalicious;
    Prediction p;
    p.score = model.trees.empty() ? 0.0
                                  : static_cast<double>(malicious) / static_cast<double>(model.trees.size());
    p.label = p.score >= 0.5 ? kMalicious : kBenign;
    return p;
}

Prediction predict_raw(const ForestModel& model, std::span<const double> raw_row) {
    std::vector<double> row(raw_row.begin(), raw_row.end());
    zscore_apply_row(row, model.normalization);
    return predict(model, row);
}

std::vector<Prediction> predict_dataset(const ForestModel& model, const Dataset& raw) {
    const Dataset aligned = take_columns(raw, model.feature_names);
    std::vector<Prediction> out;
    out.reserve(aligned.rows());
    for (std::size_t r = 0; r < aligned.rows(); ++r) out.push_back(predict_raw(model, aligned.row(r)));
    return out;
}

namespace {

using Json = nlohmann::ordered_json;

Json node_to_json(const DecisionTree& tree, std::uint32_t i) {
    const TreeNode& n = tree.nodes[i];
    Json j;
    if (n.is_leaf()) {
        j["counts"] = {n.class_counts[0], n.class_counts[1]};
    } else {
        j["feature"] = n.feature;
        j["threshold"] = n.threshold;
        j["left"] = node_to_json(tree, n.left);
        j["right"] = node_to_json(tree, n.right);
    }
    return j;
}

// Rebuilds the flat layout train_tree produces: children of a split are
// allocated as an adjacent pair when the split is made, in depth-first order.
void json_to_nodes(const Json& root, std::size_t n_features, DecisionTree& tree) {
    tree.nodes.emplace_back();
    std::vector<std::pair<const Json*, std::uint32_t>> stack{{&root, 0}};
    while (!stack.empty()) {
        const auto [j, i] = stack.back();
        stack.pop_back();
        if (!j->is_object()) throw ParseError("tree node is not an object");
        if (j->contains("counts")) {
            const auto& c = j->at("counts");
            if (!c.is_array() || c.size() != 2) throw ParseError("leaf counts must have 2 entries");
            tree.nodes[i].class_counts = {c[0].get<std::uint32_t>(), c[1].get<std::uint32_t>()};
            if (tree.nodes[i].class_counts[0] + tree.nodes[i].class_counts[1] == 0) {
                throw ParseError("leaf with no samples");
            }
            continue;
        }
        const auto feature = j->at("feature").get<std::uint32_t>();
        if (feature >= n_features) throw ParseError("split feature index out of range");
        const auto left = static_cast<std::uint32_t>(tree.nodes.size());
        tree.nodes.emplace_back();
        tree.nodes.emplace_back();
        tree.nodes[i].feature = feature;
        tree.nodes[i].threshold = j->at("threshold").get<double>();
        tree.nodes[i].left = left;
        tree.nodes[i].right = left + 1;
        stack.emplace_back(&j->at("right"), left + 1);
        stack.emplace_back(&j->at("left"), left);
    }
}

}  // namespace

void save_model(const ForestModel& model, std::ostream& sink) {
    Json j;
    j["format"] = "dnsbot-forest";
    j["version"] = kModelFormatVersion;
    j["seed"] = model.seed;
    j["class_names"] = model.class_names;
    Json params;
    params["n_trees"] = model.params.n_trees;
    params["max_depth"] = model.params.max_depth ? Json(*model.params.max_depth) : Json(nullptr);
    params["min_samples_split"] = model.params.min_samples_split;
    params["feature_subsample"] = to_string(model.params.feature_subsample);
    j["params"] = std::move(params);
    j["feature_names"] = model.feature_names;
    j["normalization"] = {{"means", model.normalization.means}, {"stds", model.normalization.stds}};
    Json trees = Json::array();
    for (const auto& t : model.trees) trees.push_back(node_to_json(t, 0));
    j["trees"] = std::move(trees);
    sink << j.dump() << '\n';
}

ForestModel load_model(std::istream& source) {
    Json j;
    try {
        j = Json::parse(source);
    } catch (const Json::exception& e) {
        throw ParseError(std::string("model file is not valid JSON: ") + e.what());
    }
    try {
        if (j.value("format", std::string()) != "dnsbot-forest") {
            throw ParseError("not a dnsbot forest model");
        }
        const int version = j.at("version").get<int>();
        if (version != kModelFormatVersion) {
            throw ParseError("unsupported model version " + std::to_string(version));
        }
        ForestModel m;
        m.seed = j.at("seed").get<std::uint64_t>();
        m.class_names = j.at("class_names").get<std::vector<std::string>>();
        const auto& p = j.at("params");
        m.params.n_trees = p.at("n_trees").get<std::size_t>();
        if (!p.at("max_depth").is_null()) m.params.max_depth = p.at("max_depth").get<std::size_t>();
        m.params.min_samples_split = p.at("min_samples_split").get<std::size_t>();
        const auto fs = parse_feature_subsample(p.at("feature_subsample").get<std::string>());
        if (!fs) throw ParseError("unknown feature_subsample");
        m.params.feature_subsample = *fs;
        m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
        m.normalization.feature_names = m.feature_names;
        m.normalization.means = j.at("normalization").at("means").get<std::vector<double>>();
        m.normalization.stds = j.at("normalization").at("stds").get<std::vector<double>>();
        if (m.normalization.means.size() != m.feature_names.size() ||
            m.normalization.stds.size() != m.feature_names.size()) {
            throw ParseError("normalization width does not match feature_names");
        }
        for (const auto& t : j.at("trees")) {
            DecisionTree tree;
            json_to_nodes(t, m.feature_names.size(), tree);
            m.trees.push_back(std::move(tree));
        }
        if (m.trees.size() != m.params.n_trees) throw ParseError("tree count does not match n_trees");
        return m;
    } catch (const Json::exception& e) {
        throw ParseError(std::string("malformed model file: ") + e.what());
    }
}

}  // namespace dnsbot
