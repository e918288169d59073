#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "dnsbot/dataset.hpp"
#include "dnsbot/forest.hpp"

namespace dnsbot {

/// counts[true][predicted], class order [benign, malicious].
struct ConfusionMatrix {
    std::array<std::array<std::size_t, 2>, 2> counts{};

    void add(int truth, int predicted) { ++counts[truth == kMalicious][predicted == kMalicious]; }
    std::size_t total() const;
    std::size_t correct() const { return counts[0][0] + counts[1][1]; }

    bool operator==(const ConfusionMatrix&) const = default;
};

ConfusionMatrix confusion_from(std::span<const int> truth, std::span<const int> predicted);

struct ClassMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f_score = 0.0;
};

struct EvalReport {
    double accuracy = 0.0;
    std::array<ClassMetrics, 2> per_class{};  ///< [benign, malicious]
    ClassMetrics macro;
    ConfusionMatrix confusion;

    const ClassMetrics& malicious() const { return per_class[kMalicious]; }
};

/// Derives every metric from the confusion matrix. Undefined ratios
/// (no predictions or no members of a class) are reported as 0.
EvalReport report_from_confusion(const ConfusionMatrix& confusion);

/// Unweighted mean of the two per-class F-scores.
double macro_f_score(std::span<const int> truth, std::span<const int> predicted);

/// Scores a labeled raw dataset with the model (columns picked by name and
/// normalized with the model's stored params).
EvalReport evaluate(const ForestModel& model, const Dataset& labeled);

/// Aligned plain-text table.
void print_report(const EvalReport& report, std::ostream& out);

/// One `metric,value` line per quantity.
void write_report_csv(const EvalReport& report, std::ostream& out);

struct PcaResult {
    std::vector<std::vector<double>> components;  ///< unit eigenvectors, strongest first
    std::vector<double> eigenvalues;               ///< population covariance eigenvalues
    std::vector<std::vector<double>> projections;  ///< one entry per row, one value per component
};

/// Principal components of the centered data by power iteration with
/// deflation. Each component's largest-magnitude entry is positive.
/// Throws InvalidArgument when M < 2 or components is out of range.
PcaResult pca_project(const Dataset& dataset, std::size_t components = 2);

/// `pc1,pc2,label` CSV (label column empty for unlabeled data).
void write_pca_csv(const PcaResult& pca, const Dataset& dataset, std::ostream& out);

}  // namespace dnsbot
