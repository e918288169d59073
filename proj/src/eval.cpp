#include "dnsbot/eval.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

#include "dnsbot/error.hpp"
#include "dnsbot/text.hpp"

namespace dnsbot {

std::size_t ConfusionMatrix::total() const {
    return counts[0][0] + counts[0][1] + counts[1][0] + counts[1][1];
}

ConfusionMatrix confusion_from(std::span<const int> truth, std::span<const int> predicted) {
    if (truth.size() != predicted.size()) throw InvalidArgument("truth and predictions differ in length");
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < truth.size(); ++i) cm.add(truth[i], predicted[i]);
    return cm;
}

namespace {

double ratio(std::size_t num, std::size_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

EvalReport report_from_confusion(const ConfusionMatrix& cm) {
    EvalReport r;
    r.confusion = cm;
    r.accuracy = ratio(cm.correct(), cm.total());
    for (std::size_t c = 0; c < 2; ++c) {
        const std::size_t tp = cm.counts[c][c];
        const std::size_t predicted = cm.counts[0][c] + cm.counts[1][c];
        const std::size_t actual = cm.counts[c][0] + cm.counts[c][1];
        auto& m = r.per_class[c];
        m.precision = ratio(tp, predicted);
        m.recall = ratio(tp, actual);
        m.f_score = m.precision + m.recall > 0.0
                        ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
                        : 0.0;
    }
    r.macro.precision = (r.per_class[0].precision + r.per_class[1].precision) / 2.0;
    r.macro.recall = (r.per_class[0].recall + r.per_class[1].recall) / 2.0;
    r.macro.f_score = (r.per_class[0].f_score + r.per_class[1].f_score) / 2.0;
    return r;
}

double macro_f_score(std::span<const int> truth, std::span<const int> predicted) {
    return report_from_confusion(confusion_from(truth, predicted)).macro.f_score;
}

EvalReport evaluate(const ForestModel& model, const Dataset& labeled) {
    if (!labeled.labeled()) throw InvalidArgument("evaluation requires a labeled dataset");
    const auto predictions = predict_dataset(model, labeled);
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < predictions.size(); ++i) cm.add((*labeled.labels)[i], predictions[i].label);
    return report_from_confusion(cm);
}

void print_report(const EvalReport& r, std::ostream& out) {
    const auto flags = out.flags();
    const auto precision = out.precision();
    out << std::fixed << std::setprecision(4);
    out << "accuracy   " << std::setw(9) << r.accuracy << "  (" << r.confusion.correct() << '/'
        << r.confusion.total() << ")\n\n";
    out << std::left << std::setw(11) << "class" << std::right << std::setw(10) << "precision"
        << std::setw(10) << "recall" << std::setw(10) << "f-score" << '\n';
    auto line = [&](const char* name, const ClassMetrics& m) {
        out << std::left << std::setw(11) << name << std::right << std::setw(10) << m.precision
            << std::setw(10) << m.recall << std::setw(10) << m.f_score << '\n';
    };
    line("benign", r.per_class[0]);
    line("malicious", r.per_class[1]);
    line("macro", r.macro);
    out << "\nconfusion (rows = true, cols = predicted)\n";
    out << std::left << std::setw(11) << "" << std::right << std::setw(10) << "benign" << std::setw(10)
        << "malicious" << '\n';
    out << std::left << std::setw(11) << "benign" << std::right << std::setw(10) << r.confusion.counts[0][0]
        << std::setw(10) << r.confusion.counts[0][1] << '\n';
    out << std::left << std::setw(11) << "malicious" << std::right << std::setw(10)
        << r.confusion.counts[1][0] << std::setw(10) << r.confusion.counts[1][1] << '\n';
    out.flags(flags);
    out.precision(precision);
}

void write_report_csv(const EvalReport& r, std::ostream& out) {
    auto row = [&](const char* name, double v) { out << name << ',' << text::format_double(v) << '\n'; };
    out << "metric,value\n";
    row("accuracy", r.accuracy);
    const char* names[2] = {"benign", "malicious"};
    for (std::size_t c = 0; c < 2; ++c) {
        out << names[c] << "_precision," << text::format_double(r.per_class[c].precision) << '\n';
        out << names[c] << "_recall," << text::format_double(r.per_class[c].recall) << '\n';
        out << names[c] << "_f_score," << text::format_double(r.per_class[c].f_score) << '\n';
    }
    row("macro_precision", r.macro.precision);
    row("macro_recall", r.macro.recall);
    row("macro_f_score", r.macro.f_score);
    out << "tn," << r.confusion.counts[0][0] << '\n';
    out << "fp," << r.confusion.counts[0][1] << '\n';
    out << "fn," << r.confusion.counts[1][0] << '\n';
    out << "tp," << r.confusion.counts[1][1] << '\n';
}

namespace {

using Vec = std::vector<double>;
using Mat = std::vector<Vec>;

double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

Vec multiply(const Mat& m, const Vec& v) {
    Vec out(v.size(), 0.0);
    for (std::size_t i = 0; i < m.size(); ++i) out[i] = dot(m[i], v);
    return out;
}

void orthogonalize(Vec& v, const Mat& basis) {
    // Applied twice; a single Gram-Schmidt pass loses orthogonality for
    // nearly dependent vectors.
    for (int pass = 0; pass < 2; ++pass) {
        for (const auto& b : basis) {
            const double p = dot(v, b);
            for (std::size_t i = 0; i < v.size(); ++i) v[i] -= p * b[i];
        }
    }
}

bool normalize(Vec& v) {
    const double n = norm(v);
    if (!(n > 1e-300)) return false;
    for (double& x : v) x /= n;
    return true;
}

// Unit vector orthogonal to `basis`, from the first standard basis vector
// that is not (numerically) inside its span.
Vec complement(const Mat& basis, std::size_t dim) {
    for (std::size_t e = 0; e < dim; ++e) {
        Vec v(dim, 0.0);
        v[e] = 1.0;
        orthogonalize(v, basis);
        if (norm(v) > 1e-6 && normalize(v)) return v;
    }
    return Vec(dim, 0.0);
}

void fix_sign(Vec& v) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (std::abs(v[i]) > std::abs(v[best])) best = i;
    }
    if (v[best] < 0.0) {
        for (double& x : v) x = -x;
    }
}

}  // namespace

PcaResult pca_project(const Dataset& d, std::size_t components) {
    const std::size_t m = d.rows();
    const std::size_t n = d.cols();
    if (m < 2) throw InvalidArgument("PCA needs at least 2 rows");
    if (components < 1 || components > n) throw InvalidArgument("PCA component count out of range");

    Vec mean(n, 0.0);
    for (std::size_t r = 0; r < m; ++r) {
        for (std::size_t c = 0; c < n; ++c) mean[c] += d.at(r, c);
    }
    for (double& x : mean) x /= static_cast<double>(m);

    Mat cov(n, Vec(n, 0.0));
    Vec centered(n);
    for (std::size_t r = 0; r < m; ++r) {
        for (std::size_t c = 0; c < n; ++c) centered[c] = d.at(r, c) - mean[c];
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i; j < n; ++j) cov[i][j] += centered[i] * centered[j];
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            cov[i][j] /= static_cast<double>(m);
            cov[j][i] = cov[i][j];
        }
    }

    constexpr double kTolerance = 1e-10;
    constexpr int kMaxIterations = 10000;

    PcaResult result;
    Mat deflated = cov;
    for (std::size_t k = 0; k < components; ++k) {
        Vec v(n);
        for (std::size_t i = 0; i < n; ++i) v[i] = 1.0 + 0.1 * static_cast<double>(i);
        orthogonalize(v, result.components);
        if (!normalize(v)) v = complement(result.components, n);

        for (int it = 0; it < kMaxIterations; ++it) {
            Vec w = multiply(deflated, v);
            orthogonalize(w, result.components);
            if (!normalize(w)) break;  // remaining spectrum is zero; any orthogonal v works
            double diff_plus = 0.0;
            double diff_minus = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                diff_plus += (w[i] - v[i]) * (w[i] - v[i]);
                diff_minus += (w[i] + v[i]) * (w[i] + v[i]);
            }
            v = std::move(w);
            if (std::sqrt(std::min(diff_plus, diff_minus)) < kTolerance) break;
        }
        orthogonalize(v, result.components);
        if (!normalize(v)) v = complement(result.components, n);
        fix_sign(v);

        const double lambda = dot(v, multiply(cov, v));
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) deflated[i][j] -= lambda * v[i] * v[j];
        }
        result.eigenvalues.push_back(lambda);
        result.components.push_back(std::move(v));
    }

    result.projections.assign(m, Vec(components, 0.0));
    for (std::size_t r = 0; r < m; ++r) {
        for (std::size_t c = 0; c < n; ++c) centered[c] = d.at(r, c) - mean[c];
        for (std::size_t k = 0; k < components; ++k) result.projections[r][k] = dot(centered, result.components[k]);
    }
    return result;
}

void write_pca_csv(const PcaResult& pca, const Dataset& d, std::ostream& out) {
    out << "pc1,pc2,label\n";
    for (std::size_t r = 0; r < pca.projections.size(); ++r) {
        const auto& p = pca.projections[r];
        out << text::format_double(p[0]) << ',' << (p.size() > 1 ? text::format_double(p[1]) : "0") << ',';
        if (d.labels) out << label_name((*d.labels)[r]);
        out << '\n';
    }
}

}  // namespace dnsbot
