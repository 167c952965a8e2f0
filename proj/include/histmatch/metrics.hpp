#ifndef HISTMATCH_METRICS_HPP
#define HISTMATCH_METRICS_HPP

#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "histmatch/error.hpp"

namespace histmatch {

struct PredictionRecord {
    std::string path;
    std::string true_label;
    std::string pred_label;
};

/// Rows are true classes, columns predicted classes, in `classes` order.
struct ConfusionMatrix {
    std::vector<std::string> classes;
    std::vector<std::vector<std::uint64_t>> counts;
};

inline ConfusionMatrix confusion_matrix(std::span<const PredictionRecord> preds,
                                        const std::vector<std::string>& classes) {
    ConfusionMatrix cm;
    cm.classes = classes;
    cm.counts.assign(classes.size(), std::vector<std::uint64_t>(classes.size(), 0));
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < classes.size(); ++i)
        index[classes[i]] = i;
    for (const auto& p : preds) {
        const auto ti = index.find(p.true_label);
        if (ti == index.end())
            throw UnknownLabel("unknown true label '" + p.true_label + "' (" + p.path + ")");
        const auto pi = index.find(p.pred_label);
        if (pi == index.end())
            throw UnknownLabel("unknown predicted label '" + p.pred_label + "' (" + p.path + ")");
        ++cm.counts[ti->second][pi->second];
    }
    return cm;
}

/// Recall per class: diagonal count over row sum. A zero row sum is an
/// error; with stratified folds every class must be present, so absence
/// signals a pipeline bug rather than a value to skip.
inline std::map<std::string, double> per_class_recall(const ConfusionMatrix& cm) {
    std::map<std::string, double> recalls;
    for (std::size_t i = 0; i < cm.classes.size(); ++i) {
        std::uint64_t row_sum = 0;
        for (std::uint64_t c : cm.counts[i])
            row_sum += c;
        if (row_sum == 0)
            throw EmptyClass("class '" + cm.classes[i] + "' has no samples");
        recalls[cm.classes[i]] =
            static_cast<double>(cm.counts[i][i]) / static_cast<double>(row_sum);
    }
    return recalls;
}

/// Arithmetic mean of per-class recall, averaged in class order.
inline double balanced_accuracy(const ConfusionMatrix& cm) {
    const auto recalls = per_class_recall(cm);
    double sum = 0.0;
    for (const auto& cls : cm.classes)
        sum += recalls.at(cls);
    return sum / static_cast<double>(cm.classes.size());
}

struct MetricReport {
    std::size_t n = 0;
    double balanced_accuracy = 0.0;
    std::map<std::string, double> per_class_recall;
};

inline MetricReport make_report(const ConfusionMatrix& cm) {
    MetricReport r;
    for (const auto& row : cm.counts)
        for (std::uint64_t c : row)
            r.n += c;
    r.per_class_recall = per_class_recall(cm);
    r.balanced_accuracy = balanced_accuracy(cm);
    return r;
}

struct Aggregate {
    double mean = 0.0;
    double std = 0.0; // sample standard deviation (n-1 denominator)
};

inline double mean_of(std::span<const double> values) {
    if (values.empty())
        throw TooFewSamples("mean requires at least one value");
    double sum = 0.0;
    for (double v : values)
        sum += v;
    return sum / static_cast<double>(values.size());
}

inline Aggregate aggregate_runs(std::span<const double> values) {
    if (values.size() < 2)
        throw TooFewSamples("standard deviation requires at least two values, got " +
                            std::to_string(values.size()));
    Aggregate a;
    a.mean = mean_of(values);
    double ss = 0.0;
    for (double v : values) {
        const double d = v - a.mean;
        ss += d * d;
    }
    a.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
    return a;
}

} // namespace histmatch

#endif // HISTMATCH_METRICS_HPP
