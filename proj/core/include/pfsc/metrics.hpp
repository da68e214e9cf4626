#pragma once

#include <cstdint>
#include <vector>

#include "pfsc/types.hpp"

namespace pfsc::metrics {

/// Pair confusion counts over the n(n-1)/2 unordered sample pairs.
struct PairCounts {
    std::uint64_t tp = 0;  // together in both
    std::uint64_t fp = 0;  // together in prediction only
    std::uint64_t fn = 0;  // together in truth only
    std::uint64_t tn = 0;  // apart in both

    bool operator==(const PairCounts&) const = default;
};

/// Counts table: rows index predicted clusters, columns true clusters.
struct Contingency {
    std::vector<std::vector<std::uint64_t>> table;
    std::vector<std::uint64_t> row_sums;
    std::vector<std::uint64_t> col_sums;
    std::uint64_t n = 0;
};

Contingency contingency(const Labeling& pred, const Labeling& truth);

PairCounts pair_counts(const Labeling& pred, const Labeling& truth);

struct PrecisionRecall {
    double precision = 0.0;
    double recall = 0.0;
    double f_score = 0.0;
};

/// Pairwise precision/recall/F; each is 0 when its denominator is 0.
PrecisionRecall precision_recall_fscore(const PairCounts& counts);

/// Mutual information over sqrt(H(pred) H(truth)), natural logs.
double nmi(const Labeling& pred, const Labeling& truth);

double adjusted_rand_index(const Labeling& pred, const Labeling& truth);

struct MetricReport {
    double f_score = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double nmi = 0.0;
    double ari = 0.0;
};

MetricReport evaluate_all(const Labeling& pred, const Labeling& truth);

} // namespace pfsc::metrics
