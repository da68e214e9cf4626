#include "pfsc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pfsc/error.hpp"

namespace pfsc::metrics {

namespace {

std::uint64_t pairs(std::uint64_t k) { return k < 2 ? 0 : k * (k - 1) / 2; }

std::size_t cluster_span(const Labeling& l) {
    int max_id = 0;
    for (int id : l.assignments) {
        if (id < 0) throw InvalidInput("cluster ids must be non-negative");
        max_id = std::max(max_id, id);
    }
    return std::max<std::size_t>(l.c, static_cast<std::size_t>(max_id) + 1);
}

double entropy(const std::vector<std::uint64_t>& sums, double n) {
    double h = 0.0;
    for (auto s : sums) {
        if (s == 0) continue;
        const double p = static_cast<double>(s) / n;
        h -= p * std::log(p);
    }
    return h;
}

} // namespace

Contingency contingency(const Labeling& pred, const Labeling& truth) {
    if (pred.n() != truth.n()) {
        throw LengthMismatch("labelings have different lengths (" + std::to_string(pred.n()) + " vs " +
                             std::to_string(truth.n()) + ")");
    }
    const auto rows = cluster_span(pred);
    const auto cols = cluster_span(truth);
    Contingency ct;
    ct.table.assign(rows, std::vector<std::uint64_t>(cols, 0));
    ct.row_sums.assign(rows, 0);
    ct.col_sums.assign(cols, 0);
    ct.n = pred.n();
    for (std::size_t i = 0; i < pred.n(); ++i) {
        const auto a = static_cast<std::size_t>(pred.assignments[i]);
        const auto b = static_cast<std::size_t>(truth.assignments[i]);
        ++ct.table[a][b];
        ++ct.row_sums[a];
        ++ct.col_sums[b];
    }
    return ct;
}

PairCounts pair_counts(const Labeling& pred, const Labeling& truth) {
    const auto ct = contingency(pred, truth);
    if (ct.n < 2) throw InvalidInput("pair counting needs at least two samples");
    std::uint64_t together_both = 0;
    for (const auto& row : ct.table) {
        for (auto nij : row) together_both += pairs(nij);
    }
    std::uint64_t together_pred = 0;
    for (auto a : ct.row_sums) together_pred += pairs(a);
    std::uint64_t together_truth = 0;
    for (auto b : ct.col_sums) together_truth += pairs(b);

    PairCounts pc;
    pc.tp = together_both;
    pc.fp = together_pred - together_both;
    pc.fn = together_truth - together_both;
    pc.tn = pairs(ct.n) - pc.tp - pc.fp - pc.fn;
    return pc;
}

PrecisionRecall precision_recall_fscore(const PairCounts& counts) {
    PrecisionRecall pr;
    const auto tp = static_cast<double>(counts.tp);
    if (counts.tp + counts.fp > 0) pr.precision = tp / static_cast<double>(counts.tp + counts.fp);
    if (counts.tp + counts.fn > 0) pr.recall = tp / static_cast<double>(counts.tp + counts.fn);
    if (pr.precision + pr.recall > 0.0) pr.f_score = 2.0 * pr.precision * pr.recall / (pr.precision + pr.recall);
    return pr;
}

double nmi(const Labeling& pred, const Labeling& truth) {
    const auto ct = contingency(pred, truth);
    if (ct.n == 0) throw InvalidInput("NMI needs at least one sample");
    const auto n = static_cast<double>(ct.n);
    const double h_pred = entropy(ct.row_sums, n);
    const double h_truth = entropy(ct.col_sums, n);
    if (h_pred == 0.0 && h_truth == 0.0) return 1.0;
    if (h_pred == 0.0 || h_truth == 0.0) return 0.0;

    double mi = 0.0;
    for (std::size_t a = 0; a < ct.table.size(); ++a) {
        for (std::size_t b = 0; b < ct.table[a].size(); ++b) {
            const auto nij = ct.table[a][b];
            if (nij == 0) continue;
            const double pij = static_cast<double>(nij) / n;
            mi += pij * std::log(static_cast<double>(nij) * n /
                                 (static_cast<double>(ct.row_sums[a]) * static_cast<double>(ct.col_sums[b])));
        }
    }
    return std::clamp(mi / std::sqrt(h_pred * h_truth), 0.0, 1.0);
}

double adjusted_rand_index(const Labeling& pred, const Labeling& truth) {
    const auto ct = contingency(pred, truth);
    if (ct.n < 2) throw InvalidInput("ARI needs at least two samples");
    double index = 0.0;
    for (const auto& row : ct.table) {
        for (auto nij : row) index += static_cast<double>(pairs(nij));
    }
    double sum_a = 0.0;
    for (auto a : ct.row_sums) sum_a += static_cast<double>(pairs(a));
    double sum_b = 0.0;
    for (auto b : ct.col_sums) sum_b += static_cast<double>(pairs(b));
    const double expected = sum_a * sum_b / static_cast<double>(pairs(ct.n));
    const double max_index = 0.5 * (sum_a + sum_b);
    const double denom = max_index - expected;
    // 0/0 only happens when both partitions are trivial (all singletons or one block) and hence identical.
    if (denom == 0.0) return 1.0;
    return (index - expected) / denom;
}

MetricReport evaluate_all(const Labeling& pred, const Labeling& truth) {
    const auto pr = precision_recall_fscore(pair_counts(pred, truth));
    MetricReport r;
    r.f_score = pr.f_score;
    r.precision = pr.precision;
    r.recall = pr.recall;
    r.nmi = nmi(pred, truth);
    r.ari = adjusted_rand_index(pred, truth);
    return r;
}

} // namespace pfsc::metrics
