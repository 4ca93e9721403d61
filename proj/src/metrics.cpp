#include "inside/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include <json.hpp>

namespace inside {

double auc_midrank(const std::vector<int>& labels, const std::vector<double>& scores) {
    if (labels.size() != scores.size()) throw ShapeMismatch("labels and scores length differ");
    const std::size_t n = labels.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    std::vector<double> rank(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
        double mid = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t t = i; t <= j; ++t) rank[order[t]] = mid;
        i = j + 1;
    }

    double pos = 0, rank_sum_pos = 0;
    for (std::size_t t = 0; t < n; ++t) {
        if (labels[t] == 1) {
            pos += 1;
            rank_sum_pos += rank[t];
        }
    }
    double neg = static_cast<double>(n) - pos;
    if (pos == 0 || neg == 0) return 0.5;
    return (rank_sum_pos - pos * (pos + 1) / 2.0) / (pos * neg);
}

namespace {

double f1_from_counts(long tp, long fp, long fn) {
    double denom = 2.0 * tp + fp + fn;
    return denom == 0 ? 0.0 : 2.0 * tp / denom;
}

}  // namespace

MetricReport compute_metrics(const std::vector<int>& labels, const std::vector<double>& probs) {
    if (labels.empty()) throw EmptySplit();
    MetricReport rep;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        int pred = probs[i] >= 0.5 ? 1 : 0;
        if (labels[i] == 1 && pred == 1) ++rep.tp;
        if (labels[i] == 0 && pred == 1) ++rep.fp;
        if (labels[i] == 0 && pred == 0) ++rep.tn;
        if (labels[i] == 1 && pred == 0) ++rep.fn;
    }
    rep.acc = static_cast<double>(rep.tp + rep.tn) / static_cast<double>(labels.size());
    rep.f1_fake = f1_from_counts(rep.tp, rep.fp, rep.fn);
    rep.f1_real = f1_from_counts(rep.tn, rep.fn, rep.fp);
    rep.macro_f1 = 0.5 * (rep.f1_real + rep.f1_fake);
    rep.auc = auc_midrank(labels, probs);
    return rep;
}

std::string MetricReport::to_json() const {
    nlohmann::json j;
    j["auc"] = auc;
    j["acc"] = acc;
    j["macro_f1"] = macro_f1;
    j["f1_real"] = f1_real;
    j["f1_fake"] = f1_fake;
    j["confusion"] = {{"tp", tp}, {"fp", fp}, {"tn", tn}, {"fn", fn}};
    return j.dump();
}

std::string MetricReport::to_table_row(const std::string& name) const {
    std::ostringstream out;
    out.precision(4);
    out << std::fixed;
    out << name << "\t" << macro_f1 << "\t" << acc << "\t" << auc << "\t" << f1_real << "\t" << f1_fake;
    return out.str();
}

}  // namespace inside
