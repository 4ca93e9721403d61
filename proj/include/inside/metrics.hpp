#ifndef INSIDE_METRICS_HPP
#define INSIDE_METRICS_HPP

#include <string>
#include <vector>

#include "inside/common.hpp"

namespace inside {

struct MetricReport {
    double auc = 0.0;
    double acc = 0.0;
    double macro_f1 = 0.0;
    double f1_real = 0.0;
    double f1_fake = 0.0;
    long tp = 0, fp = 0, tn = 0, fn = 0;  // fake = positive class

    std::string to_json() const;
    std::string to_table_row(const std::string& name) const;
};

/// Rank-statistic AUC with midrank tie handling. Returns 0.5 when either
/// class is absent.
double auc_midrank(const std::vector<int>& labels, const std::vector<double>& scores);

/// Threshold metrics at 0.5 plus AUC.
MetricReport compute_metrics(const std::vector<int>& labels, const std::vector<double>& probs);

}  // namespace inside

#endif
