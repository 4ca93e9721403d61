#ifndef INSIDE_TRAINING_HPP
#define INSIDE_TRAINING_HPP

#include <string>
#include <vector>

#include "inside/metrics.hpp"
#include "inside/model.hpp"

namespace inside {

struct TrainConfig {
    ModelConfig model;
    int batch_size = 64;
    double learning_rate = 2e-4;
    double weight_decay = 0.01;
    int max_epochs = 100;
    int patience = 10;
    std::uint64_t seed = 42;
};

struct EpochRecord {
    int epoch = 0;
    double train_loss = 0.0;
    double train_acc = 0.0;
    MetricReport val;
};

struct TrainResult {
    ModelParams params;       // best-validation checkpoint
    MetricReport val_report;  // at the selected epoch
    std::vector<EpochRecord> history;
    int best_epoch = 0;
};

std::vector<PreparedItem> prepare_corpus(const Corpus& corpus, const ModelConfig& config,
                                         const TextEncoder& encoder,
                                         const std::vector<Prompt>& prompts,
                                         IntentGenerator& generator, IntentCache& cache);

/// Seeded mini-batch training with decoupled-weight-decay adaptive moments;
/// selects the epoch with the best validation macro F1 and stops after
/// `patience` non-improving epochs.
TrainResult train(const TrainConfig& config, const std::vector<PreparedItem>& train_items,
                  const std::vector<PreparedItem>& val_items);

MetricReport evaluate(const ModelParams& params, const std::vector<PreparedItem>& items);

struct AblationRow {
    std::string name;
    MetricReport val;
    MetricReport test;
};

/// Trains the base model and each single-flag variant under one seed.
std::vector<AblationRow> run_ablation(const TrainConfig& base, const Splits& splits,
                                      const TextEncoder& encoder,
                                      const std::vector<Prompt>& prompts,
                                      IntentGenerator& generator, IntentCache& cache);

std::string format_ablation_table(const std::vector<AblationRow>& rows);

// ---- optimizer ---------------------------------------------------------

/// AdamW over the named tensors of a ModelParams.
class AdamW {
public:
    AdamW(const ModelParams& params, double learning_rate, double weight_decay,
          double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);
    void step(ModelParams& params, const std::vector<Matrix>& grads);

private:
    double lr_, wd_, beta1_, beta2_, eps_;
    long t_ = 0;
    std::vector<Matrix> m_, v_;
};

}  // namespace inside

#endif
