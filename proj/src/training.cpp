#include "inside/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

namespace inside {

std::vector<PreparedItem> prepare_corpus(const Corpus& corpus, const ModelConfig& config,
                                         const TextEncoder& encoder,
                                         const std::vector<Prompt>& prompts,
                                         IntentGenerator& generator, IntentCache& cache) {
    std::vector<PreparedItem> out;
    out.reserve(corpus.items.size());
    for (const auto& item : corpus.items)
        out.push_back(prepare_item(item, config, encoder, prompts, generator, cache));
    return out;
}

AdamW::AdamW(const ModelParams& params, double learning_rate, double weight_decay, double beta1,
             double beta2, double eps)
    : lr_(learning_rate), wd_(weight_decay), beta1_(beta1), beta2_(beta2), eps_(eps) {
    for (const auto& [name, mat] : params.tensors) {
        m_.push_back(Matrix::Zero(mat.rows(), mat.cols()));
        v_.push_back(Matrix::Zero(mat.rows(), mat.cols()));
    }
}

void AdamW::step(ModelParams& params, const std::vector<Matrix>& grads) {
    if (grads.size() != params.tensors.size()) throw ShapeMismatch("gradient count mismatch");
    ++t_;
    const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    for (std::size_t i = 0; i < grads.size(); ++i) {
        Matrix& theta = params.tensors[i].second;
        const Matrix& g = grads[i];
        m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * g;
        v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * g.cwiseProduct(g);
        Matrix mhat = m_[i] / bc1;
        Matrix vhat = v_[i] / bc2;
        Matrix update =
            (mhat.array() / (vhat.array().sqrt() + eps_)).matrix() + wd_ * theta;
        theta -= lr_ * update;
    }
}

namespace {

// Mean batch loss; fills grads (zero for tensors the batch never touched).
double batch_step(const ModelParams& params, const std::vector<PreparedItem>& items,
                  const std::vector<std::size_t>& batch, std::vector<Matrix>& grads) {
    ad::Tape tape;
    ParamVars pv = mount_params(tape, params, true);
    ad::Var total{};
    bool first = true;
    for (std::size_t idx : batch) {
        ad::Var prob = forward_item(tape, pv, items[idx]);
        ad::Var loss = tape.bce(prob, static_cast<double>(items[idx].label));
        total = first ? loss : tape.add(total, loss);
        first = false;
    }
    total = tape.scale(total, 1.0 / static_cast<double>(batch.size()));
    tape.backward(total);
    grads.clear();
    grads.reserve(pv.vars.size());
    for (std::size_t i = 0; i < pv.vars.size(); ++i) {
        const Matrix& g = tape.grad(pv.vars[i]);
        if (g.size() == 0) {
            const Matrix& shape = params.tensors[i].second;
            grads.push_back(Matrix::Zero(shape.rows(), shape.cols()));
        } else {
            grads.push_back(g);
        }
    }
    return tape.value(total)(0, 0);
}

}  // namespace

MetricReport evaluate(const ModelParams& params, const std::vector<PreparedItem>& items) {
    if (items.empty()) throw EmptySplit();
    std::vector<int> labels;
    std::vector<double> probs;
    for (const auto& item : items) {
        labels.push_back(item.label);
        probs.push_back(predict(params, item).prob_fake);
    }
    return compute_metrics(labels, probs);
}

TrainResult train(const TrainConfig& config, const std::vector<PreparedItem>& train_items,
                  const std::vector<PreparedItem>& val_items) {
    bool has_real = false, has_fake = false;
    for (const auto& item : train_items) (item.label == 1 ? has_fake : has_real) = true;
    if (!has_real || !has_fake) throw SingleClassTrainSet();

    ModelParams params = ModelParams::init(config.model, config.seed);
    AdamW optimizer(params, config.learning_rate, config.weight_decay);
    std::mt19937_64 rng(config.seed ^ 0xA5A5A5A5A5A5A5A5ull);

    TrainResult result;
    result.params = params;
    double best_f1 = -1.0;
    int non_improving = 0;

    std::vector<std::size_t> order(train_items.size());
    std::iota(order.begin(), order.end(), 0u);
    std::vector<Matrix> grads;

    for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double loss_sum = 0.0;
        std::size_t batches = 0;
        for (std::size_t at = 0; at < order.size(); at += config.batch_size) {
            std::vector<std::size_t> batch(
                order.begin() + static_cast<std::ptrdiff_t>(at),
                order.begin() + static_cast<std::ptrdiff_t>(
                                    std::min(at + config.batch_size, order.size())));
            loss_sum += batch_step(params, train_items, batch, grads);
            optimizer.step(params, grads);
            ++batches;
        }

        EpochRecord rec;
        rec.epoch = epoch;
        rec.train_loss = loss_sum / static_cast<double>(batches);
        {
            std::vector<int> labels;
            std::vector<double> probs;
            for (const auto& item : train_items) {
                labels.push_back(item.label);
                probs.push_back(predict(params, item).prob_fake);
            }
            MetricReport train_rep = compute_metrics(labels, probs);
            rec.train_acc = train_rep.acc;
        }
        rec.val = evaluate(params, val_items);
        result.history.push_back(rec);

        if (rec.val.macro_f1 > best_f1) {
            best_f1 = rec.val.macro_f1;
            result.params = params;
            result.val_report = rec.val;
            result.best_epoch = epoch;
            non_improving = 0;
        } else {
            ++non_improving;
            if (non_improving > config.patience) break;
        }
    }
    return result;
}

std::vector<AblationRow> run_ablation(const TrainConfig& base, const Splits& splits,
                                      const TextEncoder& encoder,
                                      const std::vector<Prompt>& prompts,
                                      IntentGenerator& generator, IntentCache& cache) {
    struct Variant {
        std::string name;
        void (*apply)(AblationFlags&);
    };
    const std::vector<Variant> variants = {
        {"InSide", [](AblationFlags&) {}},
        {"w/o Entity", [](AblationFlags& f) { f.no_entity = true; }},
        {"w/o Window", [](AblationFlags& f) { f.no_window = true; }},
        {"w/o Int_f", [](AblationFlags& f) { f.no_fine_intent = true; }},
        {"w/o Global", [](AblationFlags& f) { f.no_global = true; }},
        {"w/o DPGA", [](AblationFlags& f) { f.no_dpga = true; }},
    };

    std::vector<AblationRow> rows;
    for (const auto& variant : variants) {
        TrainConfig config = base;
        config.model.ablation = base.model.ablation;
        variant.apply(config.model.ablation);
        auto train_items = prepare_corpus(splits.train, config.model, encoder, prompts, generator, cache);
        auto val_items = prepare_corpus(splits.val, config.model, encoder, prompts, generator, cache);
        auto test_items = prepare_corpus(splits.test, config.model, encoder, prompts, generator, cache);
        TrainResult result = train(config, train_items, val_items);
        AblationRow row;
        row.name = variant.name;
        row.val = result.val_report;
        row.test = evaluate(result.params, test_items);
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string format_ablation_table(const std::vector<AblationRow>& rows) {
    std::ostringstream out;
    out << "variant\tval_macF1\tval_acc\ttest_macF1\ttest_acc\ttest_auc\n";
    out.precision(4);
    out << std::fixed;
    for (const auto& row : rows) {
        out << row.name << "\t" << row.val.macro_f1 << "\t" << row.val.acc << "\t"
            << row.test.macro_f1 << "\t" << row.test.acc << "\t" << row.test.auc << "\n";
    }
    return out.str();
}

}  // namespace inside
