#ifndef INSIDE_MODEL_HPP
#define INSIDE_MODEL_HPP

#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "inside/alignment.hpp"
#include "inside/data_io.hpp"
#include "inside/encoders.hpp"
#include "inside/intent_graph.hpp"
#include "inside/message_passing.hpp"
#include "inside/semantic_graph.hpp"
#include "inside/text_processing.hpp"

namespace inside {

struct AblationFlags {
    bool no_entity = false;
    bool no_window = false;
    bool no_fine_intent = false;
    bool no_global = false;
    bool no_dpga = false;
};

struct ModelConfig {
    int dim = 32;          // embedding dimension d
    int window = 2;        // sentence window w
    int k = 4;             // coarse perspectives
    int l = 4;             // fine nodes per coarse node
    int r = 8;             // pseudo nodes
    int depth = 3;         // dual-update layers per graph
    int align_depth = 2;   // alignment layers
    int max_entities = 32;
    int head_hidden1 = 128;
    int head_hidden2 = 128;
    AblationFlags ablation;
    std::vector<int> framework_order;  // permutation over prompts; empty = identity

    int effective_l() const { return ablation.no_fine_intent ? 0 : l; }
    std::vector<int> order_or_identity() const;
    std::string to_json() const;
    static ModelConfig from_json(const std::string& json_text);
};

/// All learnable tensors, addressed by name. Tensor order is fixed by the
/// configuration so checkpoints and optimizer state stay aligned.
struct ModelParams {
    ModelConfig config;
    std::vector<std::pair<std::string, Matrix>> tensors;
    std::unordered_map<std::string, std::size_t> index;

    Matrix& at(const std::string& name);
    const Matrix& at(const std::string& name) const;

    static ModelParams init(const ModelConfig& config, std::uint64_t seed);
    Checkpoint to_checkpoint() const;
    static ModelParams from_checkpoint(const Checkpoint& ckpt);
};

/// Everything about one article that does not depend on model parameters.
struct PreparedItem {
    std::string id;
    int label = 0;
    SentenceList sentences;
    EntityTable entities;
    SemanticGraph sem;
    IntentGraph intent;
};

PreparedItem prepare_item(const NewsItem& item, const ModelConfig& config,
                          const TextEncoder& encoder, const std::vector<Prompt>& prompts,
                          IntentGenerator& generator, IntentCache& cache);

struct Prediction {
    double prob_fake = 0.5;
    double logit = 0.0;
    int label_pred = 0;  // 1 iff prob_fake >= 0.5
};

struct ForwardTrace {
    mp::DualTrace sem;
    mp::DualTrace intent;
    Matrix fine_attention;  // (k*l) x m, empty when fine nodes are disabled
    std::vector<align::AlignTrace> align_layers;
    mp::DualTrace joint;    // used by the no_dpga variant
};

/// Parameter leaves mounted on one tape, aligned with ModelParams tensors.
struct ParamVars {
    const ModelParams* params = nullptr;
    std::vector<ad::Var> vars;
    ad::Var at(const std::string& name) const;
};

ParamVars mount_params(ad::Tape& tape, const ModelParams& params, bool requires_grad);

/// Full forward pass for one prepared article; returns the 1x1 fake
/// probability on the tape.
ad::Var forward_item(ad::Tape& tape, const ParamVars& pv, const PreparedItem& item,
                     ForwardTrace* trace = nullptr);

Prediction predict(const ModelParams& params, const PreparedItem& item,
                   ForwardTrace* trace = nullptr);

/// -y log(p) - (1-y) log(1-p) with p clamped to [eps, 1-eps].
double bce_loss(int y, double prob, double eps = 1e-7);

}  // namespace inside

#endif
