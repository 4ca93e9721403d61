#include "inside/model.hpp"

#include <cmath>
#include <random>

#include <json.hpp>

namespace inside {

using nlohmann::json;

std::vector<int> ModelConfig::order_or_identity() const {
    if (!framework_order.empty()) return framework_order;
    std::vector<int> identity(k);
    for (int i = 0; i < k; ++i) identity[i] = i;
    return identity;
}

std::string ModelConfig::to_json() const {
    json j;
    j["dim"] = dim;
    j["window"] = window;
    j["k"] = k;
    j["l"] = l;
    j["r"] = r;
    j["depth"] = depth;
    j["align_depth"] = align_depth;
    j["max_entities"] = max_entities;
    j["head_hidden1"] = head_hidden1;
    j["head_hidden2"] = head_hidden2;
    j["framework_order"] = framework_order;
    j["ablation"] = {{"no_entity", ablation.no_entity},
                     {"no_window", ablation.no_window},
                     {"no_fine_intent", ablation.no_fine_intent},
                     {"no_global", ablation.no_global},
                     {"no_dpga", ablation.no_dpga}};
    return j.dump();
}

ModelConfig ModelConfig::from_json(const std::string& json_text) {
    json j = json::parse(json_text);
    ModelConfig c;
    c.dim = j.at("dim").get<int>();
    c.window = j.at("window").get<int>();
    c.k = j.at("k").get<int>();
    c.l = j.at("l").get<int>();
    c.r = j.at("r").get<int>();
    c.depth = j.at("depth").get<int>();
    c.align_depth = j.at("align_depth").get<int>();
    c.max_entities = j.at("max_entities").get<int>();
    c.head_hidden1 = j.at("head_hidden1").get<int>();
    c.head_hidden2 = j.at("head_hidden2").get<int>();
    c.framework_order = j.at("framework_order").get<std::vector<int>>();
    const auto& a = j.at("ablation");
    c.ablation.no_entity = a.at("no_entity").get<bool>();
    c.ablation.no_window = a.at("no_window").get<bool>();
    c.ablation.no_fine_intent = a.at("no_fine_intent").get<bool>();
    c.ablation.no_global = a.at("no_global").get<bool>();
    c.ablation.no_dpga = a.at("no_dpga").get<bool>();
    return c;
}

// ---- parameters --------------------------------------------------------

Matrix& ModelParams::at(const std::string& name) {
    auto it = index.find(name);
    if (it == index.end()) throw Error("unknown parameter tensor: " + name);
    return tensors[it->second].second;
}

const Matrix& ModelParams::at(const std::string& name) const {
    auto it = index.find(name);
    if (it == index.end()) throw Error("unknown parameter tensor: " + name);
    return tensors[it->second].second;
}

namespace {

double gaussian(std::mt19937_64& rng) {
    auto unit = [&rng] { return (static_cast<double>(rng() >> 11) + 0.5) * (1.0 / 9007199254740992.0); };
    return std::sqrt(-2.0 * std::log(unit())) * std::cos(2.0 * M_PI * unit());
}

}  // namespace

ModelParams ModelParams::init(const ModelConfig& config, std::uint64_t seed) {
    ModelParams p;
    p.config = config;
    std::mt19937_64 rng(seed);
    const int d = config.dim;
    const double scale = 1.0 / std::sqrt(static_cast<double>(d));

    auto add_random = [&](const std::string& name, int rows, int cols, double s) {
        Matrix m(rows, cols);
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = s * gaussian(rng);
        p.index[name] = p.tensors.size();
        p.tensors.emplace_back(name, std::move(m));
    };
    auto add_zero = [&](const std::string& name, int rows, int cols) {
        p.index[name] = p.tensors.size();
        p.tensors.emplace_back(name, Matrix::Zero(rows, cols));
    };
    auto add_stack = [&](const std::string& prefix, int depth, bool with_global) {
        for (int i = 0; i < depth; ++i) {
            std::string lp = prefix + ".l" + std::to_string(i) + ".";
            add_random(lp + "W_e", 3 * d, 1, scale);
            add_zero(lp + "b_e", 1, 1);
            add_random(lp + "W1", d, d, scale);
            add_random(lp + "W2", d, d, scale);
            if (with_global) {
                add_random(lp + "W_r", d, 1, scale);
                add_zero(lp + "b_r", 1, 1);
                add_random(lp + "W_psi", d, d, scale);
                add_zero(lp + "b_psi", 1, d);
            }
        }
        add_random(prefix + ".root", 1, d, scale);
    };

    if (config.effective_l() > 0) add_random("fine_base", config.k * config.effective_l(), d, scale);
    add_stack("sem", config.depth, !config.ablation.no_global);
    add_stack("int", config.depth, !config.ablation.no_global);
    if (config.ablation.no_dpga) {
        add_stack("joint", config.align_depth, !config.ablation.no_global);
    } else {
        add_random("pseudo_base", config.r, d, scale);
        add_random("efn.W1", 2 * kNodeTypeCount + 2, d, scale);
        add_zero("efn.b1", 1, d);
        add_random("efn.W2", d, d, scale);
        add_zero("efn.b2", 1, d);
        for (int i = 0; i < config.align_depth; ++i) {
            std::string lp = "align.l" + std::to_string(i) + ".";
            add_random(lp + "W1", d, d, scale);
            add_zero(lp + "b1", 1, d);
            add_random(lp + "W2", d, d, scale);
            add_zero(lp + "b2", 1, d);
        }
    }
    add_random("head.W1", d, config.head_hidden1, scale);
    add_zero("head.b1", 1, config.head_hidden1);
    add_random("head.W2", config.head_hidden1, config.head_hidden2,
               1.0 / std::sqrt(static_cast<double>(config.head_hidden1)));
    add_zero("head.b2", 1, config.head_hidden2);
    add_random("head.W3", config.head_hidden2, 1,
               1.0 / std::sqrt(static_cast<double>(config.head_hidden2)));
    add_zero("head.b3", 1, 1);
    return p;
}

Checkpoint ModelParams::to_checkpoint() const {
    Checkpoint ckpt;
    ckpt.config_json = config.to_json();
    ckpt.tensors = tensors;
    return ckpt;
}

ModelParams ModelParams::from_checkpoint(const Checkpoint& ckpt) {
    ModelParams loaded;
    loaded.config = ModelConfig::from_json(ckpt.config_json);
    // Rebuild the expected layout, then require every tensor to be present
    // with its expected shape.
    ModelParams expected = ModelParams::init(loaded.config, 0);
    std::unordered_map<std::string, const Matrix*> by_name;
    for (const auto& [name, mat] : ckpt.tensors) by_name[name] = &mat;
    for (auto& [name, mat] : expected.tensors) {
        auto it = by_name.find(name);
        if (it == by_name.end()) throw SchemaMismatch("tensor " + name, "missing");
        if (it->second->rows() != mat.rows() || it->second->cols() != mat.cols())
            throw SchemaMismatch("tensor " + name + " shape", "mismatched shape");
        mat = *it->second;
    }
    if (by_name.size() != expected.tensors.size())
        throw SchemaMismatch(std::to_string(expected.tensors.size()) + " tensors",
                             std::to_string(by_name.size()) + " tensors");
    loaded.tensors = std::move(expected.tensors);
    loaded.index = std::move(expected.index);
    return loaded;
}

// ---- preparation -------------------------------------------------------

PreparedItem prepare_item(const NewsItem& item, const ModelConfig& config,
                          const TextEncoder& encoder, const std::vector<Prompt>& prompts,
                          IntentGenerator& generator, IntentCache& cache) {
    if (static_cast<int>(prompts.size()) != config.k)
        throw Error("prompt count does not match configured k");
    PreparedItem prep;
    prep.id = item.id;
    prep.label = item.label;
    prep.sentences = segment_sentences(item.text);
    CapitalizedSpanRecognizer recognizer;
    prep.entities = extract_entities(prep.sentences, recognizer,
                                     static_cast<std::size_t>(config.max_entities));
    SemanticGraphOptions options;
    options.window = config.window;
    options.no_entity = config.ablation.no_entity;
    options.no_window = config.ablation.no_window;
    prep.sem = build_semantic_graph(prep.sentences, prep.entities, encoder, options);
    prep.intent = build_intent_graph(item, prompts, generator, encoder, cache, config.effective_l(),
                                     config.order_or_identity());
    return prep;
}

// ---- forward -----------------------------------------------------------

ad::Var ParamVars::at(const std::string& name) const {
    auto it = params->index.find(name);
    if (it == params->index.end()) throw Error("unknown parameter tensor: " + name);
    return vars[it->second];
}

ParamVars mount_params(ad::Tape& tape, const ModelParams& params, bool requires_grad) {
    ParamVars pv;
    pv.params = &params;
    pv.vars.reserve(params.tensors.size());
    for (const auto& [name, mat] : params.tensors) pv.vars.push_back(tape.leaf(mat, requires_grad));
    return pv;
}

namespace {

std::vector<mp::LocalParams> local_stack(const ParamVars& pv, const std::string& prefix, int depth) {
    std::vector<mp::LocalParams> out;
    for (int i = 0; i < depth; ++i) {
        std::string lp = prefix + ".l" + std::to_string(i) + ".";
        out.push_back({pv.at(lp + "W_e"), pv.at(lp + "b_e"), pv.at(lp + "W1"), pv.at(lp + "W2")});
    }
    return out;
}

std::vector<mp::GlobalParams> global_stack(const ParamVars& pv, const std::string& prefix, int depth) {
    std::vector<mp::GlobalParams> out;
    for (int i = 0; i < depth; ++i) {
        std::string lp = prefix + ".l" + std::to_string(i) + ".";
        out.push_back({pv.at(lp + "W_r"), pv.at(lp + "b_r"), pv.at(lp + "W_psi"), pv.at(lp + "b_psi")});
    }
    return out;
}

ad::Var head_forward(ad::Tape& tape, const ParamVars& pv, ad::Var h_cls) {
    ad::Var h = tape.relu(tape.add_row_broadcast(tape.matmul(h_cls, pv.at("head.W1")), pv.at("head.b1")));
    h = tape.relu(tape.add_row_broadcast(tape.matmul(h, pv.at("head.W2")), pv.at("head.b2")));
    return tape.add_row_broadcast(tape.matmul(h, pv.at("head.W3")), pv.at("head.b3"));
}

}  // namespace

ad::Var forward_item(ad::Tape& tape, const ParamVars& pv, const PreparedItem& item,
                     ForwardTrace* trace) {
    const ModelConfig& config = pv.params->config;
    const bool use_global = !config.ablation.no_global;

    // Semantic branch.
    ad::Var H_sem0 = tape.constant(item.sem.embeddings);
    auto sem_local = local_stack(pv, "sem", config.depth);
    auto sem_global = use_global ? global_stack(pv, "sem", config.depth) : std::vector<mp::GlobalParams>{};
    auto [H_sem, sem_root] =
        mp::dual_update(tape, H_sem0, item.sem.node_edges(), pv.at("sem.root"), sem_local, sem_global,
                        config.depth, use_global, trace ? &trace->sem : nullptr);
    (void)sem_root;

    // Intent branch: fine nodes attend over the initial sentence embeddings.
    ad::Var H_coarse = tape.constant(item.intent.coarse_embeddings);
    ad::Var H_int0 = H_coarse;
    if (config.effective_l() > 0) {
        ad::Var sentence_rows = tape.slice_rows(H_sem0, 0, item.sem.m);
        ad::Var H_fine = update_fine_nodes(tape, pv.at("fine_base"), H_coarse, sentence_rows, config.k,
                                           config.effective_l(),
                                           trace ? &trace->fine_attention : nullptr);
        H_int0 = tape.concat_rows({H_coarse, H_fine});
    }
    auto int_local = local_stack(pv, "int", config.depth);
    auto int_global = use_global ? global_stack(pv, "int", config.depth) : std::vector<mp::GlobalParams>{};
    auto [H_int, int_root] =
        mp::dual_update(tape, H_int0, item.intent.node_edges(), pv.at("int.root"), int_local, int_global,
                        config.depth, use_global, trace ? &trace->intent : nullptr);
    (void)int_root;

    ad::Var pooled{};
    if (config.ablation.no_dpga) {
        // Direct bipartite joint graph instead of pseudo-node alignment.
        const int sem_nodes = item.sem.node_count();
        const int int_nodes = item.intent.node_count();
        std::vector<std::pair<int, int>> edges = item.sem.node_edges();
        for (auto [a, b] : item.intent.node_edges()) edges.emplace_back(sem_nodes + a, sem_nodes + b);
        for (int i = 0; i < sem_nodes; ++i)
            for (int j = 0; j < int_nodes; ++j) edges.emplace_back(i, sem_nodes + j);
        ad::Var H_joint = tape.concat_rows({H_sem, H_int});
        auto joint_local = local_stack(pv, "joint", config.align_depth);
        auto joint_global =
            use_global ? global_stack(pv, "joint", config.align_depth) : std::vector<mp::GlobalParams>{};
        auto [H_final, joint_root] =
            mp::dual_update(tape, H_joint, edges, pv.at("joint.root"), joint_local, joint_global,
                            config.align_depth, use_global, trace ? &trace->joint : nullptr);
        (void)joint_root;
        pooled = tape.mean_rows(H_final);
    } else {
        CommonGraph common = build_common_graph(item.sem, item.intent, config.r);
        align::EdgeFeatureNet net{pv.at("efn.W1"), pv.at("efn.b1"), pv.at("efn.W2"), pv.at("efn.b2")};
        ad::Var H_all = tape.concat_rows({H_sem, H_int, pv.at("pseudo_base")});
        for (int layer = 0; layer < config.align_depth; ++layer) {
            std::string lp = "align.l" + std::to_string(layer) + ".";
            align::LayerParams lparams{pv.at(lp + "W1"), pv.at(lp + "b1"), pv.at(lp + "W2"),
                                       pv.at(lp + "b2")};
            align::AlignTrace* at = nullptr;
            if (trace) {
                trace->align_layers.emplace_back();
                at = &trace->align_layers.back();
            }
            H_all = align::align_step(tape, common, H_all, net, lparams, at);
        }
        pooled = tape.mean_rows(tape.slice_rows(H_all, common.non_pseudo_count(), config.r));
    }

    return tape.sigmoid(head_forward(tape, pv, pooled));
}

Prediction predict(const ModelParams& params, const PreparedItem& item, ForwardTrace* trace) {
    ad::Tape tape;
    ParamVars pv = mount_params(tape, params, false);
    ad::Var prob = forward_item(tape, pv, item, trace);
    Prediction out;
    out.prob_fake = tape.value(prob)(0, 0);
    out.logit = std::log(out.prob_fake / (1.0 - out.prob_fake));
    out.label_pred = out.prob_fake >= 0.5 ? 1 : 0;
    return out;
}

double bce_loss(int y, double prob, double eps) {
    double p = std::min(std::max(prob, eps), 1.0 - eps);
    return -y * std::log(p) - (1 - y) * std::log(1.0 - p);
}

}  // namespace inside
