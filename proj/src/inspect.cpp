#include "inside/inspect.hpp"

#include <json.hpp>

namespace inside {

using nlohmann::json;

namespace {

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

json edges_to_json(const std::vector<std::pair<int, int>>& edges) {
    json out = json::array();
    for (auto [a, b] : edges) out.push_back(json::array({a, b}));
    return out;
}

json dual_trace_json(const mp::DualTrace& trace, const std::vector<std::pair<int, int>>& undirected) {
    auto directed = mp::to_directed(undirected);
    json layers = json::array();
    for (std::size_t layer = 0; layer < trace.edge_weights.size(); ++layer) {
        json entry;
        json weights = json::array();
        const Matrix& w = trace.edge_weights[layer];
        for (Eigen::Index e = 0; e < w.rows(); ++e)
            weights.push_back(json::array({directed[static_cast<std::size_t>(e)].first,
                                           directed[static_cast<std::size_t>(e)].second, w(e, 0)}));
        entry["edge_weights"] = std::move(weights);
        if (layer < trace.root_scores.size()) {
            json scores = json::array();
            const Matrix& s = trace.root_scores[layer];
            for (Eigen::Index v = 0; v < s.rows(); ++v) scores.push_back(s(v, 0));
            entry["root_scores"] = std::move(scores);
        }
        layers.push_back(std::move(entry));
    }
    return layers;
}

}  // namespace

std::string inspect_item_json(const ModelParams& params, const PreparedItem& item) {
    ForwardTrace trace;
    Prediction pred = predict(params, item, &trace);
    const ModelConfig& config = params.config;

    json j;
    j["item_id"] = item.id;
    j["label"] = item.label;
    j["prediction"] = {{"prob_fake", pred.prob_fake}, {"label_pred", pred.label_pred}};

    // Node table over the common ordering: sentences, entities, coarse,
    // fine, pseudo.
    json nodes = json::array();
    int idx = 0;
    for (int i = 0; i < item.sem.m; ++i)
        nodes.push_back({{"index", idx++}, {"type", "sentence"}, {"text", item.sentences.sentences[i]}});
    for (int i = 0; i < item.sem.n; ++i)
        nodes.push_back({{"index", idx++}, {"type", "entity"}, {"text", item.entities.entities[i]}});
    for (int i = 0; i < item.intent.k; ++i)
        nodes.push_back({{"index", idx++}, {"type", "coarse-intent"}});
    for (int i = 0; i < item.intent.k * item.intent.l; ++i)
        nodes.push_back({{"index", idx++}, {"type", "fine-intent"}});
    if (!config.ablation.no_dpga)
        for (int i = 0; i < config.r; ++i) nodes.push_back({{"index", idx++}, {"type", "pseudo"}});
    j["nodes"] = std::move(nodes);

    json sem;
    sem["m"] = item.sem.m;
    sem["n"] = item.sem.n;
    sem["edges_local"] = edges_to_json(item.sem.edges_local);
    sem["edges_global"] = edges_to_json(item.sem.edges_global);
    sem["layers"] = dual_trace_json(trace.sem, item.sem.node_edges());
    j["semantic_graph"] = std::move(sem);

    json intent;
    intent["k"] = item.intent.k;
    intent["l"] = item.intent.l;
    intent["edges_coarse"] = edges_to_json(item.intent.edges_coarse);
    intent["edges_fine"] = edges_to_json(item.intent.edges_fine);
    intent["layers"] = dual_trace_json(trace.intent, item.intent.node_edges());
    if (trace.fine_attention.size() > 0) intent["fine_attention"] = matrix_to_json(trace.fine_attention);
    j["intent_graph"] = std::move(intent);

    if (config.ablation.no_dpga) {
        j["joint_graph"] = {{"layers", "omitted"}, {"note", "direct bipartite variant"}};
    } else {
        json common;
        common["r"] = config.r;
        json layers = json::array();
        for (const auto& at : trace.align_layers) {
            layers.push_back({{"graph_to_pseudo", matrix_to_json(at.graph_to_pseudo)},
                              {"pseudo_to_graph", matrix_to_json(at.pseudo_to_graph)}});
        }
        common["layers"] = std::move(layers);
        j["common_graph"] = std::move(common);
    }
    return j.dump(2);
}

}  // namespace inside
