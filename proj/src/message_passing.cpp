#include "inside/message_passing.hpp"

namespace inside::mp {

std::vector<std::pair<int, int>> to_directed(const std::vector<std::pair<int, int>>& undirected) {
    std::vector<std::pair<int, int>> out;
    out.reserve(undirected.size() * 2);
    for (auto [u, v] : undirected) {
        out.emplace_back(u, v);
        out.emplace_back(v, u);
    }
    return out;
}

Var edge_weights(Tape& tape, Var H, const std::vector<std::pair<int, int>>& directed,
                 const LocalParams& params) {
    std::vector<int> src, dst;
    src.reserve(directed.size());
    dst.reserve(directed.size());
    for (auto [u, v] : directed) {
        src.push_back(u);
        dst.push_back(v);
    }
    Var hu = tape.gather_rows(H, src);
    Var hv = tape.gather_rows(H, dst);
    Var feat = tape.concat_cols({hu, hv, tape.abs(tape.sub(hu, hv))});  // E x 3d
    Var logits = tape.matmul(feat, params.W_e);                        // E x 1
    logits = tape.add_row_broadcast(logits, params.b_e);
    return tape.sigmoid(logits);
}

Var local_step(Tape& tape, Var H, const std::vector<std::pair<int, int>>& directed,
               const LocalParams& params, Matrix* weight_trace) {
    const int nodes = static_cast<int>(tape.value(H).rows());
    Var self = tape.matmul(H, params.W1);
    if (directed.empty()) {
        if (weight_trace) *weight_trace = Matrix(0, 1);
        return self;
    }
    Var w = edge_weights(tape, H, directed, params);
    if (weight_trace) *weight_trace = tape.value(w);
    std::vector<int> src, dst;
    for (auto [u, v] : directed) {
        src.push_back(u);
        dst.push_back(v);
    }
    Var messages = tape.row_scale(tape.gather_rows(H, src), w);       // E x d
    Var aggregated = tape.scatter_rows(messages, dst, nodes);        // N x d
    return tape.add(self, tape.matmul(aggregated, params.W2));
}

std::pair<Var, Var> global_step(Tape& tape, Var H, Var root, const GlobalParams& params,
                                Matrix* score_trace) {
    Var logits = tape.add_row_broadcast(tape.matmul(H, params.W_r), params.b_r);  // N x 1
    Var scores = tape.softmax_flat(logits);
    if (score_trace) *score_trace = tape.value(scores);
    Var pooled = tape.matmul(tape.transpose(scores), H);  // 1 x d
    Var root_next = tape.add(root, pooled);
    Var injected = tape.tanh(tape.add(tape.matmul(root_next, params.W_psi), params.b_psi));
    Var H_next = tape.add_row_broadcast(H, injected);
    return {H_next, root_next};
}

std::pair<Var, Var> dual_update(Tape& tape, Var H, const std::vector<std::pair<int, int>>& undirected,
                                Var root, const std::vector<LocalParams>& local_params,
                                const std::vector<GlobalParams>& global_params, int depth,
                                bool use_global, DualTrace* trace) {
    if (depth < 1) throw Error("dual_update depth must be >= 1");
    if (static_cast<int>(local_params.size()) < depth ||
        (use_global && static_cast<int>(global_params.size()) < depth))
        throw Error("dual_update needs per-layer parameters");
    auto directed = to_directed(undirected);
    for (int layer = 0; layer < depth; ++layer) {
        Matrix* wt = nullptr;
        Matrix* st = nullptr;
        if (trace) {
            trace->edge_weights.emplace_back();
            wt = &trace->edge_weights.back();
            if (use_global) {
                trace->root_scores.emplace_back();
                st = &trace->root_scores.back();
            }
        }
        H = local_step(tape, H, directed, local_params[layer], wt);
        if (use_global) {
            auto [h2, r2] = global_step(tape, H, root, global_params[layer], st);
            H = h2;
            root = r2;
        }
    }
    return {H, root};
}

}  // namespace inside::mp
