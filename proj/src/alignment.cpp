#include "inside/alignment.hpp"

namespace inside {

std::string node_type_name(NodeType t) {
    switch (t) {
        case NodeType::sentence: return "sentence";
        case NodeType::entity: return "entity";
        case NodeType::coarse_intent: return "coarse-intent";
        case NodeType::fine_intent: return "fine-intent";
        case NodeType::pseudo: return "pseudo";
    }
    throw UnknownType("invalid node type tag");
}

std::vector<std::pair<int, int>> CommonGraph::pseudo_edges() const {
    std::vector<std::pair<int, int>> out;
    const int np = non_pseudo_count();
    out.reserve(static_cast<std::size_t>(r) * np);
    for (int p = 0; p < r; ++p)
        for (int v = 0; v < np; ++v) out.emplace_back(np + p, v);
    return out;
}

std::vector<std::vector<int>> CommonGraph::type_groups() const {
    std::vector<std::vector<int>> groups(4);
    const int np = non_pseudo_count();
    for (int v = 0; v < np; ++v) groups[static_cast<int>(types[v])].push_back(v);
    return groups;
}

CommonGraph build_common_graph(const SemanticGraph& sem, const IntentGraph& intent, int r) {
    if (r < 1) throw Error("pseudo node count must be >= 1");
    CommonGraph g;
    g.m = sem.m;
    g.n = sem.n;
    g.k = intent.k;
    g.l = intent.l;
    g.r = r;
    g.types.reserve(g.node_count());
    for (int i = 0; i < g.m; ++i) g.types.push_back(NodeType::sentence);
    for (int i = 0; i < g.n; ++i) g.types.push_back(NodeType::entity);
    for (int i = 0; i < g.k; ++i) g.types.push_back(NodeType::coarse_intent);
    for (int i = 0; i < g.k * g.l; ++i) g.types.push_back(NodeType::fine_intent);
    for (int i = 0; i < g.r; ++i) g.types.push_back(NodeType::pseudo);
    return g;
}

namespace align {

Var pseudo_edge_feature(Tape& tape, NodeType src, NodeType dst, EdgeDirection direction,
                        const EdgeFeatureNet& net) {
    int si = static_cast<int>(src);
    int di = static_cast<int>(dst);
    if (si < 0 || si >= kNodeTypeCount || di < 0 || di >= kNodeTypeCount)
        throw UnknownType("node type outside the 5-tag vocabulary");
    Matrix onehot = Matrix::Zero(1, 2 * kNodeTypeCount + 2);
    onehot(0, si) = 1.0;
    onehot(0, kNodeTypeCount + di) = 1.0;
    onehot(0, 2 * kNodeTypeCount + static_cast<int>(direction)) = 1.0;
    Var x = tape.constant(onehot);
    Var h = tape.relu(tape.add_row_broadcast(tape.matmul(x, net.W1), net.b1));
    return tape.add_row_broadcast(tape.matmul(h, net.W2), net.b2);
}

namespace {

Var apply_ffn(Tape& tape, Var x, const LayerParams& layer) {
    Var h = tape.tanh(tape.add_row_broadcast(tape.matmul(x, layer.W1), layer.b1));
    return tape.add_row_broadcast(tape.matmul(h, layer.W2), layer.b2);
}

}  // namespace

Var align_step(Tape& tape, const CommonGraph& common, Var H_all, const EdgeFeatureNet& net,
               const LayerParams& layer, AlignTrace* trace) {
    const int np = common.non_pseudo_count();
    const int r = common.r;
    const int d = static_cast<int>(tape.value(H_all).cols());
    if (tape.value(H_all).rows() != common.node_count())
        throw ShapeMismatch("align_step embedding row count mismatch");

    Var H_pseudo = tape.slice_rows(H_all, np, r);
    auto groups = common.type_groups();

    // Phase 1: graph -> pseudo. Scores grouped by source node type so the
    // shared edge feature of each type can broadcast.
    std::vector<Var> score_blocks;
    std::vector<Var> h_blocks;
    std::vector<int> grouped_index;  // original index per grouped column
    for (int tgi = 0; tgi < 4; ++tgi) {
        const auto& idx = groups[tgi];
        if (idx.empty()) continue;
        NodeType src_type = static_cast<NodeType>(tgi);
        Var e_in = pseudo_edge_feature(tape, src_type, NodeType::pseudo, EdgeDirection::into_pseudo, net);
        Var H_group = tape.gather_rows(H_all, idx);
        Var q = tape.add_row_broadcast(H_pseudo, e_in);   // r x d
        Var kmat = tape.add_row_broadcast(H_group, e_in); // |g| x d
        score_blocks.push_back(tape.matmul(q, tape.transpose(kmat)));  // r x |g|
        h_blocks.push_back(H_group);
        grouped_index.insert(grouped_index.end(), idx.begin(), idx.end());
    }
    Var scores = tape.concat_cols(score_blocks);  // r x np
    Var alpha = tape.row_softmax(scores);
    Var H_grouped = tape.concat_rows(h_blocks);   // np x d
    Var pooled = tape.matmul(alpha, H_grouped);   // r x d
    Var H_pseudo_next = apply_ffn(tape, tape.add(H_pseudo, pooled), layer);

    if (trace) {
        trace->graph_to_pseudo = Matrix::Zero(r, np);
        const Matrix& a = tape.value(alpha);
        for (int c = 0; c < np; ++c) trace->graph_to_pseudo.col(grouped_index[c]) = a.col(c);
    }

    // Phase 2: pseudo -> graph, against the refreshed pseudo embeddings.
    if (trace) trace->pseudo_to_graph = Matrix::Zero(np, r);
    std::vector<Var> updated_blocks;
    std::vector<int> scatter_index;
    for (int tgi = 0; tgi < 4; ++tgi) {
        const auto& idx = groups[tgi];
        if (idx.empty()) continue;
        NodeType dst_type = static_cast<NodeType>(tgi);
        Var e_out =
            pseudo_edge_feature(tape, NodeType::pseudo, dst_type, EdgeDirection::out_of_pseudo, net);
        Var H_group = tape.gather_rows(H_all, idx);
        Var q = tape.add_row_broadcast(H_group, e_out);        // |g| x d
        Var kmat = tape.add_row_broadcast(H_pseudo_next, e_out);  // r x d
        Var beta = tape.row_softmax(tape.matmul(q, tape.transpose(kmat)));  // |g| x r
        if (trace) {
            const Matrix& b = tape.value(beta);
            for (std::size_t i = 0; i < idx.size(); ++i)
                trace->pseudo_to_graph.row(idx[i]) = b.row(static_cast<Eigen::Index>(i));
        }
        Var pooled_g = tape.matmul(beta, H_pseudo_next);  // |g| x d
        updated_blocks.push_back(apply_ffn(tape, tape.add(H_group, pooled_g), layer));
        scatter_index.insert(scatter_index.end(), idx.begin(), idx.end());
    }
    Var updated = tape.concat_rows(updated_blocks);
    Var H_np_next = tape.scatter_rows(updated, scatter_index, np);

    (void)d;
    return tape.concat_rows({H_np_next, H_pseudo_next});
}

}  // namespace align
}  // namespace inside
