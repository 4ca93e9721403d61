#include "inside/intent_graph.hpp"

#include <algorithm>

namespace inside {

std::vector<std::pair<int, int>> IntentGraph::node_edges() const {
    std::vector<std::pair<int, int>> out = edges_coarse;
    out.reserve(edges_coarse.size() + edges_fine.size());
    for (auto [c, f] : edges_fine) out.emplace_back(c, k + f);
    return out;
}

Matrix init_coarse_nodes(const NewsItem& item, const std::vector<Prompt>& prompts,
                         IntentGenerator& generator, const TextEncoder& encoder, IntentCache& cache) {
    std::vector<std::string> analyses = analyze_intent(item, prompts, generator, cache);
    Matrix h = encoder.encode(analyses);
    if (!all_finite(h)) throw Error("encoder produced non-finite coarse embeddings");
    return h;
}

std::pair<std::vector<std::pair<int, int>>, std::vector<std::pair<int, int>>> intent_edges(
    int k, int l, const std::vector<int>& framework_order) {
    if (static_cast<int>(framework_order.size()) != k)
        throw InvalidOrder("framework order must list every coarse node once");
    std::vector<int> sorted = framework_order;
    std::sort(sorted.begin(), sorted.end());
    for (int i = 0; i < k; ++i)
        if (sorted[i] != i) throw InvalidOrder("framework order is not a permutation of 0..k-1");

    std::vector<std::pair<int, int>> coarse;
    for (int i = 0; i + 1 < k; ++i) coarse.emplace_back(framework_order[i], framework_order[i + 1]);
    std::vector<std::pair<int, int>> fine;
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < l; ++j) fine.emplace_back(i, i * l + j);
    return {coarse, fine};
}

ad::Var update_fine_nodes(ad::Tape& tape, ad::Var base, ad::Var coarse, ad::Var sentence_embeddings,
                          int k, int l, Matrix* attention_trace) {
    const Matrix& B = tape.value(base);
    const Matrix& C = tape.value(coarse);
    const Matrix& S = tape.value(sentence_embeddings);
    if (B.rows() != static_cast<Eigen::Index>(k) * l || C.rows() != k || B.cols() != C.cols() ||
        S.cols() != B.cols())
        throw ShapeMismatch("update_fine_nodes shapes inconsistent");
    if (S.rows() < 1) throw ShapeMismatch("update_fine_nodes needs at least one sentence");

    // Query per fine node: its own base plus its coarse parent.
    std::vector<int> parent(static_cast<std::size_t>(k) * l);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < l; ++j) parent[static_cast<std::size_t>(i) * l + j] = i;
    ad::Var queries = tape.add(base, tape.gather_rows(coarse, parent));
    ad::Var logits = tape.matmul(queries, tape.transpose(sentence_embeddings));  // (k*l) x m
    ad::Var attn = tape.row_softmax(logits);
    if (attention_trace) *attention_trace = tape.value(attn);
    return tape.add(base, tape.matmul(attn, sentence_embeddings));
}

IntentGraph build_intent_graph(const NewsItem& item, const std::vector<Prompt>& prompts,
                               IntentGenerator& generator, const TextEncoder& encoder,
                               IntentCache& cache, int l,
                               const std::vector<int>& framework_order) {
    IntentGraph g;
    g.k = static_cast<int>(prompts.size());
    g.l = l;
    g.coarse_embeddings = init_coarse_nodes(item, prompts, generator, encoder, cache);
    auto [coarse, fine] = intent_edges(g.k, g.l, framework_order);
    g.edges_coarse = std::move(coarse);
    g.edges_fine = std::move(fine);
    return g;
}

}  // namespace inside
