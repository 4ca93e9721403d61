#include "inside/semantic_graph.hpp"

#include <set>

namespace inside {

std::vector<std::pair<int, int>> SemanticGraph::node_edges() const {
    std::vector<std::pair<int, int>> out = edges_local;
    out.reserve(edges_local.size() + edges_global.size());
    for (auto [s, e] : edges_global) out.emplace_back(s, m + e);
    return out;
}

Matrix init_semantic_nodes(const std::vector<std::string>& sentences,
                           const std::vector<std::string>& entities, const TextEncoder& encoder) {
    std::vector<std::string> all = sentences;
    all.insert(all.end(), entities.begin(), entities.end());
    Matrix h = encoder.encode(all);
    if (!all_finite(h)) throw Error("encoder produced non-finite embeddings");
    return h;
}

std::vector<std::pair<int, int>> local_edges(int m, int w) {
    std::vector<std::pair<int, int>> out;
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m && j <= i + w; ++j) out.emplace_back(i, j);
    return out;
}

std::vector<std::pair<int, int>> complete_edges(int m) {
    std::vector<std::pair<int, int>> out;
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) out.emplace_back(i, j);
    return out;
}

std::vector<std::pair<int, int>> global_edges(const EntityTable& table, int m) {
    std::set<std::pair<int, int>> dedup;
    for (auto [s, e] : table.incidence) {
        if (static_cast<int>(s) >= m) throw IndexOutOfRange("incidence sentence index out of range");
        dedup.insert({static_cast<int>(s), static_cast<int>(e)});
    }
    return {dedup.begin(), dedup.end()};
}

SemanticGraph build_semantic_graph(const SentenceList& sentences, const EntityTable& entities,
                                   const TextEncoder& encoder, const SemanticGraphOptions& options) {
    SemanticGraph g;
    g.m = static_cast<int>(sentences.size());
    const std::vector<std::string> entity_surfaces =
        options.no_entity ? std::vector<std::string>{} : entities.entities;
    g.n = static_cast<int>(entity_surfaces.size());
    g.embeddings = init_semantic_nodes(sentences.sentences, entity_surfaces, encoder);
    g.edges_local = options.no_window ? complete_edges(g.m) : local_edges(g.m, options.window);
    if (!options.no_entity) {
        g.edges_global = global_edges(entities, g.m);
        for (auto [s, e] : g.edges_global)
            if (e >= g.n) throw IndexOutOfRange("incidence entity index out of range");
    }
    return g;
}

}  // namespace inside
