#ifndef INSIDE_SEMANTIC_GRAPH_HPP
#define INSIDE_SEMANTIC_GRAPH_HPP

#include <utility>
#include <vector>

#include "inside/encoders.hpp"
#include "inside/text_processing.hpp"

namespace inside {

/// Per-article semantic graph: rows 0..m-1 are sentences, m..m+n-1 entities.
/// Edges are stored undirected; message passing expands both directions.
struct SemanticGraph {
    int m = 0;  // sentence count
    int n = 0;  // entity count
    Matrix embeddings;  // (m+n) x d
    std::vector<std::pair<int, int>> edges_local;   // sentence pairs, i < j
    std::vector<std::pair<int, int>> edges_global;  // (sentence, entity index)

    int node_count() const { return m + n; }
    /// All edges as node-index pairs (entities offset by m).
    std::vector<std::pair<int, int>> node_edges() const;
};

/// Encoder rows for sentences followed by entity surfaces, (m+n) x d.
Matrix init_semantic_nodes(const std::vector<std::string>& sentences,
                           const std::vector<std::string>& entities, const TextEncoder& encoder);

/// {(i,j) : 0 < |i-j| <= w}, stored with i < j. Self-pairs excluded.
std::vector<std::pair<int, int>> local_edges(int m, int w);

/// All distinct sentence pairs (the no-window ablation).
std::vector<std::pair<int, int>> complete_edges(int m);

/// One undirected edge per incidence pair, deduplicated.
std::vector<std::pair<int, int>> global_edges(const EntityTable& table, int m);

struct SemanticGraphOptions {
    int window = 2;
    bool no_entity = false;  // drop entity nodes and edges
    bool no_window = false;  // complete sentence connectivity
};

SemanticGraph build_semantic_graph(const SentenceList& sentences, const EntityTable& entities,
                                   const TextEncoder& encoder, const SemanticGraphOptions& options);

}  // namespace inside

#endif
