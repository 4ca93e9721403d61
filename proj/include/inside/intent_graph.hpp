#ifndef INSIDE_INTENT_GRAPH_HPP
#define INSIDE_INTENT_GRAPH_HPP

#include <utility>
#include <vector>

#include "inside/encoders.hpp"
#include "inside/tape.hpp"

namespace inside {

/// Per-article intent graph: k coarse nodes (generator analyses, encoded)
/// and k*l learnable fine nodes. Fine embeddings are produced per forward
/// pass by update_fine_nodes; only the static parts live here.
struct IntentGraph {
    int k = 0;
    int l = 0;
    Matrix coarse_embeddings;  // k x d
    std::vector<std::pair<int, int>> edges_coarse;  // directed chain over coarse indices
    std::vector<std::pair<int, int>> edges_fine;    // (coarse i, flat fine index i*l+j)

    int node_count() const { return k + k * l; }
    /// Edges as node indices: coarse 0..k-1, fine k..k+k*l-1.
    std::vector<std::pair<int, int>> node_edges() const;
};

/// Encodes the generator analyses for each prompt, k x d, prompt order.
Matrix init_coarse_nodes(const NewsItem& item, const std::vector<Prompt>& prompts,
                         IntentGenerator& generator, const TextEncoder& encoder, IntentCache& cache);

/// Directed coarse chain following framework_order plus full coarse-to-own-fine
/// connections.
std::pair<std::vector<std::pair<int, int>>, std::vector<std::pair<int, int>>> intent_edges(
    int k, int l, const std::vector<int>& framework_order);

/// Residual attention update of the fine node base against the article's
/// sentence embeddings:
///   h_f[i*l+j] = base[i*l+j] + softmax((h_c[i] + base[i*l+j]) . H_sen^T) . H_sen
/// Rows of the returned attention trace (if requested) follow fine-node order.
ad::Var update_fine_nodes(ad::Tape& tape, ad::Var base, ad::Var coarse, ad::Var sentence_embeddings,
                          int k, int l, Matrix* attention_trace = nullptr);

IntentGraph build_intent_graph(const NewsItem& item, const std::vector<Prompt>& prompts,
                               IntentGenerator& generator, const TextEncoder& encoder,
                               IntentCache& cache, int l,
                               const std::vector<int>& framework_order);

}  // namespace inside

#endif
