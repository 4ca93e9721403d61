#ifndef INSIDE_ALIGNMENT_HPP
#define INSIDE_ALIGNMENT_HPP

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "inside/intent_graph.hpp"
#include "inside/semantic_graph.hpp"
#include "inside/tape.hpp"

namespace inside {

enum class NodeType { sentence = 0, entity = 1, coarse_intent = 2, fine_intent = 3, pseudo = 4 };
constexpr int kNodeTypeCount = 5;

std::string node_type_name(NodeType t);

enum class EdgeDirection { into_pseudo = 0, out_of_pseudo = 1 };

/// Union of both graphs plus r pseudo nodes. Node order: sentences,
/// entities, coarse intents, fine intents, then pseudo nodes.
struct CommonGraph {
    int m = 0, n = 0, k = 0, l = 0, r = 0;
    std::vector<NodeType> types;  // one per node

    int non_pseudo_count() const { return m + n + k + k * l; }
    int node_count() const { return non_pseudo_count() + r; }
    long pseudo_edge_count() const { return static_cast<long>(r) * non_pseudo_count(); }
    /// Materialized (pseudo, node) pairs; each carries both directions.
    std::vector<std::pair<int, int>> pseudo_edges() const;
    /// Node indices grouped by non-pseudo type, in node order.
    std::vector<std::vector<int>> type_groups() const;
};

CommonGraph build_common_graph(const SemanticGraph& sem, const IntentGraph& intent, int r);

namespace align {

using ad::Tape;
using ad::Var;

/// Two-layer map from the 12-slot one-hot (src type, dst type, direction)
/// to a d-vector.
struct EdgeFeatureNet {
    Var W1;  // 12 x h
    Var b1;  // 1 x h
    Var W2;  // h x d
    Var b2;  // 1 x d
};

/// Per-layer feed-forward map of Eq-style attention updates, shared by
/// both phases.
struct LayerParams {
    Var W1;  // d x d
    Var b1;  // 1 x d
    Var W2;  // d x d
    Var b2;  // 1 x d
};

Var pseudo_edge_feature(Tape& tape, NodeType src, NodeType dst, EdgeDirection direction,
                        const EdgeFeatureNet& net);

struct AlignTrace {
    // Original node-index column order, one row per pseudo node.
    Matrix graph_to_pseudo;  // r x non_pseudo
    // One row per non-pseudo node, one column per pseudo node.
    Matrix pseudo_to_graph;  // non_pseudo x r
};

/// One alignment layer: phase 1 updates pseudo nodes by attention over all
/// non-pseudo nodes, phase 2 symmetrically updates every non-pseudo node
/// from the refreshed pseudo nodes. H_all rows follow CommonGraph order.
Var align_step(Tape& tape, const CommonGraph& common, Var H_all, const EdgeFeatureNet& net,
               const LayerParams& layer, AlignTrace* trace = nullptr);

}  // namespace align

}  // namespace inside

#endif
