#ifndef INSIDE_MESSAGE_PASSING_HPP
#define INSIDE_MESSAGE_PASSING_HPP

#include <utility>
#include <vector>

#include "inside/tape.hpp"

namespace inside::mp {

using ad::Tape;
using ad::Var;

struct LocalParams {
    Var W_e;  // 3d x 1
    Var b_e;  // 1 x 1
    Var W1;   // d x d
    Var W2;   // d x d
};

struct GlobalParams {
    Var W_r;    // d x 1
    Var b_r;    // 1 x 1
    Var W_psi;  // d x d
    Var b_psi;  // 1 x d
};

/// Expands undirected edges into both directed messages (u->v and v->u).
std::vector<std::pair<int, int>> to_directed(const std::vector<std::pair<int, int>>& undirected);

/// Sigmoid edge weights for each directed edge (src u, dst v):
///   w_uv = sigmoid(W_e . [h_u || h_v || |h_u - h_v|] + b_e),  E x 1.
Var edge_weights(Tape& tape, Var H, const std::vector<std::pair<int, int>>& directed,
                 const LocalParams& params);

/// h'_v = H W1 + (sum over incoming edges of w_uv h_u) W2.
/// Isolated nodes keep only the self term.
Var local_step(Tape& tape, Var H, const std::vector<std::pair<int, int>>& directed,
               const LocalParams& params, Matrix* weight_trace = nullptr);

/// Softmax scores over nodes from H W_r + b_r; root' = root + scores^T H;
/// h'_v = tanh(root' W_psi + b_psi) + h_v. Returns (H', root').
std::pair<Var, Var> global_step(Tape& tape, Var H, Var root, const GlobalParams& params,
                                Matrix* score_trace = nullptr);

struct DualTrace {
    std::vector<Matrix> edge_weights;  // per layer, one scalar per directed edge
    std::vector<Matrix> root_scores;   // per layer, N x 1
};

/// depth layers of local-then-global over one graph's undirected edges.
/// use_global=false is the local-only ablation. Returns (H_final, root_final).
std::pair<Var, Var> dual_update(Tape& tape, Var H, const std::vector<std::pair<int, int>>& undirected,
                                Var root, const std::vector<LocalParams>& local_params,
                                const std::vector<GlobalParams>& global_params, int depth,
                                bool use_global, DualTrace* trace = nullptr);

}  // namespace inside::mp

#endif
