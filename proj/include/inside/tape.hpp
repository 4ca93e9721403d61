#ifndef INSIDE_TAPE_HPP
#define INSIDE_TAPE_HPP

#include <functional>
#include <vector>

#include "inside/common.hpp"

namespace inside::ad {

class Tape;

/// Handle to a node on a Tape. Valid only for the tape that created it.
struct Var {
    int id = -1;
};

/// Reverse-mode autodiff over dense matrices. One tape per forward pass;
/// all ops record a backward closure, backward() runs them in reverse.
class Tape {
public:
    Var leaf(Matrix value, bool requires_grad);
    Var constant(Matrix value) { return leaf(std::move(value), false); }

    const Matrix& value(Var v) const { return nodes_[v.id].value; }
    const Matrix& grad(Var v) const { return nodes_[v.id].grad; }

    /// Seeds the 1x1 root with gradient 1 and propagates.
    void backward(Var root);

    std::size_t size() const { return nodes_.size(); }

    // ---- ops ----
    Var matmul(Var a, Var b);
    Var transpose(Var a);
    Var add(Var a, Var b);          // same shape
    Var sub(Var a, Var b);          // same shape
    Var cmul(Var a, Var b);         // elementwise
    Var abs(Var a);
    Var scale(Var a, double s);
    Var add_const(Var a, double c);
    Var add_row_broadcast(Var a, Var row);  // (N x d) + (1 x d) to every row
    Var sigmoid(Var a);
    Var tanh(Var a);
    Var relu(Var a);
    Var row_softmax(Var a);   // softmax along each row
    Var softmax_flat(Var a);  // softmax over all entries
    Var row_sum(Var a);       // (N x d) -> (N x 1)
    Var sum(Var a);           // -> (1 x 1)
    Var mean_rows(Var a);     // (N x d) -> (1 x d)
    Var gather_rows(Var a, std::vector<int> idx);
    Var scatter_rows(Var a, std::vector<int> idx, int rows);  // sum rows into targets
    Var row_scale(Var a, Var w);  // row i of a scaled by w(i, 0)
    Var concat_rows(const std::vector<Var>& parts);
    Var concat_cols(const std::vector<Var>& parts);
    Var slice_rows(Var a, int begin, int count);
    Var log(Var a);
    Var clamp(Var a, double lo, double hi);  // zero gradient outside [lo, hi]

    /// Binary cross entropy of a 1x1 probability against label y in {0,1};
    /// probability is clamped to [eps, 1-eps] before the logs.
    Var bce(Var prob, double y, double eps = 1e-7);

private:
    struct Node {
        Matrix value;
        Matrix grad;
        bool requires_grad = false;
        std::function<void(Tape&, const Matrix&)> back;
    };

    void accum(int id, const Matrix& g);
    Var make(Matrix value, bool requires_grad, std::function<void(Tape&, const Matrix&)> back);

    std::vector<Node> nodes_;
};

}  // namespace inside::ad

#endif
