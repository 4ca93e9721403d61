#include "inside/tape.hpp"

#include <cmath>
#include <utility>

namespace inside::ad {

Var Tape::leaf(Matrix value, bool requires_grad) {
    return make(std::move(value), requires_grad, nullptr);
}

Var Tape::make(Matrix value, bool requires_grad, std::function<void(Tape&, const Matrix&)> back) {
    Node n;
    n.value = std::move(value);
    n.requires_grad = requires_grad;
    n.back = std::move(back);
    nodes_.push_back(std::move(n));
    return Var{static_cast<int>(nodes_.size()) - 1};
}

void Tape::accum(int id, const Matrix& g) {
    Node& n = nodes_[id];
    if (!n.requires_grad) return;
    if (n.grad.size() == 0) n.grad = Matrix::Zero(n.value.rows(), n.value.cols());
    n.grad += g;
}

void Tape::backward(Var root) {
    Node& r = nodes_[root.id];
    if (r.value.rows() != 1 || r.value.cols() != 1)
        throw ShapeMismatch("backward root must be 1x1");
    r.grad = Matrix::Ones(1, 1);
    for (int id = root.id; id >= 0; --id) {
        Node& n = nodes_[id];
        if (!n.requires_grad || n.grad.size() == 0 || !n.back) continue;
        n.back(*this, n.grad);
    }
}

Var Tape::matmul(Var a, Var b) {
    const Matrix& A = value(a);
    const Matrix& B = value(b);
    if (A.cols() != B.rows()) throw ShapeMismatch("matmul inner dimensions differ");
    bool rg = nodes_[a.id].requires_grad || nodes_[b.id].requires_grad;
    return make(A * B, rg, [a, b](Tape& t, const Matrix& g) {
        t.accum(a.id, g * t.value(b).transpose());
        t.accum(b.id, t.value(a).transpose() * g);
    });
}

Var Tape::transpose(Var a) {
    bool rg = nodes_[a.id].requires_grad;
    return make(value(a).transpose(), rg,
                [a](Tape& t, const Matrix& g) { t.accum(a.id, g.transpose()); });
}

Var Tape::add(Var a, Var b) {
    if (value(a).rows() != value(b).rows() || value(a).cols() != value(b).cols())
        throw ShapeMismatch("add shapes differ");
    bool rg = nodes_[a.id].requires_grad || nodes_[b.id].requires_grad;
    return make(value(a) + value(b), rg, [a, b](Tape& t, const Matrix& g) {
        t.accum(a.id, g);
        t.accum(b.id, g);
    });
}

Var Tape::sub(Var a, Var b) {
    if (value(a).rows() != value(b).rows() || value(a).cols() != value(b).cols())
        throw ShapeMismatch("sub shapes differ");
    bool rg = nodes_[a.id].requires_grad || nodes_[b.id].requires_grad;
    return make(value(a) - value(b), rg, [a, b](Tape& t, const Matrix& g) {
        t.accum(a.id, g);
        t.accum(b.id, -g);
    });
}

Var Tape::cmul(Var a, Var b) {
    if (value(a).rows() != value(b).rows() || value(a).cols() != value(b).cols())
        throw ShapeMismatch("cmul shapes differ");
    bool rg = nodes_[a.id].requires_grad || nodes_[b.id].requires_grad;
    return make(value(a).cwiseProduct(value(b)), rg, [a, b](Tape& t, const Matrix& g) {
        t.accum(a.id, g.cwiseProduct(t.value(b)));
        t.accum(b.id, g.cwiseProduct(t.value(a)));
    });
}

Var Tape::abs(Var a) {
    bool rg = nodes_[a.id].requires_grad;
    return make(value(a).cwiseAbs(), rg, [a](Tape& t, const Matrix& g) {
        Matrix sign = t.value(a).unaryExpr([](double x) { return x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0); });
        t.accum(a.id, g.cwiseProduct(sign));
    });
}

Var Tape::scale(Var a, double s) {
    bool rg = nodes_[a.id].requires_grad;
    return make(value(a) * s, rg, [a, s](Tape& t, const Matrix& g) { t.accum(a.id, g * s); });
}

Var Tape::add_const(Var a, double c) {
    bool rg = nodes_[a.id].requires_grad;
    Matrix out = (value(a).array() + c).matrix();
    return make(std::move(out), rg, [a](Tape& t, const Matrix& g) { t.accum(a.id, g); });
}

Var Tape::add_row_broadcast(Var a, Var row) {
    const Matrix& A = value(a);
    const Matrix& R = value(row);
    if (R.rows() != 1 || R.cols() != A.cols())
        throw ShapeMismatch("add_row_broadcast needs a 1 x cols row");
    Matrix out = A.rowwise() + R.row(0);
    bool rg = nodes_[a.id].requires_grad || nodes_[row.id].requires_grad;
    return make(std::move(out), rg, [a, row](Tape& t, const Matrix& g) {
        t.accum(a.id, g);
        t.accum(row.id, g.colwise().sum());
    });
}

Var Tape::sigmoid(Var a) {
    Matrix out = value(a).unaryExpr([](double x) { return 1.0 / (1.0 + std::exp(-x)); });
    bool rg = nodes_[a.id].requires_grad;
    Var v = make(std::move(out), rg, nullptr);
    nodes_[v.id].back = [a, v](Tape& t, const Matrix& g) {
        const Matrix& y = t.value(v);
        t.accum(a.id, g.cwiseProduct(y.cwiseProduct(Matrix::Ones(y.rows(), y.cols()) - y)));
    };
    return v;
}

Var Tape::tanh(Var a) {
    Matrix out = value(a).unaryExpr([](double x) { return std::tanh(x); });
    bool rg = nodes_[a.id].requires_grad;
    Var v = make(std::move(out), rg, nullptr);
    nodes_[v.id].back = [a, v](Tape& t, const Matrix& g) {
        const Matrix& y = t.value(v);
        t.accum(a.id, g.cwiseProduct(Matrix::Ones(y.rows(), y.cols()) - y.cwiseProduct(y)));
    };
    return v;
}

Var Tape::relu(Var a) {
    Matrix out = value(a).cwiseMax(0.0);
    bool rg = nodes_[a.id].requires_grad;
    return make(std::move(out), rg, [a](Tape& t, const Matrix& g) {
        Matrix mask = t.value(a).unaryExpr([](double x) { return x > 0 ? 1.0 : 0.0; });
        t.accum(a.id, g.cwiseProduct(mask));
    });
}

static Matrix softmax_row(const Eigen::RowVectorXd& x) {
    double mx = x.maxCoeff();
    Eigen::RowVectorXd e = (x.array() - mx).exp().matrix();
    return e / e.sum();
}

Var Tape::row_softmax(Var a) {
    const Matrix& A = value(a);
    Matrix out(A.rows(), A.cols());
    for (Eigen::Index i = 0; i < A.rows(); ++i) out.row(i) = softmax_row(A.row(i));
    bool rg = nodes_[a.id].requires_grad;
    Var v = make(std::move(out), rg, nullptr);
    nodes_[v.id].back = [a, v](Tape& t, const Matrix& g) {
        const Matrix& y = t.value(v);
        Matrix dx(y.rows(), y.cols());
        for (Eigen::Index i = 0; i < y.rows(); ++i) {
            double dot = g.row(i).dot(y.row(i));
            dx.row(i) = (y.row(i).array() * (g.row(i).array() - dot)).matrix();
        }
        t.accum(a.id, dx);
    };
    return v;
}

Var Tape::softmax_flat(Var a) {
    const Matrix& A = value(a);
    double mx = A.maxCoeff();
    Matrix e = (A.array() - mx).exp().matrix();
    Matrix out = e / e.sum();
    bool rg = nodes_[a.id].requires_grad;
    Var v = make(std::move(out), rg, nullptr);
    nodes_[v.id].back = [a, v](Tape& t, const Matrix& g) {
        const Matrix& y = t.value(v);
        double dot = (g.array() * y.array()).sum();
        t.accum(a.id, (y.array() * (g.array() - dot)).matrix());
    };
    return v;
}

Var Tape::row_sum(Var a) {
    const Matrix& A = value(a);
    Matrix out = A.rowwise().sum();
    bool rg = nodes_[a.id].requires_grad;
    return make(std::move(out), rg, [a](Tape& t, const Matrix& g) {
        const Matrix& A = t.value(a);
        t.accum(a.id, g * Matrix::Ones(1, A.cols()));
    });
}

Var Tape::sum(Var a) {
    Matrix out(1, 1);
    out(0, 0) = value(a).sum();
    bool rg = nodes_[a.id].requires_grad;
    return make(std::move(out), rg, [a](Tape& t, const Matrix& g) {
        const Matrix& A = t.value(a);
        t.accum(a.id, Matrix::Constant(A.rows(), A.cols(), g(0, 0)));
    });
}

Var Tape::mean_rows(Var a) {
    const Matrix& A = value(a);
    Matrix out = A.colwise().mean();
    bool rg = nodes_[a.id].requires_grad;
    return make(std::move(out), rg, [a](Tape& t, const Matrix& g) {
        const Matrix& A = t.value(a);
        Matrix spread = Matrix::Ones(A.rows(), 1) * g / static_cast<double>(A.rows());
        t.accum(a.id, spread);
    });
}

Var Tape::gather_rows(Var a, std::vector<int> idx) {
    const Matrix& A = value(a);
    Matrix out(static_cast<Eigen::Index>(idx.size()), A.cols());
    for (std::size_t i = 0; i < idx.size(); ++i) {
        if (idx[i] < 0 || idx[i] >= A.rows()) throw IndexOutOfRange("gather_rows index out of range");
        out.row(static_cast<Eigen::Index>(i)) = A.row(idx[i]);
    }
    bool rg = nodes_[a.id].requires_grad;
    return make(std::move(out), rg, [a, idx = std::move(idx)](Tape& t, const Matrix& g) {
        const Matrix& A = t.value(a);
        Matrix da = Matrix::Zero(A.rows(), A.cols());
        for (std::size_t i = 0; i < idx.size(); ++i) da.row(idx[i]) += g.row(static_cast<Eigen::Index>(i));
        t.accum(a.id, da);
    });
}

Var Tape::scatter_rows(Var a, std::vector<int> idx, int rows) {
    const Matrix& A = value(a);
    if (static_cast<Eigen::Index>(idx.size()) != A.rows())
        throw ShapeMismatch("scatter_rows index count must equal row count");
    Matrix out = Matrix::Zero(rows, A.cols());
    for (std::size_t i = 0; i < idx.size(); ++i) {
        if (idx[i] < 0 || idx[i] >= rows) throw IndexOutOfRange("scatter_rows index out of range");
        out.row(idx[i]) += A.row(static_cast<Eigen::Index>(i));
    }
    bool rg = nodes_[a.id].requires_grad;
    return make(std::move(out), rg, [a, idx = std::move(idx)](Tape& t, const Matrix& g) {
        Matrix da(static_cast<Eigen::Index>(idx.size()), g.cols());
        for (std::size_t i = 0; i < idx.size(); ++i) da.row(static_cast<Eigen::Index>(i)) = g.row(idx[i]);
        t.accum(a.id, da);
    });
}

Var Tape::row_scale(Var a, Var w) {
    const Matrix& A = value(a);
    const Matrix& W = value(w);
    if (W.cols() != 1 || W.rows() != A.rows()) throw ShapeMismatch("row_scale weight must be rows x 1");
    Matrix out = (A.array().colwise() * W.col(0).array()).matrix();
    bool rg = nodes_[a.id].requires_grad || nodes_[w.id].requires_grad;
    return make(std::move(out), rg, [a, w](Tape& t, const Matrix& g) {
        const Matrix& A = t.value(a);
        const Matrix& W = t.value(w);
        t.accum(a.id, (g.array().colwise() * W.col(0).array()).matrix());
        t.accum(w.id, (g.cwiseProduct(A)).rowwise().sum());
    });
}

Var Tape::concat_rows(const std::vector<Var>& parts) {
    if (parts.empty()) throw ShapeMismatch("concat_rows of nothing");
    Eigen::Index rows = 0, cols = value(parts[0]).cols();
    bool rg = false;
    for (Var p : parts) {
        if (value(p).cols() != cols) throw ShapeMismatch("concat_rows column mismatch");
        rows += value(p).rows();
        rg = rg || nodes_[p.id].requires_grad;
    }
    Matrix out(rows, cols);
    Eigen::Index at = 0;
    for (Var p : parts) {
        out.middleRows(at, value(p).rows()) = value(p);
        at += value(p).rows();
    }
    return make(std::move(out), rg, [parts](Tape& t, const Matrix& g) {
        Eigen::Index at = 0;
        for (Var p : parts) {
            Eigen::Index r = t.value(p).rows();
            t.accum(p.id, g.middleRows(at, r));
            at += r;
        }
    });
}

Var Tape::concat_cols(const std::vector<Var>& parts) {
    if (parts.empty()) throw ShapeMismatch("concat_cols of nothing");
    Eigen::Index cols = 0, rows = value(parts[0]).rows();
    bool rg = false;
    for (Var p : parts) {
        if (value(p).rows() != rows) throw ShapeMismatch("concat_cols row mismatch");
        cols += value(p).cols();
        rg = rg || nodes_[p.id].requires_grad;
    }
    Matrix out(rows, cols);
    Eigen::Index at = 0;
    for (Var p : parts) {
        out.middleCols(at, value(p).cols()) = value(p);
        at += value(p).cols();
    }
    return make(std::move(out), rg, [parts](Tape& t, const Matrix& g) {
        Eigen::Index at = 0;
        for (Var p : parts) {
            Eigen::Index c = t.value(p).cols();
            t.accum(p.id, g.middleCols(at, c));
            at += c;
        }
    });
}

Var Tape::slice_rows(Var a, int begin, int count) {
    const Matrix& A = value(a);
    if (begin < 0 || begin + count > A.rows()) throw IndexOutOfRange("slice_rows out of range");
    Matrix out = A.middleRows(begin, count);
    bool rg = nodes_[a.id].requires_grad;
    return make(std::move(out), rg, [a, begin, count](Tape& t, const Matrix& g) {
        const Matrix& A = t.value(a);
        Matrix da = Matrix::Zero(A.rows(), A.cols());
        da.middleRows(begin, count) = g;
        t.accum(a.id, da);
    });
}

Var Tape::log(Var a) {
    Matrix out = value(a).array().log().matrix();
    bool rg = nodes_[a.id].requires_grad;
    return make(std::move(out), rg, [a](Tape& t, const Matrix& g) {
        t.accum(a.id, g.cwiseQuotient(t.value(a)));
    });
}

Var Tape::clamp(Var a, double lo, double hi) {
    Matrix out = value(a).cwiseMax(lo).cwiseMin(hi);
    bool rg = nodes_[a.id].requires_grad;
    return make(std::move(out), rg, [a, lo, hi](Tape& t, const Matrix& g) {
        Matrix mask = t.value(a).unaryExpr([lo, hi](double x) { return (x >= lo && x <= hi) ? 1.0 : 0.0; });
        t.accum(a.id, g.cwiseProduct(mask));
    });
}

Var Tape::bce(Var prob, double y, double eps) {
    Var p = clamp(prob, eps, 1.0 - eps);
    Var loss = scale(log(p), -y);
    Var q = add_const(scale(p, -1.0), 1.0);  // 1 - p
    return sub(loss, scale(log(q), 1.0 - y));
}

}  // namespace inside::ad
