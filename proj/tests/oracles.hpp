#ifndef INSIDE_TESTS_ORACLES_HPP
#define INSIDE_TESTS_ORACLES_HPP

// Independent scalar-loop reimplementations used as oracles. These stay
// deliberately naive (index loops, no Eigen block expressions) and must not
// call into the library's forward paths.

#include <cmath>
#include <utility>
#include <vector>

#include "inside/alignment.hpp"
#include "inside/common.hpp"

namespace oracle {

using inside::Matrix;

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

inline std::vector<double> softmax(const std::vector<double>& x) {
    double mx = x[0];
    for (double v : x) mx = std::max(mx, v);
    double sum = 0;
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        out[i] = std::exp(x[i] - mx);
        sum += out[i];
    }
    for (double& v : out) v /= sum;
    return out;
}

// w_uv = sigmoid(sum_c W_e[c] * [h_u || h_v || |h_u - h_v|][c] + b_e)
inline double edge_weight(const Matrix& H, int u, int v, const Matrix& W_e, double b_e) {
    const int d = static_cast<int>(H.cols());
    double z = b_e;
    for (int c = 0; c < d; ++c) z += W_e(c, 0) * H(u, c);
    for (int c = 0; c < d; ++c) z += W_e(d + c, 0) * H(v, c);
    for (int c = 0; c < d; ++c) z += W_e(2 * d + c, 0) * std::abs(H(u, c) - H(v, c));
    return sigmoid(z);
}

// h'_v = h_v W1 + (sum_{u in N(v)} w_uv h_u) W2 over directed (u, v) edges.
inline Matrix local_step(const Matrix& H, const std::vector<std::pair<int, int>>& directed,
                         const Matrix& W_e, double b_e, const Matrix& W1, const Matrix& W2) {
    const int n = static_cast<int>(H.rows());
    const int d = static_cast<int>(H.cols());
    Matrix agg = Matrix::Zero(n, d);
    for (auto [u, v] : directed) {
        double w = edge_weight(H, u, v, W_e, b_e);
        for (int c = 0; c < d; ++c) agg(v, c) += w * H(u, c);
    }
    Matrix out = Matrix::Zero(n, d);
    for (int v = 0; v < n; ++v)
        for (int c = 0; c < d; ++c) {
            for (int t = 0; t < d; ++t) out(v, c) += H(v, t) * W1(t, c) + agg(v, t) * W2(t, c);
        }
    return out;
}

// scores = softmax over v of (h_v . W_r + b_r); root' = root + sum scores_v h_v;
// h'_v = tanh(root' W_psi + b_psi) + h_v.
inline std::pair<Matrix, Matrix> global_step(const Matrix& H, const Matrix& root, const Matrix& W_r,
                                             double b_r, const Matrix& W_psi, const Matrix& b_psi) {
    const int n = static_cast<int>(H.rows());
    const int d = static_cast<int>(H.cols());
    std::vector<double> logits(n);
    for (int v = 0; v < n; ++v) {
        double z = b_r;
        for (int c = 0; c < d; ++c) z += H(v, c) * W_r(c, 0);
        logits[v] = z;
    }
    std::vector<double> scores = softmax(logits);
    Matrix root_next = root;
    for (int v = 0; v < n; ++v)
        for (int c = 0; c < d; ++c) root_next(0, c) += scores[v] * H(v, c);
    Matrix injected(1, d);
    for (int c = 0; c < d; ++c) {
        double z = b_psi(0, c);
        for (int t = 0; t < d; ++t) z += root_next(0, t) * W_psi(t, c);
        injected(0, c) = std::tanh(z);
    }
    Matrix out = H;
    for (int v = 0; v < n; ++v)
        for (int c = 0; c < d; ++c) out(v, c) += injected(0, c);
    return {out, root_next};
}

// h_f[i*l+j] = base[i*l+j] + softmax((h_c[i] + base[i*l+j]) . H_sen^T) H_sen
inline Matrix update_fine_nodes(const Matrix& base, const Matrix& coarse, const Matrix& sen, int k,
                                int l) {
    const int m = static_cast<int>(sen.rows());
    const int d = static_cast<int>(sen.cols());
    Matrix out = base;
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < l; ++j) {
            int f = i * l + j;
            std::vector<double> logits(m, 0.0);
            for (int s = 0; s < m; ++s)
                for (int c = 0; c < d; ++c) logits[s] += (coarse(i, c) + base(f, c)) * sen(s, c);
            std::vector<double> a = softmax(logits);
            for (int s = 0; s < m; ++s)
                for (int c = 0; c < d; ++c) out(f, c) += a[s] * sen(s, c);
        }
    }
    return out;
}

inline Matrix mean_rows(const Matrix& m) {
    Matrix out = Matrix::Zero(1, m.cols());
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) out(0, j) += m(i, j);
    return out / static_cast<double>(m.rows());
}

inline double bce(int y, double prob, double eps = 1e-7) {
    double p = std::min(std::max(prob, eps), 1.0 - eps);
    return -y * std::log(p) - (1 - y) * std::log(1.0 - p);
}

// AUC by brute force over label-discordant pairs, ties counted half.
inline double auc_pairwise(const std::vector<int>& labels, const std::vector<double>& scores) {
    double wins = 0, pairs = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] != 1) continue;
        for (std::size_t j = 0; j < labels.size(); ++j) {
            if (labels[j] != 0) continue;
            pairs += 1;
            if (scores[i] > scores[j])
                wins += 1;
            else if (scores[i] == scores[j])
                wins += 0.5;
        }
    }
    return pairs == 0 ? 0.5 : wins / pairs;
}

// ---- alignment oracle --------------------------------------------------

struct EfnWeights {
    Matrix W1, b1, W2, b2;  // 12 x h, 1 x h, h x d, 1 x d
};
struct AlignWeights {
    Matrix W1, b1, W2, b2;  // d x d, 1 x d, d x d, 1 x d
};

inline Matrix efn_feature(int src_type, int dst_type, int direction, const EfnWeights& w) {
    const int h = static_cast<int>(w.W1.cols());
    const int d = static_cast<int>(w.W2.cols());
    std::vector<double> onehot(12, 0.0);
    onehot[static_cast<std::size_t>(src_type)] = 1.0;
    onehot[static_cast<std::size_t>(5 + dst_type)] = 1.0;
    onehot[static_cast<std::size_t>(10 + direction)] = 1.0;
    std::vector<double> hidden(static_cast<std::size_t>(h), 0.0);
    for (int c = 0; c < h; ++c) {
        double z = w.b1(0, c);
        for (int t = 0; t < 12; ++t) z += onehot[static_cast<std::size_t>(t)] * w.W1(t, c);
        hidden[static_cast<std::size_t>(c)] = std::max(z, 0.0);
    }
    Matrix out(1, d);
    for (int c = 0; c < d; ++c) {
        double z = w.b2(0, c);
        for (int t = 0; t < h; ++t) z += hidden[static_cast<std::size_t>(t)] * w.W2(t, c);
        out(0, c) = z;
    }
    return out;
}

inline Matrix align_ffn(const Matrix& x, const AlignWeights& w) {
    const int d = static_cast<int>(x.cols());
    Matrix out(x.rows(), d);
    for (int i = 0; i < x.rows(); ++i) {
        std::vector<double> hidden(static_cast<std::size_t>(d), 0.0);
        for (int c = 0; c < d; ++c) {
            double z = w.b1(0, c);
            for (int t = 0; t < d; ++t) z += x(i, t) * w.W1(t, c);
            hidden[static_cast<std::size_t>(c)] = std::tanh(z);
        }
        for (int c = 0; c < d; ++c) {
            double z = w.b2(0, c);
            for (int t = 0; t < d; ++t) z += hidden[static_cast<std::size_t>(t)] * w.W2(t, c);
            out(i, c) = z;
        }
    }
    return out;
}

// Full scalar reimplementation of one alignment layer over H_all whose
// rows follow the CommonGraph order (non-pseudo then pseudo).
inline Matrix align_step(const std::vector<int>& types /* per non-pseudo node */, int r,
                         const Matrix& H_all, const EfnWeights& efn, const AlignWeights& ffn) {
    const int np = static_cast<int>(types.size());
    const int d = static_cast<int>(H_all.cols());
    const int pseudo_type = 4;

    // Phase 1: graph -> pseudo.
    Matrix H_pseudo_next(r, d);
    Matrix alpha(r, np);
    for (int p = 0; p < r; ++p) {
        std::vector<double> logits(static_cast<std::size_t>(np), 0.0);
        for (int v = 0; v < np; ++v) {
            Matrix e = efn_feature(types[static_cast<std::size_t>(v)], pseudo_type, 0, efn);
            double z = 0;
            for (int c = 0; c < d; ++c)
                z += (H_all(np + p, c) + e(0, c)) * (H_all(v, c) + e(0, c));
            logits[static_cast<std::size_t>(v)] = z;
        }
        std::vector<double> a = softmax(logits);
        Matrix pooled = Matrix::Zero(1, d);
        for (int v = 0; v < np; ++v) {
            alpha(p, v) = a[static_cast<std::size_t>(v)];
            for (int c = 0; c < d; ++c) pooled(0, c) += a[static_cast<std::size_t>(v)] * H_all(v, c);
        }
        Matrix x(1, d);
        for (int c = 0; c < d; ++c) x(0, c) = H_all(np + p, c) + pooled(0, c);
        H_pseudo_next.row(p) = align_ffn(x, ffn).row(0);
    }

    // Phase 2: pseudo -> graph, against the refreshed pseudo embeddings.
    Matrix out(np + r, d);
    for (int v = 0; v < np; ++v) {
        Matrix e = efn_feature(pseudo_type, types[static_cast<std::size_t>(v)], 1, efn);
        std::vector<double> logits(static_cast<std::size_t>(r), 0.0);
        for (int p = 0; p < r; ++p) {
            double z = 0;
            for (int c = 0; c < d; ++c)
                z += (H_all(v, c) + e(0, c)) * (H_pseudo_next(p, c) + e(0, c));
            logits[static_cast<std::size_t>(p)] = z;
        }
        std::vector<double> b = softmax(logits);
        Matrix x(1, d);
        for (int c = 0; c < d; ++c) {
            double pooled = 0;
            for (int p = 0; p < r; ++p) pooled += b[static_cast<std::size_t>(p)] * H_pseudo_next(p, c);
            x(0, c) = H_all(v, c) + pooled;
        }
        out.row(v) = align_ffn(x, ffn).row(0);
    }
    for (int p = 0; p < r; ++p) out.row(np + p) = H_pseudo_next.row(p);
    return out;
}

}  // namespace oracle

#endif
