#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace geostat {

// Rank-k factor pair of a tile, tile ~= u v^T with u (m x k), v (n x k).
struct LowRankFactor {
    Eigen::MatrixXd u, v;
    int rank() const { return static_cast<int>(u.cols()); }
    Eigen::MatrixXd dense() const { return u * v.transpose(); }
};

namespace detail {

// Thin SVD dispatch: one-sided Jacobi for small cores, divide-and-conquer
// for anything bigger (the recompression cores inside the TLR Cholesky can
// reach a few hundred rows, where Jacobi is an order of magnitude slower).
struct ThinSvd {
    Eigen::MatrixXd u, v;
    Eigen::VectorXd s;

    explicit ThinSvd(const Eigen::MatrixXd& a) {
        if (std::min(a.rows(), a.cols()) <= 16) {
            Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
            u = svd.matrixU();
            v = svd.matrixV();
            s = svd.singularValues();
        } else {
            Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
            u = svd.matrixU();
            v = svd.matrixV();
            s = svd.singularValues();
        }
    }
};

// Truncation rule shared by compression and recompression: keep the
// smallest k with s_k <= eps * s_0 and a Frobenius tail (plus anything
// already discarded upstream) below eps * fnorm.
inline int truncation_rank(const Eigen::VectorXd& s, double eps, double fnorm,
                           double discarded2) {
    const int r = static_cast<int>(s.size());
    if (r == 0 || !(s[0] > 0.0)) return 0;
    std::vector<double> tail2(static_cast<std::size_t>(r) + 1, discarded2);
    for (int i = r - 1; i >= 0; --i) tail2[static_cast<std::size_t>(i)] = tail2[static_cast<std::size_t>(i) + 1] + s[i] * s[i];
    const double budget = eps * eps * fnorm * fnorm;
    for (int k = 0; k < r; ++k)
        if (s[k] <= eps * s[0] && tail2[static_cast<std::size_t>(k)] <= budget) return k;
    return r;
}

// Householder vectors of an early-stopped column-pivoted QR. After
// factorize(), rank() columns were processed, r() is the upper-trapezoid
// R with the pivoting undone, and the largest residual column norm is
// bounded by stop_tol * |R_00|.
class PivotedQr {
  public:
    PivotedQr(Eigen::MatrixXd a, double stop_tol) : a_(std::move(a)) {
        const Eigen::Index m = a_.rows(), n = a_.cols();
        const Eigen::Index kmax = std::min(m, n);
        beta_.resize(kmax);
        perm_.resize(static_cast<std::size_t>(n));
        for (Eigen::Index j = 0; j < n; ++j) perm_[static_cast<std::size_t>(j)] = j;
        rank_ = 0;
        double first_pivot = 0.0;
        for (Eigen::Index k = 0; k < kmax; ++k) {
            // exact residual norms; r stays small so the recomputation is cheap
            Eigen::Index best = k;
            double best_norm = a_.col(k).tail(m - k).norm();
            for (Eigen::Index j = k + 1; j < n; ++j) {
                const double nj = a_.col(j).tail(m - k).norm();
                if (nj > best_norm) {
                    best_norm = nj;
                    best = j;
                }
            }
            if (k == 0) first_pivot = best_norm;
            if (best_norm <= stop_tol * first_pivot || best_norm == 0.0) break;
            if (best != k) {
                a_.col(k).swap(a_.col(best));
                std::swap(perm_[static_cast<std::size_t>(k)], perm_[static_cast<std::size_t>(best)]);
            }
            // Householder of column k
            auto col = a_.col(k).tail(m - k);
            const double alpha = (col(0) >= 0.0) ? -best_norm : best_norm;
            const double v0 = col(0) - alpha;
            col(0) = 1.0;
            col.tail(m - k - 1) /= v0;
            beta_(k) = -v0 / alpha;
            if (k + 1 < n) {
                auto rest = a_.block(k, k + 1, m - k, n - k - 1);
                work_.noalias() = col.transpose() * rest;
                rest.noalias() -= beta_(k) * col * work_;
            }
            diag_.push_back(alpha);
            rank_ = static_cast<int>(k + 1);
        }
        residual_norm_bound_ = 0.0;
        if (rank_ < std::min(m, n)) {
            for (Eigen::Index j = rank_; j < n; ++j)
                residual_norm_bound_ += a_.col(j).tail(m - rank_).squaredNorm();
        }
    }

    int rank() const { return rank_; }
    double discarded_squared() const { return residual_norm_bound_; }

    // R(0:rank, :) with original column order.
    Eigen::MatrixXd r_unpermuted() const {
        const Eigen::Index n = a_.cols();
        Eigen::MatrixXd r = Eigen::MatrixXd::Zero(rank_, n);
        for (Eigen::Index j = 0; j < n; ++j) {
            const Eigen::Index lim = std::min<Eigen::Index>(rank_, j + 1);
            for (Eigen::Index i = 0; i < lim; ++i)
                r(i, perm_[static_cast<std::size_t>(j)]) = (i == j) ? diag_[static_cast<std::size_t>(i)] : a_(i, j);
        }
        return r;
    }

    // Q * [x; 0] for x with rank() rows.
    Eigen::MatrixXd apply_q(const Eigen::MatrixXd& x) const {
        const Eigen::Index m = a_.rows();
        Eigen::MatrixXd y = Eigen::MatrixXd::Zero(m, x.cols());
        y.topRows(rank_) = x;
        for (Eigen::Index k = rank_ - 1; k >= 0; --k) {
            auto v = a_.col(k).tail(m - k);
            auto rows = y.bottomRows(m - k);
            work_.noalias() = v.transpose() * rows;
            rows.noalias() -= beta_(k) * v * work_;
        }
        return y;
    }

  private:
    Eigen::MatrixXd a_;
    Eigen::VectorXd beta_;
    std::vector<Eigen::Index> perm_;
    std::vector<double> diag_;
    mutable Eigen::Matrix<double, 1, Eigen::Dynamic> work_;
    int rank_ = 0;
    double residual_norm_bound_ = 0.0;
};

}  // namespace detail

// Truncated SVD of a tile at relative accuracy eps: the returned factor
// satisfies ||t - u v^T||_F <= eps ||t||_F, with the rank picked from the
// singular values (smallest k with s_{k+1} <= eps s_1). A rank-revealing
// QR with early stop keeps the cost at O(m n k) instead of a full SVD.
inline LowRankFactor truncated_svd(const Eigen::MatrixXd& t, double eps) {
    LowRankFactor f;
    const double fnorm = t.norm();
    if (fnorm == 0.0) {
        f.u.resize(t.rows(), 0);
        f.v.resize(t.cols(), 0);
        return f;
    }
    detail::PivotedQr qr(t, eps * 1e-2);
    Eigen::MatrixXd b = qr.r_unpermuted();  // rank x n
    const detail::ThinSvd svd(b.transpose());
    const int k = detail::truncation_rank(svd.s, eps, fnorm, qr.discarded_squared());
    // b = X S W^T with X = svd.v, W = svd.u
    f.u = qr.apply_q(svd.v.leftCols(k) * svd.s.head(k).asDiagonal());
    f.v = svd.u.leftCols(k);
    return f;
}

// Rounds a (possibly rank-inflated) factor pair back to accuracy eps
// relative to its own Frobenius norm, via QR of both factors and an SVD of
// the small core.
inline LowRankFactor recompress(const Eigen::MatrixXd& u, const Eigen::MatrixXd& v, double eps) {
    LowRankFactor f;
    const Eigen::Index r = u.cols();
    if (r == 0) {
        f.u.resize(u.rows(), 0);
        f.v.resize(v.rows(), 0);
        return f;
    }
    Eigen::HouseholderQR<Eigen::MatrixXd> qu(u), qv(v);
    const Eigen::Index ru = std::min<Eigen::Index>(u.rows(), r);
    const Eigen::Index rv = std::min<Eigen::Index>(v.rows(), r);
    Eigen::MatrixXd rumat = qu.matrixQR().topRows(ru).triangularView<Eigen::Upper>();
    Eigen::MatrixXd rvmat = qv.matrixQR().topRows(rv).triangularView<Eigen::Upper>();
    Eigen::MatrixXd core = rumat * rvmat.transpose();  // ru x rv
    const detail::ThinSvd svd(core);
    const int k = detail::truncation_rank(svd.s, eps, svd.s.norm(), 0.0);
    Eigen::MatrixXd su = svd.u.leftCols(k) * svd.s.head(k).asDiagonal();
    Eigen::MatrixXd sv = svd.v.leftCols(k);
    f.u = Eigen::MatrixXd::Zero(u.rows(), k);
    f.u.topRows(ru) = su;
    f.u = qu.householderQ() * f.u;
    f.v = Eigen::MatrixXd::Zero(v.rows(), k);
    f.v.topRows(rv) = sv;
    f.v = qv.householderQ() * f.v;
    return f;
}

}  // namespace geostat
