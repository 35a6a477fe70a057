#pragma once

#include <cmath>
#include <cstdint>

#include <Eigen/Dense>

#include "geostat/errors.hpp"

namespace geostat {

// In-tile kernels for the tiled algorithms. GEMM/SYRK/TRSM are delegated to
// Eigen; POTRF is written out so a nonpositive pivot can be reported with
// its global row index.

// Cholesky of the lower triangle of `a` in place; strict upper is zeroed.
// `global_offset` is the row index of a(0,0) in the full matrix, used in the
// not_positive_definite report.
inline void potrf_lower(Eigen::Ref<Eigen::MatrixXd> a, std::int64_t global_offset) {
    const Eigen::Index n = a.rows();
    constexpr Eigen::Index panel = 48;
    if (n <= panel) {
        for (Eigen::Index j = 0; j < n; ++j) {
            double d = a(j, j);
            for (Eigen::Index k = 0; k < j; ++k) d -= a(j, k) * a(j, k);
            if (!(d > 0.0) || !std::isfinite(d)) throw not_positive_definite(global_offset + j);
            const double ljj = std::sqrt(d);
            a(j, j) = ljj;
            if (j + 1 < n) {
                auto col = a.col(j).segment(j + 1, n - j - 1);
                if (j > 0)
                    col.noalias() -=
                        a.block(j + 1, 0, n - j - 1, j) * a.row(j).segment(0, j).transpose();
                col /= ljj;
            }
        }
    } else {
        const Eigen::Index n1 = (n / 2 + 7) / 8 * 8;
        auto a11 = a.topLeftCorner(n1, n1);
        auto a21 = a.bottomLeftCorner(n - n1, n1);
        auto a22 = a.bottomRightCorner(n - n1, n - n1);
        potrf_lower(a11, global_offset);
        a11.triangularView<Eigen::Lower>().transpose().solveInPlace<Eigen::OnTheRight>(a21);
        a22.selfadjointView<Eigen::Lower>().rankUpdate(a21, -1.0);
        potrf_lower(a22, global_offset + n1);
    }
    a.triangularView<Eigen::StrictlyUpper>().setZero();
}

// x <- x L^-T with L lower triangular (the tile update in the Cholesky
// TRSM phase).
inline void trsm_right_lower_trans(const Eigen::MatrixXd& l, Eigen::Ref<Eigen::MatrixXd> x) {
    l.triangularView<Eigen::Lower>().transpose().solveInPlace<Eigen::OnTheRight>(x);
}

// c (lower triangle) <- c - a a^T
inline void syrk_lower_sub(Eigen::Ref<Eigen::MatrixXd> c, const Eigen::MatrixXd& a) {
    c.selfadjointView<Eigen::Lower>().rankUpdate(a, -1.0);
}

// c <- c - a b^T
inline void gemm_nt_sub(Eigen::Ref<Eigen::MatrixXd> c, const Eigen::MatrixXd& a,
                        const Eigen::MatrixXd& b) {
    c.noalias() -= a * b.transpose();
}

}  // namespace geostat
