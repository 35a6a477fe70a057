#pragma once

#include <cmath>
#include <cstdint>

#include <Eigen/Dense>

#include "geostat/errors.hpp"
#include "geostat/kernels.hpp"
#include "geostat/task_graph.hpp"
#include "geostat/tiled_matrix.hpp"

namespace geostat {

struct CholeskyFactor {
    TiledMatrix L;      // lower triangular, tiled
    double logdet = 0;  // 2 * sum log L_kk
};

enum class SolveSide { Forward, Backward };

// Right-looking tiled Cholesky (POTRF / TRSM / SYRK / GEMM task types) run
// through the dependency-tracked task graph. Throws not_positive_definite
// with the failing global pivot index; callers in the MLE path treat that as
// an infeasible parameter point.
inline CholeskyFactor cholesky(const TiledMatrix& a, const Executor& exec = Executor::sequential()) {
    if (a.symmetry != TiledMatrix::Symmetry::SymmetricLower)
        throw validation_error("cholesky: input must be symmetric_lower");
    CholeskyFactor f;
    f.L = a;
    // the factor is lower triangular, not symmetric; upper tiles stay empty
    f.L.symmetry = TiledMatrix::Symmetry::General;
    TiledMatrix& L = f.L;
    const int nt = L.nt;

    TaskGraph graph;
    for (int k = 0; k < nt; ++k) {
        Eigen::MatrixXd* dk = &L.tile(k, k);
        graph.submit({}, {dk}, [dk, off = L.offset(k)] { potrf_lower(*dk, off); });
        for (int i = k + 1; i < nt; ++i) {
            Eigen::MatrixXd* aik = &L.tile(i, k);
            graph.submit({dk}, {aik}, [dk, aik] { trsm_right_lower_trans(*dk, *aik); });
        }
        for (int i = k + 1; i < nt; ++i) {
            Eigen::MatrixXd* aik = &L.tile(i, k);
            Eigen::MatrixXd* dii = &L.tile(i, i);
            graph.submit({aik}, {dii}, [dii, aik] { syrk_lower_sub(*dii, *aik); });
            for (int j = k + 1; j < i; ++j) {
                Eigen::MatrixXd* ajk = &L.tile(j, k);
                Eigen::MatrixXd* aij = &L.tile(i, j);
                graph.submit({aik, ajk}, {aij}, [aij, aik, ajk] { gemm_nt_sub(*aij, *aik, *ajk); });
            }
        }
    }
    exec.run(graph);

    double logdet = 0.0;
    for (int k = 0; k < nt; ++k) {
        const auto& d = L.tile(k, k);
        for (Eigen::Index j = 0; j < d.rows(); ++j) logdet += std::log(d(j, j));
    }
    f.logdet = 2.0 * logdet;
    return f;
}

// Solves L X = B (Forward) or L^T X = B (Backward) against the tiled factor.
inline Eigen::MatrixXd solve_triangular(const CholeskyFactor& f, Eigen::MatrixXd b,
                                        SolveSide side) {
    const TiledMatrix& L = f.L;
    if (b.rows() != L.order) throw validation_error("solve_triangular: dimension mismatch");
    const int nt = L.nt;
    if (side == SolveSide::Forward) {
        for (int i = 0; i < nt; ++i) {
            auto bi = b.middleRows(L.offset(i), L.tile_rows(i));
            for (int j = 0; j < i; ++j)
                bi.noalias() -= L.tile(i, j) * b.middleRows(L.offset(j), L.tile_rows(j));
            L.tile(i, i).triangularView<Eigen::Lower>().solveInPlace(bi);
        }
    } else {
        for (int i = nt - 1; i >= 0; --i) {
            auto bi = b.middleRows(L.offset(i), L.tile_rows(i));
            for (int j = i + 1; j < nt; ++j)
                bi.noalias() -= L.tile(j, i).transpose() * b.middleRows(L.offset(j), L.tile_rows(j));
            L.tile(i, i).triangularView<Eigen::Lower>().transpose().solveInPlace(bi);
        }
    }
    return b;
}

// A^{-1} B via the stored factor (two triangular solves, no inverse formed).
inline Eigen::MatrixXd solve(const CholeskyFactor& f, Eigen::MatrixXd b) {
    return solve_triangular(f, solve_triangular(f, std::move(b), SolveSide::Forward),
                            SolveSide::Backward);
}

// y = L x (tiled triangular multiply; used by the field simulator).
inline Eigen::MatrixXd multiply_l(const CholeskyFactor& f, const Eigen::MatrixXd& x) {
    const TiledMatrix& L = f.L;
    if (x.rows() != L.order) throw validation_error("multiply_l: dimension mismatch");
    Eigen::MatrixXd y = Eigen::MatrixXd::Zero(x.rows(), x.cols());
    const int nt = L.nt;
    for (int i = 0; i < nt; ++i) {
        auto yi = y.middleRows(L.offset(i), L.tile_rows(i));
        yi.noalias() = L.tile(i, i).triangularView<Eigen::Lower>() *
                       x.middleRows(L.offset(i), L.tile_rows(i));
        for (int j = 0; j < i; ++j)
            yi.noalias() += L.tile(i, j) * x.middleRows(L.offset(j), L.tile_rows(j));
    }
    return y;
}

// y = L^T x (tiled triangular multiply; used by the assessment formulas).
inline Eigen::MatrixXd multiply_lt(const CholeskyFactor& f, const Eigen::MatrixXd& x) {
    const TiledMatrix& L = f.L;
    if (x.rows() != L.order) throw validation_error("multiply_lt: dimension mismatch");
    Eigen::MatrixXd y = Eigen::MatrixXd::Zero(x.rows(), x.cols());
    const int nt = L.nt;
    for (int i = 0; i < nt; ++i) {
        auto yi = y.middleRows(L.offset(i), L.tile_rows(i));
        yi.noalias() = L.tile(i, i).transpose().triangularView<Eigen::Upper>() *
                       x.middleRows(L.offset(i), L.tile_rows(i));
        for (int j = i + 1; j < nt; ++j)
            yi.noalias() += L.tile(j, i).transpose() * x.middleRows(L.offset(j), L.tile_rows(j));
    }
    return y;
}

// z^T A^{-1} z = ||L^{-1} z||^2
inline double quadratic_form(const CholeskyFactor& f, const Eigen::VectorXd& z) {
    if (z.size() != f.L.order) throw validation_error("quadratic_form: dimension mismatch");
    return solve_triangular(f, z, SolveSide::Forward).squaredNorm();
}

}  // namespace geostat
