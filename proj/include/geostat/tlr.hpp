#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "geostat/cholesky.hpp"
#include "geostat/errors.hpp"
#include "geostat/kernels.hpp"
#include "geostat/task_graph.hpp"
#include "geostat/tiled_matrix.hpp"
#include "geostat/truncated_svd.hpp"

namespace geostat {

// Tile low-rank symmetric matrix: dense diagonal tiles, U V^T factor pairs
// for the off-diagonal tiles of the lower triangle, compressed at relative
// accuracy eps per tile.
struct TLRMatrix {
    std::int64_t order = 0;
    int nb = 0;
    int nt = 0;
    double eps = 0.0;
    std::vector<Eigen::MatrixXd> diag;   // nt dense tiles
    std::vector<LowRankFactor> off;      // packed lower triangle, (i, j) with i > j

    static std::size_t packed(int i, int j) {
        return static_cast<std::size_t>(i) * (i - 1) / 2 + static_cast<std::size_t>(j);
    }
    LowRankFactor& tile(int i, int j) { return off[packed(i, j)]; }
    const LowRankFactor& tile(int i, int j) const { return off[packed(i, j)]; }
    int rank(int i, int j) const { return off[packed(i, j)].rank(); }

    int tile_rows(int i) const {
        return static_cast<int>(std::min<std::int64_t>(nb, order - static_cast<std::int64_t>(i) * nb));
    }
    std::int64_t offset(int i) const { return static_cast<std::int64_t>(i) * nb; }

    Eigen::MatrixXd to_dense() const {
        Eigen::MatrixXd a = Eigen::MatrixXd::Zero(order, order);
        for (int i = 0; i < nt; ++i) {
            a.block(offset(i), offset(i), tile_rows(i), tile_rows(i)) = diag[static_cast<std::size_t>(i)];
            for (int j = 0; j < i; ++j)
                a.block(offset(i), offset(j), tile_rows(i), tile_rows(j)) = tile(i, j).dense();
        }
        a.triangularView<Eigen::StrictlyUpper>() =
            a.triangularView<Eigen::StrictlyLower>().transpose();
        return a;
    }
};

// Per-tile rank map of a TLR matrix with summary statistics.
struct RankMap {
    int nt = 0;
    std::vector<int> ranks;  // packed lower triangle
    int max_rank = 0;
    double mean_rank = 0.0;

    int rank(int i, int j) const { return ranks[TLRMatrix::packed(i, j)]; }

    // mean rank of tiles at tile-diagonal distance |i - j| = dist
    double mean_at_distance(int dist) const {
        double sum = 0.0;
        int count = 0;
        for (int i = 0; i < nt; ++i)
            for (int j = 0; j < i; ++j)
                if (i - j == dist) {
                    sum += rank(i, j);
                    ++count;
                }
        return count ? sum / count : 0.0;
    }

    double mean_at_distance_at_least(int dist) const {
        double sum = 0.0;
        int count = 0;
        for (int i = 0; i < nt; ++i)
            for (int j = 0; j < i; ++j)
                if (i - j >= dist) {
                    sum += rank(i, j);
                    ++count;
                }
        return count ? sum / count : 0.0;
    }

    std::string to_csv() const {
        std::string out = "i,j,rank\n";
        for (int i = 0; i < nt; ++i)
            for (int j = 0; j < i; ++j)
                out += std::to_string(i) + "," + std::to_string(j) + "," +
                       std::to_string(rank(i, j)) + "\n";
        return out;
    }
};

inline RankMap rank_map(const TLRMatrix& a) {
    RankMap m;
    m.nt = a.nt;
    m.ranks.reserve(a.off.size());
    std::int64_t total = 0;
    for (const auto& f : a.off) {
        m.ranks.push_back(f.rank());
        m.max_rank = std::max(m.max_rank, f.rank());
        total += f.rank();
    }
    m.mean_rank = a.off.empty() ? 0.0 : static_cast<double>(total) / static_cast<double>(a.off.size());
    return m;
}

// Memory accounting: dense needs N^2 scalars; TLR stores the dense diagonal
// tiles plus 2 nb k per off-diagonal tile.
struct FootprintReport {
    std::int64_t dense_bytes = 0;
    std::int64_t tlr_bytes = 0;
    double savings_ratio = 0.0;
};

inline FootprintReport footprint(const TLRMatrix& a, int scalar_width = sizeof(double)) {
    FootprintReport r;
    r.dense_bytes = a.order * a.order * scalar_width;
    std::int64_t tlr = 0;
    for (int i = 0; i < a.nt; ++i)
        tlr += static_cast<std::int64_t>(a.tile_rows(i)) * a.tile_rows(i) * scalar_width;
    for (int i = 0; i < a.nt; ++i)
        for (int j = 0; j < i; ++j)
            tlr += static_cast<std::int64_t>(a.tile_rows(i) + a.tile_rows(j)) * a.rank(i, j) *
                   scalar_width;
    r.tlr_bytes = tlr;
    r.savings_ratio = static_cast<double>(r.dense_bytes) / static_cast<double>(r.tlr_bytes);
    return r;
}

// Compresses a symmetric tiled matrix into TLR form: every off-diagonal
// tile of the lower triangle goes through the truncated SVD at relative
// accuracy eps, diagonal tiles are copied dense. eps presets 1e-5 / 1e-7 /
// 1e-9 correspond to the TLR5 / TLR7 / TLR9 configurations.
inline TLRMatrix compress(const TiledMatrix& a, double eps,
                          const Executor& exec = Executor::sequential()) {
    if (a.symmetry != TiledMatrix::Symmetry::SymmetricLower)
        throw validation_error("compress: input must be symmetric_lower");
    if (!(eps > 0.0 && eps < 1.0)) throw validation_error("compress: eps must be in (0, 1)");
    TLRMatrix t;
    t.order = a.order;
    t.nb = a.nb;
    t.nt = a.nt;
    t.eps = eps;
    t.diag.resize(static_cast<std::size_t>(a.nt));
    t.off.resize(static_cast<std::size_t>(a.nt) * (a.nt - 1) / 2);
    for (int i = 0; i < a.nt; ++i) t.diag[static_cast<std::size_t>(i)] = a.tile(i, i);
    std::vector<std::pair<int, int>> work;
    work.reserve(t.off.size());
    for (int i = 0; i < a.nt; ++i)
        for (int j = 0; j < i; ++j) work.emplace_back(i, j);
    exec.for_each(static_cast<std::int64_t>(work.size()), [&](std::int64_t w) {
        const auto [i, j] = work[static_cast<std::size_t>(w)];
        t.tile(i, j) = truncated_svd(a.tile(i, j), eps);
    });
    return t;
}

struct TLRCholeskyFactor {
    TLRMatrix L;        // diagonal tiles hold dense Cholesky factors
    double logdet = 0;
};

// Tiled right-looking Cholesky in TLR arithmetic. TRSM touches only the V
// factor of a tile; SYRK forms U (V^T V) U^T against the dense diagonal;
// GEMM concatenates the rank-k update onto the factor pair and rounds it
// back to accuracy eps via QR + small SVD.
inline TLRCholeskyFactor tlr_cholesky(const TLRMatrix& a,
                                      const Executor& exec = Executor::sequential()) {
    TLRCholeskyFactor f;
    f.L = a;
    TLRMatrix& L = f.L;
    const int nt = L.nt;
    const double eps = L.eps;

    TaskGraph graph;
    for (int k = 0; k < nt; ++k) {
        Eigen::MatrixXd* dk = &L.diag[static_cast<std::size_t>(k)];
        graph.submit({}, {dk}, [dk, off = L.offset(k)] { potrf_lower(*dk, off); });
        for (int i = k + 1; i < nt; ++i) {
            LowRankFactor* aik = &L.tile(i, k);
            graph.submit({dk}, {aik}, [dk, aik] {
                // (U V^T) L^-T = U (L^-1 V)^T
                dk->triangularView<Eigen::Lower>().solveInPlace(aik->v);
            });
        }
        for (int i = k + 1; i < nt; ++i) {
            LowRankFactor* aik = &L.tile(i, k);
            Eigen::MatrixXd* dii = &L.diag[static_cast<std::size_t>(i)];
            graph.submit({aik}, {dii}, [dii, aik] {
                if (aik->rank() == 0) return;
                Eigen::MatrixXd m = aik->v.transpose() * aik->v;
                Eigen::MatrixXd um = aik->u * m;
                dii->noalias() -= um * aik->u.transpose();
            });
            for (int j = k + 1; j < i; ++j) {
                LowRankFactor* ajk = &L.tile(j, k);
                LowRankFactor* aij = &L.tile(i, j);
                graph.submit({aik, ajk}, {aij}, [aij, aik, ajk, eps] {
                    const int ku = aik->rank(), kv = ajk->rank();
                    if (ku == 0 || kv == 0) return;
                    // A_ij -= U_ik (V_ik^T V_jk) U_jk^T, appended as a rank-kv
                    // pair and rounded back to eps
                    Eigen::MatrixXd w = aik->v.transpose() * ajk->v;  // ku x kv
                    Eigen::MatrixXd unew(aij->u.rows(), aij->rank() + kv);
                    unew.leftCols(aij->rank()) = aij->u;
                    unew.rightCols(kv).noalias() = -(aik->u * w);
                    Eigen::MatrixXd vnew(aij->v.rows(), aij->rank() + kv);
                    vnew.leftCols(aij->rank()) = aij->v;
                    vnew.rightCols(kv) = ajk->u;
                    *aij = recompress(unew, vnew, eps);
                });
            }
        }
    }
    exec.run(graph);

    double logdet = 0.0;
    for (int k = 0; k < nt; ++k) {
        const auto& d = L.diag[static_cast<std::size_t>(k)];
        for (Eigen::Index j = 0; j < d.rows(); ++j) logdet += std::log(d(j, j));
    }
    f.logdet = 2.0 * logdet;
    return f;
}

// Solves L X = B (Forward) or L^T X = B (Backward); off-diagonal tiles are
// applied through their factor pairs at 2 nb k cost per column.
inline Eigen::MatrixXd tlr_solve_triangular(const TLRCholeskyFactor& f, Eigen::MatrixXd b,
                                            SolveSide side) {
    const TLRMatrix& L = f.L;
    if (b.rows() != L.order) throw validation_error("tlr_solve: dimension mismatch");
    const int nt = L.nt;
    if (side == SolveSide::Forward) {
        for (int i = 0; i < nt; ++i) {
            auto bi = b.middleRows(L.offset(i), L.tile_rows(i));
            for (int j = 0; j < i; ++j) {
                const auto& t = L.tile(i, j);
                if (t.rank() == 0) continue;
                bi.noalias() -= t.u * (t.v.transpose() * b.middleRows(L.offset(j), L.tile_rows(j)));
            }
            L.diag[static_cast<std::size_t>(i)].triangularView<Eigen::Lower>().solveInPlace(bi);
        }
    } else {
        for (int i = nt - 1; i >= 0; --i) {
            auto bi = b.middleRows(L.offset(i), L.tile_rows(i));
            for (int j = i + 1; j < nt; ++j) {
                const auto& t = L.tile(j, i);
                if (t.rank() == 0) continue;
                bi.noalias() -= t.v * (t.u.transpose() * b.middleRows(L.offset(j), L.tile_rows(j)));
            }
            L.diag[static_cast<std::size_t>(i)].triangularView<Eigen::Lower>().transpose().solveInPlace(bi);
        }
    }
    return b;
}

inline Eigen::VectorXd tlr_solve(const TLRCholeskyFactor& f, const Eigen::VectorXd& b,
                                 SolveSide side) {
    return tlr_solve_triangular(f, b, side);
}

inline double tlr_quadratic_form(const TLRCholeskyFactor& f, const Eigen::VectorXd& z) {
    return tlr_solve_triangular(f, z, SolveSide::Forward).squaredNorm();
}

// Diagonal Super Tile approximation: zeroes every tile with tile-diagonal
// distance beyond keep_fraction of the band. The result can be indefinite;
// callers must tolerate not_positive_definite downstream.
inline TiledMatrix dst_truncate(const TiledMatrix& a, double keep_fraction) {
    if (a.symmetry != TiledMatrix::Symmetry::SymmetricLower)
        throw validation_error("dst_truncate: input must be symmetric_lower");
    if (!(keep_fraction > 0.0 && keep_fraction <= 1.0))
        throw validation_error("dst_truncate: keep_fraction must be in (0, 1]");
    TiledMatrix out = a;
    const double band = keep_fraction * (a.nt - 1);
    for (int i = 0; i < a.nt; ++i)
        for (int j = 0; j < i; ++j)
            if (static_cast<double>(i - j) > band) out.tile(i, j).setZero();
    return out;
}

// Analytic flop model of the TLR Cholesky on the current rank profile:
// dense POTRF on the diagonal (nb^3 / 3 each), plus 36 nb k^2 per scheduled
// factor-pair task (TRSM / SYRK / GEMM), the paper's TLR-MM unit cost.
inline double flop_estimate(const TLRMatrix& a) {
    double flops = 0.0;
    for (int i = 0; i < a.nt; ++i) {
        const double nb = a.tile_rows(i);
        flops += nb * nb * nb / 3.0;
    }
    auto mm = [&](int nb, int k) { return 36.0 * nb * static_cast<double>(k) * k; };
    for (int k = 0; k < a.nt; ++k)
        for (int i = k + 1; i < a.nt; ++i) {
            const int kik = a.rank(i, k);
            if (kik == 0) continue;
            flops += mm(a.nb, kik);  // TRSM on the factor pair
            for (int j = k + 1; j < i; ++j) {
                const int kjk = a.rank(j, k);
                if (kjk == 0) continue;
                flops += mm(a.nb, std::max(kik, kjk));  // TLR-MM update of (i, j)
            }
        }
    return flops;
}

}  // namespace geostat
