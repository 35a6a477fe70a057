#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "geostat/errors.hpp"

namespace geostat {

// Dense symmetric/general matrix stored as an nt x nt grid of nb x nb tiles
// (the trailing row/column of tiles may be ragged). For SymmetricLower only
// the lower triangle of tiles is stored and authoritative.
struct TiledMatrix {
    enum class Symmetry { SymmetricLower, General };

    std::int64_t order = 0;
    int nb = 0;
    int nt = 0;
    Symmetry symmetry = Symmetry::SymmetricLower;
    std::vector<Eigen::MatrixXd> tiles;

    TiledMatrix() = default;
    TiledMatrix(std::int64_t order_, int nb_, Symmetry sym) { reset(order_, nb_, sym); }

    void reset(std::int64_t order_, int nb_, Symmetry sym) {
        if (order_ < 1) throw validation_error("TiledMatrix: order must be >= 1");
        if (nb_ < 1) throw validation_error("TiledMatrix: tile size must be >= 1");
        order = order_;
        nb = nb_;
        nt = static_cast<int>((order + nb - 1) / nb);
        symmetry = sym;
        tiles.assign(static_cast<std::size_t>(nt) * nt, Eigen::MatrixXd());
        for (int i = 0; i < nt; ++i)
            for (int j = 0; j < nt; ++j)
                if (stored(i, j))
                    tiles[flat(i, j)] = Eigen::MatrixXd::Zero(tile_rows(i), tile_rows(j));
    }

    bool stored(int i, int j) const {
        return symmetry == Symmetry::General || j <= i;
    }
    int tile_rows(int i) const {
        return static_cast<int>(std::min<std::int64_t>(nb, order - static_cast<std::int64_t>(i) * nb));
    }
    std::int64_t offset(int i) const { return static_cast<std::int64_t>(i) * nb; }

    Eigen::MatrixXd& tile(int i, int j) { return tiles[flat(i, j)]; }
    const Eigen::MatrixXd& tile(int i, int j) const { return tiles[flat(i, j)]; }

    Eigen::MatrixXd to_dense() const {
        Eigen::MatrixXd a = Eigen::MatrixXd::Zero(order, order);
        for (int i = 0; i < nt; ++i)
            for (int j = 0; j < nt; ++j)
                if (stored(i, j) && tiles[flat(i, j)].size() > 0)
                    a.block(offset(i), offset(j), tile_rows(i), tile_rows(j)) = tiles[flat(i, j)];
        if (symmetry == Symmetry::SymmetricLower)
            a.triangularView<Eigen::StrictlyUpper>() =
                a.triangularView<Eigen::StrictlyLower>().transpose();
        return a;
    }

    static TiledMatrix from_dense(const Eigen::MatrixXd& a, int nb, Symmetry sym) {
        if (a.rows() != a.cols()) throw validation_error("TiledMatrix: matrix must be square");
        TiledMatrix out(a.rows(), nb, sym);
        for (int i = 0; i < out.nt; ++i)
            for (int j = 0; j < out.nt; ++j)
                if (out.stored(i, j))
                    out.tile(i, j) =
                        a.block(out.offset(i), out.offset(j), out.tile_rows(i), out.tile_rows(j));
        return out;
    }

    double max_abs() const {
        double m = 0.0;
        for (int i = 0; i < nt; ++i)
            for (int j = 0; j < nt; ++j)
                if (stored(i, j) && tiles[flat(i, j)].size() > 0)
                    m = std::max(m, tiles[flat(i, j)].cwiseAbs().maxCoeff());
        return m;
    }

  private:
    std::size_t flat(int i, int j) const {
        return static_cast<std::size_t>(i) * nt + static_cast<std::size_t>(j);
    }
};

// Default tile size for dense factorization.
inline constexpr int kDefaultDenseTile = 256;

// Tile size heuristic for TLR: ceil(sqrt(N)) rounded up to a multiple of 32.
inline int default_tlr_tile(std::int64_t order) {
    int s = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(order))));
    int r = ((s + 31) / 32) * 32;
    return std::max(32, r);
}

}  // namespace geostat
