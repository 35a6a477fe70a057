#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "geostat/covariance.hpp"
#include "geostat/task_graph.hpp"
#include "geostat/tiled_matrix.hpp"

namespace geostat {

// Pairwise distances of a location set, deduplicated by exact value. The
// locations (hence the distances) are fixed across likelihood evaluations,
// so each evaluation only computes the covariance at the distinct distances
// and gathers. On gridded data that collapses O(n^2) kernel evaluations to
// O(n) per iteration.
class DistanceIndex {
  public:
    DistanceIndex() = default;
    DistanceIndex(const LocationSet& locs, Metric metric = Metric::Euclidean) : n_(locs.size()) {
        const std::size_t pairs = static_cast<std::size_t>(n_) * (n_ - 1) / 2;
        std::vector<double> d(pairs);
        std::size_t q = 0;
        for (int l = 1; l < n_; ++l)
            for (int r = 0; r < l; ++r) d[q++] = distance(locs[l], locs[r], metric);
        std::vector<double> u = d;
        std::sort(u.begin(), u.end());
        u.erase(std::unique(u.begin(), u.end()), u.end());
        unique_ = std::move(u);
        pair_index_.resize(pairs);
        for (std::size_t i = 0; i < pairs; ++i) {
            const auto it = std::lower_bound(unique_.begin(), unique_.end(), d[i]);
            pair_index_[i] = static_cast<std::uint32_t>(it - unique_.begin());
        }
    }

    int n() const { return n_; }
    const std::vector<double>& unique_distances() const { return unique_; }

    // distance between locations l and r (l != r)
    double dist(int l, int r) const { return unique_[pair_index_[pair(l, r)]]; }
    std::uint32_t index_of(int l, int r) const { return pair_index_[pair(l, r)]; }

  private:
    static std::size_t pair_of(int l, int r) {
        return static_cast<std::size_t>(l) * (l - 1) / 2 + static_cast<std::size_t>(r);
    }
    std::size_t pair(int l, int r) const { return l > r ? pair_of(l, r) : pair_of(r, l); }

    int n_ = 0;
    std::vector<double> unique_;
    std::vector<std::uint32_t> pair_index_;
};

// Covariance values of every variable pair at every distinct distance:
// table[u * npairs + q] = C_{ij}(unique[u]) with q the packed index of
// (i <= j).
class CovarianceTable {
  public:
    CovarianceTable(const CovarianceModel& model, const DistanceIndex& index,
                    const Executor& exec) {
        p_ = model.p();
        npairs_ = p_ * (p_ + 1) / 2;
        colocated_.resize(static_cast<std::size_t>(npairs_));
        for (int i = 0; i < p_; ++i)
            for (int j = i; j < p_; ++j) colocated_[pack(i, j)] = model(i, j, 0.0);
        const auto& u = index.unique_distances();
        values_.resize(u.size() * static_cast<std::size_t>(npairs_));
        exec.for_each(static_cast<std::int64_t>(u.size()), [&](std::int64_t k) {
            const double h = u[static_cast<std::size_t>(k)];
            double* row = &values_[static_cast<std::size_t>(k) * npairs_];
            for (int i = 0; i < p_; ++i)
                for (int j = i; j < p_; ++j) row[pack(i, j)] = model(i, j, h);
        });
    }

    double at(std::uint32_t u, int i, int j) const {
        return values_[static_cast<std::size_t>(u) * npairs_ + pack(i, j)];
    }
    double colocated(int i, int j) const { return colocated_[pack(i, j)]; }

  private:
    std::size_t pack(int i, int j) const {
        if (i > j) std::swap(i, j);
        // packed upper triangle, row-major
        return static_cast<std::size_t>(i) * (2 * p_ - i - 1) / 2 + static_cast<std::size_t>(j);
    }
    int p_ = 0;
    int npairs_ = 0;
    std::vector<double> values_;
    std::vector<double> colocated_;
};

namespace detail {

template <typename EntryFn>
void fill_sigma_tiles(TiledMatrix& s, const RepIndexer& ix, const Executor& exec,
                      const EntryFn& entry) {
    const int nt = s.nt;
    std::vector<std::pair<int, int>> work;
    for (int ti = 0; ti < nt; ++ti)
        for (int tj = 0; tj <= ti; ++tj) work.emplace_back(ti, tj);
    exec.for_each(static_cast<std::int64_t>(work.size()), [&](std::int64_t w) {
        const auto [ti, tj] = work[static_cast<std::size_t>(w)];
        Eigen::MatrixXd& t = s.tile(ti, tj);
        const std::int64_t r0 = s.offset(ti), c0 = s.offset(tj);
        // diagonal tiles are filled full so the stored matrix is exactly symmetric
        for (Eigen::Index c = 0; c < t.cols(); ++c) {
            const std::int64_t gc = c0 + c;
            const int jv = ix.variable(gc), jl = ix.location(gc);
            for (Eigen::Index r = 0; r < t.rows(); ++r) {
                const std::int64_t gr = r0 + r;
                const int iv = ix.variable(gr), il = ix.location(gr);
                t(r, c) = entry(iv, jv, il, jl);
            }
        }
    });
}

}  // namespace detail

// Assembles the pn x pn cross-covariance matrix Sigma(theta) in tiled
// symmetric storage under the chosen representation. Tiles are generated
// independently (embarrassingly parallel).
inline TiledMatrix assemble_sigma(const ParameterSet& theta, const LocationSet& locs,
                                  Representation rep, int nb = kDefaultDenseTile,
                                  const Executor& exec = Executor::sequential(),
                                  Metric metric = Metric::Euclidean) {
    if (locs.size() < 1) throw validation_error("assemble_sigma: empty location set");
    const int n = locs.size();
    const int p = theta.p;
    const CovarianceModel model(theta, locs.dim());
    TiledMatrix s(static_cast<std::int64_t>(p) * n, nb, TiledMatrix::Symmetry::SymmetricLower);
    const RepIndexer ix{rep, p, n};
    detail::fill_sigma_tiles(s, ix, exec, [&](int iv, int jv, int il, int jl) {
        const double h = (il == jl) ? 0.0 : distance(locs[il], locs[jl], metric);
        return model(iv, jv, h);
    });
    return s;
}

// Same, but gathering from a precomputed covariance table (the MLE hot path).
inline TiledMatrix assemble_sigma(const CovarianceTable& table, const DistanceIndex& index,
                                  int p, Representation rep, int nb,
                                  const Executor& exec = Executor::sequential()) {
    const int n = index.n();
    TiledMatrix s(static_cast<std::int64_t>(p) * n, nb, TiledMatrix::Symmetry::SymmetricLower);
    const RepIndexer ix{rep, p, n};
    detail::fill_sigma_tiles(s, ix, exec, [&](int iv, int jv, int il, int jl) {
        return (il == jl) ? table.colocated(iv, jv) : table.at(index.index_of(il, jl), iv, jv);
    });
    return s;
}

}  // namespace geostat
