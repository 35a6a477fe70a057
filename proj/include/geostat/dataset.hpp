#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "geostat/errors.hpp"
#include "geostat/geometry.hpp"

namespace geostat {

// n locations with a p-variate measurement vector. Z is stored in the
// Representation I (location-major, variable-interleaved) order:
// Z = (Z_1(s_1), ..., Z_p(s_1), Z_1(s_2), ...).
struct SpatialDataset {
    LocationSet locs;
    Eigen::VectorXd z;
    int p = 1;

    SpatialDataset() = default;
    SpatialDataset(LocationSet locs_, Eigen::VectorXd z_, int p_)
        : locs(std::move(locs_)), z(std::move(z_)), p(p_) {
        validate();
    }

    int n() const { return locs.size(); }
    std::int64_t total() const { return static_cast<std::int64_t>(p) * n(); }

    void validate() const {
        if (p < 1) throw validation_error("SpatialDataset: p must be >= 1");
        if (z.size() != static_cast<Eigen::Index>(p) * locs.size())
            throw validation_error("SpatialDataset: measurement vector must have length p*n");
        for (Eigen::Index i = 0; i < z.size(); ++i)
            if (!std::isfinite(z[i])) throw validation_error("SpatialDataset: nonfinite measurement");
    }

    double value(int location, int variable) const {
        return z[static_cast<Eigen::Index>(location) * p + variable];
    }

    // All values of one variable (length n).
    Eigen::VectorXd variable_values(int variable) const {
        Eigen::VectorXd out(n());
        for (int l = 0; l < n(); ++l) out[l] = value(l, variable);
        return out;
    }

    // Z reordered for Representation II (variable blocks of length n).
    Eigen::VectorXd z_block_order() const {
        Eigen::VectorXd out(z.size());
        for (int i = 0; i < p; ++i)
            for (int l = 0; l < n(); ++l) out[static_cast<Eigen::Index>(i) * n() + l] = value(l, i);
        return out;
    }

    SpatialDataset permuted(const std::vector<int>& perm, Ordering tag) const {
        Eigen::VectorXd znew(z.size());
        for (int l = 0; l < n(); ++l)
            for (int i = 0; i < p; ++i)
                znew[static_cast<Eigen::Index>(l) * p + i] = value(perm[static_cast<std::size_t>(l)], i);
        return SpatialDataset(apply_permutation(locs, perm, tag), std::move(znew), p);
    }

    SpatialDataset morton_ordered() const {
        if (locs.ordering_tag == Ordering::Morton) return *this;
        return permuted(morton_permutation(locs), Ordering::Morton);
    }

    // Keeps the given location indices, in the given order.
    SpatialDataset subset(const std::vector<int>& keep) const {
        std::vector<Location> pts;
        pts.reserve(keep.size());
        Eigen::VectorXd znew(static_cast<Eigen::Index>(keep.size()) * p);
        for (std::size_t k = 0; k < keep.size(); ++k) {
            pts.push_back(locs[keep[k]]);
            for (int i = 0; i < p; ++i) znew[static_cast<Eigen::Index>(k) * p + i] = value(keep[k], i);
        }
        return SpatialDataset(LocationSet(std::move(pts), locs.ordering_tag), std::move(znew), p);
    }
};

}  // namespace geostat
