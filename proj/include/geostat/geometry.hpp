#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "geostat/errors.hpp"
#include "geostat/rng.hpp"

namespace geostat {

struct Location {
    std::vector<double> coords;

    Location() = default;
    Location(double x, double y) : coords{x, y} {}
    explicit Location(std::vector<double> c) : coords(std::move(c)) {}

    int dim() const { return static_cast<int>(coords.size()); }
    double operator[](int i) const { return coords[static_cast<std::size_t>(i)]; }

    friend bool operator==(const Location& a, const Location& b) { return a.coords == b.coords; }
};

inline double euclidean_distance(const Location& a, const Location& b) {
    if (a.dim() != b.dim())
        throw validation_error("euclidean_distance: dimension mismatch (" +
                               std::to_string(a.dim()) + " vs " + std::to_string(b.dim()) + ")");
    double s = 0.0;
    for (int k = 0; k < a.dim(); ++k) {
        const double d = a[k] - b[k];
        s += d * d;
    }
    return std::sqrt(s);
}

// Haversine distance in km between (lon, lat) pairs in degrees on a sphere
// of radius 6371 km.
inline double great_circle_distance(const Location& a, const Location& b) {
    if (a.dim() != 2 || b.dim() != 2)
        throw validation_error("great_circle_distance: locations must be (lon, lat)");
    if (std::fabs(a[1]) > 90.0 || std::fabs(b[1]) > 90.0)
        throw validation_error("great_circle_distance: latitude out of [-90, 90]");
    const double radius_km = 6371.0;
    const double d2r = 3.14159265358979323846 / 180.0;
    const double lat1 = a[1] * d2r, lat2 = b[1] * d2r;
    const double dlat = (b[1] - a[1]) * d2r;
    const double dlon = (b[0] - a[0]) * d2r;
    const double s1 = std::sin(0.5 * dlat), s2 = std::sin(0.5 * dlon);
    const double h = s1 * s1 + std::cos(lat1) * std::cos(lat2) * s2 * s2;
    return 2.0 * radius_km * std::asin(std::min(1.0, std::sqrt(h)));
}

enum class Metric { Euclidean, GreatCircle };

inline double distance(const Location& a, const Location& b, Metric metric) {
    return metric == Metric::Euclidean ? euclidean_distance(a, b) : great_circle_distance(a, b);
}

enum class Ordering { AsGiven, Morton };

struct LocationSet {
    std::vector<Location> locations;
    Ordering ordering_tag = Ordering::AsGiven;

    LocationSet() = default;
    explicit LocationSet(std::vector<Location> locs, Ordering tag = Ordering::AsGiven)
        : locations(std::move(locs)), ordering_tag(tag) {
        validate();
    }

    int size() const { return static_cast<int>(locations.size()); }
    int dim() const { return locations.empty() ? 0 : locations.front().dim(); }
    const Location& operator[](int i) const { return locations[static_cast<std::size_t>(i)]; }

    // All locations must share a dimension and be pairwise distinct: a
    // duplicate gives a singular covariance matrix, so it is rejected here
    // rather than silently perturbed.
    void validate() const {
        if (locations.empty()) return;
        const int d = locations.front().dim();
        if (d < 1) throw validation_error("LocationSet: dimension must be >= 1");
        for (const auto& loc : locations) {
            if (loc.dim() != d) throw validation_error("LocationSet: mixed dimensions");
            for (double c : loc.coords)
                if (!std::isfinite(c)) throw validation_error("LocationSet: nonfinite coordinate");
        }
        std::vector<int> idx(locations.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::sort(idx.begin(), idx.end(), [&](int a, int b) {
            return locations[static_cast<std::size_t>(a)].coords <
                   locations[static_cast<std::size_t>(b)].coords;
        });
        for (std::size_t k = 1; k < idx.size(); ++k) {
            if (locations[static_cast<std::size_t>(idx[k - 1])] ==
                locations[static_cast<std::size_t>(idx[k])])
                throw validation_error("LocationSet: duplicate location at indices " +
                                       std::to_string(idx[k - 1]) + " and " + std::to_string(idx[k]));
        }
    }
};

enum class LocationKind { Grid, JitteredGrid, UniformRandom };

// Synthetic location generators on the unit square. Grid kinds return
// floor(sqrt(n_target))^2 points with spacing 1/(m+1); the jittered variant
// offsets each point uniformly in +-0.4*spacing per axis. UniformRandom
// returns exactly n_target points. Deterministic in the seed.
inline LocationSet generate_locations(LocationKind kind, int n_target, std::uint64_t seed) {
    if (n_target < 1) throw validation_error("generate_locations: n_target must be >= 1");
    std::vector<Location> pts;
    if (kind == LocationKind::UniformRandom) {
        pts.reserve(static_cast<std::size_t>(n_target));
        for (int i = 0; i < n_target; ++i) {
            const double x = rng::uniform(seed, 0, static_cast<std::uint64_t>(i));
            const double y = rng::uniform(seed, 1, static_cast<std::uint64_t>(i));
            pts.emplace_back(x, y);
        }
    } else {
        const int m = static_cast<int>(std::floor(std::sqrt(static_cast<double>(n_target))));
        const double spacing = 1.0 / (m + 1);
        pts.reserve(static_cast<std::size_t>(m) * static_cast<std::size_t>(m));
        for (int j = 0; j < m; ++j) {
            for (int i = 0; i < m; ++i) {
                double x = (i + 1) * spacing;
                double y = (j + 1) * spacing;
                if (kind == LocationKind::JitteredGrid) {
                    const std::uint64_t c = static_cast<std::uint64_t>(j) * m + i;
                    x += 0.4 * spacing * (2.0 * rng::uniform(seed, 2, c) - 1.0);
                    y += 0.4 * spacing * (2.0 * rng::uniform(seed, 3, c) - 1.0);
                }
                pts.emplace_back(x, y);
            }
        }
    }
    return LocationSet(std::move(pts));
}

// Morton (Z-order) key of quantized 2-D coordinates: x occupies the even
// bits and y the odd bits, so within a 2x2 cell the visit order is
// (0,0), (1,0), (0,1), (1,1).
inline std::uint64_t morton_key(std::uint32_t x, std::uint32_t y, int bits_per_axis) {
    std::uint64_t key = 0;
    for (int b = 0; b < bits_per_axis; ++b) {
        key |= (static_cast<std::uint64_t>((x >> b) & 1u)) << (2 * b);
        key |= (static_cast<std::uint64_t>((y >> b) & 1u)) << (2 * b + 1);
    }
    return key;
}

// Permutation sorting locations along the Z-order curve. Coordinates are
// min-max rescaled to [0,1)^2 and quantized to bits_per_axis bits; ties are
// broken by the original index.
inline std::vector<int> morton_permutation(const LocationSet& locs, int bits_per_axis = 16) {
    if (locs.dim() != 2) throw validation_error("morton_permutation: 2-D locations required");
    if (bits_per_axis < 1 || bits_per_axis > 16)
        throw validation_error("morton_permutation: bits_per_axis must be in [1, 16]");
    const int n = locs.size();
    double lo[2] = {0, 0}, hi[2] = {0, 0};
    for (int k = 0; k < 2; ++k) {
        lo[k] = hi[k] = locs[0][k];
        for (int i = 1; i < n; ++i) {
            lo[k] = std::min(lo[k], locs[i][k]);
            hi[k] = std::max(hi[k], locs[i][k]);
        }
    }
    const double cells = static_cast<double>(1u << bits_per_axis);
    const std::uint32_t max_cell = (1u << bits_per_axis) - 1;
    std::vector<std::uint64_t> keys(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        std::uint32_t q[2];
        for (int k = 0; k < 2; ++k) {
            const double span = hi[k] - lo[k];
            double t = span > 0.0 ? (locs[i][k] - lo[k]) / span : 0.0;
            auto cell = static_cast<std::int64_t>(t * cells);
            q[k] = static_cast<std::uint32_t>(std::clamp<std::int64_t>(cell, 0, max_cell));
        }
        keys[static_cast<std::size_t>(i)] = morton_key(q[0], q[1], bits_per_axis);
    }
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    std::stable_sort(perm.begin(), perm.end(), [&](int a, int b) {
        return keys[static_cast<std::size_t>(a)] < keys[static_cast<std::size_t>(b)];
    });
    return perm;
}

inline LocationSet apply_permutation(const LocationSet& locs, const std::vector<int>& perm,
                                     Ordering tag) {
    std::vector<Location> out;
    out.reserve(perm.size());
    for (int p : perm) out.push_back(locs[p]);
    LocationSet result;
    result.locations = std::move(out);
    result.ordering_tag = tag;
    return result;
}

}  // namespace geostat
