#pragma once

#include <cstdint>

#include "geostat/likelihood.hpp"

namespace geostat {

// Draws one realization of the mean-zero multivariate Gaussian random field
// at the given locations: Z = L eps with Sigma(theta) = L L^T factorized
// exactly (simulation never uses an approximate backend) and eps standard
// normal from the counter-based generator, so a (theta, locs, seed) triple
// always produces the same field, on any thread count.
inline SpatialDataset simulate_field(const ParameterSet& theta, const LocationSet& locs,
                                     std::uint64_t seed,
                                     const Executor& exec = Executor::sequential()) {
    const std::int64_t total = static_cast<std::int64_t>(theta.p) * locs.size();
    const int nb = LikelihoodBackend::exact().tile_size(total);
    const TiledMatrix sigma = assemble_sigma(theta, locs, Representation::InterleavedI, nb, exec);
    const CholeskyFactor f = cholesky(sigma, exec);
    Eigen::VectorXd eps(total);
    for (std::int64_t i = 0; i < total; ++i)
        eps[i] = rng::normal(seed, 42, static_cast<std::uint64_t>(i));
    Eigen::VectorXd z = multiply_l(f, eps);
    return SpatialDataset(locs, std::move(z), theta.p);
}

}  // namespace geostat
