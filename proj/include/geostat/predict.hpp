#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <vector>

#include "geostat/likelihood.hpp"

namespace geostat {

struct PredictionResult {
    Eigen::MatrixXd predictions;       // n_pred x p
    std::vector<double> mspe;          // per variable, empty until scored
    double mspe_avg = 0.0;
};

// Per-variable mean square prediction error and its arithmetic mean.
inline std::pair<std::vector<double>, double> mspe(const Eigen::MatrixXd& pred,
                                                   const Eigen::MatrixXd& truth) {
    if (pred.rows() != truth.rows() || pred.cols() != truth.cols())
        throw validation_error("mspe: shape mismatch");
    const int p = static_cast<int>(pred.cols());
    std::vector<double> per(static_cast<std::size_t>(p), 0.0);
    for (int i = 0; i < p; ++i)
        per[static_cast<std::size_t>(i)] = (pred.col(i) - truth.col(i)).squaredNorm() / pred.rows();
    double avg = 0.0;
    for (double v : per) avg += v;
    return {per, avg / p};
}

namespace detail {

// factorization of Sigma(theta) behind either backend, plus the solve needed
// by the cokriging weights
struct FactorizedSigma {
    std::unique_ptr<CholeskyFactor> dense;
    std::unique_ptr<TLRCholeskyFactor> tlr;

    Eigen::MatrixXd solve_spd(Eigen::MatrixXd b) const {
        if (dense) return solve(*dense, std::move(b));
        Eigen::MatrixXd x = tlr_solve_triangular(*tlr, std::move(b), SolveSide::Forward);
        return tlr_solve_triangular(*tlr, std::move(x), SolveSide::Backward);
    }
};

inline FactorizedSigma factorize_sigma(const ParameterSet& theta, const LocationSet& locs,
                                       const LikelihoodBackend& backend, Representation rep,
                                       const Executor& exec, Metric metric) {
    const int nb = backend.tile_size(static_cast<std::int64_t>(theta.p) * locs.size());
    TiledMatrix sigma = assemble_sigma(theta, locs, rep, nb, exec, metric);
    if (backend.kind == LikelihoodBackend::Kind::DST)
        sigma = dst_truncate(sigma, backend.keep_fraction);
    FactorizedSigma f;
    if (backend.kind == LikelihoodBackend::Kind::TLR)
        f.tlr = std::make_unique<TLRCholeskyFactor>(
            tlr_cholesky(compress(sigma, backend.eps, exec), exec));
    else
        f.dense = std::make_unique<CholeskyFactor>(cholesky(sigma, exec));
    return f;
}

}  // namespace detail

// Cokriging prediction Z_hat(s0) = c0^T Sigma^-1 Z at each target, all p
// variables missing at every target. Sigma is factorized once; the solved
// weight vector is shared across targets, so each target costs one c0
// assembly and a dot product per variable.
inline Eigen::MatrixXd cokrige(const ParameterSet& theta, const SpatialDataset& data,
                               const LocationSet& targets,
                               const LikelihoodBackend& backend = LikelihoodBackend::exact(),
                               Representation rep = Representation::InterleavedI,
                               const Executor& exec = Executor::sequential(),
                               Metric metric = Metric::Euclidean) {
    if (targets.size() < 1) throw validation_error("cokrige: no targets");
    if (theta.p != data.p) throw validation_error("cokrige: parameter/variable count mismatch");
    auto f = detail::factorize_sigma(theta, data.locs, backend, rep, exec, metric);
    const Eigen::VectorXd z = (rep == Representation::InterleavedI) ? data.z : data.z_block_order();
    const Eigen::VectorXd w = f.solve_spd(z);

    Eigen::MatrixXd out(targets.size(), theta.p);
    exec.for_each(targets.size(), [&](std::int64_t t) {
        const Eigen::MatrixXd c0 =
            assemble_c0(theta, data.locs, targets[static_cast<int>(t)], rep, metric);
        out.row(t) = (c0.transpose() * w).transpose();
    });
    return out;
}

// Cokriging with per-target prediction variances, the diagonal of
// C(0) - c0^T Sigma^-1 c0.
inline std::pair<Eigen::MatrixXd, Eigen::MatrixXd> cokrige_with_variance(
    const ParameterSet& theta, const SpatialDataset& data, const LocationSet& targets,
    const LikelihoodBackend& backend = LikelihoodBackend::exact(),
    Representation rep = Representation::InterleavedI,
    const Executor& exec = Executor::sequential(), Metric metric = Metric::Euclidean) {
    if (targets.size() < 1) throw validation_error("cokrige: no targets");
    auto f = detail::factorize_sigma(theta, data.locs, backend, rep, exec, metric);
    const Eigen::VectorXd z = (rep == Representation::InterleavedI) ? data.z : data.z_block_order();
    const Eigen::VectorXd w = f.solve_spd(z);
    const CovarianceModel model(theta, data.locs.dim());
    const Eigen::MatrixXd c00 = model.colocated_block();

    Eigen::MatrixXd pred(targets.size(), theta.p);
    Eigen::MatrixXd var(targets.size(), theta.p);
    exec.for_each(targets.size(), [&](std::int64_t t) {
        const Eigen::MatrixXd c0 =
            assemble_c0(theta, data.locs, targets[static_cast<int>(t)], rep, metric);
        pred.row(t) = (c0.transpose() * w).transpose();
        const Eigen::MatrixXd sc0 = f.solve_spd(c0);
        var.row(t) = (c00 - c0.transpose() * sc0).diagonal().transpose();
    });
    return {pred, var};
}

}  // namespace geostat
