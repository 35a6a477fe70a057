#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "geostat/likelihood.hpp"

namespace geostat {

// Per-location loss of efficiency LOE = E_ta / E_t - 1 and misspecification
// of the mean square error MOM = E_a / E_ta - 1, aggregated to their means
// over the prediction locations, plus the generation / factorization /
// computation time split of the assessment run.
struct AssessmentReport {
    std::vector<double> loe;
    std::vector<double> mom;
    double mloe = 0.0;
    double mmom = 0.0;
    PhaseTimings timings;
};

// E_t = tr{ C(0; theta) - c0^T Sigma(theta)^-1 c0 }, the mean square error
// of the cokriging predictor built from the true parameters.
inline double mse_true(const ParameterSet& theta, const LocationSet& data_locs,
                       const Location& s0, const CholeskyFactor& chol_true,
                       Representation rep = Representation::InterleavedI,
                       Metric metric = Metric::Euclidean) {
    if (chol_true.L.order != static_cast<std::int64_t>(theta.p) * data_locs.size())
        throw validation_error("mse_true: factorization does not match the location set");
    const CovarianceModel model(theta, data_locs.dim());
    const Eigen::MatrixXd c0 = assemble_c0(theta, data_locs, s0, rep, metric);
    const Eigen::MatrixXd w = solve_triangular(chol_true, c0, SolveSide::Forward);
    return model.colocated_block().trace() - w.squaredNorm();
}

// E_ta = tr{ C(0; theta) - 2 c0t^T Sigma_a^-1 c0a
//            + c0a^T Sigma_a^-1 Sigma Sigma_a^-1 c0a },
// the mean square error of the predictor built from the approximate
// parameters, evaluated under the truth. All inverses are realized as
// triangular solves against the stored factors.
inline double mse_cross(const ParameterSet& theta_true, const ParameterSet& theta_approx,
                        const LocationSet& data_locs, const Location& s0,
                        const CholeskyFactor& chol_true, const CholeskyFactor& chol_approx,
                        Representation rep = Representation::InterleavedI,
                        Metric metric = Metric::Euclidean) {
    if (chol_true.L.order != chol_approx.L.order)
        throw validation_error("mse_cross: factorizations do not conform");
    const CovarianceModel model(theta_true, data_locs.dim());
    const Eigen::MatrixXd c0t = assemble_c0(theta_true, data_locs, s0, rep, metric);
    const Eigen::MatrixXd c0a = assemble_c0(theta_approx, data_locs, s0, rep, metric);
    const Eigen::MatrixXd x = solve(chol_approx, c0a);   // Sigma_a^-1 c0a
    const double cross = (c0t.array() * x.array()).sum();  // tr(c0t^T x)
    const Eigen::MatrixXd y = multiply_lt(chol_true, x);   // L^T x, so ||y||^2 = x^T Sigma x
    return model.colocated_block().trace() - 2.0 * cross + y.squaredNorm();
}

// Multivariate MLOE / MMOM via the two-factorization algorithm: factorize
// Sigma(theta) and Sigma(theta_approx) once, then stream the prediction
// locations with triangular solves only. Targets that coincide with a data
// location have E_t = 0; they raise degenerate_target unless
// skip_degenerate is set, in which case they are dropped from the means.
inline AssessmentReport mloe_mmom(const ParameterSet& theta_true,
                                  const ParameterSet& theta_approx, const LocationSet& data_locs,
                                  const LocationSet& targets,
                                  Representation rep = Representation::InterleavedI,
                                  const Executor& exec = Executor::sequential(),
                                  bool skip_degenerate = false,
                                  Metric metric = Metric::Euclidean) {
    if (targets.size() < 1) throw validation_error("mloe_mmom: no targets");
    if (theta_true.p != theta_approx.p)
        throw validation_error("mloe_mmom: parameter sets have different variable counts");
    AssessmentReport report;
    const int p = theta_true.p;
    const int nb = LikelihoodBackend::exact().tile_size(static_cast<std::int64_t>(p) * data_locs.size());

    const double t0 = detail::now_s();
    const TiledMatrix sigma_t = assemble_sigma(theta_true, data_locs, rep, nb, exec, metric);
    const TiledMatrix sigma_a = assemble_sigma(theta_approx, data_locs, rep, nb, exec, metric);
    const double t1 = detail::now_s();
    const CholeskyFactor lt = cholesky(sigma_t, exec);
    const CholeskyFactor la = cholesky(sigma_a, exec);
    const double t2 = detail::now_s();

    const CovarianceModel model_t(theta_true, data_locs.dim());
    const CovarianceModel model_a(theta_approx, data_locs.dim());
    const double trace_t = model_t.colocated_block().trace();
    const double trace_a = model_a.colocated_block().trace();

    const int m = targets.size();
    report.loe.assign(static_cast<std::size_t>(m), 0.0);
    report.mom.assign(static_cast<std::size_t>(m), 0.0);
    std::vector<char> degenerate(static_cast<std::size_t>(m), 0);

    exec.for_each(m, [&](std::int64_t l) {
        const Location& s0 = targets[static_cast<int>(l)];
        const Eigen::MatrixXd c0t = assemble_c0(theta_true, data_locs, s0, rep, metric);
        const Eigen::MatrixXd c0a = assemble_c0(theta_approx, data_locs, s0, rep, metric);

        // tmp2 = E_t
        const Eigen::MatrixXd wt = solve_triangular(lt, c0t, SolveSide::Forward);
        const double e_t = trace_t - wt.squaredNorm();
        if (e_t < 1e-12) {
            degenerate[static_cast<std::size_t>(l)] = 1;
            return;
        }
        // tmp3 = E_a (Eq. 5 at theta_approx)
        const Eigen::MatrixXd wa = solve_triangular(la, c0a, SolveSide::Forward);
        const double e_a = trace_a - wa.squaredNorm();
        // tmp1 = E_ta
        const Eigen::MatrixXd x = solve(la, c0a);
        const double cross = (c0t.array() * x.array()).sum();
        const Eigen::MatrixXd y = multiply_lt(lt, x);
        const double e_ta = trace_t - 2.0 * cross + y.squaredNorm();

        report.loe[static_cast<std::size_t>(l)] = e_ta / e_t - 1.0;
        report.mom[static_cast<std::size_t>(l)] = e_a / e_ta - 1.0;
    });
    const double t3 = detail::now_s();

    // means over non-degenerate targets, in index order
    std::size_t kept = 0;
    for (int l = 0; l < m; ++l) {
        if (degenerate[static_cast<std::size_t>(l)]) {
            if (!skip_degenerate) throw degenerate_target(l);
            continue;
        }
        report.loe[kept] = report.loe[static_cast<std::size_t>(l)];
        report.mom[kept] = report.mom[static_cast<std::size_t>(l)];
        ++kept;
    }
    report.loe.resize(kept);
    report.mom.resize(kept);
    if (kept == 0) throw degenerate_target(0);
    for (std::size_t l = 0; l < kept; ++l) {
        report.mloe += report.loe[l];
        report.mmom += report.mom[l];
    }
    report.mloe /= static_cast<double>(kept);
    report.mmom /= static_cast<double>(kept);
    report.timings.generation_s = t1 - t0;
    report.timings.factorization_s = t2 - t1;
    report.timings.computation_s = t3 - t2;
    return report;
}

// Univariate MLOE / MMOM of variable i (scalar Matern, kriging).
inline AssessmentReport mloe_mmom_univariate(const ParameterSet& theta_true,
                                             const ParameterSet& theta_approx,
                                             const LocationSet& data_locs,
                                             const LocationSet& targets, int variable,
                                             const Executor& exec = Executor::sequential(),
                                             bool skip_degenerate = false,
                                             Metric metric = Metric::Euclidean) {
    return mloe_mmom(theta_true.marginal(variable), theta_approx.marginal(variable), data_locs,
                     targets, Representation::InterleavedI, exec, skip_degenerate, metric);
}

// Naive multivariate criterion: the mean of the per-variable univariate
// MLOE / MMOM values.
inline AssessmentReport mloe_mmom_naive(const ParameterSet& theta_true,
                                        const ParameterSet& theta_approx,
                                        const LocationSet& data_locs, const LocationSet& targets,
                                        const Executor& exec = Executor::sequential(),
                                        bool skip_degenerate = false,
                                        Metric metric = Metric::Euclidean) {
    AssessmentReport out;
    for (int i = 0; i < theta_true.p; ++i) {
        const auto r = mloe_mmom_univariate(theta_true, theta_approx, data_locs, targets, i, exec,
                                            skip_degenerate, metric);
        out.mloe += r.mloe;
        out.mmom += r.mmom;
        out.timings.generation_s += r.timings.generation_s;
        out.timings.factorization_s += r.timings.factorization_s;
        out.timings.computation_s += r.timings.computation_s;
    }
    out.mloe /= theta_true.p;
    out.mmom /= theta_true.p;
    return out;
}

}  // namespace geostat
