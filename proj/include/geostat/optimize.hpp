#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "geostat/likelihood.hpp"
#include "geostat/rng.hpp"

namespace geostat {

struct NelderMeadOptions {
    int max_evals = 500;
    double rel_tol = 1e-8;
    double initial_step = 0.35;
};

struct NelderMeadResult {
    Eigen::VectorXd x;
    double f = std::numeric_limits<double>::infinity();
    int evaluations = 0;
    bool converged = false;
};

// Bound-constrained Nelder-Mead: proposals are clipped into the box.
// Deterministic given the starting point.
inline NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                                    Eigen::VectorXd x0, const Eigen::VectorXd& lo,
                                    const Eigen::VectorXd& hi, const NelderMeadOptions& opts) {
    const int d = static_cast<int>(x0.size());
    auto clip = [&](Eigen::VectorXd x) {
        for (int i = 0; i < d; ++i) x[i] = std::clamp(x[i], lo[i], hi[i]);
        return x;
    };
    NelderMeadResult res;
    std::vector<Eigen::VectorXd> xs;
    std::vector<double> fs;
    auto eval = [&](const Eigen::VectorXd& x) {
        ++res.evaluations;
        return f(x);
    };
    x0 = clip(std::move(x0));
    xs.push_back(x0);
    fs.push_back(eval(x0));
    for (int i = 0; i < d; ++i) {
        Eigen::VectorXd xi = x0;
        xi[i] += (xi[i] + opts.initial_step <= hi[i]) ? opts.initial_step : -opts.initial_step;
        xi = clip(std::move(xi));
        xs.push_back(xi);
        fs.push_back(eval(xi));
    }
    std::vector<int> order(static_cast<std::size_t>(d) + 1);

    while (res.evaluations < opts.max_evals) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return fs[a] < fs[b]; });
        const int best = order.front(), worst = order.back(), second_worst = order[order.size() - 2];
        if (std::isfinite(fs[best]) && std::isfinite(fs[worst]) &&
            fs[worst] - fs[best] <= opts.rel_tol * (std::fabs(fs[best]) + 1e-10)) {
            res.converged = true;
            break;
        }
        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(d);
        for (int k = 0; k <= d; ++k)
            if (k != worst) centroid += xs[static_cast<std::size_t>(k)];
        centroid /= d;

        const Eigen::VectorXd xr = clip(centroid + (centroid - xs[static_cast<std::size_t>(worst)]));
        const double fr = eval(xr);
        if (fr < fs[static_cast<std::size_t>(best)]) {
            const Eigen::VectorXd xe =
                clip(centroid + 2.0 * (centroid - xs[static_cast<std::size_t>(worst)]));
            const double fe = eval(xe);
            if (fe < fr) {
                xs[static_cast<std::size_t>(worst)] = xe;
                fs[static_cast<std::size_t>(worst)] = fe;
            } else {
                xs[static_cast<std::size_t>(worst)] = xr;
                fs[static_cast<std::size_t>(worst)] = fr;
            }
        } else if (fr < fs[static_cast<std::size_t>(second_worst)]) {
            xs[static_cast<std::size_t>(worst)] = xr;
            fs[static_cast<std::size_t>(worst)] = fr;
        } else {
            const bool outside = fr < fs[static_cast<std::size_t>(worst)];
            const Eigen::VectorXd base = outside ? xr : xs[static_cast<std::size_t>(worst)];
            const Eigen::VectorXd xc = clip(centroid + 0.5 * (base - centroid));
            const double fc = eval(xc);
            if (fc < std::min(fr, fs[static_cast<std::size_t>(worst)])) {
                xs[static_cast<std::size_t>(worst)] = xc;
                fs[static_cast<std::size_t>(worst)] = fc;
            } else {
                // shrink toward the best vertex
                for (int k = 0; k <= d; ++k) {
                    if (k == best) continue;
                    xs[static_cast<std::size_t>(k)] = clip(
                        xs[static_cast<std::size_t>(best)] +
                        0.5 * (xs[static_cast<std::size_t>(k)] - xs[static_cast<std::size_t>(best)]));
                    fs[static_cast<std::size_t>(k)] = eval(xs[static_cast<std::size_t>(k)]);
                    if (res.evaluations >= opts.max_evals) break;
                }
            }
        }
    }
    int best = 0;
    for (int k = 1; k <= d; ++k)
        if (fs[static_cast<std::size_t>(k)] < fs[static_cast<std::size_t>(best)]) best = k;
    res.x = xs[static_cast<std::size_t>(best)];
    res.f = fs[static_cast<std::size_t>(best)];
    return res;
}

struct FitOptions {
    int max_evals = 500;
    double rel_tol = 1e-8;
    std::optional<ParameterSet> start;  // defaults to a = 0.1, nu = 0.5, beta = 0
    int warm_start_n = 0;               // > 0: pre-optimize on a location subsample
    std::uint64_t seed = 0;             // seeds the warm-start subsample only
    Metric metric = Metric::Euclidean;
};

struct FitTracePoint {
    std::vector<double> theta;  // canonical flat order, variances recovered
    double loglik;
    double elapsed_s;
};

struct FitResult {
    ParameterSet theta_hat;
    double loglik = -std::numeric_limits<double>::infinity();
    int evaluations = 0;
    bool converged = false;
    bool warning = false;
    std::vector<FitTracePoint> trace;
    LikelihoodBackend backend;
    Representation rep = Representation::InterleavedI;
};

namespace detail {

// Optimizer coordinates: log a, log nu_i, atanh beta_ij. The latent beta
// matrix must stay positive definite; points where it is not evaluate to an
// infeasible objective (the optimizer never sees an exception). The range
// box [1e-3, 2] is stated in unit-square units; range_scale rescales it by
// the data diameter relative to the unit square's, so lon/lat (km) inputs
// get a usable search box.
struct FitTransform {
    int p;
    double range_scale = 1.0;
    int dims() const { return 1 + p + p * (p - 1) / 2; }

    Eigen::VectorXd lower() const {
        Eigen::VectorXd lo(dims());
        lo[0] = std::log(1e-3 * range_scale);
        for (int i = 0; i < p; ++i) lo[1 + i] = std::log(0.1);
        for (int k = 1 + p; k < dims(); ++k) lo[k] = std::atanh(-0.999);
        return lo;
    }
    Eigen::VectorXd upper() const {
        Eigen::VectorXd hi(dims());
        hi[0] = std::log(2.0 * range_scale);
        for (int i = 0; i < p; ++i) hi[1 + i] = std::log(5.0);
        for (int k = 1 + p; k < dims(); ++k) hi[k] = std::atanh(0.999);
        return hi;
    }

    // reduced parameters with unit variances; throws validation_error when
    // the implied beta matrix is not positive definite
    ParameterSet to_reduced(const Eigen::VectorXd& x) const {
        std::vector<double> s2(static_cast<std::size_t>(p), 1.0);
        std::vector<double> nus(static_cast<std::size_t>(p));
        for (int i = 0; i < p; ++i) nus[static_cast<std::size_t>(i)] = std::exp(x[1 + i]);
        Eigen::MatrixXd beta = Eigen::MatrixXd::Identity(p, p);
        int k = 1 + p;
        for (int i = 0; i < p; ++i)
            for (int j = i + 1; j < p; ++j) beta(i, j) = beta(j, i) = std::tanh(x[k++]);
        return ParameterSet(std::move(s2), std::exp(x[0]), std::move(nus), std::move(beta));
    }

    Eigen::VectorXd from_parameters(const ParameterSet& theta) const {
        Eigen::VectorXd x(dims());
        x[0] = std::log(theta.range);
        for (int i = 0; i < p; ++i) x[1 + i] = std::log(theta.nu[static_cast<std::size_t>(i)]);
        int k = 1 + p;
        for (int i = 0; i < p; ++i)
            for (int j = i + 1; j < p; ++j)
                x[k++] = std::atanh(std::clamp(theta.beta(i, j), -0.999, 0.999));
        return x;
    }
};

inline ParameterSet default_start(int p) {
    std::vector<double> s2(static_cast<std::size_t>(p), 1.0);
    std::vector<double> nus(static_cast<std::size_t>(p), 0.5);
    return ParameterSet(std::move(s2), 0.1, std::move(nus), Eigen::MatrixXd::Identity(p, p));
}

inline double max_pairwise_distance(const LocationSet& locs, Metric metric) {
    double d = 0.0;
    for (int l = 1; l < locs.size(); ++l)
        for (int r = 0; r < l; ++r) d = std::max(d, distance(locs[l], locs[r], metric));
    return d;
}

inline std::vector<int> seeded_subsample(int n, int m, std::uint64_t seed) {
    std::vector<int> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    for (int i = n - 1; i > 0; --i) {
        const int j = static_cast<int>(rng::mix(seed, 1234, static_cast<std::uint64_t>(i)) %
                                       static_cast<std::uint64_t>(i + 1));
        std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
    }
    idx.resize(static_cast<std::size_t>(std::min(m, n)));
    return idx;
}

}  // namespace detail

// Maximum likelihood fit: bounded Nelder-Mead on the profile log-likelihood
// in transformed coordinates. Marginal variances are recovered analytically
// at every evaluation, so the search space is (a, nu_1..p, beta_ij) only.
inline FitResult fit(const SpatialDataset& data, const LikelihoodBackend& backend,
                     const FitOptions& opts = {},
                     Representation rep = Representation::InterleavedI,
                     const Executor& exec = Executor::sequential()) {
    FitResult result;
    result.backend = backend;
    result.rep = rep;
    if (data.n() < 30) result.warning = true;

    detail::FitTransform tf{data.p};
    // unit-square (Euclidean) data keeps the nominal box; km-scale geodesic
    // data rescales it by the data diameter relative to the unit square's
    if (opts.metric == Metric::GreatCircle)
        tf.range_scale = std::max(
            1e-12, detail::max_pairwise_distance(data.locs, opts.metric) / std::sqrt(2.0));
    ParameterSet start_params = opts.start ? *opts.start : detail::default_start(data.p);
    if (!opts.start && tf.range_scale != 1.0) {
        start_params.range = 0.1 * tf.range_scale;
        start_params.validate();
    }
    Eigen::VectorXd x0 = tf.from_parameters(start_params);

    const auto t_begin = std::chrono::steady_clock::now();
    auto make_objective = [&](const LikelihoodSession& session) {
        return [&session, &tf, &result, t_begin](const Eigen::VectorXd& x) -> double {
            ParameterSet reduced;
            try {
                reduced = tf.to_reduced(x);
            } catch (const validation_error&) {
                return 1e100;  // beta left the positive definite cone
            }
            const auto prof = session.profile(reduced);
            const double elapsed =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t_begin).count();
            if (!prof.loglik.feasible) {
                result.trace.push_back({{}, -std::numeric_limits<double>::infinity(), elapsed});
                return 1e100;
            }
            result.trace.push_back(
                {reduced.with_variances(prof.sigma2_hat).to_flat(), prof.loglik.value, elapsed});
            return -prof.loglik.value;
        };
    };

    NelderMeadOptions nm;
    nm.rel_tol = opts.rel_tol;

    // optional warm start on a location subsample; cheap evaluations walk x0
    // into the right basin before the full-resolution polish
    if (opts.warm_start_n > 0 && opts.warm_start_n < data.n()) {
        const auto keep = detail::seeded_subsample(data.n(), opts.warm_start_n, opts.seed);
        const SpatialDataset sub = data.subset(keep);
        LikelihoodSession warm_session(sub, backend, rep, exec, opts.metric);
        nm.max_evals = opts.max_evals;
        auto warm = nelder_mead(make_objective(warm_session), x0, tf.lower(), tf.upper(), nm);
        if (warm.f < 1e100) x0 = warm.x;
        result.evaluations += warm.evaluations;
        result.trace.clear();  // keep only the full-resolution trace
    }

    LikelihoodSession session(data, backend, rep, exec, opts.metric);
    auto objective = make_objective(session);

    // nudge an infeasible start into the feasible region by shrinking the range
    if (objective(x0) >= 1e100) {
        for (double shrink : {0.25, 0.0625, 0.015625}) {
            Eigen::VectorXd xs = x0;
            xs[0] = std::max(tf.lower()[0], x0[0] + std::log(shrink));
            if (objective(xs) < 1e100) {
                x0 = xs;
                break;
            }
        }
    }

    nm.max_evals = opts.max_evals;
    auto nmres = nelder_mead(objective, x0, tf.lower(), tf.upper(), nm);
    result.evaluations += nmres.evaluations;
    result.converged = nmres.converged;
    if (!nmres.converged) result.warning = true;

    ParameterSet reduced = tf.to_reduced(nmres.x);
    const auto prof = session.profile(reduced);
    if (!prof.loglik.feasible) {
        // surface the best-so-far point with a warning rather than throwing
        result.warning = true;
        result.theta_hat = reduced;
        result.loglik = -std::numeric_limits<double>::infinity();
        return result;
    }
    for (double s2 : prof.sigma2_hat)
        if (s2 < 1e-3 || s2 > 5.0) result.warning = true;  // outside the nominal bounds
    result.theta_hat = reduced.with_variances(prof.sigma2_hat);
    result.loglik = prof.loglik.value;
    return result;
}

}  // namespace geostat
