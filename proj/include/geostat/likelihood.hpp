#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "geostat/assembly.hpp"
#include "geostat/cholesky.hpp"
#include "geostat/dataset.hpp"
#include "geostat/tlr.hpp"

namespace geostat {

// Linear-algebra backend of the Gaussian log-likelihood: exact dense tiles,
// tile low-rank at accuracy eps, or the Diagonal-Super-Tile band.
struct LikelihoodBackend {
    enum class Kind { Exact, TLR, DST };
    Kind kind = Kind::Exact;
    double eps = 1e-9;           // TLR accuracy
    double keep_fraction = 1.0;  // DST band fraction
    int nb = 0;                  // tile size; 0 picks a default per kind

    static LikelihoodBackend exact(int nb = 0) { return {Kind::Exact, 0.0, 1.0, nb}; }
    static LikelihoodBackend tlr(double eps, int nb = 0) { return {Kind::TLR, eps, 1.0, nb}; }
    static LikelihoodBackend dst(double keep, int nb = 0) { return {Kind::DST, 0.0, keep, nb}; }

    // accepts exact | tlr5 | tlr7 | tlr9 | tlr:<eps> | dst:<frac>
    static LikelihoodBackend parse(const std::string& text) {
        if (text == "exact") return exact();
        if (text == "tlr5") return tlr(1e-5);
        if (text == "tlr7") return tlr(1e-7);
        if (text == "tlr9") return tlr(1e-9);
        if (text.rfind("tlr:", 0) == 0) {
            const double e = std::stod(text.substr(4));
            if (!(e > 0.0 && e < 1.0))
                throw validation_error("backend: tlr accuracy must be in (0, 1)");
            return tlr(e);
        }
        if (text.rfind("dst:", 0) == 0) {
            const double k = std::stod(text.substr(4));
            if (!(k > 0.0 && k <= 1.0))
                throw validation_error("backend: dst keep fraction must be in (0, 1]");
            return dst(k);
        }
        throw validation_error("backend: unknown spec '" + text + "'");
    }

    std::string name() const {
        switch (kind) {
            case Kind::Exact: return "exact";
            case Kind::TLR: return "tlr:" + std::to_string(eps);
            case Kind::DST: return "dst:" + std::to_string(keep_fraction);
        }
        return "?";
    }

    int tile_size(std::int64_t order) const {
        if (nb > 0) return nb;
        return kind == Kind::Exact ? std::min<std::int64_t>(kDefaultDenseTile, order)
                                   : default_tlr_tile(order);
    }
};

struct PhaseTimings {
    double generation_s = 0.0;
    double factorization_s = 0.0;
    double computation_s = 0.0;
    double total() const { return generation_s + factorization_s + computation_s; }
};

struct LogLikelihoodResult {
    double value = -std::numeric_limits<double>::infinity();
    bool feasible = false;  // false when the factorization hit a nonpositive pivot
    double logdet = 0.0;
    double quadratic = 0.0;
    PhaseTimings timings;
};

namespace detail {

inline double now_s() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

}  // namespace detail

// Evaluation context for repeated likelihood evaluations on one dataset:
// the pairwise distance index is built once, each evaluation only fills the
// covariance table for the current theta and factorizes.
class LikelihoodSession {
  public:
    LikelihoodSession(const SpatialDataset& data, LikelihoodBackend backend,
                      Representation rep = Representation::InterleavedI,
                      Executor exec = Executor::sequential(), Metric metric = Metric::Euclidean)
        : data_(data),
          backend_(backend),
          rep_(rep),
          exec_(exec),
          metric_(metric),
          index_(data.locs, metric) {}

    const SpatialDataset& data() const { return data_; }
    const LikelihoodBackend& backend() const { return backend_; }
    const DistanceIndex& distance_index() const { return index_; }
    Representation representation() const { return rep_; }
    const Executor& executor() const { return exec_; }
    Metric metric() const { return metric_; }

    // Eq. (1): -(np/2) log 2pi - 1/2 log|Sigma| - 1/2 Z^T Sigma^-1 Z.
    // A factorization failure is reported as feasible = false with value
    // -inf; the optimizer treats such points as infeasible.
    LogLikelihoodResult evaluate(const ParameterSet& theta) const {
        if (theta.p != data_.p)
            throw validation_error("log_likelihood: parameter/variable count mismatch");
        LogLikelihoodResult out;
        const double t0 = detail::now_s();
        const CovarianceModel model(theta, data_.locs.dim());
        const CovarianceTable table(model, index_, exec_);
        const int nb = backend_.tile_size(data_.total());
        TiledMatrix sigma = assemble_sigma(table, index_, theta.p, rep_, nb, exec_);
        if (backend_.kind == LikelihoodBackend::Kind::DST)
            sigma = dst_truncate(sigma, backend_.keep_fraction);
        const double t1 = detail::now_s();
        out.timings.generation_s = t1 - t0;

        const Eigen::VectorXd z =
            (rep_ == Representation::InterleavedI) ? data_.z : data_.z_block_order();
        try {
            if (backend_.kind == LikelihoodBackend::Kind::TLR) {
                auto tlr = compress(sigma, backend_.eps, exec_);
                auto f = tlr_cholesky(tlr, exec_);
                const double t2 = detail::now_s();
                out.timings.factorization_s = t2 - t1;
                out.logdet = f.logdet;
                out.quadratic = tlr_quadratic_form(f, z);
                out.timings.computation_s = detail::now_s() - t2;
            } else {
                auto f = cholesky(sigma, exec_);
                const double t2 = detail::now_s();
                out.timings.factorization_s = t2 - t1;
                out.logdet = f.logdet;
                out.quadratic = quadratic_form(f, z);
                out.timings.computation_s = detail::now_s() - t2;
            }
        } catch (const not_positive_definite&) {
            out.feasible = false;
            out.value = -std::numeric_limits<double>::infinity();
            return out;
        }
        const double n = static_cast<double>(data_.total());
        out.value = -0.5 * n * std::log(2.0 * 3.14159265358979323846) - 0.5 * out.logdet -
                    0.5 * out.quadratic;
        out.feasible = std::isfinite(out.value);
        return out;
    }

    // Profile log-likelihood of the reduced parameters (variances dropped):
    // each marginal variance is recovered in closed form as
    // sigma_ii^2 = Z_i^T R_ii^-1 Z_i / n from the per-variable correlation
    // matrix, then the full likelihood is evaluated at the recovered
    // variances. For p = 1 this is exactly the profile likelihood.
    struct ProfileResult {
        LogLikelihoodResult loglik;
        std::vector<double> sigma2_hat;
    };

    ProfileResult profile(const ParameterSet& theta_reduced) const {
        ProfileResult out;
        out.sigma2_hat.assign(static_cast<std::size_t>(theta_reduced.p), 1.0);
        const int n = data_.n();
        for (int i = 0; i < theta_reduced.p; ++i) {
            ParameterSet marg = theta_reduced.marginal(i);
            marg.sigma2[0] = 1.0;  // correlation matrix R_ii
            const CovarianceModel model(marg, data_.locs.dim());
            const CovarianceTable table(model, index_, exec_);
            TiledMatrix r =
                assemble_sigma(table, index_, 1, Representation::InterleavedI,
                               std::min<std::int64_t>(kDefaultDenseTile, n), exec_);
            try {
                auto f = cholesky(r, exec_);
                out.sigma2_hat[static_cast<std::size_t>(i)] =
                    quadratic_form(f, data_.variable_values(i)) / n;
            } catch (const not_positive_definite&) {
                out.loglik.feasible = false;
                out.loglik.value = -std::numeric_limits<double>::infinity();
                return out;
            }
        }
        for (double s2 : out.sigma2_hat)
            if (!(s2 > 0.0) || !std::isfinite(s2)) {
                out.loglik.feasible = false;
                out.loglik.value = -std::numeric_limits<double>::infinity();
                return out;
            }
        out.loglik = evaluate(theta_reduced.with_variances(out.sigma2_hat));
        return out;
    }

  private:
    SpatialDataset data_;
    LikelihoodBackend backend_;
    Representation rep_;
    Executor exec_;
    Metric metric_;
    DistanceIndex index_;
};

// One-shot convenience wrapper.
inline double log_likelihood(const ParameterSet& theta, const SpatialDataset& data,
                             const LikelihoodBackend& backend,
                             Representation rep = Representation::InterleavedI,
                             const Executor& exec = Executor::sequential()) {
    return LikelihoodSession(data, backend, rep, exec).evaluate(theta).value;
}

}  // namespace geostat
