#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "geostat/errors.hpp"
#include "geostat/geometry.hpp"
#include "geostat/specfun.hpp"

namespace geostat {

// Parameters of the parsimonious multivariate Matern cross-covariance:
// p marginal variances sigma2_ii, one shared spatial range a, p marginal
// smoothnesses nu_ii, and a symmetric positive definite matrix of latent
// colocated correlations beta with unit diagonal. Cross smoothnesses are
// nu_ij = (nu_ii + nu_jj) / 2; the induced colocated correlations rho_ij
// are derived, not free.
struct ParameterSet {
    int p = 1;
    std::vector<double> sigma2;  // p marginal variances
    double range = 1.0;          // shared spatial range a
    std::vector<double> nu;      // p marginal smoothnesses
    Eigen::MatrixXd beta;        // p x p, symmetric, unit diagonal

    ParameterSet() = default;
    ParameterSet(std::vector<double> sigma2_, double range_, std::vector<double> nu_,
                 Eigen::MatrixXd beta_)
        : p(static_cast<int>(sigma2_.size())),
          sigma2(std::move(sigma2_)),
          range(range_),
          nu(std::move(nu_)),
          beta(std::move(beta_)) {
        validate();
    }

    static ParameterSet univariate(double sigma2_, double range_, double nu_) {
        return ParameterSet({sigma2_}, range_, {nu_}, Eigen::MatrixXd::Ones(1, 1));
    }

    // Canonical flat ordering: sigma2_11..sigma2_pp, a, nu_11..nu_pp, then
    // beta upper triangle in row-major order. For p = 2 this is
    // (sigma11^2, sigma22^2, a, nu11, nu22, beta12).
    static int flat_size(int p) { return 2 * p + 1 + p * (p - 1) / 2; }

    static ParameterSet from_flat(const std::vector<double>& v, int p) {
        if (static_cast<int>(v.size()) != flat_size(p))
            throw validation_error("ParameterSet: expected " + std::to_string(flat_size(p)) +
                                   " parameters for p=" + std::to_string(p) + ", got " +
                                   std::to_string(v.size()));
        std::vector<double> s2(v.begin(), v.begin() + p);
        double a = v[static_cast<std::size_t>(p)];
        std::vector<double> nus(v.begin() + p + 1, v.begin() + 2 * p + 1);
        Eigen::MatrixXd b = Eigen::MatrixXd::Identity(p, p);
        int k = 2 * p + 1;
        for (int i = 0; i < p; ++i)
            for (int j = i + 1; j < p; ++j) {
                b(i, j) = b(j, i) = v[static_cast<std::size_t>(k++)];
            }
        return ParameterSet(std::move(s2), a, std::move(nus), std::move(b));
    }

    std::vector<double> to_flat() const {
        std::vector<double> v;
        v.reserve(static_cast<std::size_t>(flat_size(p)));
        v.insert(v.end(), sigma2.begin(), sigma2.end());
        v.push_back(range);
        v.insert(v.end(), nu.begin(), nu.end());
        for (int i = 0; i < p; ++i)
            for (int j = i + 1; j < p; ++j) v.push_back(beta(i, j));
        return v;
    }

    // Marginal (univariate) parameters of variable i.
    ParameterSet marginal(int i) const {
        return univariate(sigma2[static_cast<std::size_t>(i)], range,
                          nu[static_cast<std::size_t>(i)]);
    }

    ParameterSet with_variances(const std::vector<double>& s2) const {
        ParameterSet out = *this;
        out.sigma2 = s2;
        out.validate();
        return out;
    }

    bool beta_positive_definite() const {
        Eigen::LLT<Eigen::MatrixXd> llt(beta);
        return llt.info() == Eigen::Success;
    }

    void validate() const {
        if (p < 1) throw validation_error("ParameterSet: p must be >= 1");
        if (static_cast<int>(sigma2.size()) != p || static_cast<int>(nu.size()) != p)
            throw validation_error("ParameterSet: sigma2/nu must have length p");
        for (double s : sigma2)
            if (!(s > 0.0) || !std::isfinite(s))
                throw validation_error("ParameterSet: marginal variances must be positive");
        if (!(range > 0.0) || !std::isfinite(range))
            throw validation_error("ParameterSet: range must be positive");
        for (double v : nu)
            if (!(v > 0.0) || !std::isfinite(v))
                throw validation_error("ParameterSet: smoothnesses must be positive");
        if (beta.rows() != p || beta.cols() != p)
            throw validation_error("ParameterSet: beta must be p x p");
        for (int i = 0; i < p; ++i) {
            if (beta(i, i) != 1.0) throw validation_error("ParameterSet: beta diagonal must be 1");
            for (int j = 0; j < i; ++j)
                if (beta(i, j) != beta(j, i))
                    throw validation_error("ParameterSet: beta must be symmetric");
        }
        if (!beta_positive_definite())
            throw validation_error("ParameterSet: beta must be positive definite");
    }
};

// Colocated correlation rho_ij induced by the latent beta_ij:
//   rho_ij = beta_ij sqrt(G(nu_ii+d/2)/G(nu_ii)) sqrt(G(nu_jj+d/2)/G(nu_jj))
//            * G(nu_ij) / G(nu_ij + d/2),
// the unique form with rho_ii = 1 exactly.
inline double colocated_correlation(const ParameterSet& theta, int i, int j, int d) {
    if (i == j) return 1.0;
    const double ni = theta.nu[static_cast<std::size_t>(i)];
    const double nj = theta.nu[static_cast<std::size_t>(j)];
    const double nij = 0.5 * (ni + nj);
    const double hd = 0.5 * d;
    return theta.beta(i, j) * std::sqrt(gamma_fn(ni + hd) / gamma_fn(ni)) *
           std::sqrt(gamma_fn(nj + hd) / gamma_fn(nj)) * gamma_fn(nij) / gamma_fn(nij + hd);
}

// Matern correlation shape M_nu(r) = r^nu K_nu(r) / (2^(nu-1) Gamma(nu)),
// with the analytic limit M_nu(0) = 1.
inline double matern_shape(double nu, double r) {
    if (r == 0.0) return 1.0;
    const double k = bessel_k(nu, r);
    if (k == 0.0) return 0.0;
    return std::pow(r, nu) * k / (std::pow(2.0, nu - 1.0) * gamma_fn(nu));
}

// C_ij(h) of the parsimonious multivariate Matern.
inline double matern_cross_cov(const ParameterSet& theta, int i, int j, double h, int d) {
    const double rho = colocated_correlation(theta, i, j, d);
    const double ss = std::sqrt(theta.sigma2[static_cast<std::size_t>(i)] *
                                theta.sigma2[static_cast<std::size_t>(j)]);
    const double nij =
        0.5 * (theta.nu[static_cast<std::size_t>(i)] + theta.nu[static_cast<std::size_t>(j)]);
    return rho * ss * matern_shape(nij, h / theta.range);
}

// Evaluation cache for one (theta, d): the per-pair constants of C_ij are
// hoisted so the hot path is a single bessel evaluation per (pair, distance).
class CovarianceModel {
  public:
    CovarianceModel(const ParameterSet& theta, int d) : theta_(theta), d_(d) {
        const int p = theta.p;
        amp_.resize(static_cast<std::size_t>(p) * p);
        nu_ij_.resize(static_cast<std::size_t>(p) * p);
        norm_.resize(static_cast<std::size_t>(p) * p);
        for (int i = 0; i < p; ++i)
            for (int j = 0; j < p; ++j) {
                const double rho = colocated_correlation(theta, i, j, d);
                const double ss = std::sqrt(theta.sigma2[static_cast<std::size_t>(i)] *
                                            theta.sigma2[static_cast<std::size_t>(j)]);
                const double nij = 0.5 * (theta.nu[static_cast<std::size_t>(i)] +
                                          theta.nu[static_cast<std::size_t>(j)]);
                amp_[idx(i, j)] = rho * ss;
                nu_ij_[idx(i, j)] = nij;
                norm_[idx(i, j)] = 1.0 / (std::pow(2.0, nij - 1.0) * gamma_fn(nij));
            }
    }

    int p() const { return theta_.p; }
    int d() const { return d_; }
    const ParameterSet& theta() const { return theta_; }

    double operator()(int i, int j, double h) const {
        const std::size_t q = idx(i, j);
        if (h == 0.0) return amp_[q];
        const double r = h / theta_.range;
        const double k = bessel_k(nu_ij_[q], r);
        if (k == 0.0) return 0.0;
        return amp_[q] * std::pow(r, nu_ij_[q]) * k * norm_[q];
    }

    // p x p colocated block C(0; theta).
    Eigen::MatrixXd colocated_block() const {
        Eigen::MatrixXd c(theta_.p, theta_.p);
        for (int i = 0; i < theta_.p; ++i)
            for (int j = 0; j < theta_.p; ++j) c(i, j) = amp_[idx(i, j)];
        return c;
    }

  private:
    std::size_t idx(int i, int j) const {
        return static_cast<std::size_t>(i) * theta_.p + static_cast<std::size_t>(j);
    }
    ParameterSet theta_;
    int d_;
    std::vector<double> amp_, nu_ij_, norm_;
};

// The two orderings of Sigma from the paper: Representation I interleaves
// the p variables location by location (block (l, r) is the p x p matrix
// C(s_l - s_r)); Representation II stacks variable blocks (block (i, j) is
// the n x n matrix {C_ij(s_l - s_r)}).
enum class Representation { InterleavedI, BlockII };

inline std::string to_string(Representation rep) {
    return rep == Representation::InterleavedI ? "I" : "II";
}

// Maps a global row index of Sigma to (variable, location).
struct RepIndexer {
    Representation rep;
    int p, n;
    int variable(std::int64_t g) const {
        return rep == Representation::InterleavedI ? static_cast<int>(g % p)
                                                   : static_cast<int>(g / n);
    }
    int location(std::int64_t g) const {
        return rep == Representation::InterleavedI ? static_cast<int>(g / p)
                                                   : static_cast<int>(g % n);
    }
};

// Cross-covariance block c0 between a target location s0 and all data
// locations: pn x p, rows ordered consistently with the representation.
inline Eigen::MatrixXd assemble_c0(const ParameterSet& theta, const LocationSet& locs,
                                   const Location& s0, Representation rep,
                                   Metric metric = Metric::Euclidean) {
    if (s0.dim() != locs.dim()) throw validation_error("assemble_c0: dimension mismatch");
    const int n = locs.size();
    const int p = theta.p;
    const CovarianceModel model(theta, locs.dim());
    Eigen::MatrixXd c0(static_cast<Eigen::Index>(p) * n, p);
    for (int r = 0; r < n; ++r) {
        const double h = distance(s0, locs[r], metric);
        for (int i = 0; i < p; ++i) {
            const std::int64_t g = (rep == Representation::InterleavedI)
                                       ? static_cast<std::int64_t>(r) * p + i
                                       : static_cast<std::int64_t>(i) * n + r;
            for (int j = 0; j < p; ++j) c0(g, j) = model(i, j, h);
        }
    }
    return c0;
}

}  // namespace geostat
