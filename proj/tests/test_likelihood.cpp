#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "geostat/likelihood.hpp"
#include "geostat/optimize.hpp"
#include "geostat/simulate.hpp"
#include "support/oracles.hpp"

using namespace geostat;

TEST_CASE("backend parsing") {
    CHECK(LikelihoodBackend::parse("exact").kind == LikelihoodBackend::Kind::Exact);
    CHECK(LikelihoodBackend::parse("tlr5").eps == 1e-5);
    CHECK(LikelihoodBackend::parse("tlr7").eps == 1e-7);
    CHECK(LikelihoodBackend::parse("tlr9").eps == 1e-9);
    CHECK(LikelihoodBackend::parse("tlr:1e-4").eps == 1e-4);
    CHECK(LikelihoodBackend::parse("dst:0.4").keep_fraction == 0.4);
    CHECK_THROWS_AS(LikelihoodBackend::parse("magic"), validation_error);
    CHECK_THROWS_AS(LikelihoodBackend::parse("dst:1.5"), validation_error);
}

TEST_CASE("single-observation likelihood is the scalar gaussian density") {
    LocationSet one(std::vector<Location>{Location(0.5, 0.5)});
    auto theta = ParameterSet::univariate(1.0, 0.1, 0.5);
    SpatialDataset data(one, Eigen::VectorXd::Zero(1), 1);
    const double l0 = log_likelihood(theta, data, LikelihoodBackend::exact());
    CHECK(l0 == doctest::Approx(-0.5 * std::log(2.0 * 3.14159265358979323846)).epsilon(1e-12));

    for (double s2 : {0.3, 2.0})
        for (double zv : {-1.2, 0.7}) {
            auto th = ParameterSet::univariate(s2, 0.1, 0.5);
            Eigen::VectorXd z(1);
            z << zv;
            SpatialDataset d1(one, z, 1);
            const double want = -0.5 * std::log(2.0 * 3.14159265358979323846) -
                                0.5 * std::log(s2) - zv * zv / (2.0 * s2);
            CHECK(log_likelihood(th, d1, LikelihoodBackend::exact()) ==
                  doctest::Approx(want).epsilon(1e-12));
        }
}

TEST_CASE("exact likelihood matches the explicit-inverse oracle") {
    for (int p : {1, 2, 3}) {
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            auto theta = oracle::random_parameters(p, 100 * p + seed);
            auto data = oracle::random_dataset(theta, 8, 7 * p + seed);
            const double got = log_likelihood(theta, data, LikelihoodBackend::exact());
            const double want = oracle::log_likelihood(theta, data, Representation::InterleavedI);
            CHECK(got == doctest::Approx(want).epsilon(1e-8));
        }
    }
}

TEST_CASE("representation I and II agree") {
    auto theta = oracle::random_parameters(2, 3);
    auto data = oracle::random_dataset(theta, 40, 4);
    const double l1 = log_likelihood(theta, data, LikelihoodBackend::exact(),
                                     Representation::InterleavedI);
    const double l2 =
        log_likelihood(theta, data, LikelihoodBackend::exact(), Representation::BlockII);
    CHECK(l1 == doctest::Approx(l2).epsilon(1e-12));
}

TEST_CASE("bivariate likelihood decomposes at beta = 0") {
    Eigen::MatrixXd beta = Eigen::MatrixXd::Identity(2, 2);
    ParameterSet theta({1.3, 0.8}, 0.12, {0.6, 1.4}, beta);
    auto locs = generate_locations(LocationKind::UniformRandom, 24, 9);
    auto data = simulate_field(theta, locs, 5);
    const double l_biv = log_likelihood(theta, data, LikelihoodBackend::exact());
    double l_uni = 0.0;
    for (int i = 0; i < 2; ++i) {
        SpatialDataset di(locs, data.variable_values(i), 1);
        l_uni += log_likelihood(theta.marginal(i), di, LikelihoodBackend::exact());
    }
    CHECK(l_biv == doctest::Approx(l_uni).epsilon(1e-8));
}

TEST_CASE("TLR backends track the exact likelihood") {
    Eigen::MatrixXd beta(2, 2);
    beta << 1, 0.5, 0.5, 1;
    ParameterSet theta({1, 1}, 0.09, {0.5, 1.0}, beta);
    auto locs = generate_locations(LocationKind::Grid, 400, 0);
    auto data = simulate_field(theta, locs, 3).morton_ordered();
    const double exact = log_likelihood(theta, data, LikelihoodBackend::exact());
    const double tlr9 = log_likelihood(theta, data, LikelihoodBackend::tlr(1e-9, 64));
    CHECK(std::fabs(tlr9 - exact) <= 1e-3 * std::fabs(exact));
    const double tlr5 = log_likelihood(theta, data, LikelihoodBackend::tlr(1e-5, 64));
    CHECK(std::fabs(tlr5 - exact) <= 1e-1 * std::fabs(exact));
}

TEST_CASE("TLR9 stays within 1e-3 of dense up to N = 4096") {
    Eigen::MatrixXd beta(2, 2);
    beta << 1, 0.5, 0.5, 1;
    ParameterSet theta({1, 1}, 0.09, {0.5, 1.0}, beta);
    auto locs = generate_locations(LocationKind::Grid, 2048, 0);  // N = 2 * 2025
    auto data = simulate_field(theta, locs, 5, Executor::with_threads(2)).morton_ordered();
    const Executor exec = Executor::with_threads(2);
    const double exact = log_likelihood(theta, data, LikelihoodBackend::exact(), Representation::InterleavedI, exec);
    const double tlr9 = log_likelihood(theta, data, LikelihoodBackend::tlr(1e-9, 128), Representation::InterleavedI, exec);
    CHECK(std::fabs(tlr9 - exact) <= 1e-3 * std::fabs(exact));
}

TEST_CASE("likelihood at the truth beats perturbed parameters on average") {
    Eigen::MatrixXd beta(2, 2);
    beta << 1, 0.5, 0.5, 1;
    ParameterSet theta({1, 1}, 0.1, {0.5, 1.0}, beta);
    auto perturbed = theta;
    perturbed.range *= 1.6;
    perturbed.nu[0] *= 1.5;
    auto locs = generate_locations(LocationKind::Grid, 100, 0);
    double mean_gap = 0.0;
    for (std::uint64_t r = 0; r < 10; ++r) {
        auto data = simulate_field(theta, locs, 400 + r);
        mean_gap += log_likelihood(theta, data, LikelihoodBackend::exact()) -
                    log_likelihood(perturbed, data, LikelihoodBackend::exact());
    }
    CHECK(mean_gap / 10.0 > 0.0);
}

TEST_CASE("geodesic metric flows through the distance index") {
    std::vector<Location> pts{Location(43.0, 5.0), Location(44.5, 6.2), Location(46.0, 7.1),
                              Location(47.5, 8.3), Location(49.0, 9.0), Location(50.5, 10.2)};
    LocationSet locs(std::move(pts));
    DistanceIndex index(locs, Metric::GreatCircle);
    CHECK(index.dist(0, 1) == great_circle_distance(locs[0], locs[1]));
    // a kilometer-scale range keeps the covariance well conditioned
    auto theta = ParameterSet::univariate(1.0, 300.0, 0.5);
    Eigen::VectorXd z(6);
    for (int i = 0; i < 6; ++i) z[i] = rng::normal(1, 0, static_cast<std::uint64_t>(i));
    SpatialDataset data(locs, z, 1);
    LikelihoodSession session(data, LikelihoodBackend::exact(), Representation::InterleavedI,
                              Executor::sequential(), Metric::GreatCircle);
    CHECK(std::isfinite(session.evaluate(theta).value));
}

TEST_CASE("fit warns below the recommended sample size") {
    auto theta = ParameterSet::univariate(1.0, 0.1, 0.5);
    auto locs = generate_locations(LocationKind::Grid, 16, 0);
    auto data = simulate_field(theta, locs, 6);
    FitOptions opts;
    opts.max_evals = 20;
    CHECK(fit(data, LikelihoodBackend::exact(), opts).warning);
}

TEST_CASE("fitted TLR9 and exact backends agree on the same data") {
    Eigen::MatrixXd beta(2, 2);
    beta << 1, 0.5, 0.5, 1;
    ParameterSet theta({1, 1}, 0.1, {0.5, 1.0}, beta);
    auto locs = generate_locations(LocationKind::Grid, 400, 0);
    auto data = simulate_field(theta, locs, 23).morton_ordered();
    FitOptions opts;
    opts.start = theta;
    opts.max_evals = 200;
    const auto fe = fit(data, LikelihoodBackend::exact(), opts);
    const auto f9 = fit(data, LikelihoodBackend::tlr(1e-9, 64), opts);
    CHECK(std::fabs(f9.loglik - fe.loglik) <= 1e-3 * std::fabs(fe.loglik));
    const auto te = fe.theta_hat.to_flat();
    const auto t9 = f9.theta_hat.to_flat();
    for (std::size_t k = 0; k < te.size(); ++k)
        CHECK(std::fabs(t9[k] - te[k]) <= 5e-2 * std::max(0.1, std::fabs(te[k])));
}

TEST_CASE("infeasible factorization returns the -inf sentinel, no exception") {
    // a heavily banded DST matrix under strong dependence goes indefinite
    Eigen::MatrixXd beta(2, 2);
    beta << 1, 0.9, 0.9, 1;
    ParameterSet theta({1, 1}, 0.5, {1.0, 2.0}, beta);
    auto locs = generate_locations(LocationKind::Grid, 400, 0);
    auto data = simulate_field(theta, locs, 8).morton_ordered();
    LikelihoodSession session(data, LikelihoodBackend::dst(0.05, 32));
    const auto res = session.evaluate(theta);
    CHECK_FALSE(res.feasible);
    CHECK(res.value == -std::numeric_limits<double>::infinity());
}

TEST_CASE("profile likelihood: diagonal limit recovers ||Z_i||^2 / n") {
    // locations far apart relative to the range make R_ii an identity
    std::vector<Location> pts;
    for (int i = 0; i < 8; ++i) pts.push_back(Location(static_cast<double>(i), 0.0));
    LocationSet locs(std::move(pts));
    Eigen::VectorXd z(16);
    for (int i = 0; i < 16; ++i) z[i] = rng::normal(3, 0, static_cast<std::uint64_t>(i));
    SpatialDataset data(locs, z, 2);
    ParameterSet reduced({1.0, 1.0}, 1e-3, {0.5, 0.5}, Eigen::MatrixXd::Identity(2, 2));
    LikelihoodSession session(data, LikelihoodBackend::exact());
    const auto prof = session.profile(reduced);
    for (int i = 0; i < 2; ++i)
        CHECK(prof.sigma2_hat[static_cast<std::size_t>(i)] ==
              doctest::Approx(data.variable_values(i).squaredNorm() / 8.0).epsilon(1e-12));
}

TEST_CASE("profile optimum agrees with the full-likelihood optimum (p = 1)") {
    auto theta_true = ParameterSet::univariate(1.5, 0.15, 0.8);
    auto locs = generate_locations(LocationKind::UniformRandom, 8, 13);
    auto data = simulate_field(theta_true, locs, 21);
    LikelihoodSession session(data, LikelihoodBackend::exact());

    // grid search over (a, nu); profile recovers sigma2 analytically, the
    // full likelihood scans sigma2 on a fine grid
    double best_prof = -1e300, best_full = -1e300;
    double prof_a = 0, prof_nu = 0, full_a = 0, full_nu = 0, prof_s2 = 0, full_s2 = 0;
    for (double a = 0.05; a <= 0.351; a += 0.05)
        for (double nu = 0.4; nu <= 1.61; nu += 0.2) {
            ParameterSet reduced({1.0}, a, {nu}, Eigen::MatrixXd::Ones(1, 1));
            const auto prof = session.profile(reduced);
            if (prof.loglik.value > best_prof) {
                best_prof = prof.loglik.value;
                prof_a = a;
                prof_nu = nu;
                prof_s2 = prof.sigma2_hat[0];
            }
            for (double s2 = 0.2; s2 <= 4.0; s2 += 0.002) {
                ParameterSet full({s2}, a, {nu}, Eigen::MatrixXd::Ones(1, 1));
                const double l = session.evaluate(full).value;
                if (l > best_full) {
                    best_full = l;
                    full_a = a;
                    full_nu = nu;
                    full_s2 = s2;
                }
            }
        }
    CHECK(prof_a == full_a);
    CHECK(prof_nu == full_nu);
    CHECK(prof_s2 == doctest::Approx(full_s2).epsilon(2e-3));
    CHECK(best_prof == doctest::Approx(best_full).epsilon(1e-4));
}

TEST_CASE("profile is scale equivariant") {
    auto theta_true = ParameterSet::univariate(1.0, 0.1, 0.6);
    auto locs = generate_locations(LocationKind::UniformRandom, 20, 31);
    auto data = simulate_field(theta_true, locs, 17);
    SpatialDataset scaled(locs, 3.0 * data.z, 1);
    LikelihoodSession s1(data, LikelihoodBackend::exact());
    LikelihoodSession s2(scaled, LikelihoodBackend::exact());
    ParameterSet reduced({1.0}, 0.12, {0.7}, Eigen::MatrixXd::Ones(1, 1));
    const auto p1 = s1.profile(reduced);
    const auto p2 = s2.profile(reduced);
    CHECK(p2.sigma2_hat[0] == doctest::Approx(9.0 * p1.sigma2_hat[0]).epsilon(1e-12));

    // the profiled (a, nu) ranking is unchanged by rescaling the data
    std::vector<std::pair<double, double>> grid{{0.08, 0.5}, {0.12, 0.7}, {0.2, 1.1}};
    std::vector<double> f1, f2;
    for (auto [a, nu] : grid) {
        ParameterSet r({1.0}, a, {nu}, Eigen::MatrixXd::Ones(1, 1));
        f1.push_back(s1.profile(r).loglik.value);
        f2.push_back(s2.profile(r).loglik.value);
    }
    for (std::size_t i = 0; i < grid.size(); ++i)
        for (std::size_t j = 0; j < grid.size(); ++j)
            CHECK((f1[i] < f1[j]) == (f2[i] < f2[j]));
}

TEST_CASE("fit: started at the truth, the optimizer never degrades the objective") {
    Eigen::MatrixXd beta(2, 2);
    beta << 1, 0.5, 0.5, 1;
    ParameterSet theta({1, 1}, 0.1, {0.5, 1.0}, beta);
    auto locs = generate_locations(LocationKind::Grid, 100, 0);
    auto data = simulate_field(theta, locs, 11).morton_ordered();
    LikelihoodSession session(data, LikelihoodBackend::exact());
    const auto at_truth = session.profile(theta);

    FitOptions opts;
    opts.start = theta;
    opts.max_evals = 120;
    const auto res = fit(data, LikelihoodBackend::exact(), opts);
    CHECK(res.loglik >= at_truth.loglik.value - 1e-6);
    CHECK(res.theta_hat.p == 2);
    CHECK(static_cast<int>(res.trace.size()) >= res.evaluations - 5);
}

TEST_CASE("fit is deterministic") {
    Eigen::MatrixXd beta(2, 2);
    beta << 1, 0.4, 0.4, 1;
    ParameterSet theta({1, 1}, 0.1, {0.5, 1.0}, beta);
    auto locs = generate_locations(LocationKind::Grid, 64, 0);
    auto data = simulate_field(theta, locs, 2).morton_ordered();
    FitOptions opts;
    opts.max_evals = 60;
    const auto r1 = fit(data, LikelihoodBackend::exact(), opts);
    const auto r2 = fit(data, LikelihoodBackend::exact(), opts);
    CHECK(r1.loglik == r2.loglik);
    CHECK(r1.theta_hat.to_flat() == r2.theta_hat.to_flat());
    CHECK(r1.evaluations == r2.evaluations);
}

TEST_CASE("nelder-mead minimizes a smooth bowl within bounds") {
    Eigen::VectorXd lo = Eigen::VectorXd::Constant(3, -2.0);
    Eigen::VectorXd hi = Eigen::VectorXd::Constant(3, 2.0);
    Eigen::VectorXd x0 = Eigen::VectorXd::Constant(3, 1.5);
    auto f = [](const Eigen::VectorXd& x) {
        return (x[0] - 0.3) * (x[0] - 0.3) + 2.0 * (x[1] + 0.7) * (x[1] + 0.7) +
               0.5 * (x[2] - 1.1) * (x[2] - 1.1);
    };
    NelderMeadOptions opts;
    opts.max_evals = 400;
    auto res = nelder_mead(f, x0, lo, hi, opts);
    CHECK(res.converged);
    CHECK(res.x[0] == doctest::Approx(0.3).epsilon(1e-3));
    CHECK(res.x[1] == doctest::Approx(-0.7).epsilon(1e-3));
    CHECK(res.x[2] == doctest::Approx(1.1).epsilon(1e-3));
    // constrained optimum lands on the boundary
    auto g = [](const Eigen::VectorXd& x) { return (x.array() - 3.0).square().sum(); };
    auto resb = nelder_mead(g, x0, lo, hi, opts);
    CHECK(resb.x[0] == doctest::Approx(2.0).epsilon(1e-6));
}
