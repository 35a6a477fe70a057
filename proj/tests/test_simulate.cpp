#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "geostat/experiments.hpp"
#include "geostat/simulate.hpp"

using namespace geostat;

namespace {

ParameterSet fig7_theta(double beta = 0.5) {
    Eigen::MatrixXd b(2, 2);
    b << 1.0, beta, beta, 1.0;
    return ParameterSet({1.0, 1.0}, 0.2, {0.5, 1.0}, b);
}

}  // namespace

TEST_CASE("simulation is deterministic in the seed") {
    auto theta = fig7_theta();
    auto locs = generate_locations(LocationKind::Grid, 64, 0);
    auto a = simulate_field(theta, locs, 7);
    auto b = simulate_field(theta, locs, 7);
    auto c = simulate_field(theta, locs, 8);
    CHECK((a.z - b.z).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.z - c.z).cwiseAbs().maxCoeff() > 0.0);
    // thread count does not change the field
    auto d = simulate_field(theta, locs, 7, Executor::with_threads(2));
    CHECK((a.z - d.z).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("degenerate variance collapses the field") {
    Eigen::MatrixXd b(2, 2);
    b << 1.0, 0.5, 0.5, 1.0;
    ParameterSet theta({1e-10, 1e-10}, 0.2, {0.5, 1.0}, b);
    auto locs = generate_locations(LocationKind::Grid, 256, 0);
    auto field = simulate_field(theta, locs, 3);
    CHECK(field.z.cwiseAbs().maxCoeff() <= 1e-4);
}

TEST_CASE("sample covariance over replicates matches Sigma(theta)") {
    auto theta = fig7_theta();
    auto locs = generate_locations(LocationKind::UniformRandom, 4, 5);
    const auto sigma =
        assemble_sigma(theta, locs, Representation::InterleavedI, 8).to_dense();
    const int reps = 2000;
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(8, 8);
    for (int r = 0; r < reps; ++r) {
        auto f = simulate_field(theta, locs, 1000 + static_cast<std::uint64_t>(r));
        acc.noalias() += f.z * f.z.transpose();
    }
    acc /= reps;
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j) {
            // standard error of a sample covariance entry
            const double se =
                std::sqrt((sigma(i, i) * sigma(j, j) + sigma(i, j) * sigma(i, j)) / reps);
            CHECK(std::fabs(acc(i, j) - sigma(i, j)) <= 3.0 * se + 1e-12);
        }
}

TEST_CASE("smoothness ordering shows in nearest-neighbor increments") {
    // nu_22 = 1 makes Z_2 smoother than Z_1 (nu_11 = 0.5): the mean squared
    // increment at the smallest grid lag, relative to the variance, is
    // smaller for the smoother field
    auto theta = fig7_theta();
    auto locs = generate_locations(LocationKind::Grid, 1600, 0);
    const int m = 40;
    double inc[2] = {0, 0}, var[2] = {0, 0};
    auto field = simulate_field(theta, locs, 11);
    for (int v = 0; v < 2; ++v) {
        int count = 0;
        for (int y = 0; y < m; ++y)
            for (int x = 0; x + 1 < m; ++x) {
                const double d =
                    field.value(y * m + x + 1, v) - field.value(y * m + x, v);
                inc[v] += d * d;
                ++count;
            }
        inc[v] /= count;
        for (int i = 0; i < m * m; ++i) var[v] += field.value(i, v) * field.value(i, v);
        var[v] /= m * m;
    }
    CHECK(inc[1] / var[1] < inc[0] / var[0]);
}

TEST_CASE("strong colocated dependence shows in the empirical correlation") {
    auto theta = fig7_theta(0.99);
    const double rho = colocated_correlation(theta, 0, 1, 2);
    auto locs = generate_locations(LocationKind::Grid, 1600, 0);
    auto field = simulate_field(theta, locs, 13);
    double s11 = 0, s22 = 0, s12 = 0;
    for (int l = 0; l < field.n(); ++l) {
        s11 += field.value(l, 0) * field.value(l, 0);
        s22 += field.value(l, 1) * field.value(l, 1);
        s12 += field.value(l, 0) * field.value(l, 1);
    }
    const double corr = s12 / std::sqrt(s11 * s22);
    CHECK(std::fabs(corr - rho) <= 0.1);
}

TEST_CASE("experiment 1 at toy scale: identical config gives identical tables") {
    ExperimentConfig cfg;
    cfg.id = 1;
    cfg.replicates = 2;
    cfg.n = 100;
    cfg.n_pred = 20;
    cfg.theta = fig7_theta();
    cfg.theta.range = 0.09;
    cfg.beta_grid = {0.0, 0.8};
    cfg.seed = 5;
    cfg.threads = 2;
    auto t1 = run_experiment(cfg);
    auto t2 = run_experiment(cfg);
    CHECK(t1.to_csv() == t2.to_csv());
    CHECK(t1.rows.size() == 4);
    REQUIRE(t1.header.size() == t1.rows[0].size());
}

TEST_CASE("experiment 2 at toy scale produces one row per fit") {
    ExperimentConfig cfg;
    cfg.id = 2;
    cfg.replicates = 1;
    cfg.n = 100;
    cfg.n_pred = 0;
    cfg.theta = fig7_theta();
    cfg.a_grid = {0.09};
    cfg.backends = {LikelihoodBackend::exact(), LikelihoodBackend::tlr(1e-7, 32)};
    cfg.fit_max_evals = 40;
    cfg.fit_warm_start_n = 0;
    cfg.seed = 2;
    cfg.threads = 2;
    auto t = run_experiment(cfg);
    CHECK(t.rows.size() == 2);
    CHECK(t.header.size() == t.rows[0].size());
    // the backend column reports the parsed names
    CHECK(t.rows[0][1] == "exact");
    CHECK(t.rows[1][1].substr(0, 4) == "tlr:");
}
