#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "geostat/predict.hpp"
#include "geostat/simulate.hpp"
#include "support/oracles.hpp"

using namespace geostat;

TEST_CASE("mspe arithmetic") {
    Eigen::MatrixXd pred(3, 2), truth(3, 2);
    pred << 1, 2, 3, 4, 5, 6;
    truth = pred;
    auto [per, avg] = mspe(pred, truth);
    CHECK(per[0] == 0.0);
    CHECK(per[1] == 0.0);
    CHECK(avg == 0.0);

    // single location, single variable: MSPE = e^2
    Eigen::MatrixXd p1(1, 1), t1(1, 1);
    p1 << 2.5;
    t1 << 1.0;
    auto [per1, avg1] = mspe(p1, t1);
    CHECK(per1[0] == doctest::Approx(2.25));
    CHECK(avg1 == doctest::Approx(2.25));

    // the average is the arithmetic mean of the per-variable values
    CHECK(0.5 * (0.000189 + 0.000261) == doctest::Approx(0.000225));

    CHECK_THROWS_AS(mspe(pred, Eigen::MatrixXd::Zero(2, 2)), validation_error);
}

TEST_CASE("cokriging interpolates exactly at observed sites") {
    auto theta = oracle::random_parameters(2, 31);
    auto locs = generate_locations(LocationKind::UniformRandom, 24, 5);
    auto data = simulate_field(theta, locs, 7);
    std::vector<Location> t{locs[3], locs[17]};
    auto pred = cokrige(theta, data, LocationSet(t));
    for (int v = 0; v < 2; ++v) {
        CHECK(pred(0, v) == doctest::Approx(data.value(3, v)).epsilon(1e-8));
        CHECK(pred(1, v) == doctest::Approx(data.value(17, v)).epsilon(1e-8));
    }
}

TEST_CASE("zero data predicts zero, and prediction is linear in Z") {
    auto theta = oracle::random_parameters(2, 41);
    auto locs = generate_locations(LocationKind::UniformRandom, 16, 6);
    auto targets = generate_locations(LocationKind::UniformRandom, 5, 99);
    SpatialDataset zero(locs, Eigen::VectorXd::Zero(32), 2);
    CHECK(cokrige(theta, zero, targets).cwiseAbs().maxCoeff() == 0.0);

    auto data = simulate_field(theta, locs, 12);
    SpatialDataset scaled(locs, 2.5 * data.z, 2);
    auto p1 = cokrige(theta, data, targets);
    auto p2 = cokrige(theta, scaled, targets);
    CHECK((p2 - 2.5 * p1).cwiseAbs().maxCoeff() <= 1e-10 * p1.cwiseAbs().maxCoeff());
}

TEST_CASE("cokriging matches the explicit-inverse oracle") {
    for (int p : {1, 2, 3}) {
        auto theta = oracle::random_parameters(p, 50 + p);
        auto data = oracle::random_dataset(theta, 8, 60 + p);
        auto targets = generate_locations(LocationKind::UniformRandom, 4, 70 + p);
        auto got = cokrige(theta, data, targets);
        auto want = oracle::cokrige(theta, data, targets);
        CHECK((got - want).cwiseAbs().maxCoeff() <= 1e-8 * (1.0 + want.cwiseAbs().maxCoeff()));
    }
}

TEST_CASE("representation II and TLR backends give the same predictions") {
    auto theta = oracle::random_parameters(2, 83);
    auto locs = generate_locations(LocationKind::Grid, 100, 0);
    auto data = simulate_field(theta, locs, 19).morton_ordered();
    auto targets = generate_locations(LocationKind::UniformRandom, 6, 23);
    auto p_exact = cokrige(theta, data, targets);
    auto p_rep2 =
        cokrige(theta, data, targets, LikelihoodBackend::exact(), Representation::BlockII);
    CHECK((p_exact - p_rep2).cwiseAbs().maxCoeff() <= 1e-10);
    auto p_tlr = cokrige(theta, data, targets, LikelihoodBackend::tlr(1e-9, 32));
    CHECK((p_exact - p_tlr).cwiseAbs().maxCoeff() <= 1e-5 * (1.0 + p_exact.cwiseAbs().maxCoeff()));
}

TEST_CASE("prediction variance matches the explicit formula") {
    auto theta = oracle::random_parameters(2, 71);
    auto data = oracle::random_dataset(theta, 10, 72);
    auto targets = generate_locations(LocationKind::UniformRandom, 3, 73);
    auto [pred, var] = cokrige_with_variance(theta, data, targets);
    const Eigen::MatrixXd inv =
        oracle::dense_sigma(theta, data.locs, Representation::InterleavedI).inverse();
    for (int t = 0; t < 3; ++t) {
        const Eigen::MatrixXd c0 =
            oracle::dense_c0(theta, data.locs, targets[t], Representation::InterleavedI);
        const Eigen::MatrixXd m = oracle::colocated(theta, 2) - c0.transpose() * inv * c0;
        for (int v = 0; v < 2; ++v) {
            CHECK(var(t, v) == doctest::Approx(m(v, v)).epsilon(1e-7));
            CHECK(var(t, v) >= -1e-10);
        }
    }
}
