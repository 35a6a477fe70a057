#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <vector>

#include "geostat/geometry.hpp"

using namespace geostat;

TEST_CASE("euclidean distance") {
    CHECK(euclidean_distance(Location(0, 0), Location(0, 0)) == 0.0);
    CHECK(euclidean_distance(Location(0, 0), Location(3, 4)) == doctest::Approx(5.0));
    CHECK(euclidean_distance(Location(0.1, 0.2), Location(0.4, 0.6)) ==
          doctest::Approx(0.5).epsilon(1e-14));
    CHECK_THROWS_AS(euclidean_distance(Location(0, 0), Location({1.0, 2.0, 3.0})),
                    validation_error);
}

TEST_CASE("great circle distance") {
    CHECK(great_circle_distance(Location(0, 0), Location(0, 0)) == 0.0);
    // antipodal points on the equator
    CHECK(great_circle_distance(Location(0, 0), Location(180, 0)) ==
          doctest::Approx(20015.086796020573).epsilon(1e-12));
    // reference value from an independent haversine evaluation
    CHECK(great_circle_distance(Location(43, 5), Location(65, 24)) ==
          doctest::Approx(3163.2593314383995).epsilon(1e-12));
    CHECK_THROWS_AS(great_circle_distance(Location(0, 95), Location(0, 0)), validation_error);
}

TEST_CASE("distances form a metric on random triples") {
    auto locs = generate_locations(LocationKind::UniformRandom, 60, 7);
    for (int c = 0; c < 200; ++c) {
        const int i = static_cast<int>(rng::mix(1, 0, c) % 60);
        const int j = static_cast<int>(rng::mix(1, 1, c) % 60);
        const int k = static_cast<int>(rng::mix(1, 2, c) % 60);
        const double dij = euclidean_distance(locs[i], locs[j]);
        const double dji = euclidean_distance(locs[j], locs[i]);
        const double dik = euclidean_distance(locs[i], locs[k]);
        const double dkj = euclidean_distance(locs[k], locs[j]);
        CHECK(dij == dji);
        CHECK(dij >= 0.0);
        CHECK(dij <= dik + dkj + 1e-15);
    }
}

TEST_CASE("grid generation") {
    auto g = generate_locations(LocationKind::Grid, 4, 0);
    REQUIRE(g.size() == 4);
    CHECK(g[0] == Location(1.0 / 3, 1.0 / 3));
    CHECK(g[1] == Location(2.0 / 3, 1.0 / 3));
    CHECK(g[2] == Location(1.0 / 3, 2.0 / 3));
    CHECK(g[3] == Location(2.0 / 3, 2.0 / 3));

    // non-square target truncates to the enclosed square grid
    CHECK(generate_locations(LocationKind::Grid, 30, 0).size() == 25);
    CHECK(generate_locations(LocationKind::Grid, 24964, 0).size() == 158 * 158);
}

TEST_CASE("generators are deterministic in the seed") {
    auto a = generate_locations(LocationKind::UniformRandom, 100, 42);
    auto b = generate_locations(LocationKind::UniformRandom, 100, 42);
    auto c = generate_locations(LocationKind::UniformRandom, 100, 43);
    CHECK(a.locations == b.locations);
    CHECK(a.locations != c.locations);

    auto j1 = generate_locations(LocationKind::JitteredGrid, 100, 5);
    auto j2 = generate_locations(LocationKind::JitteredGrid, 100, 5);
    CHECK(j1.locations == j2.locations);
    // jitter stays within 0.4 * spacing of the regular grid
    auto g = generate_locations(LocationKind::Grid, 100, 0);
    for (int i = 0; i < g.size(); ++i) {
        CHECK(std::fabs(j1[i][0] - g[i][0]) <= 0.4 / 11 + 1e-12);
        CHECK(std::fabs(j1[i][1] - g[i][1]) <= 0.4 / 11 + 1e-12);
    }
}

TEST_CASE("duplicate locations are rejected") {
    std::vector<Location> pts{Location(0.1, 0.2), Location(0.3, 0.4), Location(0.1, 0.2)};
    CHECK_THROWS_AS(LocationSet(std::move(pts)), validation_error);
}

TEST_CASE("morton ordering requires 2-D locations") {
    std::vector<Location> pts{Location({0.1, 0.2, 0.3}), Location({0.4, 0.5, 0.6})};
    CHECK_THROWS_AS(morton_permutation(LocationSet(std::move(pts))), validation_error);
}

TEST_CASE("morton keys follow the Z-curve on a 2x2 cell") {
    CHECK(morton_key(0, 0, 1) == 0);
    CHECK(morton_key(1, 0, 1) == 1);
    CHECK(morton_key(0, 1, 1) == 2);
    CHECK(morton_key(1, 1, 1) == 3);
}

TEST_CASE("morton permutation of a 4x4 grid matches bit-interleaving oracle") {
    auto locs = generate_locations(LocationKind::Grid, 16, 0);
    auto perm = morton_permutation(locs);
    // brute-force oracle: interleave quantized 2-bit cells and sort
    const std::vector<int> expected{0, 1, 4, 5, 2, 3, 6, 7, 8, 9, 12, 13, 10, 11, 14, 15};
    CHECK(perm == expected);
}

TEST_CASE("morton permutation is a bijection and identity on sorted input") {
    auto locs = generate_locations(LocationKind::UniformRandom, 257, 3);
    auto perm = morton_permutation(locs);
    std::set<int> seen(perm.begin(), perm.end());
    CHECK(static_cast<int>(seen.size()) == locs.size());
    CHECK(*seen.begin() == 0);
    CHECK(*seen.rbegin() == locs.size() - 1);

    auto sorted = apply_permutation(locs, perm, Ordering::Morton);
    auto perm2 = morton_permutation(sorted);
    std::vector<int> identity(perm2.size());
    std::iota(identity.begin(), identity.end(), 0);
    CHECK(perm2 == identity);
}

TEST_CASE("morton ordering keeps aligned 2x2 sub-blocks contiguous on 2^k grids") {
    for (int k = 1; k <= 5; ++k) {
        const int m = 1 << k;
        auto locs = generate_locations(LocationKind::Grid, m * m, 0);
        auto perm = morton_permutation(locs);
        // position of each original index in the morton order
        std::vector<int> pos(perm.size());
        for (std::size_t r = 0; r < perm.size(); ++r) pos[static_cast<std::size_t>(perm[r])] = static_cast<int>(r);
        for (int by = 0; by < m; by += 2)
            for (int bx = 0; bx < m; bx += 2) {
                std::vector<int> block_pos;
                for (int dy = 0; dy < 2; ++dy)
                    for (int dx = 0; dx < 2; ++dx)
                        block_pos.push_back(pos[static_cast<std::size_t>((by + dy) * m + bx + dx)]);
                std::sort(block_pos.begin(), block_pos.end());
                CHECK(block_pos[3] - block_pos[0] == 3);
            }
    }
}
