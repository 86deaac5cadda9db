#include <vector>

#include "doctest.h"
#include "tmpred/rng.hpp"
#include "tmpred/tm.hpp"

using namespace tmpred;

namespace {

TrafficSeries make_series(int n_nodes, std::size_t len, std::uint64_t seed,
                          std::int64_t t0 = 0) {
    Rng rng(seed);
    std::vector<TrafficVector> vecs;
    const std::size_t flows = static_cast<std::size_t>(n_nodes) * n_nodes;
    for (std::size_t t = 0; t < len; ++t) {
        TrafficVector v;
        v.timestamp = t0 + static_cast<std::int64_t>(t);
        v.values.resize(flows);
        for (double& x : v.values) x = rng.uniform(0.0, 10.0);
        vecs.push_back(std::move(v));
    }
    return TrafficSeries(n_nodes, 15, std::move(vecs));
}

}  // namespace

TEST_CASE("vectorize places entry (i,j) at index i*N+j") {
    // 2x2 with distinct entries, so the layout is visible directly.
    auto m = TrafficMatrix::create(2, {1.0, 2.0, 3.0, 4.0}, 7);
    auto v = vectorize(m);
    CHECK(v.timestamp == 7);
    REQUIRE(v.values.size() == 4);
    CHECK(v.values[0] == 1.0);  // (0,0)
    CHECK(v.values[1] == 2.0);  // (0,1)
    CHECK(v.values[2] == 3.0);  // (1,0)
    CHECK(v.values[3] == 4.0);  // (1,1)
    CHECK(m.at(1, 0) == 3.0);
}

TEST_CASE("devectorize inverts vectorize") {
    Rng rng(5);
    std::vector<double> vol(9);
    for (double& x : vol) x = rng.uniform(0.0, 100.0);
    auto m = TrafficMatrix::create(3, vol, 42);
    auto back = devectorize(vectorize(m), 3);
    CHECK(back.n_nodes == m.n_nodes);
    CHECK(back.timestamp == m.timestamp);
    CHECK(back.volumes == m.volumes);
}

TEST_CASE("matrix validation rejects bad input") {
    CHECK_THROWS_AS(TrafficMatrix::create(0, {}, 0), DimensionError);
    CHECK_THROWS_AS(TrafficMatrix::create(2, {1.0, 2.0, 3.0}, 0), DimensionError);
    CHECK_THROWS_AS(TrafficMatrix::create(1, {-1.0}, 0), DataError);
    CHECK_THROWS_AS(TrafficMatrix::create(1, {std::nan("")}, 0), DataError);
}

TEST_CASE("series rejects inconsistent shape and broken timestamps") {
    std::vector<TrafficVector> vecs;
    vecs.push_back({{1.0, 2.0, 3.0, 4.0}, 0});
    vecs.push_back({{1.0, 2.0, 3.0}, 1});
    CHECK_THROWS_AS(TrafficSeries(2, 15, std::move(vecs)), DimensionError);

    std::vector<TrafficVector> gap;
    gap.push_back({{1.0}, 0});
    gap.push_back({{2.0}, 2});
    CHECK_THROWS_AS(TrafficSeries(1, 15, std::move(gap)), DataError);
}

TEST_CASE("window construction yields every stride-1 alignment") {
    const int W = 4;
    auto s = make_series(2, 20, 99);
    auto ds = build_windows(s, W);

    CHECK(ds.sample_count() == 20 - W);
    CHECK(ds.window() == W);
    CHECK(ds.n_flows() == 4);

    // Each sample's input is the W vectors right before its target, and
    // consecutive samples shift by exactly one slot.
    for (std::size_t k = 0; k < ds.sample_count(); ++k) {
        auto in = ds.input(k);
        REQUIRE(in.size() == static_cast<std::size_t>(W));
        for (int w = 0; w < W; ++w) {
            CHECK(in[w].timestamp == static_cast<std::int64_t>(k) + w);
            CHECK(in[w].values == s[k + w].values);
        }
        CHECK(ds.target(k).timestamp == static_cast<std::int64_t>(k) + W);
        CHECK(ds.target(k).values == s[k + W].values);
    }
}

TEST_CASE("window construction needs strictly more data than the window") {
    auto s = make_series(2, 5, 7);
    CHECK_THROWS_AS(build_windows(s, 5), InsufficientDataError);
    CHECK(build_windows(s, 4).sample_count() == 1);
    CHECK_THROWS_AS(build_windows(s, 0), ConfigError);
}

TEST_CASE("chronological split keeps order and boundary") {
    auto s = make_series(3, 12, 13);
    auto [train, test] = split_chronological(s, 8);
    CHECK(train.size() == 8);
    CHECK(test.size() == 4);
    CHECK(train[0].values == s[0].values);
    CHECK(train[7].values == s[7].values);
    CHECK(test[0].values == s[8].values);
    CHECK(test[0].timestamp == s[8].timestamp);
    CHECK(test[3].values == s[11].values);

    CHECK_THROWS_AS(split_chronological(s, 0), ConfigError);
    CHECK_THROWS_AS(split_chronological(s, 12), ConfigError);
}

TEST_CASE("normalizer fits max over the training range only") {
    std::vector<TrafficVector> vecs;
    for (int t = 0; t < 6; ++t) {
        vecs.push_back({{static_cast<double>(t + 1)}, t});
    }
    // Largest value (6.0) sits in the tail, outside the fit range.
    TrafficSeries s(1, 15, std::move(vecs));
    auto norm = fit_normalizer(s, 0, 4);
    CHECK(norm.scale() == doctest::Approx(4.0));
    CHECK(norm.normalize(2.0) == doctest::Approx(0.5));
    CHECK(norm.denormalize(norm.normalize(3.7)) == doctest::Approx(3.7));

    auto scaled = norm.normalize(s);
    CHECK(scaled[5].values[0] == doctest::Approx(1.5));  // tail may exceed 1
    CHECK(scaled[5].timestamp == s[5].timestamp);
}

TEST_CASE("normalizer rejects degenerate fit ranges") {
    std::vector<TrafficVector> vecs;
    for (int t = 0; t < 4; ++t) vecs.push_back({{0.0, 0.0, 0.0, 0.0}, t});
    TrafficSeries s(2, 15, std::move(vecs));
    CHECK_THROWS_AS(fit_normalizer(s, 0, 4), DegenerateError);
    CHECK_THROWS_AS(Normalizer(0.0), DegenerateError);
    CHECK_THROWS_AS(Normalizer(-2.0), DegenerateError);
}

TEST_CASE("subseries preserves content and timestamps") {
    auto s = make_series(2, 10, 3, 100);
    auto part = s.subseries(4, 9);
    CHECK(part.size() == 5);
    CHECK(part[0].timestamp == 104);
    CHECK(part[0].values == s[4].values);
    CHECK(part[4].values == s[8].values);
    CHECK_THROWS_AS(s.subseries(3, 11), DimensionError);
}
