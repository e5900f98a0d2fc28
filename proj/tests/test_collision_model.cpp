#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <stdexcept>

#include "mpcta/collision_model.hpp"
#include "oracles.hpp"

using namespace mpcta;

TEST_SUITE("collision-model") {

TEST_CASE("config validation") {
    CHECK_NOTHROW((TreeConfig{2, 1}.validate()));
    CHECK_THROWS_AS((TreeConfig{1, 1}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((TreeConfig{5, 0}.validate()), std::invalid_argument);
    TreeConfig biased{5, 1};
    biased.split_prob = 0.3;
    CHECK_THROWS_AS(biased.validate(), std::invalid_argument);
    CHECK(TreeConfig{5, 3}.channels() == 6);
}

TEST_CASE("child collisions of a single collision") {
    const Pmf two = child_collision_pmf(2);
    CHECK(two.at(0) == doctest::Approx(0.5));
    CHECK(two.at(1) == doctest::Approx(0.5));
    CHECK(two.at(2) == 0.0);
    CHECK(child_collision_pmf(3).at(1) == doctest::Approx(1.0));
    CHECK(child_collision_pmf(4).at(1) == doctest::Approx(5.0 / 8.0));
    CHECK(child_collision_pmf(4).at(2) == doctest::Approx(3.0 / 8.0));
    for (int eta = 2; eta <= 12; ++eta) {
        const auto coins = oracle::children_by_coins(eta, 1);
        const Pmf pmf = child_collision_pmf(eta);
        for (int c = 0; c <= 2; ++c) CHECK(pmf.at(c) == doctest::Approx(oracle::to_double(coins[static_cast<std::size_t>(c)])).epsilon(1e-14));
    }
}

TEST_CASE("children of a partition convolve the single-collision pmfs") {
    const Pmf pmf = children_given_partition(Partition({2, 2}));
    CHECK(pmf.at(0) == doctest::Approx(0.25));
    CHECK(pmf.at(1) == doctest::Approx(0.5));
    CHECK(pmf.at(2) == doctest::Approx(0.25));
}

TEST_CASE("children given contenders match coin enumeration") {
    for (int k = 2; k <= 7; ++k) {
        for (int x = 1; 2 * x <= k && x <= 3; ++x) {
            const auto coins = oracle::children_by_coins(k, x);
            const auto& row = children_given_contenders(k, x);
            REQUIRE(row.size() == coins.size());
            double sum = 0;
            for (std::size_t c = 0; c < row.size(); ++c) {
                CHECK(row[c] == doctest::Approx(oracle::to_double(coins[c])).epsilon(1e-13));
                sum += row[c];
                CHECK(collisions_given_prev_and_k(static_cast<int>(c), x, k) == row[c]);
            }
            CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
    CHECK_THROWS_AS(children_given_contenders(3, 2), std::domain_error);
}

TEST_CASE("contenders given collisions match ball enumeration") {
    for (int n = 2; n <= 6; ++n) {
        for (int m = 0; m <= 3; ++m) {
            const auto counts = oracle::level_counts(n, m);
            for (int x = 0; x <= max_collisions(m, n); ++x) {
                oracle::Int with_x = 0;
                for (const auto& [key, c] : counts.x_k) {
                    if (key.first == x) with_x += c;
                }
                if (with_x == 0) {
                    CHECK_THROWS_AS(contenders_given_collisions_row(x, m, n), std::domain_error);
                    continue;
                }
                const auto row = contenders_given_collisions_row(x, m, n);
                for (int k = 0; k <= n; ++k) {
                    const auto it = counts.x_k.find({x, k});
                    const oracle::Rational expect = it == counts.x_k.end() ? oracle::Rational(0) : oracle::Rational(it->second, with_x);
                    CHECK(row[static_cast<std::size_t>(k)] == doctest::Approx(oracle::to_double(expect)).epsilon(1e-13));
                    CHECK(contenders_given_collisions(k, x, m, n) == row[static_cast<std::size_t>(k)]);
                }
            }
        }
    }
}

TEST_CASE("one-step transition matches ball enumeration") {
    for (int n = 2; n <= 6; ++n) {
        for (int m = 1; m <= 3; ++m) {
            const auto counts = oracle::level_counts(n, m);
            for (int xp = 0; xp <= max_collisions(m - 1, n); ++xp) {
                oracle::Int with_prev = 0;
                for (const auto& [key, c] : counts.prev_next) {
                    if (key.first == xp) with_prev += c;
                }
                if (with_prev == 0) continue;
                double sum = 0;
                for (int x = 0; x <= max_collisions(m, n); ++x) {
                    const auto it = counts.prev_next.find({xp, x});
                    const oracle::Rational expect = it == counts.prev_next.end() ? oracle::Rational(0) : oracle::Rational(it->second, with_prev);
                    const double got = collision_transition(x, xp, m, n);
                    CHECK(got == doctest::Approx(oracle::to_double(expect)).epsilon(1e-12));
                    sum += got;
                }
                CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("transition matrix rows are stochastic") {
    for (int n : {2, 5, 12, 30}) {
        for (int m = 1; m <= 6; ++m) {
            const auto matrix = collision_transition_matrix(m, n);
            const Pmf prev = marginal_collisions(m - 1, n);
            for (std::size_t xp = 0; xp < matrix.size(); ++xp) {
                double sum = 0;
                for (double v : matrix[xp]) {
                    CHECK(v >= 0.0);
                    sum += v;
                }
                if (prev.at(static_cast<int>(xp)) > 0) CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("zero collisions is absorbing") {
    CHECK(collision_transition(0, 0, 3, 10) == 1.0);
    CHECK(collision_transition(1, 0, 3, 10) == 0.0);
}

TEST_CASE("exact marginals") {
    CHECK(marginal_collisions(0, 7).at(1) == 1.0);
    const Pmf two = marginal_collisions(3, 2);
    CHECK(two.at(1) == doctest::Approx(1.0 / 8.0));
    CHECK(two.at(0) == doctest::Approx(7.0 / 8.0));
    for (int n = 2; n <= 6; ++n) {
        for (int m = 1; m <= 3; ++m) {
            const auto counts = oracle::level_counts(n, m);
            const Pmf pmf = marginal_collisions(m, n);
            CHECK(pmf.total() == doctest::Approx(1.0).epsilon(1e-12));
            for (int x = 0; x <= n / 2; ++x) {
                oracle::Int c = 0;
                for (const auto& [key, v] : counts.x_k) {
                    if (key.first == x) c += v;
                }
                CHECK(pmf.at(x) == doctest::Approx(oracle::to_double(oracle::Rational(c, counts.total))).epsilon(1e-13));
            }
        }
    }
    for (int m = 0; m <= 20; ++m) CHECK(marginal_collisions(m, 40).total() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("max collisions per level") {
    CHECK(max_collisions(0, 60) == 1);
    CHECK(max_collisions(3, 60) == 8);
    CHECK(max_collisions(10, 60) == 30);
    CHECK(max_collisions(10, 7) == 3);
}

TEST_CASE("children cache round trip") {
    children_given_contenders(9, 3);
    const auto file = std::filesystem::temp_directory_path() / "mpcta_children_cache_test.bin";
    save_children_cache(file);
    const std::size_t before = children_cache_size();
    CHECK(before > 0);
    CHECK(load_children_cache(file));
    CHECK(children_cache_size() == before);
    std::filesystem::remove(file);
    CHECK_FALSE(load_children_cache(file));
}

}
