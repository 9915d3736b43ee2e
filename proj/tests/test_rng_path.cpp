#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "jumpmil/model.hpp"
#include "jumpmil/path.hpp"
#include "jumpmil/rng.hpp"
#include "jumpmil/util.hpp"

using namespace jumpmil;

TEST_CASE("streams are reproducible and distinct") {
    RngStream a(42, 7), b(42, 7), c(42, 8);
    for (int i = 0; i < 100; ++i) REQUIRE(a.next_u64() == b.next_u64());
    REQUIRE(RngStream(42, 7).next_u64() != c.next_u64());
    REQUIRE(RngStream(43, 7).next_u64() != RngStream(42, 7).next_u64());
}

TEST_CASE("uniform01 stays in [0, 1)") {
    RngStream rng(1, 0);
    for (int i = 0; i < 20000; ++i) {
        const double u = rng.uniform01();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
    }
}

TEST_CASE("normal moments") {
    RngStream rng(2, 0);
    const std::size_t M = 200000;
    double s = 0.0, s2 = 0.0;
    for (std::size_t i = 0; i < M; ++i) {
        const double x = rng.normal();
        s += x;
        s2 += x * x;
    }
    const double mean = s / M, var = s2 / M - mean * mean;
    REQUIRE(std::fabs(mean) < 3.0 / std::sqrt(double(M)));
    REQUIRE(std::fabs(var - 1.0) < 3.0 * std::sqrt(2.0 / double(M)));
}

TEST_CASE("exponential and binomial moments") {
    RngStream rng(3, 0);
    const std::size_t M = 100000;
    double s = 0.0;
    for (std::size_t i = 0; i < M; ++i) s += rng.exponential(2.0);
    REQUIRE(std::fabs(s / M - 0.5) < 3.0 * 0.5 / std::sqrt(double(M)));

    double sb = 0.0;
    for (std::size_t i = 0; i < M; ++i) sb += double(rng.binomial(10, 0.3));
    REQUIRE(std::fabs(sb / M - 3.0) < 3.0 * std::sqrt(2.1 / double(M)));
    REQUIRE_THROWS_AS(rng.binomial(-1, 0.5), std::invalid_argument);
    REQUIRE_THROWS_AS(rng.binomial(3, 1.5), std::invalid_argument);
}

TEST_CASE("thinning produces the right jump counts") {
    const IntensityModel im = make_const_intensity(3.0);
    RngStream rng(4, 0);
    const std::size_t M = 20000;
    double s = 0.0;
    for (std::size_t i = 0; i < M; ++i) {
        const auto j = poisson_jump_times(im, 2.0, rng);
        REQUIRE(std::is_sorted(j.begin(), j.end()));
        for (double t : j) {
            REQUIRE(t > 0.0);
            REQUIRE(t <= 2.0);
        }
        s += double(j.size());
    }
    // N(2) ~ Poisson(6)
    REQUIRE(std::fabs(s / M - 6.0) < 3.0 * std::sqrt(6.0 / double(M)));

    const IntensityModel affine = make_affine_intensity(1.0, 1.0, 1.0);
    double sa = 0.0;
    for (std::size_t i = 0; i < M; ++i) sa += double(poisson_jump_times(affine, 1.0, rng).size());
    REQUIRE(std::fabs(sa / M - 1.5) < 3.0 * std::sqrt(1.5 / double(M)));
}

TEST_CASE("thinning rejects an understated lambda_max") {
    IntensityModel lying = make_const_intensity(2.0);
    lying.lambda_max = 1.0; // true intensity exceeds the declared bound
    RngStream rng(5, 0);
    REQUIRE_THROWS_AS(poisson_jump_times(lying, 20.0, rng), contract_error);
}

TEST_CASE("counts on grid follow the left-limit convention") {
    const JumpTimes jumps{0.25, 0.5};
    const std::vector<double> grid{0.0, 0.25, 0.5, 1.0};
    const auto n = counts_on_grid(jumps, grid);
    const auto nl = counts_on_grid_left(jumps, grid);
    // a jump exactly on a grid point counts in N(t) but not in N(t-)
    REQUIRE(n == std::vector<std::int64_t>{0, 1, 2, 2});
    REQUIRE(nl == std::vector<std::int64_t>{0, 0, 1, 2});
}

TEST_CASE("grid path invariant: n[i] counts jumps up to grid[i]") {
    const IntensityModel im = make_affine_intensity(2.0, -1.0, 1.0);
    RngStream rng(6, 0);
    for (int rep = 0; rep < 200; ++rep) {
        const std::vector<double> base{0.0, 0.3, 0.7, 1.0};
        const GridPath p = simulate_grid_path(base, im, rng);
        REQUIRE(p.grid.front() == 0.0);
        REQUIRE(p.w.front() == 0.0);
        REQUIRE(std::is_sorted(p.grid.begin(), p.grid.end()));
        for (std::size_t i = 0; i < p.grid.size(); ++i) {
            std::int64_t cnt = 0;
            for (double tau : p.jumps) cnt += tau <= p.grid[i] ? 1 : 0;
            REQUIRE(p.n[i] == cnt);
        }
        for (double tau : p.jumps)
            REQUIRE(std::binary_search(p.grid.begin(), p.grid.end(), tau));
    }
}

TEST_CASE("merge_grids dedupes exactly") {
    const std::vector<double> a{0.0, 0.5, 1.0}, b{0.25, 0.5, 1.0};
    REQUIRE(merge_grids(a, b) == std::vector<double>{0.0, 0.25, 0.5, 1.0});
}

TEST_CASE("iterated integral helpers") {
    REQUIRE(i_nn(0) == 0.0);
    REQUIRE(i_nn(1) == 0.0);
    REQUIRE(i_nn(3) == 3.0); // 3 choose 2
    REQUIRE(cross_sum(2, 0.5) == 1.0);
    REQUIRE(i_ww(0.3, 0.25) == 0.5 * (0.09 - 0.25));
    REQUIRE_THROWS_AS(i_nn(-1), std::invalid_argument);
    REQUIRE_THROWS_AS(i_ww(0.0, 0.0), std::invalid_argument);
    REQUIRE_THROWS_AS(cross_sum(-2, 0.1), std::invalid_argument);
}

TEST_CASE("brownian bridge mean is the chord") {
    REQUIRE(brownian_bridge_mean(1.0, 3.0, 0.0, 1.0, 0.25) == 1.5);
    REQUIRE_THROWS_AS(brownian_bridge_mean(0.0, 0.0, 0.0, 1.0, 1.5), std::invalid_argument);
}

TEST_CASE("poisson bridge formulas at hand-computed values") {
    const IntensityModel im = make_affine_intensity(1.0, 1.0, 1.0);
    // Lambda(0.5, 0) = 0.625, Lambda(1, 0.5) = 0.875, Lambda(1, 0) = 1.5
    REQUIRE_THAT(poisson_bridge_mean(1, 4, im, 0.0, 1.0, 0.5),
                 Catch::Matchers::WithinRel((4.0 * 0.625 + 1.0 * 0.875) / 1.5, 1e-14));
    REQUIRE_THAT(poisson_bridge_var(1, 4, im, 0.0, 1.0, 0.5),
                 Catch::Matchers::WithinRel(3.0 * 0.875 * 0.625 / 2.25, 1e-14));
    REQUIRE_THAT(poisson_bridge_var_marginal(im, 0.0, 1.0, 0.5),
                 Catch::Matchers::WithinRel(0.875 * 0.625 / 1.5, 1e-14));
    REQUIRE_THROWS_AS(poisson_bridge_mean(4, 1, im, 0.0, 1.0, 0.5), std::invalid_argument);
    REQUIRE_THROWS_AS(poisson_bridge_var(1, 4, im, 0.0, 1.0, 1.5), std::invalid_argument);
}

TEST_CASE("poisson bridge sampling matches binomial moments") {
    const IntensityModel im = make_const_intensity(1.0);
    RngStream rng(7, 0);
    const std::size_t M = 200000;
    double s = 0.0, s2 = 0.0;
    for (std::size_t i = 0; i < M; ++i) {
        const double x = double(poisson_bridge_sample(0, 5, im, 0.0, 1.0, 0.3, rng));
        s += x;
        s2 += x * x;
    }
    const double mean = s / M, var = s2 / M - mean * mean;
    // Binomial(5, 0.3): mean 1.5, var 1.05
    REQUIRE(std::fabs(mean - 1.5) < 3.0 * std::sqrt(1.05 / double(M)));
    REQUIRE(std::fabs(var - 1.05) < 0.05);
}

TEST_CASE("parallel_for reduction is thread-count independent") {
    auto run = [](unsigned threads) {
        std::vector<double> out(64);
        parallel_for(64, threads, [&](std::size_t i) {
            RngStream rng(99, i);
            double s = 0.0;
            for (int k = 0; k < 100; ++k) s += rng.normal();
            out[i] = s;
        });
        double total = 0.0;
        for (double v : out) total += v;
        return std::pair(out, total);
    };
    const auto [v1, t1] = run(1);
    const auto [v4, t4] = run(4);
    REQUIRE(v1 == v4);
    REQUIRE(t1 == t4); // ordered reduction: bitwise equal, not just close
}
