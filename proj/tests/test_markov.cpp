#include <doctest.h>

#include <cmath>

#include "balcirc/errors.hpp"
#include "balcirc/markov.hpp"
#include "oracles.hpp"

using namespace balcirc;

namespace {

double linf(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

MatchingSchedule cycle(std::int64_t n) { return build_schedule({TopologyKind::cycle, n}); }

} // namespace

TEST_CASE("apply_matching averages matched pairs") {
    Matching m{{1, 2}, {0, 3}};
    std::vector<double> v{0, 0, 4, 0};
    apply_matching(v, m);
    CHECK(v == std::vector<double>{0, 2, 2, 0});

    std::vector<double> constant(7, 3.25);
    apply_matching(constant, Matching{{0, 6}, {2, 4}});
    CHECK(constant == std::vector<double>(7, 3.25));

    std::vector<double> w{2, 0, 2, 0};
    apply_matching(w, m);
    CHECK(w == std::vector<double>{1, 1, 1, 1});
}

TEST_CASE("tstep_column on the 4-cycle mixes in one round") {
    auto s = cycle(4);
    auto col = tstep_column(s, 0, 1);
    for (double x : col) CHECK(x == doctest::Approx(0.25).epsilon(1e-15));

    auto e2 = tstep_column(s, 2, 0);
    CHECK(e2 == std::vector<double>{0, 0, 1, 0});

    CHECK_THROWS_AS(tstep_column(s, 4, 1), ValidationError);
    CHECK_THROWS_AS(tstep_column(s, 0, -1), ValidationError);
}

TEST_CASE("tstep_column agrees with the dense matrix-power oracle") {
    std::vector<MatchingSchedule> schedules;
    schedules.push_back(cycle(8));
    schedules.push_back(cycle(16));
    schedules.push_back(build_schedule({TopologyKind::hypercube, 8}));
    TopologySpec torus{TopologyKind::torus, 16};
    torus.r = 2;
    schedules.push_back(build_schedule(torus));
    TopologySpec exp{TopologyKind::expander, 12};
    exp.d_exp = 3;
    exp.seed = 5;
    schedules.push_back(build_schedule(exp));

    for (const auto& s : schedules) {
        const auto m = oracle::round_matrix(s);
        for (std::int64_t t : {0, 1, 2, 5, 9}) {
            const auto mt = oracle::dense_power(m, t);
            for (std::int64_t u = 0; u < s.n; ++u) {
                auto col = tstep_column(s, u, t);
                check_probability_column(col);
                CHECK(linf(col, oracle::column(mt, u)) < 1e-12);
            }
        }
    }
}

TEST_CASE("l2_to_uniform") {
    std::vector<double> uniform(4, 0.25);
    CHECK(l2_to_uniform(uniform) == 0.0);

    std::vector<double> e0{1, 0, 0, 0};
    CHECK(l2_to_uniform(e0) == doctest::Approx(std::sqrt(0.75)).epsilon(1e-14));

    auto s = cycle(4);
    CHECK(l2_to_uniform(tstep_column(s, 0, 1)) == doctest::Approx(0.0));
}

TEST_CASE("pair_column_distance: symmetry, zero diagonal, oracle value") {
    auto s = cycle(8);
    CHECK(pair_column_distance(s, 3, 3, 7) == 0.0);
    CHECK(pair_column_distance(s, 0, 4, 2) ==
          doctest::Approx(pair_column_distance(s, 4, 0, 2)).epsilon(1e-15));

    auto s4 = cycle(4);
    CHECK(pair_column_distance(s4, 0, 2, 1) == doctest::Approx(0.0));

    const auto m = oracle::dense_power(oracle::round_matrix(s), 1);
    const auto cu = oracle::column(m, 0);
    const auto cv = oracle::column(m, 4);
    double expect = 0;
    for (std::size_t i = 0; i < cu.size(); ++i)
        expect += (cu[i] - cv[i]) * (cu[i] - cv[i]);
    CHECK(pair_column_distance(s, 0, 4, 1) == doctest::Approx(std::sqrt(expect)).epsilon(1e-12));
}

TEST_CASE("pair-distance sandwich against the distance to uniform") {
    std::vector<MatchingSchedule> schedules;
    schedules.push_back(cycle(16));
    TopologySpec torus{TopologyKind::torus, 16};
    torus.r = 2;
    schedules.push_back(build_schedule(torus));

    for (const auto& s : schedules)
        for (std::int64_t t : {1, 2, 4, 8}) {
            double max_to_uniform_sq = 0;
            std::vector<std::vector<double>> cols(s.n);
            for (std::int64_t k = 0; k < s.n; ++k) {
                cols[k] = tstep_column(s, k, t);
                const double d = l2_to_uniform(cols[k]);
                max_to_uniform_sq = std::max(max_to_uniform_sq, d * d);
            }
            for (std::int64_t u = 0; u < s.n; ++u) {
                double best_pair_sq = 0;
                for (std::int64_t v = 0; v < s.n; ++v) {
                    double sq = 0;
                    for (std::int64_t w = 0; w < s.n; ++w)
                        sq += (cols[u][w] - cols[v][w]) * (cols[u][w] - cols[v][w]);
                    CHECK(sq <= 4 * max_to_uniform_sq + 1e-12);
                    best_pair_sq = std::max(best_pair_sq, sq);
                }
                const double du = l2_to_uniform(cols[u]);
                CHECK(best_pair_sq >= du * du - 1e-12);
            }
        }
}

TEST_CASE("norm inequality ||c-1/n||_2^2 <= ||c-1/n||_inf * ||c-1/n||_1") {
    auto s = cycle(16);
    for (std::int64_t t : {1, 3, 6})
        for (std::int64_t u : {0, 5}) {
            auto c = tstep_column(s, u, t);
            const double inv_n = 1.0 / double(s.n);
            double l1 = 0, linf_norm = 0;
            for (double x : c) {
                l1 += std::abs(x - inv_n);
                linf_norm = std::max(linf_norm, std::abs(x - inv_n));
            }
            const double l2 = l2_to_uniform(c);
            CHECK(l2 * l2 <= linf_norm * l1 + 1e-15);
        }
}

TEST_CASE("second_eigenvalue: exact zeros and eigensolve oracle") {
    CHECK(second_eigenvalue(cycle(4)) == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(second_eigenvalue(build_schedule({TopologyKind::hypercube, 2})) ==
          doctest::Approx(0.0).epsilon(1e-10));
    // Dimension exchange mixes exactly in one round on every hypercube.
    CHECK(second_eigenvalue(build_schedule({TopologyKind::hypercube, 16})) ==
          doctest::Approx(0.0).epsilon(1e-9));

    // n=1024 exercises the tightly clustered cycle spectrum; the dense solve
    // takes ~2s and pins the power-iteration value to 1e-12.
    for (std::int64_t n : {8, 16, 64, 1024}) {
        auto s = cycle(n);
        CHECK(second_eigenvalue(s) ==
              doctest::Approx(oracle::second_eigenvalue_dense(s)).epsilon(1e-9));
    }

    TopologySpec exp{TopologyKind::expander, 64};
    exp.d_exp = 8;
    exp.seed = 42;
    auto s = build_schedule(exp);
    const double lambda = second_eigenvalue(s);
    CHECK(lambda == doctest::Approx(oracle::second_eigenvalue_dense(s)).epsilon(1e-9));
    CHECK(lambda < 1.0);
    CHECK(lambda >= 0.0);
}

TEST_CASE("as_markov_chain extracts the round matrix") {
    auto chain4 = as_markov_chain(cycle(4));
    for (std::int64_t x = 0; x < 4; ++x)
        for (std::int64_t y = 0; y < 4; ++y) CHECK(chain4.entry(x, y) == doctest::Approx(0.25));
    CHECK(chain4.alpha == doctest::Approx(0.25));
    CHECK(chain4.beta == doctest::Approx(0.25));

    auto chain2 = as_markov_chain(build_schedule({TopologyKind::hypercube, 2}));
    CHECK(chain2.entry(0, 0) == doctest::Approx(0.5));
    CHECK(chain2.entry(0, 1) == doctest::Approx(0.5));
    CHECK(chain2.alpha == doctest::Approx(0.5));
    CHECK(chain2.beta == doctest::Approx(0.5));

    auto s8 = cycle(8);
    auto chain8 = as_markov_chain(s8);
    CHECK(chain8.alpha == doctest::Approx(0.25));  // 2^-d with d=2
    CHECK(chain8.beta == doctest::Approx(0.25));
    const auto dense = oracle::round_matrix(s8);
    for (std::int64_t x = 0; x < 8; ++x)
        for (std::int64_t y = 0; y < 8; ++y)
            CHECK(chain8.entry(x, y) == doctest::Approx(dense[x][y]).epsilon(1e-14));
    chain8.validate();
}

TEST_CASE("reconstructed round matrix rows are stochastic and columns sum to 1") {
    TopologySpec exp{TopologyKind::expander, 32};
    exp.d_exp = 4;
    exp.seed = 11;
    auto chain = as_markov_chain(build_schedule(exp));
    std::vector<double> col_sums(chain.n, 0.0);
    for (std::int64_t x = 0; x < chain.n; ++x) {
        double row_sum = 0;
        for (auto [y, p] : chain.rows[x]) {
            row_sum += p;
            col_sums[y] += p;
        }
        CHECK(row_sum == doctest::Approx(1.0).epsilon(1e-12));
    }
    for (double cs : col_sums) CHECK(cs == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("torus round matrix tensorizes over the axes") {
    TopologySpec torus{TopologyKind::torus, 16};
    torus.r = 2;
    auto st = build_schedule(torus);
    auto sc = cycle(4);
    for (std::int64_t t : {1, 2, 3}) {
        const auto mt = oracle::dense_power(oracle::round_matrix(st), t);
        const auto ct = oracle::dense_power(oracle::round_matrix(sc), t);
        for (std::int64_t x = 0; x < 16; ++x)
            for (std::int64_t y = 0; y < 16; ++y) {
                const double expect = ct[x % 4][y % 4] * ct[x / 4][y / 4];
                CHECK(std::abs(mt[x][y] - expect) < 1e-12);
            }
    }
}

TEST_CASE("lazy cycle chain") {
    auto chain = lazy_cycle_chain(4);
    CHECK(chain.entry(0, 0) == doctest::Approx(0.5));
    CHECK(chain.entry(0, 1) == doctest::Approx(0.25));
    CHECK(chain.entry(0, 2) == 0.0);
    CHECK(chain.entry(0, 3) == doctest::Approx(0.25));
    CHECK(chain.alpha == doctest::Approx(0.25));
    CHECK(chain.beta == doctest::Approx(0.5));
    CHECK_THROWS_AS(lazy_cycle_chain(2), ValidationError);
}
