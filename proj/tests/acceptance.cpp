// Acceptance suite: one line per criterion, nonzero exit when any fails.
// Statistical criteria use the fixed seeds below.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "balcirc/balancer.hpp"
#include "balcirc/bounds.hpp"
#include "balcirc/distributions.hpp"
#include "balcirc/evolset.hpp"
#include "balcirc/harness.hpp"
#include "balcirc/markov.hpp"
#include "balcirc/rng.hpp"
#include "balcirc/topology.hpp"
#include "oracles.hpp"

using namespace balcirc;

namespace {

struct Check {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) pass = false;
        if (!ok) {
            if (!detail.empty()) detail += "; ";
            detail += "FAILED " + what;
        }
    }
    void note(const std::string& what) {
        if (!detail.empty()) detail += "; ";
        detail += what;
    }
};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

bool within(double value, double target, double frac) {
    return std::abs(value - target) <= frac * target;
}

double elapsed_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// All 64 columns of M^t, advanced one round at a time.
struct ColumnTracker {
    const MatchingSchedule& s;
    std::vector<std::vector<double>> cols;

    explicit ColumnTracker(const MatchingSchedule& schedule) : s(schedule) {
        cols.assign(s.n, std::vector<double>(s.n, 0.0));
        for (std::int64_t u = 0; u < s.n; ++u) cols[u][u] = 1.0;
    }
    void advance_round() {
        for (auto& col : cols)
            for (int k = s.period() - 1; k >= 0; --k) apply_matching(col, s.matchings[k]);
    }
    double max_deviation_from_uniform() const {
        const double inv_n = 1.0 / double(s.n);
        double dev = 0;
        for (const auto& col : cols)
            for (double x : col) dev = std::max(dev, std::abs(x - inv_n));
        return dev;
    }
};

// ---- criteria ------------------------------------------------------------

Check criterion1_cycle_light() {
    Check c;
    const auto start = std::chrono::steady_clock::now();
    ExperimentConfig cfg;
    cfg.topology = {TopologyKind::cycle, 4096};
    cfg.input = "dist:uniform:64";
    cfg.checkpoints = {16, 1024, 65536};
    cfg.repetitions = 10;
    cfg.base_seed = 101;
    cfg.threads = 2;
    auto table = run_experiment(cfg);

    const double m16 = table.rows[0].mean, m1k = table.rows[1].mean, m64k = table.rows[2].mean;
    c.require(within(m16, 52.7, 0.25), "t=2^4 mean " + fmt(m16) + " vs 52.7 +-25%");
    c.require(within(m1k, 14.7, 0.25), "t=2^10 mean " + fmt(m1k) + " vs 14.7 +-25%");
    c.require(within(m64k, 3.8, 0.35), "t=2^16 mean " + fmt(m64k) + " vs 3.8 +-35%");
    const double secs = elapsed_since(start);
    c.require(secs < 300.0, "runtime " + fmt(secs) + "s < 300s");
    c.note("means " + fmt(m16) + "/" + fmt(m1k) + "/" + fmt(m64k) + " vs 52.7/14.7/3.8, " +
           fmt(secs) + "s");
    return c;
}

Check criterion2_cycle_worstcase() {
    Check c;
    ExperimentConfig cfg;
    cfg.topology = {TopologyKind::cycle, 4096};
    cfg.input = "worstcase:64";
    cfg.checkpoints = {1, 16, 256, 4096, 16384};
    cfg.repetitions = 10;
    cfg.base_seed = 102;
    cfg.threads = 2;
    auto table = run_experiment(cfg);

    const double m = table.rows[4].mean;
    c.require(std::abs(m - 128.0) <= 2.0, "t=2^14 mean " + fmt(m) + " vs 128 +-2");
    for (const auto& row : table.rows) {
        const double lower = worstcase_disc_lower("cycle", 64.0, 4096, row.t);
        c.require(lower <= row.mean,
                  "lower bound " + fmt(lower) + " <= mean " + fmt(row.mean) + " at t=" +
                      std::to_string(row.t));
    }
    auto report = nlohmann::json::parse(verify_bounds(
        table, {{"worstcase_disc_lower", {{"kind", "cycle"}, {"K", "64"}, {"n", "4096"}}}}));
    c.require(report[0]["dominates_all"].get<bool>(), "overlay dominance verdict");
    c.note("t=2^14 mean " + fmt(m));
    return c;
}

Check criterion3_cycle_heavy() {
    Check c;
    ExperimentConfig cfg;
    cfg.topology = {TopologyKind::cycle, 4096};
    cfg.input = "dist:uniform:16777216";  // Uni[0, 2^25]
    cfg.checkpoints = {16, 64, 256, 1024, 4096, 16384};
    cfg.repetitions = 10;
    cfg.base_seed = 103;
    cfg.threads = 2;
    auto table = run_experiment(cfg);

    const double m16 = table.rows[0].mean, m256 = table.rows[2].mean, m4k = table.rows[4].mean;
    c.require(within(m16, 1.34e7, 0.20), "t=2^4 mean " + fmt(m16) + " vs 1.34e7 +-20%");
    c.require(within(m256, 5.94e6, 0.20), "t=2^8 mean " + fmt(m256) + " vs 5.94e6 +-20%");
    c.require(within(m4k, 2.30e6, 0.20), "t=2^12 mean " + fmt(m4k) + " vs 2.30e6 +-20%");
    auto fit = fit_decay_exponent(table, 16, 16384);
    c.require(fit.slope >= -0.45 && fit.slope <= -0.20,
              "decay exponent " + fmt(fit.slope) + " in [-0.45,-0.20]");
    c.note("means " + fmt(m16) + "/" + fmt(m256) + "/" + fmt(m4k) + ", slope " + fmt(fit.slope));
    return c;
}

Check criterion4_torus_light() {
    Check c;
    const auto start = std::chrono::steady_clock::now();
    ExperimentConfig cfg;
    cfg.topology = {TopologyKind::torus, 65536};
    cfg.topology.r = 2;
    cfg.input = "dist:uniform:256";  // Uni[0, 512]
    cfg.checkpoints = {16, 256};
    cfg.repetitions = 10;
    cfg.base_seed = 104;
    cfg.threads = 2;
    auto table = run_experiment(cfg);

    const double m16 = table.rows[0].mean, m256 = table.rows[1].mean;
    c.require(within(m16, 54.8, 0.25), "t=2^4 mean " + fmt(m16) + " vs 54.8 +-25%");
    c.require(within(m256, 10.0, 0.30), "t=2^8 mean " + fmt(m256) + " vs 10.0 +-30%");
    const double secs = elapsed_since(start);
    c.require(secs < 600.0, "runtime " + fmt(secs) + "s < 600s");
    c.note("means " + fmt(m16) + "/" + fmt(m256) + " vs 54.8/10.0, " + fmt(secs) + "s");
    return c;
}

Check criterion5_hypercube() {
    Check c;
    const std::int64_t n = 1 << 16;
    const std::int64_t k = 16;
    auto s = build_schedule({TopologyKind::hypercube, n});

    auto x = worst_case_input({{TopologyKind::hypercube, n}, k});
    for (int matching = 0; matching < s.period(); ++matching) {
        apply_matching_discrete(x, s.matchings[matching], 505, matching);
        const std::int64_t disc = discrepancy(std::span<const std::int64_t>(x));
        if (matching < s.period() - 1)
            c.require(disc == 2 * k, "disc == 2K after matching " + std::to_string(matching + 1));
        else
            c.require(disc == 0, "disc collapses at matching " + std::to_string(matching + 1));
    }

    std::int64_t worst_avg = 0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        auto loads = sample_vector(DistributionSpec::parse("uniform:16"), n, mix_seed(506, seed));
        auto out = run_discrete(s, loads, 1, mix_seed(507, seed));
        const std::int64_t disc = discrepancy(std::span<const std::int64_t>(out));
        worst_avg = std::max(worst_avg, disc);
        c.require(disc <= 6, "average-case disc " + std::to_string(disc) + " <= 6 (seed " +
                                 std::to_string(seed) + ")");
    }
    c.note("worst average-case disc " + std::to_string(worst_avg) + " after one round");
    return c;
}

Check criterion6_markov_dominance() {
    Check c;
    auto s = build_schedule({TopologyKind::cycle, 64});
    ColumnTracker tracker(s);
    std::int64_t violations = 0;
    double worst_margin = 1e9;
    for (std::int64_t t = 1; t <= 4096; ++t) {
        tracker.advance_round();
        const double dev = tracker.max_deviation_from_uniform();
        const double bound = markov_tstep_bound(0.25, 0.25, 1.0 / 64, 1.0 / 64, t);
        if (std::abs(bound - 32.0 / std::sqrt(double(t))) > 1e-12 * bound) ++violations;
        if (dev > bound) ++violations;
        worst_margin = std::min(worst_margin, bound - dev);
    }
    c.require(violations == 0, "violations " + std::to_string(violations));
    c.note("zero violations over t in [1,4096], min bound-dev margin " + fmt(worst_margin));
    return c;
}

Check criterion7_sandwich_and_lambda() {
    Check c;
    TopologySpec torus{TopologyKind::torus, 16};
    torus.r = 2;
    for (const auto& s : {build_schedule({TopologyKind::cycle, 64}), build_schedule(torus)}) {
        ColumnTracker tracker(s);
        std::int64_t t_now = 0;
        for (std::int64_t t : {1, 2, 4, 8, 16}) {
            while (t_now < t) {
                tracker.advance_round();
                ++t_now;
            }
            std::vector<double> du2(s.n);
            double max_du2 = 0;
            for (std::int64_t u = 0; u < s.n; ++u) {
                const double d = l2_to_uniform(tracker.cols[u]);
                du2[u] = d * d;
                max_du2 = std::max(max_du2, du2[u]);
            }
            for (std::int64_t u = 0; u < s.n; ++u) {
                double best_pair = 0;
                for (std::int64_t v = 0; v < s.n; ++v) {
                    double sq = 0;
                    for (std::int64_t w = 0; w < s.n; ++w) {
                        const double d = tracker.cols[u][w] - tracker.cols[v][w];
                        sq += d * d;
                    }
                    best_pair = std::max(best_pair, sq);
                    if (sq > 4 * max_du2 + 1e-12) {
                        c.require(false, "pair bound at n=" + std::to_string(s.n) + " t=" +
                                             std::to_string(t));
                        break;
                    }
                }
                if (best_pair < du2[u] - 1e-12)
                    c.require(false, "max-pair lower bound at n=" + std::to_string(s.n) + " t=" +
                                         std::to_string(t));
            }
        }
    }

    TopologySpec exp{TopologyKind::expander, 64};
    exp.d_exp = 8;
    exp.seed = 2024;
    auto se = build_schedule(exp);
    const double lambda = second_eigenvalue(se);
    ColumnTracker tracker(se);
    for (std::int64_t t = 1; t <= 64; ++t) {
        tracker.advance_round();
        const double dev = tracker.max_deviation_from_uniform();
        if (dev > std::pow(lambda, double(t) / 2.0) + 1e-12)
            c.require(false, "lambda bound at t=" + std::to_string(t));
    }
    c.note("sandwich on cycle-64 and 4x4 torus, lambda(" + fmt(lambda) + ") bound to t=64");
    return c;
}

Check criterion8_cycle_l2_and_tail() {
    Check c;
    const std::int64_t n = 1024;
    auto s = build_schedule({TopologyKind::cycle, n});
    TopologySpec spec{TopologyKind::cycle, n};
    for (std::int64_t t : {16, 64, 256}) {
        auto col = tstep_column(s, 0, t);
        const double d = l2_to_uniform(col);
        const double lower = cycle_l2_lower(t, n);
        c.require(d * d >= lower,
                  "l2^2 " + fmt(d * d) + " >= " + fmt(lower) + " at t=" + std::to_string(t));

        std::vector<double> row(n, 0.0);
        row[0] = 1.0;
        row = run_continuous(s, std::move(row), t);
        for (double delta : {18.0, 34.0, 66.0}) {
            double tail = 0;
            for (std::int64_t v = 0; v < n; ++v)
                if (double(node_distance(spec, 0, v)) >= delta) tail += row[v];
            const double bound = cycle_tail_bound(delta, t);
            c.require(tail <= bound, "tail " + fmt(tail) + " <= " + fmt(bound) + " at t=" +
                                         std::to_string(t) + " delta=" + fmt(delta));
        }
    }
    c.note("l2 lower and tail bounds hold at t in {16,64,256}");
    return c;
}

Check criterion9_evolving_sets_exact() {
    Check c;
    auto chain = lazy_cycle_chain(8);
    const double var_floor =
        chain.beta * chain.pi_min() * chain.pi_min() * chain.alpha * chain.alpha;

    auto random_proper = [&](std::uint64_t seed) {
        SplitMix64 rng(seed);
        while (true) {
            StateSubset s(chain.n, chain.pi);
            for (std::int64_t x = 0; x < chain.n; ++x)
                if (rng.next() & 1) s.insert(x, chain.pi);
            if (!s.empty() && !s.full()) return s;
        }
    };

    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        auto s = random_proper(mix_seed(909, seed));
        auto e = exact_step_expectation(chain, s);
        if (std::abs(e.full - s.pi_mass()) > 1e-12)
            c.require(false, "martingale identity (seed " + std::to_string(seed) + ")");
        if (e.cond_le_beta < s.pi_mass() + e.q_out - 1e-12)
            c.require(false, "conditional lower (seed " + std::to_string(seed) + ")");
        if (e.cond_gt_beta > s.pi_mass() - chain.beta * e.q_out / (1 - chain.beta) + 1e-12)
            c.require(false, "conditional upper (seed " + std::to_string(seed) + ")");
        if (e.variance < var_floor - 1e-12)
            c.require(false, "variance floor (seed " + std::to_string(seed) + ")");
        if (!growth_bound_check(chain, s).empty())
            c.require(false, "growth bound (seed " + std::to_string(seed) + ")");
    }
    for (std::int64_t x = 0; x < chain.n; ++x)
        if (!growth_bound_check(chain, StateSubset::singleton(chain, x)).empty())
            c.require(false, "growth bound singleton " + std::to_string(x));
    c.note("martingale, conditionals, variance and growth on 100 seeded subsets");
    return c;
}

Check criterion10_evolving_sets_mc() {
    Check c;
    auto chain = lazy_cycle_chain(16);
    const std::int64_t t = 8, trials = 100000;
    const auto pt = oracle::dense_power(oracle::chain_to_dense(chain), t);

    double worst_pull = 0;
    for (std::int64_t y = 0; y < chain.n; ++y) {
        auto est = estimate_tstep_probability(chain, 0, y, t, trials, 1001);
        const double truth = pt[0][y];
        // pi is uniform so the membership frequency equals the probability.
        const double se = std::sqrt(truth * (1 - truth) / double(trials));
        const double pull = se > 0 ? std::abs(est.value - truth) / se : 0.0;
        worst_pull = std::max(worst_pull, pull);
        c.require(std::abs(est.value - truth) <= 3 * se + 1e-9,
                  "estimate y=" + std::to_string(y) + " off by " + fmt(pull) + " s.e.");
    }

    auto absorb = run_absorption_trials(chain, 0, 10000, trials, 1002);
    const double freq = absorb.omega_fraction();
    const double p = 1.0 / 16.0;
    const double se = std::sqrt(p * (1 - p) / double(trials));
    c.require(std::abs(freq - p) <= 3 * se,
              "omega fraction " + fmt(freq) + " vs pi_x " + fmt(p));

    auto params = AbsorptionParams::from_chain(chain, 0);
    for (std::int64_t horizon : {100, 1000, 10000}) {
        const double bound = absorption_tail_bound(params, horizon);
        const double tail = absorb.tail_fraction(horizon);
        c.require(tail <= bound, "tail " + fmt(tail) + " <= bound " + fmt(bound) + " at t=" +
                                     std::to_string(horizon));
    }
    c.note("worst estimate pull " + fmt(worst_pull) + " s.e., omega freq " + fmt(freq));
    return c;
}

Check criterion11_deviation() {
    Check c;
    const std::int64_t n = 4096;
    auto s = build_schedule({TopologyKind::cycle, n});
    const double tight = std::sqrt(12.0 * std::log(double(n)));
    const double loose = std::sqrt(48.0 * std::log(double(n)));
    int under_tight = 0;
    double worst = 0;
    for (std::uint64_t r = 0; r < 10; ++r) {
        auto x0 = sample_vector(DistributionSpec::parse("uniform:64"), n, mix_seed(1111, r));
        const double dev = discrete_continuous_deviation(s, x0, 1024, mix_seed(2222, r));
        worst = std::max(worst, dev);
        if (dev <= tight) ++under_tight;
        c.require(dev <= loose, "dev " + fmt(dev) + " <= sqrt(48 log n) (seed " +
                                    std::to_string(r) + ")");
    }
    c.require(under_tight >= 9, "only " + std::to_string(under_tight) +
                                    "/10 runs under sqrt(12 log n)");
    c.note(std::to_string(under_tight) + "/10 under " + fmt(tight) + ", max dev " + fmt(worst));
    return c;
}

Check criterion12_determinism() {
    Check c;
    namespace fs = std::filesystem;
    const auto dir = fs::temp_directory_path() / "balcirc_acceptance_c12";
    fs::remove_all(dir);
    fs::create_directories(dir);

    ExperimentConfig cfg;
    cfg.topology = {TopologyKind::cycle, 256};
    cfg.input = "dist:uniform:16";
    cfg.checkpoints = {0, 1, 4, 16, 64};
    cfg.repetitions = 8;
    cfg.base_seed = 1212;

    auto emit = [&](int threads, const std::string& name) {
        auto run_cfg = cfg;
        run_cfg.threads = threads;
        auto table = run_experiment(run_cfg);
        const std::string path = (dir / name).string();
        emit_csv(table, path);
        std::ifstream in(path);
        std::stringstream buf;
        buf << in.rdbuf();
        return buf.str();
    };

    const std::string single = emit(1, "t1.csv");
    const std::string rerun = emit(1, "t1b.csv");
    const std::string eight = emit(8, "t8.csv");
    c.require(!single.empty(), "CSV output nonempty");
    c.require(single == rerun, "rerun with 1 thread bit-identical");
    c.require(single == eight, "8-thread run bit-identical to 1-thread");
    fs::remove_all(dir);
    c.note("raw CSV bytes identical across rerun and 1/8 threads");
    return c;
}

} // namespace

int main() {
    struct Entry {
        int id;
        const char* name;
        std::function<Check()> run;
    };
    const std::vector<Entry> criteria = {
        {1, "cycle lightly loaded vs table (i)", criterion1_cycle_light},
        {2, "cycle worst-case vs table (i) and lower bound", criterion2_cycle_worstcase},
        {3, "heavy-loaded cycle vs table (ii) and decay fit", criterion3_cycle_heavy},
        {4, "2D-torus lightly loaded vs table (iii)", criterion4_torus_light},
        {5, "hypercube worst/average case at n=2^16", criterion5_hypercube},
        {6, "t-step bound dominance, exact cycle n=64", criterion6_markov_dominance},
        {7, "pair-distance sandwich and lambda bound, exact", criterion7_sandwich_and_lambda},
        {8, "cycle l2 lower and tail bounds, n=1024", criterion8_cycle_l2_and_tail},
        {9, "evolving sets, exact enumeration", criterion9_evolving_sets_exact},
        {10, "evolving sets, Monte Carlo", criterion10_evolving_sets_mc},
        {11, "discrete-continuous deviation", criterion11_deviation},
        {12, "bit-identical CSV across threads", criterion12_determinism},
    };

    int failures = 0;
    for (const auto& entry : criteria) {
        Check result;
        try {
            result = entry.run();
        } catch (const std::exception& e) {
            result.pass = false;
            result.detail = std::string("exception: ") + e.what();
        }
        if (!result.pass) ++failures;
        std::printf("[%s] C%02d %s - %s\n", result.pass ? "PASS" : "FAIL", entry.id, entry.name,
                    result.detail.c_str());
        std::fflush(stdout);
    }
    if (failures) std::printf("%d of %zu criteria failed\n", failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
