#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "balcirc/balancer.hpp"
#include "balcirc/topology.hpp"

namespace balcirc {

struct BoundOverlay {
    std::string name;
    std::map<std::string, std::string> params;  // t is injected per checkpoint
};

struct ExperimentConfig {
    TopologySpec topology;
    std::string input;    // dist:<spec> | worstcase:K | file:path
    std::string mode = "discrete";
    std::vector<std::int64_t> checkpoints;  // strictly increasing, >= 0
    std::int64_t repetitions = 10;
    std::uint64_t base_seed = 0;
    int threads = 1;  // BALCIRC_THREADS overrides
    std::vector<BoundOverlay> bounds_overlay;

    void validate() const;
    static ExperimentConfig from_json(const std::string& text);
    std::string to_json() const;
};

/// Initial loads for an input spec string (shared by simulate and experiment).
IntLoads build_input(const TopologySpec& topology, const std::string& input,
                     std::uint64_t sample_seed);

struct ResultTable {
    struct Row {
        std::int64_t t = 0;
        std::vector<double> disc;   // one per repetition
        std::vector<double> max;
        std::vector<double> min;
        std::vector<double> total;
        double mean = 0, stddev = 0, lo = 0, hi = 0;  // over disc
    };

    ExperimentConfig config;
    std::vector<std::uint64_t> rep_seeds;
    std::vector<Row> rows;  // one per checkpoint, ascending t
    double wall_seconds = 0;

    bool same_data(const ResultTable& other) const;  // ignores wall time
};

/// Seeded, repeatable run: repetition r uses mix_seed(base_seed, r); one
/// incremental pass per repetition visits all checkpoints. Repetitions may
/// execute on several threads; the merged result is identical either way.
ResultTable run_experiment(const ExperimentConfig& cfg);

struct DecayFit {
    double slope;
    double std_error;
};

/// Least-squares slope of log(mean disc) vs log t over checkpoints in
/// [t_min, t_max]; requires >= 4 usable points with positive mean.
DecayFit fit_decay_exponent(const ResultTable& table, std::int64_t t_min, std::int64_t t_max);

/// Raw rows `t,rep,discrepancy,max,min,total` at `path`, plus a sibling
/// summary `t,mean,std,min,max` at `path` with extension `.summary.csv`.
/// Both embed the config and seeds as comment lines.
void emit_csv(const ResultTable& table, const std::string& path);

void emit_json(const ResultTable& table, const std::string& path);
ResultTable result_table_from_json(const std::string& text);
ResultTable load_result_table(const std::string& path);

/// Per checkpoint: bound value, empirical mean and dominance verdict; for
/// the asymptotic bounds the best constant c is fitted instead. Returns a
/// JSON report.
std::string verify_bounds(const ResultTable& table, const std::vector<BoundOverlay>& overlays);

struct SimRow {
    std::int64_t t;
    double disc, max, min, total;
};

/// Single checkpointed run for the `simulate` CLI subcommand.
std::vector<SimRow> simulate_run(const MatchingSchedule& schedule, const std::string& input,
                                 const std::string& mode, std::uint64_t seed,
                                 const std::vector<std::int64_t>& checkpoints);

/// Effective thread count: BALCIRC_THREADS when set, else the config value.
int effective_threads(int configured);

} // namespace balcirc
