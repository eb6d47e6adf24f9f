// balcirc command-line front end. Everything goes through the C API in
// balcirc.h; this translation unit never touches the C++ core directly.

#include <balcirc.h>

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitIo = 3;
constexpr int kExitNumeric = 4;

int exit_code_for(int status) {
    switch (status) {
        case BC_OK: return kExitOk;
        case BC_ERR_IO: return kExitIo;
        case BC_ERR_NUMERIC: return kExitNumeric;
        default: return kExitValidation;
    }
}

[[nodiscard]] int fail(int status) {
    std::cerr << "error: " << bc_last_error() << '\n';
    return exit_code_for(status);
}

std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

std::vector<int64_t> parse_int_list(const std::string& text) {
    std::vector<int64_t> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        int64_t v = 0;
        auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
        if (ec != std::errc() || ptr != item.data() + item.size())
            throw CLI::ValidationError("checkpoints", "bad integer '" + item + "'");
        out.push_back(v);
    }
    return out;
}

struct ScheduleHandle {
    bc_schedule* ptr = nullptr;
    ~ScheduleHandle() { bc_schedule_free(ptr); }
};

struct StringHandle {
    char* ptr = nullptr;
    ~StringHandle() { bc_string_free(ptr); }
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"balancing-circuit load balancing toolkit"};
    app.require_subcommand(1);

    // schedule
    auto* cmd_schedule = app.add_subcommand("schedule", "build a matching schedule");
    std::string topo_kind, schedule_out;
    int64_t topo_n = 0;
    int topo_r = 1, topo_d = 3;
    uint64_t topo_seed = 0;
    cmd_schedule->add_option("--topology", topo_kind, "cycle|torus|hypercube|expander")
        ->required();
    cmd_schedule->add_option("--n", topo_n, "node count")->required();
    cmd_schedule->add_option("--r", topo_r, "torus dimension");
    cmd_schedule->add_option("--d", topo_d, "expander matching count");
    cmd_schedule->add_option("--seed", topo_seed, "expander seed");
    cmd_schedule->add_option("--out", schedule_out, "output JSON path")->required();

    // markov
    auto* cmd_markov = app.add_subcommand("markov", "round-matrix computations");
    cmd_markov->require_subcommand(1);
    auto* cmd_column = cmd_markov->add_subcommand("column", "t-step probability column");
    std::string markov_schedule, column_out;
    int64_t column_u = 0, column_t = 0;
    cmd_column->add_option("--schedule", markov_schedule, "schedule JSON path")->required();
    cmd_column->add_option("--u", column_u, "source node")->required();
    cmd_column->add_option("--t", column_t, "round count")->required();
    cmd_column->add_option("--out", column_out, "output CSV path (one entry per line)")
        ->required();
    auto* cmd_lambda = cmd_markov->add_subcommand("lambda", "second eigenvalue of the round matrix");
    std::string lambda_schedule;
    cmd_lambda->add_option("--schedule", lambda_schedule, "schedule JSON path")->required();

    // simulate
    auto* cmd_simulate = app.add_subcommand("simulate", "run one balancing process");
    std::string sim_schedule, sim_input, sim_mode = "discrete", sim_checkpoints, sim_out;
    int64_t sim_rounds = 0;
    uint64_t sim_seed = 0;
    cmd_simulate->add_option("--schedule", sim_schedule, "schedule JSON path")->required();
    cmd_simulate->add_option("--input", sim_input, "dist:<spec>|worstcase:K|file:vec.csv")
        ->required();
    cmd_simulate->add_option("--rounds", sim_rounds, "total rounds")->required();
    cmd_simulate->add_option("--mode", sim_mode, "discrete|continuous");
    cmd_simulate->add_option("--seed", sim_seed, "run seed");
    cmd_simulate->add_option("--checkpoints", sim_checkpoints,
                             "comma-separated rounds to record (default: just --rounds)");
    cmd_simulate->add_option("--out", sim_out, "output CSV path")->required();

    // bounds
    auto* cmd_bounds = app.add_subcommand("bounds", "evaluate a closed-form bound");
    std::string bound_name, bound_params;
    cmd_bounds->add_option("--name", bound_name, "bound evaluator name")->required();
    cmd_bounds->add_option("--params", bound_params, "comma-separated k=v parameters");

    // evolset
    auto* cmd_evolset = app.add_subcommand("evolset", "evolving-set estimates and checks");
    std::string evol_chain;
    int64_t evol_x = 0, evol_t = 1, evol_trials = 10000;
    uint64_t evol_seed = 0;
    cmd_evolset->add_option("--chain", evol_chain, "from-schedule:file.json|lazy-cycle:n")
        ->required();
    cmd_evolset->add_option("--x", evol_x, "start state")->required();
    cmd_evolset->add_option("--t", evol_t, "step count")->required();
    cmd_evolset->add_option("--trials", evol_trials, "Monte-Carlo trials");
    cmd_evolset->add_option("--seed", evol_seed, "trial seed");

    // experiment
    auto* cmd_experiment = app.add_subcommand("experiment", "seeded experiment harness");
    std::string exp_config, exp_out;
    cmd_experiment->add_option("--config", exp_config, "config JSON path")->required();
    cmd_experiment->add_option("--out", exp_out, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitValidation;
    }

    if (cmd_schedule->parsed()) {
        ScheduleHandle s;
        if (int rc = bc_schedule_build(topo_kind.c_str(), topo_n, topo_r, topo_d, topo_seed,
                                       &s.ptr))
            return fail(rc);
        if (int rc = bc_schedule_save(s.ptr, schedule_out.c_str())) return fail(rc);
        std::cout << "wrote " << schedule_out << " (n=" << bc_schedule_n(s.ptr)
                  << ", d=" << bc_schedule_period(s.ptr) << ")\n";
        return kExitOk;
    }

    if (cmd_column->parsed()) {
        ScheduleHandle s;
        if (int rc = bc_schedule_load(markov_schedule.c_str(), &s.ptr)) return fail(rc);
        std::vector<double> column(bc_schedule_n(s.ptr));
        if (int rc = bc_tstep_column(s.ptr, column_u, column_t, column.data())) return fail(rc);
        std::ofstream out(column_out);
        if (!out) {
            std::cerr << "error: cannot open for writing: " << column_out << '\n';
            return kExitIo;
        }
        for (double v : column) out << format_double(v) << '\n';
        return kExitOk;
    }

    if (cmd_lambda->parsed()) {
        ScheduleHandle s;
        if (int rc = bc_schedule_load(lambda_schedule.c_str(), &s.ptr)) return fail(rc);
        double lambda = 0;
        if (int rc = bc_second_eigenvalue(s.ptr, &lambda)) return fail(rc);
        std::printf("%.12g\n", lambda);
        return kExitOk;
    }

    if (cmd_simulate->parsed()) {
        ScheduleHandle s;
        if (int rc = bc_schedule_load(sim_schedule.c_str(), &s.ptr)) return fail(rc);
        std::vector<int64_t> checkpoints;
        try {
            if (!sim_checkpoints.empty()) checkpoints = parse_int_list(sim_checkpoints);
        } catch (const CLI::Error& e) {
            std::cerr << "error: " << e.what() << '\n';
            return kExitValidation;
        }
        if (checkpoints.empty() || checkpoints.back() < sim_rounds)
            checkpoints.push_back(sim_rounds);
        if (checkpoints.back() > sim_rounds) {
            std::cerr << "error: checkpoints exceed --rounds " << sim_rounds << '\n';
            return kExitValidation;
        }
        std::vector<double> rows(5 * checkpoints.size());
        if (int rc = bc_simulate(s.ptr, sim_input.c_str(), sim_mode.c_str(), sim_seed,
                                 checkpoints.data(), static_cast<int32_t>(checkpoints.size()),
                                 rows.data()))
            return fail(rc);
        std::ofstream out(sim_out);
        if (!out) {
            std::cerr << "error: cannot open for writing: " << sim_out << '\n';
            return kExitIo;
        }
        out << "t,discrepancy,max,min,total\n";
        for (std::size_t i = 0; i < checkpoints.size(); ++i)
            out << static_cast<int64_t>(rows[5 * i]) << ',' << format_double(rows[5 * i + 1])
                << ',' << format_double(rows[5 * i + 2]) << ',' << format_double(rows[5 * i + 3])
                << ',' << format_double(rows[5 * i + 4]) << '\n';
        return kExitOk;
    }

    if (cmd_bounds->parsed()) {
        StringHandle report;
        if (int rc = bc_bound_eval(bound_name.c_str(), bound_params.c_str(), &report.ptr))
            return fail(rc);
        std::cout << report.ptr << '\n';
        return kExitOk;
    }

    if (cmd_evolset->parsed()) {
        StringHandle lines;
        if (int rc = bc_evolset_report(evol_chain.c_str(), evol_x, evol_t, evol_trials, evol_seed,
                                       &lines.ptr))
            return fail(rc);
        std::cout << lines.ptr;
        return kExitOk;
    }

    if (cmd_experiment->parsed()) {
        std::ifstream in(exp_config);
        if (!in) {
            std::cerr << "error: cannot open config: " << exp_config << '\n';
            return kExitIo;
        }
        std::stringstream buf;
        buf << in.rdbuf();
        StringHandle summary;
        if (int rc = bc_experiment_run(buf.str().c_str(), exp_out.c_str(), &summary.ptr))
            return fail(rc);
        std::cout << summary.ptr << '\n';
        return kExitOk;
    }

    return kExitValidation;
}
