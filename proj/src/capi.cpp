#include "balcirc.h"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <span>
#include <sstream>
#include <string>

#include <json.hpp>

#include "balcirc/balancer.hpp"
#include "balcirc/bounds.hpp"
#include "balcirc/distributions.hpp"
#include "balcirc/errors.hpp"
#include "balcirc/evolset.hpp"
#include "balcirc/harness.hpp"
#include "balcirc/markov.hpp"
#include "balcirc/rng.hpp"
#include "balcirc/topology.hpp"

struct bc_schedule {
    balcirc::MatchingSchedule inner;
};

namespace {

thread_local std::string tl_error;

void set_error(const std::string& msg) { tl_error = msg; }

char* alloc_string(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

// Runs fn, translating exceptions into status codes + thread-local message.
template <typename Fn>
int guarded(Fn&& fn) {
    try {
        fn();
        return BC_OK;
    } catch (const balcirc::IoError& e) {
        set_error(e.what());
        return BC_ERR_IO;
    } catch (const balcirc::NumericError& e) {
        set_error(e.what());
        return BC_ERR_NUMERIC;
    } catch (const balcirc::ValidationError& e) {
        set_error(e.what());
        return BC_ERR_VALIDATION;
    } catch (const std::exception& e) {
        set_error(e.what());
        return BC_ERR_INVALID;
    }
}

int require_ptr(const void* p, const char* name) {
    if (p) return BC_OK;
    set_error(std::string("null pointer: ") + name);
    return BC_ERR_INVALID;
}

} // namespace

extern "C" {

const char* bc_last_error(void) { return tl_error.c_str(); }

void bc_string_free(char* s) { delete[] s; }

int bc_schedule_build(const char* kind, int64_t n, int32_t r, int32_t d, uint64_t seed,
                      bc_schedule** out) {
    if (int rc = require_ptr(kind, "kind")) return rc;
    if (int rc = require_ptr(out, "out")) return rc;
    return guarded([&] {
        balcirc::TopologySpec spec;
        spec.kind = balcirc::topology_kind_from_string(kind);
        spec.n = n;
        spec.r = r;
        spec.d_exp = d;
        spec.seed = seed;
        *out = new bc_schedule{balcirc::build_schedule(spec)};
    });
}

int bc_schedule_from_json(const char* json_text, bc_schedule** out) {
    if (int rc = require_ptr(json_text, "json_text")) return rc;
    if (int rc = require_ptr(out, "out")) return rc;
    return guarded([&] { *out = new bc_schedule{balcirc::schedule_from_json(json_text)}; });
}

int bc_schedule_load(const char* path, bc_schedule** out) {
    if (int rc = require_ptr(path, "path")) return rc;
    if (int rc = require_ptr(out, "out")) return rc;
    return guarded([&] { *out = new bc_schedule{balcirc::load_schedule(path)}; });
}

int bc_schedule_save(const bc_schedule* s, const char* path) {
    if (int rc = require_ptr(s, "schedule")) return rc;
    if (int rc = require_ptr(path, "path")) return rc;
    return guarded([&] { balcirc::save_schedule(s->inner, path); });
}

int bc_schedule_to_json(const bc_schedule* s, char** out_json) {
    if (int rc = require_ptr(s, "schedule")) return rc;
    if (int rc = require_ptr(out_json, "out_json")) return rc;
    return guarded([&] { *out_json = alloc_string(balcirc::schedule_to_json(s->inner)); });
}

void bc_schedule_free(bc_schedule* s) { delete s; }

int64_t bc_schedule_n(const bc_schedule* s) { return s ? s->inner.n : -1; }

int32_t bc_schedule_period(const bc_schedule* s) { return s ? s->inner.period() : -1; }

int bc_schedule_validate(const bc_schedule* s, char** out_violations_json) {
    if (int rc = require_ptr(s, "schedule")) return rc;
    if (int rc = require_ptr(out_violations_json, "out_violations_json")) return rc;
    return guarded([&] {
        nlohmann::json arr = balcirc::validate_schedule(s->inner);
        *out_violations_json = alloc_string(arr.dump());
    });
}

int bc_node_distance(const bc_schedule* s, int64_t u, int64_t v, int64_t* out) {
    if (int rc = require_ptr(s, "schedule")) return rc;
    if (int rc = require_ptr(out, "out")) return rc;
    return guarded([&] {
        if (!s->inner.topology)
            throw balcirc::ValidationError("schedule carries no topology metadata");
        *out = balcirc::node_distance(*s->inner.topology, u, v);
    });
}

int bc_tstep_column(const bc_schedule* s, int64_t u, int64_t t, double* out) {
    if (int rc = require_ptr(s, "schedule")) return rc;
    if (int rc = require_ptr(out, "out")) return rc;
    return guarded([&] {
        auto col = balcirc::tstep_column(s->inner, u, t);
        std::memcpy(out, col.data(), col.size() * sizeof(double));
    });
}

int bc_l2_to_uniform(const double* column, int64_t n, double* out) {
    if (int rc = require_ptr(column, "column")) return rc;
    if (int rc = require_ptr(out, "out")) return rc;
    return guarded([&] {
        if (n < 1) throw balcirc::ValidationError("column length must be >= 1");
        std::span<const double> view(column, static_cast<std::size_t>(n));
        balcirc::check_probability_column(view);
        *out = balcirc::l2_to_uniform(view);
    });
}

int bc_pair_column_distance(const bc_schedule* s, int64_t u, int64_t v, int64_t t, double* out) {
    if (int rc = require_ptr(s, "schedule")) return rc;
    if (int rc = require_ptr(out, "out")) return rc;
    return guarded([&] { *out = balcirc::pair_column_distance(s->inner, u, v, t); });
}

int bc_second_eigenvalue(const bc_schedule* s, double* out) {
    if (int rc = require_ptr(s, "schedule")) return rc;
    if (int rc = require_ptr(out, "out")) return rc;
    return guarded([&] { *out = balcirc::second_eigenvalue(s->inner); });
}

int bc_dist_moments(const char* spec, double* mu, double* sigma) {
    if (int rc = require_ptr(spec, "spec")) return rc;
    if (int rc = require_ptr(mu, "mu")) return rc;
    if (int rc = require_ptr(sigma, "sigma")) return rc;
    return guarded([&] {
        auto m = balcirc::moments(balcirc::DistributionSpec::parse(spec));
        *mu = m.mu;
        *sigma = m.sigma;
    });
}

int bc_dist_sample(const char* spec, int64_t n, uint64_t seed, int64_t* out) {
    if (int rc = require_ptr(spec, "spec")) return rc;
    if (int rc = require_ptr(out, "out")) return rc;
    return guarded([&] {
        auto v = balcirc::sample_vector(balcirc::DistributionSpec::parse(spec), n, seed);
        std::memcpy(out, v.data(), v.size() * sizeof(int64_t));
    });
}

int bc_run_continuous(const bc_schedule* s, const double* xi0, int64_t t, double* out) {
    if (int rc = require_ptr(s, "schedule")) return rc;
    if (int rc = require_ptr(xi0, "xi0")) return rc;
    if (int rc = require_ptr(out, "out")) return rc;
    return guarded([&] {
        std::vector<double> x(xi0, xi0 + s->inner.n);
        auto res = balcirc::run_continuous(s->inner, std::move(x), t);
        std::memcpy(out, res.data(), res.size() * sizeof(double));
    });
}

int bc_run_discrete(const bc_schedule* s, const int64_t* x0, int64_t t, uint64_t seed,
                    int64_t* out) {
    if (int rc = require_ptr(s, "schedule")) return rc;
    if (int rc = require_ptr(x0, "x0")) return rc;
    if (int rc = require_ptr(out, "out")) return rc;
    return guarded([&] {
        balcirc::IntLoads x(x0, x0 + s->inner.n);
        auto res = balcirc::run_discrete(s->inner, std::move(x), t, seed);
        std::memcpy(out, res.data(), res.size() * sizeof(int64_t));
    });
}

int bc_worst_case_input(const bc_schedule* s, int64_t k, int64_t* out) {
    if (int rc = require_ptr(s, "schedule")) return rc;
    if (int rc = require_ptr(out, "out")) return rc;
    return guarded([&] {
        if (!s->inner.topology)
            throw balcirc::ValidationError("schedule carries no topology metadata");
        auto x = balcirc::worst_case_input({*s->inner.topology, k});
        std::memcpy(out, x.data(), x.size() * sizeof(int64_t));
    });
}

int bc_discrepancy(const int64_t* x, int64_t n, int64_t* out) {
    if (int rc = require_ptr(x, "x")) return rc;
    if (int rc = require_ptr(out, "out")) return rc;
    return guarded([&] {
        *out = balcirc::discrepancy(std::span<const std::int64_t>(x, static_cast<std::size_t>(n)));
    });
}

int bc_deviation(const bc_schedule* s, const int64_t* x0, int64_t t, uint64_t seed, double* out) {
    if (int rc = require_ptr(s, "schedule")) return rc;
    if (int rc = require_ptr(x0, "x0")) return rc;
    if (int rc = require_ptr(out, "out")) return rc;
    return guarded([&] {
        balcirc::IntLoads x(x0, x0 + s->inner.n);
        *out = balcirc::discrete_continuous_deviation(s->inner, x, t, seed);
    });
}

int bc_simulate(const bc_schedule* s, const char* input, const char* mode, uint64_t seed,
                const int64_t* checkpoints, int32_t num_checkpoints, double* out_rows) {
    if (int rc = require_ptr(s, "schedule")) return rc;
    if (int rc = require_ptr(input, "input")) return rc;
    if (int rc = require_ptr(mode, "mode")) return rc;
    if (int rc = require_ptr(checkpoints, "checkpoints")) return rc;
    if (int rc = require_ptr(out_rows, "out_rows")) return rc;
    return guarded([&] {
        std::vector<std::int64_t> cps(checkpoints, checkpoints + num_checkpoints);
        auto rows = balcirc::simulate_run(s->inner, input, mode, seed, cps);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            out_rows[5 * i + 0] = static_cast<double>(rows[i].t);
            out_rows[5 * i + 1] = rows[i].disc;
            out_rows[5 * i + 2] = rows[i].max;
            out_rows[5 * i + 3] = rows[i].min;
            out_rows[5 * i + 4] = rows[i].total;
        }
    });
}

int bc_bound_eval(const char* name, const char* params, char** out_report_json) {
    if (int rc = require_ptr(name, "name")) return rc;
    if (int rc = require_ptr(out_report_json, "out_report_json")) return rc;
    return guarded([&] {
        std::map<std::string, std::string> kv;
        if (params && *params) {
            std::stringstream ss(params);
            std::string item;
            while (std::getline(ss, item, ',')) {
                const auto eq = item.find('=');
                if (eq == std::string::npos)
                    throw balcirc::ValidationError("bad parameter '" + item +
                                                   "' (expected k=v,...)");
                kv[item.substr(0, eq)] = item.substr(eq + 1);
            }
        }
        *out_report_json = alloc_string(balcirc::eval_bound(name, kv).to_json());
    });
}

int bc_evolset_report(const char* chain_spec, int64_t x, int64_t t, int64_t trials, uint64_t seed,
                      char** out_json_lines) {
    if (int rc = require_ptr(chain_spec, "chain")) return rc;
    if (int rc = require_ptr(out_json_lines, "out_json_lines")) return rc;
    return guarded([&] {
        const std::string spec(chain_spec);
        balcirc::MarkovChain chain;
        if (spec.rfind("from-schedule:", 0) == 0) {
            chain = balcirc::as_markov_chain(balcirc::load_schedule(spec.substr(14)));
        } else if (spec.rfind("lazy-cycle:", 0) == 0) {
            chain = balcirc::lazy_cycle_chain(std::stoll(spec.substr(11)));
        } else {
            throw balcirc::ValidationError(
                "chain must be from-schedule:file.json | lazy-cycle:n, got '" + spec + "'");
        }

        std::ostringstream out;
        out << nlohmann::json{{"event", "chain"},
                              {"n", chain.n},
                              {"alpha", chain.alpha},
                              {"beta", chain.beta},
                              {"pi_min", chain.pi_min()},
                              {"pi_max", chain.pi_max()}}
                   .dump()
            << '\n';

        for (std::int64_t y = 0; y < chain.n; ++y) {
            auto est = balcirc::estimate_tstep_probability(chain, x, y, t, trials, seed);
            out << nlohmann::json{{"event", "tstep_estimate"},
                                  {"x", x},
                                  {"y", y},
                                  {"t", t},
                                  {"estimate", est.value},
                                  {"std_error", est.std_error}}
                       .dump()
                << '\n';
        }

        const std::int64_t max_t = std::max<std::int64_t>(4 * t, 10000);
        auto trials_run = balcirc::run_absorption_trials(chain, x, max_t, trials, seed);
        out << nlohmann::json{{"event", "absorption"},
                              {"trials", trials},
                              {"max_t", max_t},
                              {"omega_fraction", trials_run.omega_fraction()},
                              {"pi_x", chain.pi[x]}}
                   .dump()
            << '\n';

        auto params = balcirc::AbsorptionParams::from_chain(chain, x);
        for (std::int64_t horizon : {t, 10 * t, 100 * t}) {
            if (horizon < 1 || horizon > max_t) continue;
            out << nlohmann::json{{"event", "tail_bound"},
                                  {"t", horizon},
                                  {"bound", balcirc::absorption_tail_bound(params, horizon)},
                                  {"empirical", trials_run.tail_fraction(horizon)}}
                       .dump()
                << '\n';
        }
        *out_json_lines = alloc_string(out.str());
    });
}

int bc_experiment_run(const char* config_json, const char* out_dir, char** out_summary_json) {
    if (int rc = require_ptr(config_json, "config_json")) return rc;
    if (int rc = require_ptr(out_dir, "out_dir")) return rc;
    return guarded([&] {
        auto cfg = balcirc::ExperimentConfig::from_json(config_json);
        std::string dir = out_dir;
        if (const char* env = std::getenv("BALCIRC_OUT_DIR")) dir = env;
        std::error_code ec;
        std::filesystem::create_directories(dir, ec);
        if (ec) throw balcirc::IoError("cannot create output directory: " + dir);

        auto table = balcirc::run_experiment(cfg);
        balcirc::emit_csv(table, dir + "/raw.csv");
        balcirc::emit_json(table, dir + "/result.json");
        if (!cfg.bounds_overlay.empty()) {
            const std::string report = balcirc::verify_bounds(table, cfg.bounds_overlay);
            std::ofstream out(dir + "/bounds.json");
            if (!out) throw balcirc::IoError("cannot open for writing: " + dir + "/bounds.json");
            out << report << '\n';
        }
        if (out_summary_json) {
            nlohmann::json rows = nlohmann::json::array();
            for (const auto& row : table.rows)
                rows.push_back({{"t", row.t},
                                {"mean", row.mean},
                                {"std", row.stddev},
                                {"min", row.lo},
                                {"max", row.hi}});
            *out_summary_json = alloc_string(rows.dump());
        }
    });
}

uint64_t bc_mix_seed(uint64_t base, uint64_t index) { return balcirc::mix_seed(base, index); }

} // extern "C"
