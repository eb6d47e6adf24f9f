#include "balcirc/harness.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "balcirc/bounds.hpp"
#include "balcirc/distributions.hpp"
#include "balcirc/errors.hpp"
#include "balcirc/markov.hpp"
#include "balcirc/rng.hpp"

namespace balcirc {

namespace {

// Shortest round-trip decimal form; integers render without a decimal point,
// which keeps CSV output identical across thread counts and reruns.
std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

nlohmann::json topology_to_json(const TopologySpec& t) {
    nlohmann::json j{{"kind", to_string(t.kind)}, {"n", t.n}};
    if (t.kind == TopologyKind::torus) j["r"] = t.r;
    if (t.kind == TopologyKind::expander) {
        j["d"] = t.d_exp;
        j["seed"] = t.seed;
    }
    return j;
}

TopologySpec topology_from_json(const nlohmann::json& j) {
    TopologySpec t;
    t.kind = topology_kind_from_string(j.at("kind").get<std::string>());
    t.n = j.at("n").get<std::int64_t>();
    if (j.contains("r")) t.r = j["r"].get<int>();
    if (j.contains("d")) t.d_exp = j["d"].get<int>();
    if (j.contains("seed")) t.seed = j["seed"].get<std::uint64_t>();
    return t;
}

} // namespace

void ExperimentConfig::validate() const {
    topology.validate();
    if (mode != "discrete" && mode != "continuous")
        throw ValidationError("mode must be discrete|continuous, got '" + mode + "'");
    if (repetitions < 1) throw ValidationError("repetitions must be >= 1");
    if (threads < 1) throw ValidationError("threads must be >= 1");
    // An empty checkpoint list is allowed and yields header-only outputs.
    for (std::size_t i = 0; i < checkpoints.size(); ++i) {
        if (checkpoints[i] < 0) throw ValidationError("checkpoints must be >= 0");
        if (i > 0 && checkpoints[i] <= checkpoints[i - 1])
            throw ValidationError("checkpoints must be strictly increasing");
    }
    build_input(topology, input, 0);  // validates the input spec syntax
}

ExperimentConfig ExperimentConfig::from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError(std::string("config JSON parse error: ") + e.what());
    }
    ExperimentConfig cfg;
    try {
        cfg.topology = topology_from_json(j.at("topology"));
        cfg.input = j.at("input").get<std::string>();
        cfg.mode = j.value("mode", std::string("discrete"));
        cfg.checkpoints = j.at("checkpoints").get<std::vector<std::int64_t>>();
        cfg.repetitions = j.value("repetitions", std::int64_t(10));
        cfg.base_seed = j.value("base_seed", std::uint64_t(0));
        cfg.threads = j.value("threads", 1);
        if (j.contains("bounds_overlay"))
            for (const auto& jo : j["bounds_overlay"]) {
                BoundOverlay o;
                o.name = jo.at("name").get<std::string>();
                if (jo.contains("params"))
                    for (auto it = jo["params"].begin(); it != jo["params"].end(); ++it)
                        o.params[it.key()] = it.value().is_string()
                                                 ? it.value().get<std::string>()
                                                 : it.value().dump();
                cfg.bounds_overlay.push_back(std::move(o));
            }
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("config JSON: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

std::string ExperimentConfig::to_json() const {
    // threads is an execution knob, not part of the experiment identity, so
    // it is accepted on input but never echoed; outputs stay byte-identical
    // across thread counts.
    nlohmann::json j;
    j["topology"] = topology_to_json(topology);
    j["input"] = input;
    j["mode"] = mode;
    j["checkpoints"] = checkpoints;
    j["repetitions"] = repetitions;
    j["base_seed"] = base_seed;
    if (!bounds_overlay.empty()) {
        auto& arr = j["bounds_overlay"] = nlohmann::json::array();
        for (const auto& o : bounds_overlay)
            arr.push_back({{"name", o.name}, {"params", o.params}});
    }
    return j.dump();
}

IntLoads build_input(const TopologySpec& topology, const std::string& input,
                     std::uint64_t sample_seed) {
    if (input.rfind("dist:", 0) == 0) {
        auto spec = DistributionSpec::parse(input.substr(5));
        return sample_vector(spec, topology.n, sample_seed);
    }
    if (input.rfind("worstcase:", 0) == 0) {
        std::int64_t k;
        const std::string text = input.substr(10);
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), k);
        if (ec != std::errc() || ptr != text.data() + text.size())
            throw ValidationError("bad worstcase K: '" + text + "'");
        return worst_case_input({topology, k});
    }
    if (input.rfind("file:", 0) == 0) {
        const std::string path = input.substr(5);
        std::ifstream in(path);
        if (!in) throw IoError("cannot open load vector file: " + path);
        IntLoads loads;
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#') continue;
            std::int64_t v;
            auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), v);
            if (ec != std::errc())
                throw ValidationError("bad load entry '" + line + "' in " + path);
            loads.push_back(v);
        }
        if (static_cast<std::int64_t>(loads.size()) != topology.n)
            throw ValidationError("load file has " + std::to_string(loads.size()) +
                                  " entries, expected " + std::to_string(topology.n));
        return loads;
    }
    throw ValidationError("input must be dist:<spec> | worstcase:K | file:path, got '" + input +
                          "'");
}

int effective_threads(int configured) {
    if (const char* env = std::getenv("BALCIRC_THREADS")) {
        int v = std::atoi(env);
        if (v >= 1) return v;
    }
    return configured;
}

namespace {

struct RepResult {
    std::vector<double> disc, max, min, total;  // one per checkpoint
};

// One repetition: a single incremental pass over the checkpoints.
RepResult run_repetition(const MatchingSchedule& schedule, const ExperimentConfig& cfg,
                         std::uint64_t rep_seed) {
    RepResult res;
    IntLoads x0 = build_input(cfg.topology, cfg.input, mix_seed(rep_seed, 1));
    const std::uint64_t coin_seed = mix_seed(rep_seed, 2);

    auto record_int = [&](const IntLoads& x) {
        auto [lo, hi] = std::minmax_element(x.begin(), x.end());
        double total = 0;
        for (std::int64_t v : x) total += static_cast<double>(v);
        res.disc.push_back(static_cast<double>(*hi - *lo));
        res.max.push_back(static_cast<double>(*hi));
        res.min.push_back(static_cast<double>(*lo));
        res.total.push_back(total);
    };
    auto record_real = [&](const std::vector<double>& x) {
        auto [lo, hi] = std::minmax_element(x.begin(), x.end());
        double total = 0;
        for (double v : x) total += v;
        res.disc.push_back(*hi - *lo);
        res.max.push_back(*hi);
        res.min.push_back(*lo);
        res.total.push_back(total);
    };

    if (cfg.mode == "discrete") {
        check_load_vector(schedule, x0);
        IntLoads x = std::move(x0);
        std::int64_t t = 0;
        std::uint64_t step = 0;
        for (std::int64_t cp : cfg.checkpoints) {
            for (; t < cp; ++t)
                for (const auto& m : schedule.matchings)
                    apply_matching_discrete(x, m, coin_seed, step++);
            record_int(x);
        }
    } else {
        std::vector<double> xi(x0.begin(), x0.end());
        std::int64_t t = 0;
        for (std::int64_t cp : cfg.checkpoints) {
            for (; t < cp; ++t)
                for (const auto& m : schedule.matchings) apply_matching(xi, m);
            record_real(xi);
        }
    }
    return res;
}

} // namespace

ResultTable run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    const auto start = std::chrono::steady_clock::now();
    const MatchingSchedule schedule = build_schedule(cfg.topology);

    ResultTable table;
    table.config = cfg;
    table.rep_seeds.resize(cfg.repetitions);
    for (std::int64_t r = 0; r < cfg.repetitions; ++r)
        table.rep_seeds[r] = mix_seed(cfg.base_seed, static_cast<std::uint64_t>(r));

    std::vector<RepResult> per_rep(cfg.repetitions);
    const int threads =
        std::min<std::int64_t>(effective_threads(cfg.threads), cfg.repetitions);
    if (threads <= 1) {
        for (std::int64_t r = 0; r < cfg.repetitions; ++r)
            per_rep[r] = run_repetition(schedule, cfg, table.rep_seeds[r]);
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(threads);
        for (int w = 0; w < threads; ++w)
            pool.emplace_back([&, w] {
                try {
                    for (std::int64_t r = w; r < cfg.repetitions; r += threads)
                        per_rep[r] = run_repetition(schedule, cfg, table.rep_seeds[r]);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        for (auto& th : pool) th.join();
        for (auto& err : errors)
            if (err) std::rethrow_exception(err);
    }

    table.rows.resize(cfg.checkpoints.size());
    for (std::size_t i = 0; i < cfg.checkpoints.size(); ++i) {
        auto& row = table.rows[i];
        row.t = cfg.checkpoints[i];
        for (std::int64_t r = 0; r < cfg.repetitions; ++r) {
            row.disc.push_back(per_rep[r].disc[i]);
            row.max.push_back(per_rep[r].max[i]);
            row.min.push_back(per_rep[r].min[i]);
            row.total.push_back(per_rep[r].total[i]);
        }
        row.lo = *std::min_element(row.disc.begin(), row.disc.end());
        row.hi = *std::max_element(row.disc.begin(), row.disc.end());
        double sum = 0;
        for (double d : row.disc) sum += d;
        row.mean = sum / static_cast<double>(row.disc.size());
        double ss = 0;
        for (double d : row.disc) ss += (d - row.mean) * (d - row.mean);
        row.stddev = row.disc.size() > 1
                         ? std::sqrt(ss / static_cast<double>(row.disc.size() - 1))
                         : 0.0;
    }
    table.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return table;
}

bool ResultTable::same_data(const ResultTable& other) const {
    if (config.to_json() != other.config.to_json()) return false;
    if (rep_seeds != other.rep_seeds || rows.size() != other.rows.size()) return false;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& a = rows[i];
        const auto& b = other.rows[i];
        if (a.t != b.t || a.disc != b.disc || a.max != b.max || a.min != b.min ||
            a.total != b.total)
            return false;
    }
    return true;
}

DecayFit fit_decay_exponent(const ResultTable& table, std::int64_t t_min, std::int64_t t_max) {
    std::vector<double> xs, ys;
    for (const auto& row : table.rows) {
        if (row.t < t_min || row.t > t_max || row.t < 1 || row.mean <= 0) continue;
        xs.push_back(std::log(static_cast<double>(row.t)));
        ys.push_back(std::log(row.mean));
    }
    const std::size_t m = xs.size();
    if (m < 4)
        throw ValidationError("decay fit needs >= 4 checkpoints with positive mean in range, got " +
                              std::to_string(m));
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < m; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= m;
    my /= m;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < m; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    const double slope = sxy / sxx;
    double rss = 0;
    for (std::size_t i = 0; i < m; ++i) {
        const double resid = ys[i] - my - slope * (xs[i] - mx);
        rss += resid * resid;
    }
    const double se = m > 2 ? std::sqrt(rss / static_cast<double>(m - 2) / sxx) : 0.0;
    return {slope, se};
}

namespace {

void write_comment_header(std::ofstream& out, const ResultTable& table) {
    out << "# config: " << table.config.to_json() << '\n';
    out << "# seeds: ";
    for (std::size_t r = 0; r < table.rep_seeds.size(); ++r)
        out << (r ? "," : "") << table.rep_seeds[r];
    out << '\n';
}

std::string summary_path_for(const std::string& path) {
    const auto dot = path.rfind('.');
    const auto slash = path.rfind('/');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
        return path + ".summary.csv";
    return path.substr(0, dot) + ".summary.csv";
}

} // namespace

void emit_csv(const ResultTable& table, const std::string& path) {
    std::ofstream raw(path);
    if (!raw) throw IoError("cannot open for writing: " + path);
    write_comment_header(raw, table);
    raw << "t,rep,discrepancy,max,min,total\n";
    for (const auto& row : table.rows)
        for (std::size_t r = 0; r < row.disc.size(); ++r)
            raw << row.t << ',' << r << ',' << format_double(row.disc[r]) << ','
                << format_double(row.max[r]) << ',' << format_double(row.min[r]) << ','
                << format_double(row.total[r]) << '\n';
    if (!raw) throw IoError("write failed: " + path);

    const std::string spath = summary_path_for(path);
    std::ofstream summary(spath);
    if (!summary) throw IoError("cannot open for writing: " + spath);
    write_comment_header(summary, table);
    summary << "t,mean,std,min,max\n";
    for (const auto& row : table.rows)
        summary << row.t << ',' << format_double(row.mean) << ',' << format_double(row.stddev)
                << ',' << format_double(row.lo) << ',' << format_double(row.hi) << '\n';
    if (!summary) throw IoError("write failed: " + spath);
}

void emit_json(const ResultTable& table, const std::string& path) {
    nlohmann::json j;
    j["config"] = nlohmann::json::parse(table.config.to_json());
    j["rep_seeds"] = table.rep_seeds;
    j["wall_seconds"] = table.wall_seconds;
    auto& rows = j["rows"] = nlohmann::json::array();
    for (const auto& row : table.rows)
        rows.push_back({{"t", row.t},
                        {"disc", row.disc},
                        {"max", row.max},
                        {"min", row.min},
                        {"total", row.total},
                        {"mean", row.mean},
                        {"std", row.stddev},
                        {"lo", row.lo},
                        {"hi", row.hi}});
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << j.dump(2) << '\n';
    if (!out) throw IoError("write failed: " + path);
}

ResultTable result_table_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError(std::string("result JSON parse error: ") + e.what());
    }
    ResultTable table;
    try {
        table.config = ExperimentConfig::from_json(j.at("config").dump());
        table.rep_seeds = j.at("rep_seeds").get<std::vector<std::uint64_t>>();
        table.wall_seconds = j.value("wall_seconds", 0.0);
        for (const auto& jr : j.at("rows")) {
            ResultTable::Row row;
            row.t = jr.at("t").get<std::int64_t>();
            row.disc = jr.at("disc").get<std::vector<double>>();
            row.max = jr.at("max").get<std::vector<double>>();
            row.min = jr.at("min").get<std::vector<double>>();
            row.total = jr.at("total").get<std::vector<double>>();
            row.mean = jr.at("mean").get<double>();
            row.stddev = jr.at("std").get<double>();
            row.lo = jr.at("lo").get<double>();
            row.hi = jr.at("hi").get<double>();
            table.rows.push_back(std::move(row));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("result JSON: ") + e.what());
    }
    return table;
}

ResultTable load_result_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open for reading: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return result_table_from_json(buf.str());
}

std::string verify_bounds(const ResultTable& table, const std::vector<BoundOverlay>& overlays) {
    nlohmann::json report = nlohmann::json::array();
    for (const auto& overlay : overlays) {
        nlohmann::json entry;
        entry["name"] = overlay.name;
        const bool asymptotic = overlay.name == "universal_disc" || overlay.name == "lambda_disc";
        auto rows = nlohmann::json::array();
        bool all_dominate = true;

        if (asymptotic) {
            // Fit the smallest c making the bound dominate every checkpoint,
            // then report the curve at that c.
            double fitted_c = 0;
            for (const auto& row : table.rows) {
                if (row.t < 1) continue;
                auto params = overlay.params;
                params["t"] = std::to_string(row.t);
                params["c"] = "1";
                const BoundReport base = eval_bound(overlay.name, params);
                const double additive = std::sqrt(std::log(double(table.config.topology.n)));
                const double shape = base.value - additive;  // c=1 decay term
                if (shape > 0 && row.mean > additive)
                    fitted_c = std::max(fitted_c, (row.mean - additive) / shape);
            }
            entry["fitted_c"] = fitted_c;
            for (const auto& row : table.rows) {
                if (row.t < 1) continue;
                auto params = overlay.params;
                params["t"] = std::to_string(row.t);
                params["c"] = format_double(std::max(fitted_c, 1e-12));
                const BoundReport rep = eval_bound(overlay.name, params);
                rows.push_back({{"t", row.t}, {"bound", rep.value}, {"empirical", row.mean}});
            }
        } else {
            for (const auto& row : table.rows) {
                if (row.t < 1) continue;  // evaluators require t >= 1
                auto params = overlay.params;
                params["t"] = std::to_string(row.t);
                const BoundReport rep = eval_bound(overlay.name, params);
                const bool ok = rep.side == BoundReport::Side::upper ? rep.value >= row.mean
                                                                     : rep.value <= row.mean;
                all_dominate = all_dominate && ok;
                rows.push_back({{"t", row.t},
                                {"bound", rep.value},
                                {"empirical", row.mean},
                                {"dominates", ok}});
            }
            entry["dominates_all"] = all_dominate;
        }
        entry["rows"] = std::move(rows);
        report.push_back(std::move(entry));
    }
    return report.dump();
}

std::vector<SimRow> simulate_run(const MatchingSchedule& schedule, const std::string& input,
                                 const std::string& mode, std::uint64_t seed,
                                 const std::vector<std::int64_t>& checkpoints) {
    if (mode != "discrete" && mode != "continuous")
        throw ValidationError("mode must be discrete|continuous, got '" + mode + "'");
    if (checkpoints.empty()) throw ValidationError("at least one checkpoint required");
    for (std::size_t i = 0; i < checkpoints.size(); ++i) {
        if (checkpoints[i] < 0) throw ValidationError("checkpoints must be >= 0");
        if (i > 0 && checkpoints[i] <= checkpoints[i - 1])
            throw ValidationError("checkpoints must be strictly increasing");
    }
    TopologySpec topo;
    if (schedule.topology) {
        topo = *schedule.topology;
    } else {
        topo.kind = TopologyKind::cycle;  // only n matters for input building
        topo.n = schedule.n;
    }
    if (input.rfind("worstcase:", 0) == 0 && !schedule.topology)
        throw ValidationError("worstcase input needs a schedule with topology metadata");

    std::vector<SimRow> rows;
    IntLoads x0 = build_input(topo, input, mix_seed(seed, 1));
    const std::uint64_t coin_seed = mix_seed(seed, 2);
    if (mode == "discrete") {
        check_load_vector(schedule, x0);
        std::int64_t t = 0;
        std::uint64_t step = 0;
        for (std::int64_t cp : checkpoints) {
            for (; t < cp; ++t)
                for (const auto& m : schedule.matchings)
                    apply_matching_discrete(x0, m, coin_seed, step++);
            auto [lo, hi] = std::minmax_element(x0.begin(), x0.end());
            double total = 0;
            for (std::int64_t v : x0) total += static_cast<double>(v);
            rows.push_back({cp, static_cast<double>(*hi - *lo), static_cast<double>(*hi),
                            static_cast<double>(*lo), total});
        }
    } else {
        std::vector<double> xi(x0.begin(), x0.end());
        std::int64_t t = 0;
        for (std::int64_t cp : checkpoints) {
            for (; t < cp; ++t)
                for (const auto& m : schedule.matchings) apply_matching(xi, m);
            auto [lo, hi] = std::minmax_element(xi.begin(), xi.end());
            double total = 0;
            for (double v : xi) total += v;
            rows.push_back({cp, *hi - *lo, *hi, *lo, total});
        }
    }
    return rows;
}

} // namespace balcirc
