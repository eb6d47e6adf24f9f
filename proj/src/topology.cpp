#include "balcirc/topology.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "balcirc/errors.hpp"
#include "balcirc/rng.hpp"

namespace balcirc {

std::string to_string(TopologyKind kind) {
    switch (kind) {
        case TopologyKind::cycle: return "cycle";
        case TopologyKind::torus: return "torus";
        case TopologyKind::hypercube: return "hypercube";
        case TopologyKind::expander: return "expander";
    }
    return "?";
}

TopologyKind topology_kind_from_string(const std::string& name) {
    if (name == "cycle") return TopologyKind::cycle;
    if (name == "torus") return TopologyKind::torus;
    if (name == "hypercube") return TopologyKind::hypercube;
    if (name == "expander") return TopologyKind::expander;
    throw ValidationError("unknown topology kind: '" + name + "'");
}

std::int64_t TopologySpec::side() const {
    if (r < 1) throw ValidationError("torus dimension r must be >= 1, got " + std::to_string(r));
    auto s = static_cast<std::int64_t>(std::llround(std::pow(double(n), 1.0 / r)));
    // llround can land one off for large n; settle it exactly.
    for (std::int64_t cand : {s - 1, s, s + 1}) {
        if (cand < 1) continue;
        std::int64_t p = 1;
        bool overflow = false;
        for (int i = 0; i < r; ++i) {
            if (p > n / cand + 1) { overflow = true; break; }
            p *= cand;
        }
        if (!overflow && p == n) return cand;
    }
    throw ValidationError("torus requires n^(1/r) integral: n=" + std::to_string(n) +
                          ", r=" + std::to_string(r));
}

void TopologySpec::validate() const {
    if (n < 1) throw ValidationError("node count must be positive, got " + std::to_string(n));
    switch (kind) {
        case TopologyKind::cycle:
            if (n % 2 != 0 || n < 4)
                throw ValidationError("cycle requires even n >= 4, got " + std::to_string(n));
            break;
        case TopologyKind::torus: {
            std::int64_t s = side();  // throws when not integral
            if (s < 4 || s % 2 != 0)
                throw ValidationError("torus requires even side n^(1/r) >= 4, got side " +
                                      std::to_string(s));
            break;
        }
        case TopologyKind::hypercube:
            if (n < 2 || !std::has_single_bit(static_cast<std::uint64_t>(n)))
                throw ValidationError("hypercube requires n a power of two >= 2, got " +
                                      std::to_string(n));
            break;
        case TopologyKind::expander:
            if (n % 2 != 0)
                throw ValidationError("expander requires even n, got " + std::to_string(n));
            if (d_exp < 3)
                throw ValidationError("expander requires d >= 3 matchings, got " +
                                      std::to_string(d_exp));
            break;
    }
}

namespace {

void sort_matching(Matching& m) {
    for (auto& [a, b] : m)
        if (a > b) std::swap(a, b);
    std::sort(m.begin(), m.end());
}

// Odd/even scheme on one cycle of length `len`; `pos(j)` maps the cycle
// position to a node index. odd_phase selects the {j, j+1} pairs with j odd.
template <typename PosFn>
Matching cycle_phase_matching(std::int64_t len, bool odd_phase, PosFn pos) {
    Matching m;
    m.reserve(len / 2);
    for (std::int64_t j = odd_phase ? 1 : 0; j < len; j += 2) {
        auto a = static_cast<std::uint32_t>(pos(j));
        auto b = static_cast<std::uint32_t>(pos((j + 1) % len));
        m.push_back({a, b});
    }
    sort_matching(m);
    return m;
}

} // namespace

MatchingSchedule build_schedule(const TopologySpec& spec) {
    spec.validate();
    MatchingSchedule s;
    s.n = spec.n;
    s.topology = spec;

    switch (spec.kind) {
        case TopologyKind::cycle: {
            auto ident = [](std::int64_t j) { return j; };
            s.matchings.push_back(cycle_phase_matching(spec.n, true, ident));
            s.matchings.push_back(cycle_phase_matching(spec.n, false, ident));
            break;
        }
        case TopologyKind::torus: {
            const std::int64_t side = spec.side();
            // Axis 0 is the stride-1 coordinate; two matchings per axis.
            std::int64_t stride = 1;
            for (int axis = 0; axis < spec.r; ++axis) {
                const std::int64_t lines = spec.n / side;
                for (bool odd : {true, false}) {
                    Matching m;
                    m.reserve(spec.n / 2);
                    for (std::int64_t line = 0; line < lines; ++line) {
                        // Base index of this axis-aligned line.
                        std::int64_t lo = line % stride;
                        std::int64_t hi = line / stride;
                        std::int64_t base = hi * stride * side + lo;
                        for (std::int64_t j = odd ? 1 : 0; j < side; j += 2) {
                            auto a = static_cast<std::uint32_t>(base + j * stride);
                            auto b = static_cast<std::uint32_t>(base + ((j + 1) % side) * stride);
                            if (a > b) std::swap(a, b);
                            m.push_back({a, b});
                        }
                    }
                    sort_matching(m);
                    s.matchings.push_back(std::move(m));
                }
                stride *= side;
            }
            break;
        }
        case TopologyKind::hypercube: {
            const int dim = std::countr_zero(static_cast<std::uint64_t>(spec.n));
            for (int bit = 0; bit < dim; ++bit) {
                Matching m;
                m.reserve(spec.n / 2);
                for (std::int64_t u = 0; u < spec.n; ++u)
                    if ((u & (std::int64_t(1) << bit)) == 0)
                        m.push_back({static_cast<std::uint32_t>(u),
                                     static_cast<std::uint32_t>(u | (std::int64_t(1) << bit))});
                sort_matching(m);
                s.matchings.push_back(std::move(m));
            }
            break;
        }
        case TopologyKind::expander: {
            // d independent uniform perfect matchings: shuffle, pair consecutive.
            std::vector<std::uint32_t> perm(spec.n);
            for (int k = 0; k < spec.d_exp; ++k) {
                std::iota(perm.begin(), perm.end(), 0u);
                SplitMix64 rng(mix_seed(spec.seed, static_cast<std::uint64_t>(k)));
                for (std::int64_t i = spec.n - 1; i > 0; --i)
                    std::swap(perm[i], perm[rng.next_below(static_cast<std::uint64_t>(i + 1))]);
                Matching m;
                m.reserve(spec.n / 2);
                for (std::int64_t i = 0; i < spec.n; i += 2)
                    m.push_back({perm[i], perm[i + 1]});
                sort_matching(m);
                s.matchings.push_back(std::move(m));
            }
            break;
        }
    }
    return s;
}

std::vector<std::string> validate_schedule(const MatchingSchedule& s) {
    std::vector<std::string> violations;
    if (s.n < 1) violations.push_back("node count must be positive");
    if (s.matchings.empty()) violations.push_back("schedule must contain at least one matching");
    std::vector<char> seen(std::max<std::int64_t>(s.n, 0));
    for (std::size_t k = 0; k < s.matchings.size(); ++k) {
        std::fill(seen.begin(), seen.end(), 0);
        for (auto [a, b] : s.matchings[k]) {
            for (std::uint32_t v : {a, b}) {
                if (v >= s.n) {
                    violations.push_back("matching " + std::to_string(k) + ": node " +
                                         std::to_string(v) + " out of range [0," +
                                         std::to_string(s.n - 1) + "]");
                } else if (seen[v]) {
                    violations.push_back("matching " + std::to_string(k) + ": node " +
                                         std::to_string(v) + " matched twice");
                } else {
                    seen[v] = 1;
                }
            }
            if (a == b)
                violations.push_back("matching " + std::to_string(k) + ": self-pair at node " +
                                     std::to_string(a));
        }
    }
    return violations;
}

std::int64_t node_distance(const TopologySpec& spec, std::int64_t u, std::int64_t v) {
    spec.validate();
    if (u < 0 || u >= spec.n || v < 0 || v >= spec.n)
        throw ValidationError("node index out of range: (" + std::to_string(u) + "," +
                              std::to_string(v) + "), n=" + std::to_string(spec.n));
    auto cycle_dist = [](std::int64_t a, std::int64_t b, std::int64_t len) {
        std::int64_t diff = std::abs(a - b);
        return std::min(diff, len - diff);
    };
    switch (spec.kind) {
        case TopologyKind::cycle:
            return cycle_dist(u, v, spec.n);
        case TopologyKind::torus: {
            const std::int64_t side = spec.side();
            std::int64_t total = 0;
            for (int axis = 0; axis < spec.r; ++axis) {
                total += cycle_dist(u % side, v % side, side);
                u /= side;
                v /= side;
            }
            return total;
        }
        case TopologyKind::hypercube:
            return std::popcount(static_cast<std::uint64_t>(u ^ v));
        case TopologyKind::expander: {
            if (u == v) return 0;
            // BFS over the union of the seeded matchings.
            MatchingSchedule s = build_schedule(spec);
            std::vector<std::vector<std::uint32_t>> adj(spec.n);
            for (const auto& m : s.matchings)
                for (auto [a, b] : m) {
                    adj[a].push_back(b);
                    adj[b].push_back(a);
                }
            std::vector<std::int64_t> dist(spec.n, -1);
            std::deque<std::uint32_t> queue{static_cast<std::uint32_t>(u)};
            dist[u] = 0;
            while (!queue.empty()) {
                std::uint32_t x = queue.front();
                queue.pop_front();
                if (x == v) return dist[x];
                for (std::uint32_t y : adj[x])
                    if (dist[y] < 0) {
                        dist[y] = dist[x] + 1;
                        queue.push_back(y);
                    }
            }
            throw ValidationError("expander matchings do not connect nodes " + std::to_string(u) +
                                  " and " + std::to_string(v));
        }
    }
    throw ValidationError("unreachable topology kind");
}

std::string schedule_to_json(const MatchingSchedule& s) {
    nlohmann::json j;
    j["n"] = s.n;
    j["d"] = s.period();
    auto& arr = j["matchings"] = nlohmann::json::array();
    for (const auto& m : s.matchings) {
        nlohmann::json jm = nlohmann::json::array();
        for (auto [a, b] : m) jm.push_back({a, b});
        arr.push_back(std::move(jm));
    }
    if (s.topology) {
        const auto& t = *s.topology;
        nlohmann::json jt{{"kind", to_string(t.kind)}, {"n", t.n}};
        if (t.kind == TopologyKind::torus) jt["r"] = t.r;
        if (t.kind == TopologyKind::expander) {
            jt["d"] = t.d_exp;
            jt["seed"] = t.seed;
        }
        j["topology"] = std::move(jt);
    }
    return j.dump();
}

MatchingSchedule schedule_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError(std::string("schedule JSON parse error: ") + e.what());
    }
    MatchingSchedule s;
    try {
        s.n = j.at("n").get<std::int64_t>();
        for (const auto& jm : j.at("matchings")) {
            Matching m;
            for (const auto& jp : jm) {
                if (!jp.is_array() || jp.size() != 2)
                    throw ValidationError("schedule JSON: each pair must be [u,v]");
                m.push_back({jp[0].get<std::uint32_t>(), jp[1].get<std::uint32_t>()});
            }
            sort_matching(m);
            s.matchings.push_back(std::move(m));
        }
        if (j.contains("topology")) {
            const auto& jt = j["topology"];
            TopologySpec t;
            t.kind = topology_kind_from_string(jt.at("kind").get<std::string>());
            t.n = jt.at("n").get<std::int64_t>();
            if (jt.contains("r")) t.r = jt["r"].get<int>();
            if (jt.contains("d")) t.d_exp = jt["d"].get<int>();
            if (jt.contains("seed")) t.seed = jt["seed"].get<std::uint64_t>();
            s.topology = t;
        }
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("schedule JSON: ") + e.what());
    }
    auto violations = validate_schedule(s);
    if (!violations.empty())
        throw ValidationError("schedule JSON invalid: " + violations.front());
    return s;
}

void save_schedule(const MatchingSchedule& s, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << schedule_to_json(s) << '\n';
    if (!out) throw IoError("write failed: " + path);
}

MatchingSchedule load_schedule(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open for reading: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return schedule_from_json(buf.str());
}

} // namespace balcirc
