#include "balcirc/balancer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "balcirc/errors.hpp"
#include "balcirc/markov.hpp"
#include "balcirc/rng.hpp"

namespace balcirc {

void check_load_vector(const MatchingSchedule& s, std::span<const std::int64_t> x) {
    if (static_cast<std::int64_t>(x.size()) != s.n)
        throw ValidationError("load vector length " + std::to_string(x.size()) +
                              " does not match schedule n=" + std::to_string(s.n));
    std::int64_t max_entry = 0;
    for (std::int64_t v : x) {
        if (v < 0) throw ValidationError("discrete loads must be nonnegative");
        max_entry = std::max(max_entry, v);
    }
    // Overflow guard: n * max_entry < 2^62 keeps every pair sum and total in range.
    if (max_entry > 0 && s.n > (std::int64_t(1) << 62) / max_entry)
        throw ValidationError("overflow guard violated: n * max_entry >= 2^62");
}

std::int64_t discrepancy(std::span<const std::int64_t> x) {
    if (x.empty()) throw ValidationError("discrepancy of empty vector");
    auto [lo, hi] = std::minmax_element(x.begin(), x.end());
    return *hi - *lo;
}

double discrepancy(std::span<const double> x) {
    if (x.empty()) throw ValidationError("discrepancy of empty vector");
    auto [lo, hi] = std::minmax_element(x.begin(), x.end());
    return *hi - *lo;
}

void apply_matching_discrete(std::span<std::int64_t> x, const Matching& m, std::uint64_t seed,
                             std::uint64_t step_index) {
    for (std::size_t e = 0; e < m.size(); ++e) {
        const auto [a, b] = m[e];
        const std::int64_t sum = x[a] + x[b];
        const std::int64_t half = sum >> 1;
        if (sum & 1) {
            const bool to_lower = counter_hash(seed, step_index, e) & 1;
            x[a] = to_lower ? half + 1 : half;
            x[b] = sum - x[a];
        } else {
            x[a] = half;
            x[b] = half;
        }
    }
}

std::vector<double> run_continuous(const MatchingSchedule& s, std::vector<double> xi0,
                                   std::int64_t t) {
    if (static_cast<std::int64_t>(xi0.size()) != s.n)
        throw ValidationError("load vector length " + std::to_string(xi0.size()) +
                              " does not match schedule n=" + std::to_string(s.n));
    if (t < 0) throw ValidationError("round count must be nonnegative");
    for (std::int64_t round = 0; round < t; ++round)
        for (const auto& m : s.matchings) apply_matching(xi0, m);
    return xi0;
}

IntLoads run_discrete(const MatchingSchedule& s, IntLoads x0, std::int64_t t, std::uint64_t seed) {
    check_load_vector(s, x0);
    if (t < 0) throw ValidationError("round count must be nonnegative");
    std::uint64_t step = 0;
    for (std::int64_t round = 0; round < t; ++round)
        for (const auto& m : s.matchings) apply_matching_discrete(x0, m, seed, step++);
    return x0;
}

IntLoads worst_case_input(const WorstCaseSpec& spec) {
    spec.topology.validate();
    if (spec.k < 1) throw ValidationError("worst-case K must be >= 1");
    const std::int64_t n = spec.topology.n;
    IntLoads x(n, 0);
    const std::int64_t load = 2 * spec.k;
    switch (spec.topology.kind) {
        case TopologyKind::cycle:
            for (std::int64_t i = 0; i < n / 2; ++i) x[i] = load;
            break;
        case TopologyKind::torus: {
            // n/2-nearest neighbors of node 0, ties broken by node index.
            std::vector<std::pair<std::int64_t, std::int64_t>> by_dist(n);
            for (std::int64_t v = 0; v < n; ++v)
                by_dist[v] = {node_distance(spec.topology, 0, v), v};
            std::sort(by_dist.begin(), by_dist.end());
            for (std::int64_t i = 0; i < n / 2; ++i) x[by_dist[i].second] = load;
            break;
        }
        case TopologyKind::hypercube: {
            const std::int64_t top_bit = n >> 1;
            for (std::int64_t v = 0; v < n; ++v)
                if (v & top_bit) x[v] = load;
            break;
        }
        case TopologyKind::expander:
            throw ValidationError("worst-case input is defined for cycle, torus and hypercube");
    }
    return x;
}

double discrete_continuous_deviation(const MatchingSchedule& s, const IntLoads& x0,
                                     std::int64_t t, std::uint64_t seed) {
    IntLoads x = run_discrete(s, x0, t, seed);
    std::vector<double> xi(x0.begin(), x0.end());
    xi = run_continuous(s, std::move(xi), t);
    double dev = 0;
    for (std::int64_t i = 0; i < s.n; ++i)
        dev = std::max(dev, std::abs(static_cast<double>(x[i]) - xi[i]));
    return dev;
}

} // namespace balcirc
