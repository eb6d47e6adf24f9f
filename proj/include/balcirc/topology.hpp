#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace balcirc {

enum class TopologyKind { cycle, torus, hypercube, expander };

std::string to_string(TopologyKind kind);
TopologyKind topology_kind_from_string(const std::string& name);

struct TopologySpec {
    TopologyKind kind = TopologyKind::cycle;
    std::int64_t n = 0;
    int r = 1;               // torus dimension
    int d_exp = 0;           // expander: number of matchings
    std::uint64_t seed = 0;  // expander only

    /// Throws ValidationError naming the violated constraint.
    void validate() const;

    /// Torus side length n^(1/r); validated integral.
    std::int64_t side() const;
};

/// One matching: disjoint unordered pairs, stored as (lo, hi) and sorted by lo.
using Matching = std::vector<std::pair<std::uint32_t, std::uint32_t>>;

struct MatchingSchedule {
    std::int64_t n = 0;
    std::vector<Matching> matchings;               // applied periodically
    std::optional<TopologySpec> topology;          // present when built here

    int period() const { return static_cast<int>(matchings.size()); }
};

MatchingSchedule build_schedule(const TopologySpec& spec);

/// Every disjointness/range violation as a human-readable string; empty = ok.
std::vector<std::string> validate_schedule(const MatchingSchedule& s);

/// Graph distance: cycle min(|u-v|, n-|u-v|), torus per-axis sum,
/// hypercube Hamming, expander BFS over the union of its matchings.
std::int64_t node_distance(const TopologySpec& spec, std::int64_t u, std::int64_t v);

// JSON wire format: {"n": N, "d": D, "matchings": [[[u,v],...],...]},
// plus a "topology" echo when the schedule was built from a spec.
std::string schedule_to_json(const MatchingSchedule& s);
MatchingSchedule schedule_from_json(const std::string& text);

void save_schedule(const MatchingSchedule& s, const std::string& path);
MatchingSchedule load_schedule(const std::string& path);

} // namespace balcirc
