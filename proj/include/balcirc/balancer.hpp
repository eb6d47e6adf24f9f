#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "balcirc/topology.hpp"

namespace balcirc {

using IntLoads = std::vector<std::int64_t>;

/// Throws unless entries are >= 0 and n * max_entry < 2^62.
void check_load_vector(const MatchingSchedule& s, std::span<const std::int64_t> x);

std::int64_t discrepancy(std::span<const std::int64_t> x);
double discrepancy(std::span<const double> x);

/// One discrete matching step with randomized rounding: paired loads a,b
/// become the split floor/ceil of (a+b)/2, the excess token assigned by a
/// fair coin. Coins come from a counter-based stream indexed by
/// (step_index, edge index within the matching), so results do not depend
/// on edge processing order. Pairs are processed ascending by smaller
/// endpoint; a coin of 1 sends the excess token to the smaller endpoint.
void apply_matching_discrete(std::span<std::int64_t> x, const Matching& m, std::uint64_t seed,
                             std::uint64_t step_index);

/// t rounds of perfect averaging, matchings in forward schedule order.
std::vector<double> run_continuous(const MatchingSchedule& s, std::vector<double> xi0,
                                   std::int64_t t);

/// t rounds of the token process, forward order, coins seeded as above with
/// step_index counting matchings from 0.
IntLoads run_discrete(const MatchingSchedule& s, IntLoads x0, std::int64_t t, std::uint64_t seed);

struct WorstCaseSpec {
    TopologySpec topology;
    std::int64_t k = 1;  // load scale; loaded nodes carry 2K
};

/// Exactly n/2 nodes carry 2K, the rest 0: cycle takes nodes 0..n/2-1,
/// torus the n/2 nodes nearest node 0 (ties by index), hypercube the nodes
/// whose top bit is set. Total nK, discrepancy 2K.
IntLoads worst_case_input(const WorstCaseSpec& spec);

/// max_w |x_w^(t) - xi_w^(t)| for both processes started from x0.
double discrete_continuous_deviation(const MatchingSchedule& s, const IntLoads& x0,
                                     std::int64_t t, std::uint64_t seed);

} // namespace balcirc
