#pragma once

#include <bit>
#include <cstdint>
#include <string>
#include <vector>

#include "balcirc/markov.hpp"

namespace balcirc {

/// Fixed-width bitset over the chain's state space with cached pi-mass.
class StateSubset {
public:
    StateSubset() = default;
    StateSubset(std::int64_t n, const std::vector<double>& pi);

    static StateSubset singleton(const MarkovChain& chain, std::int64_t x);

    void insert(std::int64_t x, const std::vector<double>& pi);
    bool contains(std::int64_t x) const;
    std::int64_t size() const { return count_; }
    std::int64_t universe() const { return n_; }
    bool empty() const { return count_ == 0; }
    bool full() const { return count_ == n_; }
    double pi_mass() const { return pi_mass_; }

    /// Recomputes pi(S) from scratch; throws if it drifted beyond 1e-12.
    void check_pi_mass(const std::vector<double>& pi) const;

    template <typename Fn>
    void for_each(Fn&& fn) const {
        for (std::int64_t w = 0; w < static_cast<std::int64_t>(words_.size()); ++w) {
            std::uint64_t bits = words_[w];
            while (bits) {
                const int b = std::countr_zero(bits);
                fn(w * 64 + b);
                bits &= bits - 1;
            }
        }
    }

    bool operator==(const StateSubset&) const = default;

private:
    std::int64_t n_ = 0;
    std::int64_t count_ = 0;
    double pi_mass_ = 0;
    std::vector<std::uint64_t> words_;
};

/// Q(S,y) = sum_{x in S} pi_x P_{x,y} for every y.
std::vector<double> edge_measure(const MarkovChain& chain, const StateSubset& s);

/// One evolving-set step: {y : Q(S,y)/pi_y >= u}. Note u = 0 yields the full
/// state space by the ">= u" convention; simulation draws u from (0,1].
StateSubset evolve_step(const MarkovChain& chain, const StateSubset& s, double u);

struct StepExpectation {
    double full;           // E[pi(S~)], equals pi(S) (martingale)
    double cond_le_beta;   // E[pi(S~) | U <= beta]
    double cond_gt_beta;   // E[pi(S~) | U > beta]
    double variance;       // Var(pi(S~))
    double q_out;          // Q(S, S^c)
};

/// Exact one-step expectations by sorting the n thresholds Q(S,y)/pi_y and
/// integrating the piecewise-constant set map over u in (0,1]. Absorbing S
/// returns the trivial (pi(S), pi(S), pi(S), 0, 0).
StepExpectation exact_step_expectation(const MarkovChain& chain, const StateSubset& s);

struct Trajectory {
    struct Point {
        std::int64_t t;
        std::int64_t set_size;
        double pi_mass;
    };
    std::vector<Point> points;
    bool absorbed = false;
    bool to_omega = false;
    std::int64_t tau = 0;  // hitting time of {empty, full}; = max_t when not absorbed
};

/// Runs from S_0 = {x} with i.i.d. u_t ~ Uni(0,1] until absorption or max_t.
Trajectory simulate_to_absorption(const MarkovChain& chain, std::int64_t x, std::int64_t max_t,
                                  std::uint64_t seed);

struct AbsorptionTrials {
    std::vector<std::int64_t> tau;  // per trial, capped at max_t
    std::vector<bool> absorbed;
    std::vector<bool> to_omega;

    double omega_fraction() const;
    double tail_fraction(std::int64_t t) const;  // empirical P(tau > t)
};

/// Batch absorption runs without trajectory recording; trial seeds derived
/// from (seed, trial index).
AbsorptionTrials run_absorption_trials(const MarkovChain& chain, std::int64_t x,
                                       std::int64_t max_t, std::int64_t trials,
                                       std::uint64_t seed);

struct Estimate {
    double value;
    double std_error;
};

/// P^t_{x,y} estimated as (pi_y/pi_x) * freq(y in S_t) over seeded trials.
Estimate estimate_tstep_probability(const MarkovChain& chain, std::int64_t x, std::int64_t y,
                                    std::int64_t t, std::int64_t trials, std::uint64_t seed);

struct AbsorptionParams {
    double initial_mass;   // M_0 = pi_x
    double step_std;       // beta^{1/2} * pi_min * alpha
    double growth_factor;  // ((1-beta)/alpha + 1) * pi_max/pi_min

    static AbsorptionParams from_chain(const MarkovChain& chain, std::int64_t x);
};

/// P(tau > t) <= min(1, (2 M_0 / sigma) sqrt(D / t)).
double absorption_tail_bound(const AbsorptionParams& params, std::int64_t t);

/// Checks the one-step growth bound on the largest possible successor
/// (u -> 0+), in both pi-mass and set-size form; empty result = ok.
std::vector<std::string> growth_bound_check(const MarkovChain& chain, const StateSubset& s);

} // namespace balcirc
