#include "balcirc/evolset.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "balcirc/errors.hpp"
#include "balcirc/rng.hpp"

namespace balcirc {

StateSubset::StateSubset(std::int64_t n, const std::vector<double>&) : n_(n) {
    if (n < 1 || n > (std::int64_t(1) << 16))
        throw ValidationError("evolving sets guarded to 1 <= n <= 2^16, got " + std::to_string(n));
    words_.assign((n + 63) / 64, 0);
}

StateSubset StateSubset::singleton(const MarkovChain& chain, std::int64_t x) {
    if (x < 0 || x >= chain.n)
        throw ValidationError("state out of range: " + std::to_string(x));
    StateSubset s(chain.n, chain.pi);
    s.insert(x, chain.pi);
    return s;
}

void StateSubset::insert(std::int64_t x, const std::vector<double>& pi) {
    if (x < 0 || x >= n_) throw ValidationError("state out of range: " + std::to_string(x));
    auto& word = words_[x / 64];
    const std::uint64_t bit = std::uint64_t(1) << (x % 64);
    if (word & bit) return;
    word |= bit;
    ++count_;
    pi_mass_ += pi[x];
}

bool StateSubset::contains(std::int64_t x) const {
    if (x < 0 || x >= n_) return false;
    return words_[x / 64] & (std::uint64_t(1) << (x % 64));
}

void StateSubset::check_pi_mass(const std::vector<double>& pi) const {
    double mass = 0;
    for_each([&](std::int64_t x) { mass += pi[x]; });
    if (std::abs(mass - pi_mass_) > 1e-12)
        throw ValidationError("cached pi-mass drifted: cached " + std::to_string(pi_mass_) +
                              ", recomputed " + std::to_string(mass));
}

std::vector<double> edge_measure(const MarkovChain& chain, const StateSubset& s) {
    std::vector<double> q(chain.n, 0.0);
    s.for_each([&](std::int64_t x) {
        const double pix = chain.pi[x];
        for (auto [y, p] : chain.rows[x]) q[y] += pix * p;
    });
    return q;
}

StateSubset evolve_step(const MarkovChain& chain, const StateSubset& s, double u) {
    if (!(u >= 0.0 && u <= 1.0)) throw ValidationError("u must lie in [0,1]");
    const std::vector<double> q = edge_measure(chain, s);
    StateSubset next(chain.n, chain.pi);
    for (std::int64_t y = 0; y < chain.n; ++y)
        if (q[y] / chain.pi[y] >= u) next.insert(y, chain.pi);
    return next;
}

StepExpectation exact_step_expectation(const MarkovChain& chain, const StateSubset& s) {
    StepExpectation out{};
    if (s.empty() || s.full()) {
        out.full = out.cond_le_beta = out.cond_gt_beta = s.pi_mass();
        return out;
    }
    const std::vector<double> q = edge_measure(chain, s);
    out.q_out = 0;
    for (std::int64_t y = 0; y < chain.n; ++y)
        if (!s.contains(y)) out.q_out += q[y];

    // Sort states by threshold h_y = Q(S,y)/pi_y descending; walking the
    // sorted list yields pi(S~(u)) as a non-increasing step function of u
    // with breakpoints exactly at the h values.
    std::vector<std::pair<double, std::int64_t>> by_threshold(chain.n);
    for (std::int64_t y = 0; y < chain.n; ++y)
        by_threshold[y] = {std::min(q[y] / chain.pi[y], 1.0), y};
    std::sort(by_threshold.begin(), by_threshold.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });

    const double beta = chain.beta;
    double mass_ge = 0;        // pi({y : h_y >= current segment})
    double upper = 1.0;        // right end of the current u-segment
    double mean = 0, second = 0, mean_le = 0, mean_gt = 0;
    std::size_t i = 0;
    while (upper > 0) {
        // Accumulate states whose threshold is >= upper; they belong to S~ for
        // every u <= upper.
        while (i < by_threshold.size() && by_threshold[i].first >= upper) {
            mass_ge += chain.pi[by_threshold[i].second];
            ++i;
        }
        const double lower =
            std::max(0.0, i < by_threshold.size() ? by_threshold[i].first : 0.0);
        // On u in (lower, upper], S~ = {y : h_y >= upper} with mass mass_ge.
        const double len = upper - lower;
        mean += len * mass_ge;
        second += len * mass_ge * mass_ge;
        const double le_len = std::max(0.0, std::min(upper, beta) - std::min(lower, beta));
        mean_le += le_len * mass_ge;
        mean_gt += (len - le_len) * mass_ge;
        upper = lower;
    }
    out.full = mean;
    out.variance = std::max(0.0, second - mean * mean);
    out.cond_le_beta = mean_le / beta;
    out.cond_gt_beta = beta < 1.0 ? mean_gt / (1.0 - beta) : s.pi_mass();
    return out;
}

namespace {

// Shared stepping core: evolve S_0 = {x} for up to max_t steps, reporting
// each new state; stops early once absorbed.
template <typename Visit>
void walk_evolving_set(const MarkovChain& chain, std::int64_t x, std::int64_t max_t,
                       std::uint64_t seed, Visit&& visit) {
    StateSubset s = StateSubset::singleton(chain, x);
    SplitMix64 rng(seed);
    for (std::int64_t t = 1; t <= max_t; ++t) {
        s = evolve_step(chain, s, rng.next_unit_open_closed());
        const bool absorbed = s.empty() || s.full();
        if (!visit(t, s, absorbed) || absorbed) return;
    }
}

} // namespace

Trajectory simulate_to_absorption(const MarkovChain& chain, std::int64_t x, std::int64_t max_t,
                                  std::uint64_t seed) {
    Trajectory traj;
    StateSubset start = StateSubset::singleton(chain, x);
    traj.points.push_back({0, start.size(), start.pi_mass()});
    traj.tau = max_t;
    walk_evolving_set(chain, x, max_t, seed,
                      [&](std::int64_t t, const StateSubset& s, bool absorbed) {
                          traj.points.push_back({t, s.size(), s.pi_mass()});
                          if (absorbed) {
                              traj.absorbed = true;
                              traj.to_omega = s.full();
                              traj.tau = t;
                          }
                          return true;
                      });
    return traj;
}

double AbsorptionTrials::omega_fraction() const {
    if (to_omega.empty()) return 0;
    std::int64_t hits = 0;
    for (bool b : to_omega) hits += b;
    return static_cast<double>(hits) / static_cast<double>(to_omega.size());
}

double AbsorptionTrials::tail_fraction(std::int64_t t) const {
    if (tau.empty()) return 0;
    std::int64_t hits = 0;
    for (std::size_t i = 0; i < tau.size(); ++i)
        if (!absorbed[i] || tau[i] > t) ++hits;
    return static_cast<double>(hits) / static_cast<double>(tau.size());
}

AbsorptionTrials run_absorption_trials(const MarkovChain& chain, std::int64_t x,
                                       std::int64_t max_t, std::int64_t trials,
                                       std::uint64_t seed) {
    if (trials < 1) throw ValidationError("trials must be >= 1");
    AbsorptionTrials out;
    out.tau.reserve(trials);
    out.absorbed.reserve(trials);
    out.to_omega.reserve(trials);
    for (std::int64_t trial = 0; trial < trials; ++trial) {
        std::int64_t tau = max_t;
        bool absorbed = false, to_omega = false;
        walk_evolving_set(chain, x, max_t, mix_seed(seed, static_cast<std::uint64_t>(trial)),
                          [&](std::int64_t t, const StateSubset& s, bool done) {
                              if (done) {
                                  tau = t;
                                  absorbed = true;
                                  to_omega = s.full();
                              }
                              return true;
                          });
        out.tau.push_back(tau);
        out.absorbed.push_back(absorbed);
        out.to_omega.push_back(to_omega);
    }
    return out;
}

Estimate estimate_tstep_probability(const MarkovChain& chain, std::int64_t x, std::int64_t y,
                                    std::int64_t t, std::int64_t trials, std::uint64_t seed) {
    if (y < 0 || y >= chain.n) throw ValidationError("state out of range: " + std::to_string(y));
    if (trials < 1000) throw ValidationError("estimate requires >= 10^3 trials");
    if (t < 0) throw ValidationError("t must be nonnegative");
    const double ratio = chain.pi[y] / chain.pi[x];
    if (t == 0) return {x == y ? 1.0 : 0.0, 0.0};

    std::int64_t hits = 0;
    for (std::int64_t trial = 0; trial < trials; ++trial) {
        bool member = (x == y);  // value of "y in S" at the last visited step
        walk_evolving_set(chain, x, t, mix_seed(seed, static_cast<std::uint64_t>(trial)),
                          [&](std::int64_t, const StateSubset& s, bool) {
                              member = s.contains(y);
                              return true;
                          });
        // Absorbed runs stay at the absorbing set, so membership is final.
        if (member) ++hits;
    }
    const double freq = static_cast<double>(hits) / static_cast<double>(trials);
    const double se = std::sqrt(freq * (1 - freq) / static_cast<double>(trials));
    return {ratio * freq, ratio * se};
}

AbsorptionParams AbsorptionParams::from_chain(const MarkovChain& chain, std::int64_t x) {
    if (x < 0 || x >= chain.n) throw ValidationError("state out of range: " + std::to_string(x));
    AbsorptionParams p;
    p.initial_mass = chain.pi[x];
    p.step_std = std::sqrt(chain.beta) * chain.pi_min() * chain.alpha;
    p.growth_factor = ((1.0 - chain.beta) / chain.alpha + 1.0) * chain.pi_max() / chain.pi_min();
    return p;
}

double absorption_tail_bound(const AbsorptionParams& params, std::int64_t t) {
    if (t < 1) throw ValidationError("t must be >= 1");
    if (!(params.initial_mass > 0 && params.step_std > 0 && params.growth_factor >= 1))
        throw ValidationError("absorption parameters out of domain");
    const double value = 2.0 * params.initial_mass / params.step_std *
                         std::sqrt(params.growth_factor / static_cast<double>(t));
    return std::min(1.0, value);
}

std::vector<std::string> growth_bound_check(const MarkovChain& chain, const StateSubset& s) {
    std::vector<std::string> violations;
    if (s.empty() || s.full()) return violations;  // absorbing; nothing to check
    const std::vector<double> q = edge_measure(chain, s);
    StateSubset successor(chain.n, chain.pi);
    for (std::int64_t y = 0; y < chain.n; ++y)
        if (q[y] > 0) successor.insert(y, chain.pi);

    const double factor = (1.0 - chain.beta) / chain.alpha + 1.0;
    const double mass_cap = factor * chain.pi_max() / chain.pi_min() * s.pi_mass();
    if (successor.pi_mass() > mass_cap + 1e-12)
        violations.push_back("pi-mass growth " + std::to_string(successor.pi_mass()) +
                             " exceeds cap " + std::to_string(mass_cap));
    const double size_cap = factor * static_cast<double>(s.size());
    if (static_cast<double>(successor.size()) > size_cap + 1e-12)
        violations.push_back("set-size growth " + std::to_string(successor.size()) +
                             " exceeds cap " + std::to_string(size_cap));
    return violations;
}

} // namespace balcirc
