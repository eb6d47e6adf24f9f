#pragma once

#include <cstdint>
#include <map>
#include <string>

namespace balcirc {

struct BoundReport {
    std::string name;
    std::map<std::string, double> inputs;  // echoed for provenance
    double value = 0;
    enum class Side { upper, lower } side = Side::upper;
    std::string caveat;  // empty when the formula carries explicit constants

    std::string to_json() const;
};

// Evaluators, each exactly the printed formula. Domain violations throw
// ValidationError; lower bounds clamp at 0 where noted.

/// |P^t_{x,y} - pi_y| <= (pi_max/pi_min)^{3/2} * 2/(beta^{1/2} alpha)
///                        * sqrt((1 - beta + alpha) / (alpha t)).
double markov_tstep_bound(double alpha, double beta, double pi_max, double pi_min, std::int64_t t);

/// delta * sqrt(128) * kappa * sigma * log n * pair_dist + sqrt(48 log n).
double main1_upper_threshold(double delta, double kappa, double sigma, std::int64_t n,
                             double pair_dist);

/// Failure probability companion: 2 e^{-delta^2} + 2 n^{-2}.
double main1_failure_probability(double delta, std::int64_t n);

/// max(sigma/(2 sqrt(2 log2 sigma)) * pair_dist - sqrt(48 log n), 0).
double main1_lower_threshold(double sigma, std::int64_t n, double pair_dist);

/// c * t^{-1/4} * sigma * (log n)^{3/2} + sqrt(log n).
double universal_disc_bound(std::int64_t t, double sigma, std::int64_t n, double c);

/// c * lambda^{t/4} * sigma * (log n)^{3/2} + sqrt(log n).
double lambda_disc_bound(double lambda, std::int64_t t, double sigma, std::int64_t n, double c);

/// Tail mass beyond cycle distance delta: 2 exp(-(delta-2)^2 / (8t)).
double cycle_tail_bound(double delta, std::int64_t t);

/// 1/(160 sqrt(t)); valid for t >= 10 and 20 sqrt(t) < n/2.
double cycle_l2_lower(std::int64_t t, std::int64_t n);

/// Per-axis product of the cycle constant: (1/(160 sqrt(t)))^r.
double torus_l2_lower(std::int64_t t, int r, std::int64_t n);

/// 2^{-d t}; guarded to d*t <= 60 for exact representability.
double expander_l2_lower(std::int64_t t, int d);

/// Worst-case lower bound: (1/8) K (1 - exp(-n^2/(2048 t))) - sqrt(48 log n)
/// for the cycle, with n in place of n^2 for the 2D torus; clamped at 0.
double worstcase_disc_lower(const std::string& kind, double k, std::int64_t n, std::int64_t t);

/// Dispatch by name with named parameters (strings parsed as needed);
/// applies defaults kappa=1, c=1 and fills the report's side and caveat.
BoundReport eval_bound(const std::string& name, const std::map<std::string, std::string>& params);

} // namespace balcirc
