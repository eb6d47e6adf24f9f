#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace balcirc {

/// One of the four exponentially concentrated input families.
struct DistributionSpec {
    enum class Family { uniform, binomial, geometric, poisson };

    Family family = Family::uniform;
    std::int64_t k = 0;   // uniform on {0,...,2K}
    std::int64_t m = 0;   // binomial trials
    double p = 0;         // binomial / geometric success probability
    double mu = 0;        // poisson mean

    /// CLI syntax: uniform:K | binomial:m:p | geometric:p | poisson:mu
    static DistributionSpec parse(const std::string& text);
    std::string to_string() const;
    void validate() const;
};

struct Moments {
    double mu;
    double sigma;
};

/// Exact closed-form (mu, sigma) per family.
Moments moments(const DistributionSpec& spec);

/// n i.i.d. nonnegative integers, reproducible given seed.
std::vector<std::int64_t> sample_vector(const DistributionSpec& spec, std::int64_t n,
                                        std::uint64_t seed);

struct ConcentrationReport {
    std::vector<double> deltas;       // the evaluated grid
    std::vector<double> tail_freq;    // empirical P[|X-mu| >= delta*sigma]
    std::vector<bool> flagged;        // tail exceeds exp(-kappa_hat*delta) + 3 s.e.
    double kappa_hat = 0;             // slope of -log tail vs delta
    std::int64_t samples = 0;
};

/// Empirical audit of exponential concentration on a delta grid.
ConcentrationReport concentration_report(const DistributionSpec& spec,
                                         const std::vector<double>& deltas,
                                         std::int64_t samples, std::uint64_t seed);

} // namespace balcirc
