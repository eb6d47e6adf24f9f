#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "balcirc/topology.hpp"

namespace balcirc {

using RealVector = std::vector<double>;

/// Matched entries are replaced by their mean; unmatched entries unchanged.
void apply_matching(std::span<double> v, const Matching& m);

/// Column M^t e_u of the round matrix M = M^(1)...M^(d): the matchings are
/// applied to the working column in reverse schedule order, M^(d) first.
RealVector tstep_column(const MatchingSchedule& s, std::int64_t u, std::int64_t t);

/// Throws ValidationError unless entries are >= -1e-12 and sum to 1 within 1e-9.
void check_probability_column(std::span<const double> c);

/// || c - 1/n ||_2 (not squared).
double l2_to_uniform(std::span<const double> c);

/// || M^t_{.,u} - M^t_{.,v} ||_2.
double pair_column_distance(const MatchingSchedule& s, std::int64_t u, std::int64_t v,
                            std::int64_t t);

/// lambda(M): square root of the second-largest eigenvalue of M*M^T, computed
/// by power iteration with the uniform direction deflated (rel. tol 1e-10).
/// Guarded to n <= 2^16; throws NumericError with the last iterate and
/// residual if the iteration cap is hit.
double second_eigenvalue(const MatchingSchedule& s);

struct MarkovChain {
    std::int64_t n = 0;
    // Sparse transition rows, each sorted by column index; rows sum to 1.
    std::vector<std::vector<std::pair<std::uint32_t, double>>> rows;
    std::vector<double> pi;  // stationary distribution, positive, sums to 1
    double alpha = 0;        // min positive off-diagonal entry
    double beta = 0;         // min diagonal entry

    double pi_min() const;
    double pi_max() const;
    double entry(std::int64_t x, std::int64_t y) const;

    /// Throws ValidationError when invariants fail (row sums within 1e-12, ...).
    void validate() const;
};

/// Round matrix M as a Markov chain: uniform pi, alpha/beta scanned exactly.
MarkovChain as_markov_chain(const MatchingSchedule& s);

/// Lazy random walk on the n-cycle: P_{u,u}=1/2, both neighbors 1/4.
MarkovChain lazy_cycle_chain(std::int64_t n);

} // namespace balcirc
