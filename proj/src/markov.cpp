#include "balcirc/markov.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "balcirc/errors.hpp"
#include "balcirc/rng.hpp"

namespace balcirc {

void apply_matching(std::span<double> v, const Matching& m) {
    for (auto [a, b] : m) {
        if (a >= v.size() || b >= v.size())
            throw ValidationError("matching touches node beyond vector length " +
                                  std::to_string(v.size()));
        const double mean = 0.5 * (v[a] + v[b]);
        v[a] = mean;
        v[b] = mean;
    }
}

namespace {

void check_node(const MatchingSchedule& s, std::int64_t u, const char* what) {
    if (u < 0 || u >= s.n)
        throw ValidationError(std::string(what) + " out of range: " + std::to_string(u) +
                              ", n=" + std::to_string(s.n));
}

// One round on a column vector: M c = M^(1)(...(M^(d) c)).
void apply_round_to_column(const MatchingSchedule& s, std::span<double> c) {
    for (int k = s.period() - 1; k >= 0; --k) apply_matching(c, s.matchings[k]);
}

// One application of M^T: M^T c = M^(d)(...(M^(1) c)).
void apply_round_transpose_to_column(const MatchingSchedule& s, std::span<double> c) {
    for (int k = 0; k < s.period(); ++k) apply_matching(c, s.matchings[k]);
}

} // namespace

RealVector tstep_column(const MatchingSchedule& s, std::int64_t u, std::int64_t t) {
    check_node(s, u, "node u");
    if (t < 0) throw ValidationError("round count must be nonnegative, got " + std::to_string(t));
    RealVector c(s.n, 0.0);
    c[u] = 1.0;
    for (std::int64_t round = 0; round < t; ++round) apply_round_to_column(s, c);
    return c;
}

void check_probability_column(std::span<const double> c) {
    double sum = 0;
    for (double x : c) {
        if (!(x >= -1e-12))
            throw ValidationError("probability column has negative entry " + std::to_string(x));
        sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw ValidationError("probability column sums to " + std::to_string(sum));
}

double l2_to_uniform(std::span<const double> c) {
    const double inv_n = 1.0 / static_cast<double>(c.size());
    double acc = 0;
    for (double x : c) {
        const double d = x - inv_n;
        acc += d * d;
    }
    return std::sqrt(acc);
}

double pair_column_distance(const MatchingSchedule& s, std::int64_t u, std::int64_t v,
                            std::int64_t t) {
    check_node(s, u, "node u");
    check_node(s, v, "node v");
    if (u == v) return 0.0;
    RealVector cu = tstep_column(s, u, t);
    RealVector cv = tstep_column(s, v, t);
    double acc = 0;
    for (std::int64_t i = 0; i < s.n; ++i) {
        const double d = cu[i] - cv[i];
        acc += d * d;
    }
    return std::sqrt(acc);
}

double second_eigenvalue(const MatchingSchedule& s) {
    if (s.n > (std::int64_t(1) << 16))
        throw ValidationError("second_eigenvalue guarded to n <= 2^16, got " + std::to_string(s.n));
    const std::int64_t n = s.n;
    const double inv_n = 1.0 / static_cast<double>(n);

    auto deflate = [&](RealVector& v) {
        double mean = std::accumulate(v.begin(), v.end(), 0.0) * inv_n;
        for (double& x : v) x -= mean;
    };
    auto norm = [](const RealVector& v) {
        double acc = 0;
        for (double x : v) acc += x * x;
        return std::sqrt(acc);
    };

    // Seeded pseudo-random start, orthogonal to the deflated top direction.
    RealVector x(n);
    SplitMix64 rng(0x5eedu);
    for (double& e : x) e = rng.next_unit() - 0.5;
    deflate(x);
    double nx = norm(x);
    if (nx == 0) return 0.0;
    for (double& e : x) e /= nx;

    constexpr double kRelTol = 1e-10;
    constexpr int kMaxIters = 500000;
    double theta = 0;  // Rayleigh estimate of the second eigenvalue of M*M^T
    double residual = 0;
    RealVector y;
    for (int iter = 0; iter < kMaxIters; ++iter) {
        y = x;
        apply_round_transpose_to_column(s, y);  // M^T x
        apply_round_to_column(s, y);            // M M^T x
        deflate(y);
        double theta_new = std::inner_product(x.begin(), x.end(), y.begin(), 0.0);
        double ny = norm(y);
        if (ny < 1e-15) return 0.0;  // deflated operator annihilates everything
        residual = 0;
        for (std::int64_t i = 0; i < n; ++i) {
            const double r = y[i] - theta_new * x[i];
            residual += r * r;
        }
        residual = std::sqrt(residual);
        for (std::int64_t i = 0; i < n; ++i) x[i] = y[i] / ny;
        // For symmetric PSD operators |theta - lambda| <= residual, so require
        // both a settled Rayleigh quotient and a small residual.
        if (iter > 0 && std::abs(theta_new - theta) <= kRelTol * std::max(theta_new, 1e-30) &&
            residual <= 1e-9 * std::max(1.0, theta_new)) {
            theta = theta_new;
            return std::sqrt(std::clamp(theta, 0.0, 1.0));
        }
        theta = theta_new;
    }
    throw NumericError("second_eigenvalue: power iteration did not converge (last estimate " +
                           std::to_string(std::sqrt(std::clamp(theta, 0.0, 1.0))) +
                           ", residual " + std::to_string(residual) + ")",
                       std::sqrt(std::clamp(theta, 0.0, 1.0)), residual);
}

double MarkovChain::pi_min() const { return *std::min_element(pi.begin(), pi.end()); }
double MarkovChain::pi_max() const { return *std::max_element(pi.begin(), pi.end()); }

double MarkovChain::entry(std::int64_t x, std::int64_t y) const {
    for (auto [col, p] : rows[x])
        if (col == y) return p;
    return 0.0;
}

void MarkovChain::validate() const {
    if (n < 1) throw ValidationError("chain must have at least one state");
    if (static_cast<std::int64_t>(rows.size()) != n || static_cast<std::int64_t>(pi.size()) != n)
        throw ValidationError("chain row/pi sizes do not match n");
    double pi_sum = 0;
    for (double p : pi) {
        if (!(p > 0)) throw ValidationError("stationary vector must be positive");
        pi_sum += p;
    }
    if (std::abs(pi_sum - 1.0) > 1e-9)
        throw ValidationError("stationary vector sums to " + std::to_string(pi_sum));
    for (std::int64_t x = 0; x < n; ++x) {
        double row_sum = 0;
        for (auto [col, p] : rows[x]) {
            if (col >= n) throw ValidationError("row entry out of range");
            if (!(p > 0)) throw ValidationError("transition entries must be positive");
            row_sum += p;
        }
        if (std::abs(row_sum - 1.0) > 1e-12)
            throw ValidationError("row " + std::to_string(x) + " sums to " +
                                  std::to_string(row_sum));
    }
    if (!(alpha > 0) || !(beta > 0)) throw ValidationError("alpha and beta must be positive");
}

MarkovChain as_markov_chain(const MatchingSchedule& s) {
    auto violations = validate_schedule(s);
    if (!violations.empty()) throw ValidationError("invalid schedule: " + violations.front());

    // Partner lookup per matching for sparse row propagation.
    std::vector<std::vector<std::int32_t>> partner(s.matchings.size(),
                                                   std::vector<std::int32_t>(s.n, -1));
    for (std::size_t k = 0; k < s.matchings.size(); ++k)
        for (auto [a, b] : s.matchings[k]) {
            partner[k][a] = static_cast<std::int32_t>(b);
            partner[k][b] = static_cast<std::int32_t>(a);
        }

    MarkovChain chain;
    chain.n = s.n;
    chain.pi.assign(s.n, 1.0 / static_cast<double>(s.n));
    chain.rows.resize(s.n);
    chain.alpha = 1.0;
    chain.beta = 1.0;

    // Row x of M is e_x pushed through the matchings in forward order; the
    // support stays <= 2^d so a sorted (node, mass) list is enough.
    std::map<std::uint32_t, double> cur, nxt;
    for (std::int64_t x = 0; x < s.n; ++x) {
        cur.clear();
        cur[static_cast<std::uint32_t>(x)] = 1.0;
        for (std::size_t k = 0; k < s.matchings.size(); ++k) {
            nxt.clear();
            for (auto [node, mass] : cur) {
                std::int32_t p = partner[k][node];
                if (p < 0) {
                    nxt[node] += mass;
                } else {
                    nxt[node] += 0.5 * mass;
                    nxt[static_cast<std::uint32_t>(p)] += 0.5 * mass;
                }
            }
            cur.swap(nxt);
        }
        auto& row = chain.rows[x];
        row.reserve(cur.size());
        bool saw_diag = false;
        for (auto [node, mass] : cur) {
            row.push_back({node, mass});
            if (node == x) {
                chain.beta = std::min(chain.beta, mass);
                saw_diag = true;
            } else {
                chain.alpha = std::min(chain.alpha, mass);
            }
        }
        if (!saw_diag)
            throw ValidationError("round matrix has zero diagonal at state " + std::to_string(x));
    }
    chain.validate();
    return chain;
}

MarkovChain lazy_cycle_chain(std::int64_t n) {
    if (n < 3) throw ValidationError("lazy cycle chain requires n >= 3, got " + std::to_string(n));
    MarkovChain chain;
    chain.n = n;
    chain.pi.assign(n, 1.0 / static_cast<double>(n));
    chain.rows.resize(n);
    for (std::int64_t u = 0; u < n; ++u) {
        auto prev = static_cast<std::uint32_t>((u + n - 1) % n);
        auto next = static_cast<std::uint32_t>((u + 1) % n);
        auto self = static_cast<std::uint32_t>(u);
        std::vector<std::pair<std::uint32_t, double>> row{
            {prev, 0.25}, {self, 0.5}, {next, 0.25}};
        std::sort(row.begin(), row.end());
        chain.rows[u] = std::move(row);
    }
    chain.alpha = 0.25;
    chain.beta = 0.5;
    chain.validate();
    return chain;
}

} // namespace balcirc
