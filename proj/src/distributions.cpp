#include "balcirc/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "balcirc/errors.hpp"
#include "balcirc/rng.hpp"

namespace balcirc {

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, sep)) parts.push_back(item);
    return parts;
}

double parse_real(const std::string& text, const char* what) {
    try {
        std::size_t pos = 0;
        double v = std::stod(text, &pos);
        if (pos != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw ValidationError(std::string("cannot parse ") + what + ": '" + text + "'");
    }
}

std::int64_t parse_int(const std::string& text, const char* what) {
    try {
        std::size_t pos = 0;
        std::int64_t v = std::stoll(text, &pos);
        if (pos != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw ValidationError(std::string("cannot parse ") + what + ": '" + text + "'");
    }
}

} // namespace

DistributionSpec DistributionSpec::parse(const std::string& text) {
    auto parts = split(text, ':');
    if (parts.empty()) throw ValidationError("empty distribution spec");
    DistributionSpec spec;
    const std::string& name = parts[0];
    if (name == "uniform" && parts.size() == 2) {
        spec.family = Family::uniform;
        spec.k = parse_int(parts[1], "uniform K");
    } else if (name == "binomial" && parts.size() == 3) {
        spec.family = Family::binomial;
        spec.m = parse_int(parts[1], "binomial m");
        spec.p = parse_real(parts[2], "binomial p");
    } else if (name == "geometric" && parts.size() == 2) {
        spec.family = Family::geometric;
        spec.p = parse_real(parts[1], "geometric p");
    } else if (name == "poisson" && parts.size() == 2) {
        spec.family = Family::poisson;
        spec.mu = parse_real(parts[1], "poisson mu");
    } else {
        throw ValidationError("bad distribution spec '" + text +
                              "' (expected uniform:K | binomial:m:p | geometric:p | poisson:mu)");
    }
    spec.validate();
    return spec;
}

std::string DistributionSpec::to_string() const {
    std::ostringstream out;
    switch (family) {
        case Family::uniform: out << "uniform:" << k; break;
        case Family::binomial: out << "binomial:" << m << ':' << p; break;
        case Family::geometric: out << "geometric:" << p; break;
        case Family::poisson: out << "poisson:" << mu; break;
    }
    return out.str();
}

void DistributionSpec::validate() const {
    switch (family) {
        case Family::uniform:
            if (k < 0) throw ValidationError("uniform requires K >= 0");
            break;
        case Family::binomial:
            if (m < 1) throw ValidationError("binomial requires m >= 1");
            if (!(p > 0 && p <= 0.5)) throw ValidationError("binomial requires 0 < p <= 1/2");
            break;
        case Family::geometric:
            if (!(p > 0 && p <= 1)) throw ValidationError("geometric requires 0 < p <= 1");
            break;
        case Family::poisson:
            if (!(mu > 0)) throw ValidationError("poisson requires mu > 0");
            break;
    }
}

Moments moments(const DistributionSpec& spec) {
    spec.validate();
    switch (spec.family) {
        case DistributionSpec::Family::uniform: {
            // Discrete uniform on {0,...,2K}: variance K(K+1)/3.
            double K = static_cast<double>(spec.k);
            return {K, std::sqrt(K * (K + 1) / 3.0)};
        }
        case DistributionSpec::Family::binomial: {
            double m = static_cast<double>(spec.m);
            return {m * spec.p, std::sqrt(m * spec.p * (1 - spec.p))};
        }
        case DistributionSpec::Family::geometric:
            // Support {1,2,...} so mu = 1/p.
            return {1.0 / spec.p, std::sqrt((1 - spec.p) / (spec.p * spec.p))};
        case DistributionSpec::Family::poisson:
            return {spec.mu, std::sqrt(spec.mu)};
    }
    throw ValidationError("unreachable family");
}

namespace {

std::int64_t sample_poisson(SplitMix64& rng, double mu) {
    // Exact inversion, chunked so the CDF walk never runs long: a Poisson(mu)
    // is the sum of ceil(mu/30) independent Poissons with mean <= 30.
    std::int64_t total = 0;
    while (mu > 0) {
        const double chunk = std::min(mu, 30.0);
        mu -= chunk;
        double u = rng.next_unit_open_closed();
        double pmf = std::exp(-chunk);
        double cdf = pmf;
        std::int64_t x = 0;
        while (u > cdf && x < 4000) {
            ++x;
            pmf *= chunk / static_cast<double>(x);
            cdf += pmf;
        }
        total += x;
    }
    return total;
}

std::int64_t sample_one(const DistributionSpec& spec, SplitMix64& rng) {
    switch (spec.family) {
        case DistributionSpec::Family::uniform:
            return static_cast<std::int64_t>(
                rng.next_below(static_cast<std::uint64_t>(2 * spec.k + 1)));
        case DistributionSpec::Family::binomial: {
            std::int64_t hits = 0;
            for (std::int64_t i = 0; i < spec.m; ++i)
                if (rng.next_unit() < spec.p) ++hits;
            return hits;
        }
        case DistributionSpec::Family::geometric: {
            if (spec.p == 1.0) return 1;
            // Inversion on P[X >= k] = (1-p)^(k-1), support {1,2,...}.
            double u = rng.next_unit_open_closed();
            double x = 1.0 + std::floor(std::log(u) / std::log1p(-spec.p));
            return std::max<std::int64_t>(1, static_cast<std::int64_t>(x));
        }
        case DistributionSpec::Family::poisson:
            return sample_poisson(rng, spec.mu);
    }
    throw ValidationError("unreachable family");
}

} // namespace

std::vector<std::int64_t> sample_vector(const DistributionSpec& spec, std::int64_t n,
                                        std::uint64_t seed) {
    spec.validate();
    if (n < 1) throw ValidationError("sample count must be >= 1, got " + std::to_string(n));
    std::vector<std::int64_t> out(n);
    SplitMix64 rng(seed);
    for (auto& x : out) x = sample_one(spec, rng);
    return out;
}

ConcentrationReport concentration_report(const DistributionSpec& spec,
                                         const std::vector<double>& deltas,
                                         std::int64_t samples, std::uint64_t seed) {
    spec.validate();
    if (samples < 10000)
        throw ValidationError("concentration report requires >= 10^4 samples, got " +
                              std::to_string(samples));
    for (double d : deltas)
        if (!(d >= 0)) throw ValidationError("delta grid must be nonnegative");

    const auto [mu, sigma] = moments(spec);
    std::vector<std::int64_t> exceed(deltas.size(), 0);
    SplitMix64 rng(seed);
    for (std::int64_t i = 0; i < samples; ++i) {
        const double dev = std::abs(static_cast<double>(sample_one(spec, rng)) - mu);
        for (std::size_t j = 0; j < deltas.size(); ++j)
            if (dev >= deltas[j] * sigma) ++exceed[j];
    }

    ConcentrationReport rep;
    rep.deltas = deltas;
    rep.samples = samples;
    rep.tail_freq.resize(deltas.size());
    for (std::size_t j = 0; j < deltas.size(); ++j)
        rep.tail_freq[j] = static_cast<double>(exceed[j]) / static_cast<double>(samples);

    // kappa_hat: least-squares slope of -log(tail) against delta, through the
    // points with positive delta and nonzero tail.
    double sxx = 0, sxy = 0;
    for (std::size_t j = 0; j < deltas.size(); ++j) {
        if (deltas[j] <= 0 || rep.tail_freq[j] <= 0) continue;
        sxx += deltas[j] * deltas[j];
        sxy += deltas[j] * (-std::log(rep.tail_freq[j]));
    }
    rep.kappa_hat = sxx > 0 ? sxy / sxx : 0.0;

    rep.flagged.resize(deltas.size());
    for (std::size_t j = 0; j < deltas.size(); ++j) {
        const double claim = std::exp(-rep.kappa_hat * deltas[j]);
        const double se = std::sqrt(std::max(rep.tail_freq[j] * (1 - rep.tail_freq[j]),
                                             1.0 / static_cast<double>(samples)) /
                                    static_cast<double>(samples));
        rep.flagged[j] = rep.tail_freq[j] > claim + 3 * se;
    }
    return rep;
}

} // namespace balcirc
