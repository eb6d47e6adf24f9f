#include "balcirc/bounds.hpp"

#include <cmath>

#include <json.hpp>

#include "balcirc/errors.hpp"

namespace balcirc {

namespace {

void require(bool ok, const char* msg) {
    if (!ok) throw ValidationError(msg);
}

double log_n(std::int64_t n) {
    require(n >= 2, "n must be >= 2");
    return std::log(static_cast<double>(n));
}

} // namespace

double markov_tstep_bound(double alpha, double beta, double pi_max, double pi_min,
                          std::int64_t t) {
    require(alpha > 0 && alpha <= 1, "alpha must be in (0,1]");
    require(beta > 0 && beta <= 1, "beta must be in (0,1]");
    require(pi_min > 0 && pi_max >= pi_min, "need pi_max >= pi_min > 0");
    require(t >= 1, "t must be >= 1");
    return std::pow(pi_max / pi_min, 1.5) * 2.0 / (std::sqrt(beta) * alpha) *
           std::sqrt((1.0 - beta + alpha) / (alpha * static_cast<double>(t)));
}

double main1_upper_threshold(double delta, double kappa, double sigma, std::int64_t n,
                             double pair_dist) {
    require(delta > 0, "delta must be positive");
    require(kappa > 0, "kappa must be positive");
    require(sigma > 0, "sigma must be positive");
    require(pair_dist >= 0, "pair distance must be nonnegative");
    const double ln = log_n(n);
    return delta * std::sqrt(128.0) * kappa * sigma * ln * pair_dist + std::sqrt(48.0 * ln);
}

double main1_failure_probability(double delta, std::int64_t n) {
    require(delta > 0, "delta must be positive");
    const double dn = static_cast<double>(n);
    require(n >= 2, "n must be >= 2");
    return 2.0 * std::exp(-delta * delta) + 2.0 / (dn * dn);
}

double main1_lower_threshold(double sigma, std::int64_t n, double pair_dist) {
    require(sigma > 1, "lower threshold requires sigma > 1");
    require(pair_dist >= 0, "pair distance must be nonnegative");
    const double value =
        sigma / (2.0 * std::sqrt(2.0 * std::log2(sigma))) * pair_dist - std::sqrt(48.0 * log_n(n));
    return std::max(value, 0.0);
}

double universal_disc_bound(std::int64_t t, double sigma, std::int64_t n, double c) {
    require(t >= 1, "t must be >= 1");
    require(sigma > 0 && c > 0, "sigma and c must be positive");
    const double ln = log_n(n);
    return c * std::pow(static_cast<double>(t), -0.25) * sigma * std::pow(ln, 1.5) + std::sqrt(ln);
}

double lambda_disc_bound(double lambda, std::int64_t t, double sigma, std::int64_t n, double c) {
    require(lambda >= 0 && lambda < 1, "lambda must be in [0,1)");
    require(t >= 1, "t must be >= 1");
    require(sigma > 0 && c > 0, "sigma and c must be positive");
    const double ln = log_n(n);
    const double decay = lambda == 0 ? 0.0 : std::pow(lambda, static_cast<double>(t) / 4.0);
    return c * decay * sigma * std::pow(ln, 1.5) + std::sqrt(ln);
}

double cycle_tail_bound(double delta, std::int64_t t) {
    require(delta > 2, "cycle tail bound requires delta > 2");
    require(t >= 1, "t must be >= 1");
    // Deep tails underflow to 0; that is the documented behavior.
    return 2.0 * std::exp(-(delta - 2.0) * (delta - 2.0) / (8.0 * static_cast<double>(t)));
}

double cycle_l2_lower(std::int64_t t, std::int64_t n) {
    require(t >= 10, "cycle l2 lower bound requires t >= 10");
    const double root_t = std::sqrt(static_cast<double>(t));
    require(20.0 * root_t < static_cast<double>(n) / 2.0,
            "cycle l2 lower bound requires 20 sqrt(t) < n/2");
    return 1.0 / (160.0 * root_t);
}

double torus_l2_lower(std::int64_t t, int r, std::int64_t n) {
    require(r >= 1, "torus dimension must be >= 1");
    const double side = std::pow(static_cast<double>(n), 1.0 / r);
    require(t >= 10, "torus l2 lower bound requires t >= 10");
    require(20.0 * std::sqrt(static_cast<double>(t)) < side / 2.0,
            "torus l2 lower bound requires 20 sqrt(t) < n^(1/r)/2");
    return std::pow(1.0 / (160.0 * std::sqrt(static_cast<double>(t))), r);
}

double expander_l2_lower(std::int64_t t, int d) {
    require(t >= 1 && d >= 1, "t and d must be >= 1");
    require(static_cast<std::int64_t>(d) * t <= 60, "expander bound guarded to d*t <= 60");
    return std::pow(2.0, -static_cast<double>(d) * static_cast<double>(t));
}

double worstcase_disc_lower(const std::string& kind, double k, std::int64_t n, std::int64_t t) {
    require(k > 0, "K must be positive");
    require(t >= 1, "t must be >= 1");
    double scale;
    if (kind == "cycle") {
        scale = static_cast<double>(n) * static_cast<double>(n);
    } else if (kind == "torus2d") {
        scale = static_cast<double>(n);
    } else {
        throw ValidationError("worst-case bound supports kind cycle|torus2d, got '" + kind + "'");
    }
    const double value = k / 8.0 * (1.0 - std::exp(-scale / (2048.0 * static_cast<double>(t)))) -
                         std::sqrt(48.0 * log_n(n));
    return std::max(value, 0.0);
}

std::string BoundReport::to_json() const {
    nlohmann::json j;
    j["name"] = name;
    j["inputs"] = inputs;
    j["value"] = value;
    j["side"] = side == Side::upper ? "upper" : "lower";
    if (!caveat.empty()) j["caveat"] = caveat;
    return j.dump();
}

namespace {

class Params {
public:
    Params(const std::string& name, const std::map<std::string, std::string>& raw)
        : name_(name), raw_(raw) {}

    double real(const std::string& key) const {
        auto it = raw_.find(key);
        if (it == raw_.end())
            throw ValidationError("bound '" + name_ + "' requires parameter '" + key + "'");
        try {
            return std::stod(it->second);
        } catch (const std::exception&) {
            throw ValidationError("bound '" + name_ + "': cannot parse " + key + "='" +
                                  it->second + "'");
        }
    }

    double real_or(const std::string& key, double fallback) const {
        return raw_.count(key) ? real(key) : fallback;
    }

    std::int64_t integer(const std::string& key) const {
        return static_cast<std::int64_t>(std::llround(real(key)));
    }

    std::string text(const std::string& key) const {
        auto it = raw_.find(key);
        if (it == raw_.end())
            throw ValidationError("bound '" + name_ + "' requires parameter '" + key + "'");
        return it->second;
    }

private:
    std::string name_;
    const std::map<std::string, std::string>& raw_;
};

const char* kAsymptoticCaveat = "asymptotic, multiplicative constant c configurable";

} // namespace

BoundReport eval_bound(const std::string& name, const std::map<std::string, std::string>& params) {
    Params p(name, params);
    BoundReport rep;
    rep.name = name;
    using Side = BoundReport::Side;

    if (name == "markov_tstep") {
        const double alpha = p.real("alpha"), beta = p.real("beta");
        const double pi_max = p.real("pi_max"), pi_min = p.real("pi_min");
        const std::int64_t t = p.integer("t");
        rep.inputs = {{"alpha", alpha}, {"beta", beta},   {"pi_max", pi_max},
                      {"pi_min", pi_min}, {"t", double(t)}};
        rep.value = markov_tstep_bound(alpha, beta, pi_max, pi_min, t);
        rep.side = Side::upper;
    } else if (name == "main1_upper") {
        const double delta = p.real("delta"), kappa = p.real_or("kappa", 1.0);
        const double sigma = p.real("sigma"), dist = p.real("pair_dist");
        const std::int64_t n = p.integer("n");
        rep.inputs = {{"delta", delta}, {"kappa", kappa}, {"sigma", sigma},
                      {"n", double(n)}, {"pair_dist", dist}};
        rep.value = main1_upper_threshold(delta, kappa, sigma, n, dist);
        rep.side = Side::upper;
        rep.caveat = "threshold exceeded with probability <= 2 exp(-delta^2) + 2 n^-2";
    } else if (name == "main1_failprob") {
        const double delta = p.real("delta");
        const std::int64_t n = p.integer("n");
        rep.inputs = {{"delta", delta}, {"n", double(n)}};
        rep.value = main1_failure_probability(delta, n);
        rep.side = Side::upper;
    } else if (name == "main1_lower") {
        const double sigma = p.real("sigma"), dist = p.real("pair_dist");
        const std::int64_t n = p.integer("n");
        rep.inputs = {{"sigma", sigma}, {"n", double(n)}, {"pair_dist", dist}};
        rep.value = main1_lower_threshold(sigma, n, dist);
        rep.side = Side::lower;
        rep.caveat = "achieved with probability >= 1/16; clamped at 0";
    } else if (name == "universal_disc") {
        const std::int64_t t = p.integer("t"), n = p.integer("n");
        const double sigma = p.real("sigma"), c = p.real_or("c", 1.0);
        rep.inputs = {{"t", double(t)}, {"sigma", sigma}, {"n", double(n)}, {"c", c}};
        rep.value = universal_disc_bound(t, sigma, n, c);
        rep.side = Side::upper;
        rep.caveat = kAsymptoticCaveat;
    } else if (name == "lambda_disc") {
        const double lambda = p.real("lambda"), sigma = p.real("sigma"), c = p.real_or("c", 1.0);
        const std::int64_t t = p.integer("t"), n = p.integer("n");
        rep.inputs = {{"lambda", lambda}, {"t", double(t)}, {"sigma", sigma},
                      {"n", double(n)},   {"c", c}};
        rep.value = lambda_disc_bound(lambda, t, sigma, n, c);
        rep.side = Side::upper;
        rep.caveat = kAsymptoticCaveat;
    } else if (name == "cycle_tail") {
        const double delta = p.real("delta");
        const std::int64_t t = p.integer("t");
        rep.inputs = {{"delta", delta}, {"t", double(t)}};
        rep.value = cycle_tail_bound(delta, t);
        rep.side = Side::upper;
    } else if (name == "cycle_l2_lower") {
        const std::int64_t t = p.integer("t"), n = p.integer("n");
        rep.inputs = {{"t", double(t)}, {"n", double(n)}};
        rep.value = cycle_l2_lower(t, n);
        rep.side = Side::lower;
        rep.caveat = "proof constants; applies to ||M^t_{.,u} - 1/n||_2^2";
    } else if (name == "torus_l2_lower") {
        const std::int64_t t = p.integer("t"), n = p.integer("n");
        const int r = static_cast<int>(p.integer("r"));
        rep.inputs = {{"t", double(t)}, {"r", double(r)}, {"n", double(n)}};
        rep.value = torus_l2_lower(t, r, n);
        rep.side = Side::lower;
        rep.caveat = "per-axis product of the cycle constant";
    } else if (name == "expander_l2_lower") {
        const std::int64_t t = p.integer("t");
        const int d = static_cast<int>(p.integer("d"));
        rep.inputs = {{"t", double(t)}, {"d", double(d)}};
        rep.value = expander_l2_lower(t, d);
        rep.side = Side::lower;
    } else if (name == "worstcase_disc_lower") {
        const std::string kind = p.text("kind");
        const double k = p.real("K");
        const std::int64_t n = p.integer("n"), t = p.integer("t");
        rep.inputs = {{"K", k}, {"n", double(n)}, {"t", double(t)}};
        rep.value = worstcase_disc_lower(kind, k, n, t);
        rep.side = Side::lower;
        rep.caveat = "kind=" + kind + "; clamped at 0";
    } else {
        throw ValidationError("unknown bound name '" + name + "'");
    }
    return rep;
}

} // namespace balcirc
