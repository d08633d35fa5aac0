#pragma once
// Closed-form asymptotic ADD bounds for the detection procedures under a
// geometric change-point prior. These are overlay curves for comparing
// against measured ADD, not quantities estimated from runs.

#include <cmath>
#include <stdexcept>

namespace mcpd {
namespace bounds {

// log K - (1/K) log K!, via lgamma so K up to 1e6+ stays exact enough.
// Nonnegative, strictly increasing, -> 1 as K -> inf.
inline double seq_term(long k) {
    if (k < 1) throw std::invalid_argument("seq_term: K must be >= 1");
    const double kd = static_cast<double>(k);
    return std::log(kd) - std::lgamma(kd + 1.0) / kd;
}

// |log alpha| / (D + |log(1-rho)|): the full-observation detection rate.
inline double add_lower_bound(double alpha, double kl, double rho) {
    return std::abs(std::log(alpha)) / (kl + std::abs(std::log1p(-rho)));
}

// (seq_term(K) + |log alpha|) / |log(1-rho)|: prior-only rate, step-up thresholds.
inline double smap_upper_bound(double alpha, double rho, long k) {
    return (seq_term(k) + std::abs(std::log(alpha))) / std::abs(std::log1p(-rho));
}

// |log alpha| / |log(1-rho)|: prior-only rate, flat threshold.
inline double ismap_upper_bound(double alpha, double rho) {
    return std::abs(std::log(alpha)) / std::abs(std::log1p(-rho));
}

struct UpperBoundPair {
    double smap = 0.0;
    double ismap = 0.0;
};

// Tighter bounds when the mean sampling interval of every stream is bounded
// by g*; g* -> inf recovers the prior-only bounds above.
inline UpperBoundPair gstar_upper_bounds(double alpha, double rho, double kl, double g_star,
                                         long k) {
    if (!(g_star >= 1.0)) throw std::invalid_argument("gstar_upper_bounds: g* must be >= 1");
    const double denom = kl / g_star + std::abs(std::log1p(-rho));
    const double la = std::abs(std::log(alpha));
    return {(seq_term(k) + la) / denom, la / denom};
}

// Single stopping rule with threshold 1-eta, sampled at mean interval zeta.
inline double prop1_upper_bound(double eta, double rho, double kl, double zeta) {
    if (!(zeta >= 1.0)) throw std::invalid_argument("prop1_upper_bound: zeta must be >= 1");
    return std::abs(std::log(eta)) / (kl / zeta + std::abs(std::log1p(-rho)));
}

// Large-K limit of ismap_upper_bound / smap_upper_bound: |log a|/(1+|log a|).
inline double ratio_limit(double alpha) {
    const double la = std::abs(std::log(alpha));
    return la / (1.0 + la);
}

} // namespace bounds
} // namespace mcpd
