#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

namespace mcpd {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kPosInf = std::numeric_limits<double>::infinity();

// log(exp(a) + exp(b)), safe for +-inf arguments.
inline double log_add_exp(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    if (a == kPosInf || b == kPosInf) return kPosInf;
    const double hi = std::max(a, b);
    const double lo = std::min(a, b);
    return hi + std::log1p(std::exp(lo - hi));
}

// log(exp(a) - exp(b)); requires a > b.
inline double log_sub_exp(double a, double b) {
    if (b == kNegInf) return a;
    if (a <= b) throw std::domain_error("log_sub_exp: a must exceed b");
    return a + std::log1p(-std::exp(b - a));
}

// log(1 - exp(x)) for x <= 0.
inline double log1m_exp(double x) {
    if (x > 0.0) throw std::domain_error("log1m_exp: argument must be <= 0");
    if (x == 0.0) return kNegInf;
    // switch-over at -log(2) keeps both branches well conditioned
    return x > -0.6931471805599453 ? std::log(-std::expm1(x)) : std::log1p(-std::exp(x));
}

// log(p / (1-p)); maps 0 -> -inf, 1 -> +inf.
inline double logit(double p) {
    if (p <= 0.0) return kNegInf;
    if (p >= 1.0) return kPosInf;
    return std::log(p) - std::log1p(-p);
}

// inverse of logit
inline double sigmoid(double log_odds) {
    if (log_odds == kNegInf) return 0.0;
    if (log_odds == kPosInf) return 1.0;
    if (log_odds >= 0.0) return 1.0 / (1.0 + std::exp(-log_odds));
    const double e = std::exp(log_odds);
    return e / (1.0 + e);
}

// log(sigmoid(x)), full precision even where sigmoid rounds to 1;
// log(1 - sigmoid(x)) is log_sigmoid(-x).
inline double log_sigmoid(double x) {
    if (x == kNegInf) return kNegInf;
    if (x == kPosInf) return 0.0;
    return x <= 0.0 ? x - std::log1p(std::exp(x)) : -std::log1p(std::exp(-x));
}

} // namespace mcpd
