#pragma once
// Per-stream sequential statistics: the Bayesian posterior recursion for
// P(change <= n | data) with and without an observation at slot n, and the
// average-likelihood-ratio statistic used by the fully-observed baseline.
//
// The posterior is held as log-odds. Near the detection thresholds the
// probability itself sits within a few alpha/K of 1, where double precision
// runs out; the log-odds form keeps full resolution there. The ALR is held
// as a log with sign-aware addition because it spans many orders of
// magnitude before its threshold.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "mcpd/logmath.hpp"
#include "mcpd/models.hpp"

namespace mcpd {

// Change-point prior: geometric with hazard rho, or an explicit per-slot
// hazard sequence. A general sequence is extended past its end by repeating
// the last hazard.
struct PriorSpec {
    double rho = 0.0;
    std::vector<double> hazards; // empty => geometric

    static PriorSpec geometric(double rho) {
        if (!(rho > 0.0) || !(rho < 1.0))
            throw std::invalid_argument("PriorSpec: rho must lie in (0,1)");
        PriorSpec p;
        p.rho = rho;
        return p;
    }

    static PriorSpec general(std::vector<double> hazards) {
        if (hazards.empty()) throw std::invalid_argument("PriorSpec: empty hazard sequence");
        for (double h : hazards)
            if (!(h > 0.0) || !(h < 1.0))
                throw std::invalid_argument("PriorSpec: hazards must lie in (0,1)");
        PriorSpec p;
        p.rho = hazards.front();
        p.hazards = std::move(hazards);
        return p;
    }

    bool geometric_kind() const { return hazards.empty(); }

    double hazard_at(long slot) const { // 1-based
        if (hazards.empty()) return rho;
        const std::size_t i = static_cast<std::size_t>(slot - 1);
        return i < hazards.size() ? hazards[i] : hazards.back();
    }

    // log P(t > n)
    double log_survival(long n) const {
        if (hazards.empty()) return static_cast<double>(n) * std::log1p(-rho);
        double s = 0.0;
        for (long i = 1; i <= n; ++i) s += std::log1p(-hazard_at(i));
        return s;
    }
};

// ---------------------------------------------------------------------------
// posterior recursion, log-odds form
// ---------------------------------------------------------------------------

// observed slot: Lambda' = L (Lambda + rho) / (1 - rho)
inline double update_observed_log_odds(double log_odds, double hazard, double log_lr) {
    if (log_odds == kPosInf) return kPosInf; // absorbing
    return log_lr + log_add_exp(log_odds, std::log(hazard)) - std::log1p(-hazard);
}

// unobserved slot: Lambda' = (Lambda + rho) / (1 - rho)
inline double update_unobserved_log_odds(double log_odds, double hazard) {
    if (log_odds == kPosInf) return kPosInf;
    return log_add_exp(log_odds, std::log(hazard)) - std::log1p(-hazard);
}

// Probability-level wrappers around the same code path.
inline double update_observed(double pi_prev, double hazard, double lr) {
    const double llr = lr > 0.0 ? std::log(lr) : kNegInf;
    return sigmoid(update_observed_log_odds(logit(pi_prev), hazard, llr));
}

inline double update_unobserved(double pi_prev, double hazard) {
    return sigmoid(update_unobserved_log_odds(logit(pi_prev), hazard));
}

// ---------------------------------------------------------------------------
// average likelihood ratio (ALR) recursion: G_n = G_{n-1} L + P(t>=n+1)(1-L)
// ---------------------------------------------------------------------------

inline double update_alr(double g_prev, double lr, double survival) {
    if (!(g_prev >= 0.0) || !(lr >= 0.0) || !(survival > 0.0) || !(survival <= 1.0))
        throw std::invalid_argument("update_alr: inputs out of range");
    const double g = g_prev * lr + survival * (1.0 - lr);
    if (g < -1e-12 * std::max(1.0, g_prev * lr))
        throw std::domain_error("update_alr: negative statistic, inconsistent inputs");
    return std::max(g, 0.0);
}

// Log-scale form. The positive term G_{n-1} L always dominates the negative
// one survival*(L-1) whenever G_{n-1} >= survival/(1-hazard) holds, which the
// recursion preserves from G_0 = 1; a violation means inconsistent inputs.
inline double update_log_alr(double log_g_prev, double log_lr, double log_survival) {
    const double a = log_g_prev + log_lr;
    if (log_lr == 0.0) return a;
    if (log_lr < 0.0) {
        return log_add_exp(a, log_survival + log1m_exp(log_lr));
    }
    const double b = log_survival + log_lr + log1m_exp(-log_lr);
    if (a <= b) throw std::domain_error("update_log_alr: negative statistic, inconsistent inputs");
    return log_sub_exp(a, b);
}

// ---------------------------------------------------------------------------
// stream state
// ---------------------------------------------------------------------------

struct StreamState {
    double log_odds = kNegInf; // pi_0 = 0
    double log_alr = 0.0;      // G_0 = 1
    long slot = 0;
    bool active = true;
    long declared_at = 0; // 0 = not declared

    double posterior() const { return sigmoid(log_odds); }
    double alr() const { return std::exp(log_alr); }
};

// ---------------------------------------------------------------------------
// brute-force oracle: P(t <= n | observed data) by direct enumeration over
// candidate change points, with the analytic prior tail past `cutoff`.
// Independent of the recursions above; used to validate them.
// ---------------------------------------------------------------------------

struct TimedObservation {
    long slot = 0;
    double value = 0.0;
};

inline double posterior_oracle(std::vector<TimedObservation> observations,
                               const PriorSpec& prior, const ScenarioModel& model,
                               long n, long cutoff) {
    if (n < 1) throw std::invalid_argument("posterior_oracle: n must be >= 1");
    if (cutoff <= n) throw std::invalid_argument("posterior_oracle: cutoff must exceed n");
    for (const auto& o : observations)
        if (o.slot < 1 || o.slot > n)
            throw std::invalid_argument("posterior_oracle: observation slot outside [1,n]");
    std::sort(observations.begin(), observations.end(),
              [](const TimedObservation& a, const TimedObservation& b) { return a.slot < b.slot; });

    // log of Prod_{s >= m, s observed} L(x_s): likelihood of the data given
    // t = m, relative to the all-pre-change baseline
    auto log_ratio_given_change_at = [&](long m) {
        double s = 0.0;
        for (auto it = observations.rbegin(); it != observations.rend() && it->slot >= m; ++it)
            s += log_likelihood_ratio(model, it->value);
        return s;
    };

    std::vector<double> terms; // log P(t=m) + log ratio(m), m = 1..cutoff
    terms.reserve(static_cast<std::size_t>(cutoff) + 1);
    double log_surv_prev = 0.0; // log P(t > m-1)
    for (long m = 1; m <= cutoff; ++m) {
        const double h = prior.hazard_at(m);
        const double log_pm = log_surv_prev + std::log(h);
        terms.push_back(log_pm + log_ratio_given_change_at(m));
        log_surv_prev += std::log1p(-h);
    }
    terms.push_back(log_surv_prev); // t > cutoff: all observed slots pre-change

    const double hi = *std::max_element(terms.begin(), terms.end());
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < terms.size(); ++i) {
        const double w = std::exp(terms[i] - hi);
        den += w;
        if (static_cast<long>(i) + 1 <= n) num += w;
    }
    return num / den;
}

} // namespace mcpd
