#pragma once
// Self-contained invariant checks runnable from the CLI. Each check returns
// pass/fail plus a short diagnostic; together they exercise the identities
// the library is built on (recursion vs direct enumeration, the ALR/posterior
// identity, threshold equivalence, budget exactness, bound orderings,
// pathwise procedure dominance, per-stream Type I rates).

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "mcpd/bounds.hpp"
#include "mcpd/harness.hpp"
#include "mcpd/metrics.hpp"
#include "mcpd/models.hpp"
#include "mcpd/posterior.hpp"
#include "mcpd/procedures.hpp"
#include "mcpd/rng.hpp"
#include "mcpd/scheduling.hpp"

namespace mcpd {

struct ValidationCheck {
    std::string name;
    bool passed = false;
    std::string detail;
};

namespace detail {

inline std::string fmt(const char* pattern, double a, double b = 0.0) {
    char buf[160];
    std::snprintf(buf, sizeof buf, pattern, a, b);
    return buf;
}

} // namespace detail

// E_f0[L(X)] = 1 within 3 standard errors.
inline ValidationCheck check_lr_unit_mean(std::uint64_t seed, long samples = 1000000) {
    const auto model = ScenarioModel::gaussian(0.0, 1.0, 1.0);
    const StreamTruth pre{1000000000L, 0.0};
    const RunRng rng(seed, 1);
    double sum = 0.0, sumsq = 0.0;
    for (long i = 0; i < samples; ++i) {
        const double x = sample(model, pre, 1 + (i % 1000), rng.obs_draw(static_cast<int>(i / 1000), 1 + (i % 1000)));
        const double lr = likelihood_ratio(model, x);
        sum += lr;
        sumsq += lr * lr;
    }
    const double n = static_cast<double>(samples);
    const double mean = sum / n;
    const double se = std::sqrt((sumsq / n - mean * mean) / n);
    ValidationCheck c{"lr_unit_mean_under_f0", std::abs(mean - 1.0) <= 3.0 * se,
                      detail::fmt("mean=%.6f se=%.2g", mean, se)};
    return c;
}

// GLR dominates the exact per-stream LR pointwise.
inline ValidationCheck check_glr_dominates(std::uint64_t seed, long trials = 10000) {
    const auto model = ScenarioModel::pvalue_beta(10.0, 20.0);
    const RunRng rng(seed, 2);
    long violations = 0;
    for (long i = 0; i < trials; ++i) {
        const double b_true = 10.0 + 10.0 * rng.truth_u(static_cast<int>(i), 0);
        const StreamTruth tr{1, b_true};
        const double x = sample(model, tr, 1, rng.obs_draw(static_cast<int>(i), 1));
        if (log_glr_beta(x, 10.0, 20.0) < log_lr_beta_exact(x, b_true) - 1e-12) ++violations;
    }
    return {"glr_dominates_exact_lr", violations == 0,
            detail::fmt("violations=%.0f of %.0f", static_cast<double>(violations),
                        static_cast<double>(trials))};
}

// Chained recursion equals brute-force enumeration for random observe/skip
// patterns.
inline ValidationCheck check_recursion_vs_oracle(std::uint64_t seed, int patterns = 64) {
    const auto model = ScenarioModel::gaussian(0.0, 1.0, 1.0);
    const auto prior = PriorSpec::geometric(0.05);
    const RunRng rng(seed, 3);
    double worst = 0.0;
    for (int p = 0; p < patterns; ++p) {
        double log_odds = kNegInf;
        std::vector<TimedObservation> obs;
        for (long n = 1; n <= 12; ++n) {
            const bool observe = rng.truth_u(p, static_cast<int>(n)) < 0.5;
            if (observe) {
                const double x = sample(model, StreamTruth{6, 0.0}, n, rng.obs_draw(p, n));
                obs.push_back({n, x});
                log_odds = update_observed_log_odds(log_odds, prior.rho,
                                                    log_likelihood_ratio(model, x));
            } else {
                log_odds = update_unobserved_log_odds(log_odds, prior.rho);
            }
            const double direct = posterior_oracle(obs, prior, model, n, 600);
            worst = std::max(worst, std::abs(sigmoid(log_odds) - direct));
        }
    }
    return {"posterior_recursion_vs_enumeration", worst < 1e-9,
            detail::fmt("max_abs_diff=%.3g", worst)};
}

// Under full observation, G_n (1 - pi_n) = (1-rho)^n, and the ALR threshold
// test K/(r alpha) agrees with the equivalent posterior threshold.
inline ValidationCheck check_alr_posterior_identity(std::uint64_t seed, int paths = 100) {
    const auto model = ScenarioModel::gaussian(0.0, 1.0, 1.0);
    const double rho = 0.02;
    const RunRng rng(seed, 4);
    const int K = 10;
    const double alpha = 0.1;
    double worst = 0.0;
    bool decisions_agree = true;
    for (int p = 0; p < paths; ++p) {
        double log_odds = kNegInf;
        double log_alr = 0.0;
        for (long n = 1; n <= 50; ++n) {
            const double x = sample(model, StreamTruth{20, 0.0}, n, rng.obs_draw(p, n));
            const double llr = log_likelihood_ratio(model, x);
            log_odds = update_observed_log_odds(log_odds, rho, llr);
            log_alr = update_log_alr(log_alr, llr, static_cast<double>(n) * std::log1p(-rho));
            const double lhs = log_alr + log_sigmoid(-log_odds);
            const double rhs = static_cast<double>(n) * std::log1p(-rho);
            worst = std::max(worst, std::abs(lhs / rhs - 1.0));
            for (int r = 1; r <= K; ++r) {
                const bool by_alr = log_alr >= std::log(K / (r * alpha));
                const double q_star = 1.0 - std::exp(rhs) * r * alpha / K;
                const bool by_posterior = log_odds >= logit(q_star);
                if (by_alr != by_posterior) decisions_agree = false;
            }
        }
    }
    return {"alr_posterior_identity_and_decision_equivalence", worst < 1e-9 && decisions_agree,
            detail::fmt("max_rel_diff=%.3g decisions_agree=%.0f", worst,
                        decisions_agree ? 1.0 : 0.0)};
}

// Bound orderings over random parameter draws.
inline ValidationCheck check_bound_orderings(std::uint64_t seed, long draws = 10000) {
    const RunRng rng(seed, 5);
    long bad = 0;
    for (long i = 0; i < draws; ++i) {
        const int k = static_cast<int>(i);
        const double alpha = 0.001 + 0.998 * rng.truth_u(k, 0);
        const double rho = 0.001 + 0.5 * rng.truth_u(k, 1);
        const double kl = 0.01 + 3.0 * rng.truth_u(k, 2);
        const double g_star = 1.0 + 20.0 * rng.truth_u(k, 3);
        const long K = 1 + static_cast<long>(rng.truth_u(k, 4) * 1000.0);
        const auto pair = bounds::gstar_upper_bounds(alpha, rho, kl, g_star, K);
        const double lb = bounds::add_lower_bound(alpha, kl, rho);
        const double ismap_ub = bounds::ismap_upper_bound(alpha, rho);
        const double smap_ub = bounds::smap_upper_bound(alpha, rho, K);
        const bool ok = lb <= pair.ismap + 1e-12 && pair.ismap <= ismap_ub + 1e-12 &&
                        pair.ismap <= pair.smap + 1e-12 && ismap_ub <= smap_ub + 1e-12 &&
                        pair.smap <= smap_ub + 1e-12;
        if (!ok) ++bad;
    }
    return {"bound_orderings", bad == 0,
            detail::fmt("violations=%.0f of %.0f", static_cast<double>(bad),
                        static_cast<double>(draws))};
}

// With shared randomness and full observation the statistic paths coincide,
// so the flat-threshold procedure never declares later than the step-up one.
inline ValidationCheck check_pathwise_dominance(std::uint64_t seed, int runs = 20, int K = 20) {
    const auto model = ScenarioModel::gaussian(0.0, 1.0, 1.0);
    const double rho = 0.01, alpha = 0.1, q = 1.0;
    const long horizon = 5000;
    long violations = 0;
    for (int r = 0; r < runs; ++r) {
        const RunRng rng(seed, static_cast<std::uint64_t>(r) + 10);
        const auto truths = generate_truths(K, rho, model, rng);
        const auto smap = run_procedure(make_procedure(ProcedureKind::SMap, alpha, K, rho, q, horizon),
                                        truths, model, rng);
        const auto ismap = run_procedure(make_procedure(ProcedureKind::ISMap, alpha, K, rho, q, horizon),
                                         truths, model, rng);
        for (int k = 0; k < K; ++k) {
            const long ts = smap.T[static_cast<std::size_t>(k)];
            const long ti = ismap.T[static_cast<std::size_t>(k)];
            if (ts != kCensored && (ti == kCensored || ti > ts)) ++violations;
        }
    }
    return {"pathwise_ismap_leq_smap", violations == 0,
            detail::fmt("violations=%.0f", static_cast<double>(violations))};
}

// Pre-change crossing rates of the step-up thresholds stay below r*alpha/K
// plus Monte Carlo noise.
inline ValidationCheck check_type1_rates(std::uint64_t seed, long runs = 4000) {
    const auto model = ScenarioModel::gaussian(0.0, 1.0, 1.0);
    const double rho = 0.01, alpha = 0.1;
    const int K = 10;
    const auto thresholds = smap_thresholds(K, alpha);
    std::vector<long> crossings(static_cast<std::size_t>(K), 0);
    for (long run = 0; run < runs; ++run) {
        const RunRng rng(seed, static_cast<std::uint64_t>(run) + 999);
        const auto truths = generate_truths(1, rho, model, rng);
        double log_odds = kNegInf;
        double peak = kNegInf;
        for (long n = 1; n < truths[0].t; ++n) {
            const double x = sample(model, truths[0], n, rng.obs_draw(0, n));
            log_odds = update_observed_log_odds(log_odds, rho, log_likelihood_ratio(model, x));
            peak = std::max(peak, log_odds);
        }
        for (int r = 1; r <= K; ++r)
            if (peak >= logit(thresholds[static_cast<std::size_t>(r - 1)]))
                ++crossings[static_cast<std::size_t>(r - 1)];
    }
    bool ok = true;
    double worst_excess = -1.0;
    for (int r = 1; r <= K; ++r) {
        const double p_hat = static_cast<double>(crossings[static_cast<std::size_t>(r - 1)]) /
                             static_cast<double>(runs);
        const double bound = static_cast<double>(r) * alpha / K;
        const double se = std::sqrt(std::max(p_hat * (1.0 - p_hat), 1e-12) /
                                    static_cast<double>(runs));
        worst_excess = std::max(worst_excess, p_hat - bound);
        if (p_hat > bound + 3.0 * se) ok = false;
    }
    return {"pre_change_type1_rates", ok, detail::fmt("worst_excess=%.4f", worst_excess)};
}

inline std::vector<ValidationCheck> run_validation(std::uint64_t seed) {
    std::vector<ValidationCheck> checks;
    checks.push_back(check_lr_unit_mean(seed));
    checks.push_back(check_glr_dominates(seed));
    checks.push_back(check_recursion_vs_oracle(seed));
    checks.push_back(check_alr_posterior_identity(seed));
    checks.push_back(check_bound_orderings(seed));
    checks.push_back(check_pathwise_dominance(seed));
    checks.push_back(check_type1_rates(seed));
    return checks;
}

} // namespace mcpd
