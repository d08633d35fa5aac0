#pragma once
// Pre/post-change observation models. Two scenarios are supported: a Gaussian
// mean shift with known densities, and a p-value model where the post-change
// density is Beta(1,b) with b known only up to an interval, handled through a
// generalized likelihood ratio. Densities are evaluated in log space; plain
// ratios are exponentiated only at the API boundary.

#include <cmath>
#include <stdexcept>
#include <string>

#include "mcpd/logmath.hpp"
#include "mcpd/rng.hpp"

namespace mcpd {

enum class ScenarioKind { GaussianMeanShift, PValueBeta };

struct ScenarioModel {
    ScenarioKind kind = ScenarioKind::GaussianMeanShift;

    // GaussianMeanShift: f0 = N(mu0, sigma^2), f1 = N(mu1, sigma^2)
    double mu0 = 0.0;
    double mu1 = 1.0;
    double sigma = 1.0;

    // PValueBeta: f0 = U(0,1), f1 = Beta(1,b) with b in [b_min, b_max]
    double b_min = 10.0;
    double b_max = 20.0;

    static ScenarioModel gaussian(double mu0, double mu1, double sigma) {
        if (!(sigma > 0.0)) throw std::invalid_argument("gaussian: sigma must be > 0");
        ScenarioModel m;
        m.kind = ScenarioKind::GaussianMeanShift;
        m.mu0 = mu0;
        m.mu1 = mu1;
        m.sigma = sigma;
        return m;
    }

    static ScenarioModel pvalue_beta(double b_min, double b_max) {
        if (!(b_min > 1.0) || !(b_max >= b_min))
            throw std::invalid_argument("pvalue_beta: need b_max >= b_min > 1");
        ScenarioModel m;
        m.kind = ScenarioKind::PValueBeta;
        m.b_min = b_min;
        m.b_max = b_max;
        return m;
    }

    std::string name() const {
        return kind == ScenarioKind::GaussianMeanShift ? "gaussian" : "pvalue_glr";
    }
};

// Ground truth for one stream: its change point and, for the p-value model,
// the realised post-change shape parameter.
struct StreamTruth {
    long t = 1;          // first post-change slot
    double b_true = 0.0; // PValueBeta only
};

// log GLR for the p-value model: max over b in [b_min,b_max] of the Beta(1,b)
// density b(1-x)^(b-1), with f0 = 1 on [0,1]. The maximiser is
// b* = -1/log(1-x), clamped to the interval; the density is concave in b so
// the clamped stationary point is the max. x = 1 is the continuous limit 0.
inline double log_glr_beta(double x, double b_min, double b_max) {
    if (!(x >= 0.0) || !(x <= 1.0))
        throw std::domain_error("glr_beta: observation outside [0,1]");
    if (x == 1.0) return kNegInf;
    const double l1mx = std::log1p(-x); // <= 0, == 0 at x = 0
    double b_star = l1mx == 0.0 ? b_max : -1.0 / l1mx;
    b_star = std::min(std::max(b_star, b_min), b_max);
    return std::log(b_star) + (b_star - 1.0) * l1mx;
}

inline double glr_beta(double x, double b_min, double b_max) {
    return std::exp(log_glr_beta(x, b_min, b_max));
}

// log L(x) = log f1(x) - log f0(x). For PValueBeta this is the GLR used by
// all procedures under parameter uncertainty.
inline double log_likelihood_ratio(const ScenarioModel& m, double x) {
    if (m.kind == ScenarioKind::GaussianMeanShift) {
        const double d = m.mu1 - m.mu0;
        return d * (2.0 * x - m.mu0 - m.mu1) / (2.0 * m.sigma * m.sigma);
    }
    return log_glr_beta(x, m.b_min, m.b_max);
}

inline double likelihood_ratio(const ScenarioModel& m, double x) {
    return std::exp(log_likelihood_ratio(m, x));
}

// Exact per-stream log LR when the realised b is known; used only by tests
// and diagnostics (procedures see the GLR).
inline double log_lr_beta_exact(double x, double b_true) {
    if (!(x >= 0.0) || !(x <= 1.0))
        throw std::domain_error("lr_beta_exact: observation outside [0,1]");
    if (x == 1.0) return kNegInf;
    return std::log(b_true) + (b_true - 1.0) * std::log1p(-x);
}

// One observation from stream k at `slot`: pre-change density before the
// change point, post-change density from slot t onward.
inline double sample(const ScenarioModel& m, const StreamTruth& truth, long slot, Draw d) {
    if (slot < 1) throw std::invalid_argument("sample: slot must be >= 1");
    const bool post = slot >= truth.t;
    if (m.kind == ScenarioKind::GaussianMeanShift) {
        return (post ? m.mu1 : m.mu0) + m.sigma * normal_from(d);
    }
    if (!post) return d.u1; // U(0,1)
    // Beta(1,b): inverse CDF of F(x) = 1-(1-x)^b
    return -std::expm1(std::log(d.u1) / truth.b_true);
}

// D(f1 || f0). Gaussian: (mu1-mu0)^2 / (2 sigma^2). Beta(1,b) vs uniform:
// log b - (b-1)/b. The p-value model needs the realised b.
inline double kl_divergence(const ScenarioModel& m, double b = 0.0) {
    if (m.kind == ScenarioKind::GaussianMeanShift) {
        const double d = m.mu1 - m.mu0;
        return d * d / (2.0 * m.sigma * m.sigma);
    }
    if (!(b >= m.b_min) || !(b <= m.b_max))
        throw std::invalid_argument("kl_divergence: b outside [b_min, b_max]");
    return std::log(b) - (b - 1.0) / b;
}

} // namespace mcpd
