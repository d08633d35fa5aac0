#pragma once
// FDR / ADD / ANO estimation from collections of run records. The FDR
// estimate is the mean of per-run false-discovery proportions (the criterion
// is an expectation of a ratio, not a ratio of totals). Censored streams are
// excluded from ADD and the run is flagged instead of imputing a horizon
// delay, which would bias comparisons invisibly.

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "mcpd/procedures.hpp"

namespace mcpd {

// V / max(R,1): fraction of declarations made before the true change.
// Censored streams count as undeclared.
inline double fdp(const RunRecord& rec) {
    long v = 0, r = 0;
    for (int k = 0; k < rec.K; ++k) {
        const long T = rec.T[static_cast<std::size_t>(k)];
        if (T == kCensored) continue;
        ++r;
        if (T < rec.t[static_cast<std::size_t>(k)]) ++v;
    }
    return static_cast<double>(v) / static_cast<double>(std::max(r, 1L));
}

// (1/K) sum_k max(0, T_k - t_k); refuses censored runs.
inline double add(const RunRecord& rec) {
    if (!rec.censored.empty()) throw std::domain_error("add: record has censored streams");
    double s = 0.0;
    for (int k = 0; k < rec.K; ++k)
        s += static_cast<double>(std::max(0L, rec.T[static_cast<std::size_t>(k)] -
                                                  rec.t[static_cast<std::size_t>(k)]));
    return s / static_cast<double>(rec.K);
}

// As add(), but averaging over the declared streams only; the caller is
// responsible for surfacing the censoring. Returns 0 when nothing declared.
inline double add_declared_only(const RunRecord& rec) {
    double s = 0.0;
    long declared = 0;
    for (int k = 0; k < rec.K; ++k) {
        const long T = rec.T[static_cast<std::size_t>(k)];
        if (T == kCensored) continue;
        ++declared;
        s += static_cast<double>(std::max(0L, T - rec.t[static_cast<std::size_t>(k)]));
    }
    return declared > 0 ? s / static_cast<double>(declared) : 0.0;
}

// (1/K) sum over slots of the recorded observation counts; observations stop
// once every stream is declared, so the recorded counts span exactly
// n = 1 .. sup_k T_k (the horizon for censored runs).
inline double ano(const RunRecord& rec) {
    long total = 0;
    for (long c : rec.observed_counts) total += c;
    return static_cast<double>(total) / static_cast<double>(rec.K);
}

inline double weighted_risk(double add_value, double ano_value, double c) {
    if (!(c >= 0.0) || !(c <= 1.0)) throw std::invalid_argument("weighted_risk: c outside [0,1]");
    return (1.0 - c) * add_value + c * ano_value;
}

struct SweepPoint {
    double q = 0.0;
    double add = 0.0;
    double ano = 0.0;
};

// q minimising the weighted risk; ties resolve to the smaller q.
inline double best_proportion(std::span<const SweepPoint> sweep, double c) {
    if (sweep.empty()) throw std::invalid_argument("best_proportion: empty sweep");
    double best_q = sweep[0].q;
    double best_risk = weighted_risk(sweep[0].add, sweep[0].ano, c);
    for (const auto& p : sweep.subspan(1)) {
        const double risk = weighted_risk(p.add, p.ano, c);
        if (risk < best_risk || (risk == best_risk && p.q < best_q)) {
            best_risk = risk;
            best_q = p.q;
        }
    }
    return best_q;
}

// ---------------------------------------------------------------------------
// Monte Carlo aggregation
// ---------------------------------------------------------------------------

struct MetricsSummary {
    double fdr = 0.0;
    double add = 0.0;
    double ano = 0.0;
    double weighted_risk = 0.0;
    long n_runs = 0;
    double se_fdr = 0.0;
    double se_add = 0.0;
    double se_ano = 0.0;
    double censored_fraction = 0.0; // censored streams / (K * runs)
};

// Per-run scalars kept instead of whole records; the reduce over them is in
// fixed run order, so aggregates are bit-reproducible.
struct RunStats {
    double fdp = 0.0;
    double add = 0.0; // declared streams only
    double ano = 0.0;
    long censored_streams = 0;
    long total_streams = 0;

    static RunStats from(const RunRecord& rec) {
        RunStats s;
        s.fdp = mcpd::fdp(rec);
        s.add = add_declared_only(rec);
        s.ano = mcpd::ano(rec);
        s.censored_streams = static_cast<long>(rec.censored.size());
        s.total_streams = rec.K;
        return s;
    }
};

namespace detail {

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
};

template <typename Get>
MeanSe mean_se(const std::vector<RunStats>& runs, Get get) {
    const std::size_t n = runs.size();
    double mean = 0.0;
    for (const auto& r : runs) mean += get(r);
    mean /= static_cast<double>(n);
    if (n < 2) return {mean, 0.0};
    double ss = 0.0;
    for (const auto& r : runs) {
        const double d = get(r) - mean;
        ss += d * d;
    }
    const double var = ss / static_cast<double>(n - 1);
    return {mean, std::sqrt(var / static_cast<double>(n))};
}

} // namespace detail

inline MetricsSummary summarize(const std::vector<RunStats>& runs, double c) {
    if (runs.empty()) throw std::invalid_argument("summarize: no runs");
    MetricsSummary m;
    m.n_runs = static_cast<long>(runs.size());
    const auto fdr = detail::mean_se(runs, [](const RunStats& r) { return r.fdp; });
    const auto add = detail::mean_se(runs, [](const RunStats& r) { return r.add; });
    const auto ano = detail::mean_se(runs, [](const RunStats& r) { return r.ano; });
    m.fdr = fdr.mean;
    m.se_fdr = fdr.se;
    m.add = add.mean;
    m.se_add = add.se;
    m.ano = ano.mean;
    m.se_ano = ano.se;
    m.weighted_risk = weighted_risk(m.add, m.ano, c);
    long censored = 0, total = 0;
    for (const auto& r : runs) {
        censored += r.censored_streams;
        total += r.total_streams;
    }
    m.censored_fraction = total > 0 ? static_cast<double>(censored) / static_cast<double>(total) : 0.0;
    return m;
}

} // namespace mcpd
