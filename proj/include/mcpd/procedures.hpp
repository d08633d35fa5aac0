#pragma once
// The detection procedures. All four share one sampling-stage loop:
//
//   smap   - step-up over sorted posteriors against descending thresholds
//            Q_r = 1 - r*alpha/K, observing the top-posterior subset.
//   ismap  - flat threshold 1 - alpha, same scheduler.
//   simple - smap thresholds, but the observed subset is a random circular
//            window of consecutive active streams.
//   dfdr   - full observation, average-likelihood-ratio statistic, step-up
//            against Q_r = K/(r*alpha).
//
// A stage runs until at least one statistic clears its threshold; the
// declared streams are removed and the next stage starts with the remaining
// ones. Streams still active at the horizon are recorded as censored rather
// than silently dropped.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mcpd/logmath.hpp"
#include "mcpd/models.hpp"
#include "mcpd/posterior.hpp"
#include "mcpd/rng.hpp"
#include "mcpd/scheduling.hpp"

namespace mcpd {

enum class ProcedureKind { SMap, ISMap, Simple, DFdr };

inline const char* to_string(ProcedureKind k) {
    switch (k) {
        case ProcedureKind::SMap: return "smap";
        case ProcedureKind::ISMap: return "ismap";
        case ProcedureKind::Simple: return "simple";
        case ProcedureKind::DFdr: return "dfdr";
    }
    return "?";
}

inline std::optional<ProcedureKind> procedure_from_string(const std::string& s) {
    if (s == "smap") return ProcedureKind::SMap;
    if (s == "ismap") return ProcedureKind::ISMap;
    if (s == "simple") return ProcedureKind::Simple;
    if (s == "dfdr") return ProcedureKind::DFdr;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// threshold schedules
// ---------------------------------------------------------------------------

// Q_r = 1 - r*alpha/K, r = 1..K, strictly decreasing in (0,1).
inline std::vector<double> smap_thresholds(int k, double alpha) {
    if (k < 1) throw std::invalid_argument("smap_thresholds: K must be >= 1");
    if (!(alpha > 0.0) || !(alpha < 1.0))
        throw std::invalid_argument("smap_thresholds: alpha outside (0,1)");
    std::vector<double> q(static_cast<std::size_t>(k));
    for (int r = 1; r <= k; ++r)
        q[static_cast<std::size_t>(r - 1)] = 1.0 - static_cast<double>(r) * alpha / k;
    return q;
}

// flat Q = 1 - alpha
inline double ismap_threshold(double alpha) {
    if (!(alpha > 0.0) || !(alpha < 1.0))
        throw std::invalid_argument("ismap_threshold: alpha outside (0,1)");
    return 1.0 - alpha;
}

// Q_r = K/(r*alpha), r = 1..K, strictly decreasing, all > 1.
inline std::vector<double> dfdr_thresholds(int k, double alpha) {
    if (k < 1) throw std::invalid_argument("dfdr_thresholds: K must be >= 1");
    if (!(alpha > 0.0) || !(alpha < 1.0))
        throw std::invalid_argument("dfdr_thresholds: alpha outside (0,1)");
    std::vector<double> q(static_cast<std::size_t>(k));
    for (int r = 1; r <= k; ++r)
        q[static_cast<std::size_t>(r - 1)] = static_cast<double>(k) / (r * alpha);
    return q;
}

// ---------------------------------------------------------------------------
// configuration and run record
// ---------------------------------------------------------------------------

struct ProcedureConfig {
    ProcedureKind kind = ProcedureKind::SMap;
    double alpha = 0.1;
    int K = 1;
    double rho_assumed = 0.01;
    SchedulerKind scheduler = SchedulerKind::MapTopQ;
    double q = 1.0;
    long horizon = 1;
};

// Builds a config with the scheduler the procedure definition implies:
// dfdr observes everything, simple is smap with the consecutive scheduler.
inline ProcedureConfig make_procedure(ProcedureKind kind, double alpha, int k,
                                      double rho_assumed, double q, long horizon) {
    if (k < 1) throw std::invalid_argument("make_procedure: K must be >= 1");
    if (!(alpha > 0.0) || !(alpha < 1.0))
        throw std::invalid_argument("make_procedure: alpha outside (0,1)");
    if (!(rho_assumed > 0.0) || !(rho_assumed < 1.0))
        throw std::invalid_argument("make_procedure: rho_assumed outside (0,1)");
    if (!(q >= 0.0) || !(q <= 1.0)) throw std::invalid_argument("make_procedure: q outside [0,1]");
    if (horizon < 1) throw std::invalid_argument("make_procedure: horizon must be >= 1");
    ProcedureConfig cfg;
    cfg.kind = kind;
    cfg.alpha = alpha;
    cfg.K = k;
    cfg.rho_assumed = rho_assumed;
    cfg.q = q;
    cfg.horizon = horizon;
    switch (kind) {
        case ProcedureKind::SMap:
        case ProcedureKind::ISMap: cfg.scheduler = SchedulerKind::MapTopQ; break;
        case ProcedureKind::Simple: cfg.scheduler = SchedulerKind::RandomConsecutive; break;
        case ProcedureKind::DFdr:
            cfg.scheduler = SchedulerKind::Full;
            cfg.q = 1.0;
            break;
    }
    if (cfg.scheduler == SchedulerKind::Full) cfg.q = 1.0;
    return cfg;
}

struct StageRecord {
    long slot = 0;             // n_j
    std::vector<int> declared; // stream ids, ascending
};

// Step-up declaration rule shared by the posterior and ALR procedures: sort
// the active statistics ascending (ties to the smaller id), find the first
// rank l whose value clears Q_{K-l+1}, and declare that rank and everything
// above it. Thresholds are indexed by the original K even when fewer streams
// remain active. Returns declared ids, ascending; empty if nothing fires.
inline std::vector<int> step_up_declarations(std::span<const int> active,
                                             std::span<const double> stat_by_id,
                                             std::span<const double> thresholds) {
    const int kn = static_cast<int>(active.size());
    const int K = static_cast<int>(thresholds.size());
    if (kn > K) throw std::invalid_argument("step_up_declarations: more active ids than thresholds");
    std::vector<int> order(active.begin(), active.end());
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        const double sa = stat_by_id[static_cast<std::size_t>(a)];
        const double sb = stat_by_id[static_cast<std::size_t>(b)];
        if (sa != sb) return sa < sb;
        return a < b;
    });
    int lj = 0;
    for (int l = 1; l <= kn; ++l) {
        if (stat_by_id[static_cast<std::size_t>(order[static_cast<std::size_t>(l - 1)])] >=
            thresholds[static_cast<std::size_t>(K - l)]) {
            lj = l;
            break;
        }
    }
    if (lj == 0) return {};
    std::vector<int> declared(order.begin() + (lj - 1), order.end());
    std::sort(declared.begin(), declared.end());
    return declared;
}

inline constexpr long kCensored = -1;

struct RunRecord {
    int K = 0;
    double q = 1.0;
    std::vector<long> t;               // true change points, per stream
    std::vector<long> T;               // declaration slots; kCensored if none
    std::vector<long> observed_counts; // per slot 1..n_last
    std::vector<StageRecord> stages;
    std::vector<int> censored; // ids undeclared at the horizon, ascending
    // statistic at declaration (log-odds, or log-ALR for the baseline);
    // +inf for undeclared streams so the posterior complement reads 0
    std::vector<double> stat_at_T;
};

// ---------------------------------------------------------------------------
// the sampling-stage loop
// ---------------------------------------------------------------------------

inline RunRecord run_procedure(const ProcedureConfig& cfg, const std::vector<StreamTruth>& truths,
                               const ScenarioModel& model, const RunRng& rng) {
    const int K = cfg.K;
    if (static_cast<int>(truths.size()) != K)
        throw std::invalid_argument("run_procedure: truths size != K");
    if (cfg.horizon < 1) throw std::invalid_argument("run_procedure: horizon must be >= 1");

    const bool use_alr = cfg.kind == ProcedureKind::DFdr;
    const bool step_up = cfg.kind != ProcedureKind::ISMap;
    const bool full_obs = use_alr || cfg.scheduler == SchedulerKind::Full;
    const double q_eff = full_obs ? 1.0 : cfg.q;
    const double log_one_minus_rho = std::log1p(-cfg.rho_assumed);

    // thresholds in the statistic's own scale: log-odds for the posterior,
    // log for the ALR; index r-1 holds Q_r
    std::vector<double> thr;
    if (use_alr) {
        thr = dfdr_thresholds(K, cfg.alpha);
        for (double& v : thr) v = std::log(v);
    } else if (step_up) {
        thr = smap_thresholds(K, cfg.alpha);
        for (double& v : thr) v = logit(v);
    }
    const double flat_thr = logit(ismap_threshold(cfg.alpha));
    const double min_thr = step_up ? thr.back() : flat_thr; // Q_K, the most lenient

    RunRecord rec;
    rec.K = K;
    rec.q = q_eff;
    rec.t.resize(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k) rec.t[static_cast<std::size_t>(k)] = truths[static_cast<std::size_t>(k)].t;
    rec.T.assign(static_cast<std::size_t>(K), kCensored);
    rec.stat_at_T.assign(static_cast<std::size_t>(K), kPosInf);

    std::vector<double> stat(static_cast<std::size_t>(K), use_alr ? 0.0 : kNegInf);
    std::vector<int> active(static_cast<std::size_t>(K));
    std::iota(active.begin(), active.end(), 0);
    std::vector<char> selected(static_cast<std::size_t>(K), 0);
    std::vector<int> order;
    std::vector<int> declared;

    long n = 0;
    while (!active.empty() && n < cfg.horizon) {
        // stage: the active set is fixed until a declaration
        const int kn = static_cast<int>(active.size());
        const int budget = subset_size(q_eff, kn);
        bool stage_done = false;

        while (!stage_done && n < cfg.horizon) {
            ++n;

            // choose the observed subset from the pre-update statistics
            std::fill(selected.begin(), selected.end(), 0);
            if (full_obs || budget == kn) {
                for (int id : active) selected[static_cast<std::size_t>(id)] = 1;
            } else if (cfg.scheduler == SchedulerKind::MapTopQ) {
                order.resize(active.size());
                std::iota(order.begin(), order.end(), 0);
                std::partial_sort(order.begin(), order.begin() + budget, order.end(),
                                  [&](int a, int b) {
                                      const double sa = stat[static_cast<std::size_t>(active[static_cast<std::size_t>(a)])];
                                      const double sb = stat[static_cast<std::size_t>(active[static_cast<std::size_t>(b)])];
                                      if (sa != sb) return sa > sb;
                                      return active[static_cast<std::size_t>(a)] < active[static_cast<std::size_t>(b)];
                                  });
                for (int i = 0; i < budget; ++i)
                    selected[static_cast<std::size_t>(active[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])])] = 1;
            } else {
                const int start = std::min(static_cast<int>(rng.sched_u(n) * kn), kn - 1);
                for (int i = 0; i < budget; ++i)
                    selected[static_cast<std::size_t>(active[static_cast<std::size_t>((start + i) % kn)])] = 1;
            }

            // update statistics; observations are drawn by (stream, slot) key
            const double log_survival = static_cast<double>(n) * log_one_minus_rho;
            double max_stat = kNegInf;
            for (int id : active) {
                const std::size_t k = static_cast<std::size_t>(id);
                if (selected[k]) {
                    const double x = sample(model, truths[k], n, rng.obs_draw(id, n));
                    const double llr = log_likelihood_ratio(model, x);
                    stat[k] = use_alr ? update_log_alr(stat[k], llr, log_survival)
                                      : update_observed_log_odds(stat[k], cfg.rho_assumed, llr);
                } else {
                    stat[k] = update_unobserved_log_odds(stat[k], cfg.rho_assumed);
                }
                max_stat = std::max(max_stat, stat[k]);
            }
            rec.observed_counts.push_back(budget);

            // declarations; nothing can fire while the maximum statistic sits
            // below the most lenient threshold Q_K
            if (max_stat < min_thr) continue;
            if (!step_up) {
                declared.clear();
                for (int id : active)
                    if (stat[static_cast<std::size_t>(id)] >= flat_thr) declared.push_back(id);
            } else {
                declared = step_up_declarations(active, stat, thr);
            }

            if (!declared.empty()) {
                for (int id : declared) {
                    rec.T[static_cast<std::size_t>(id)] = n;
                    rec.stat_at_T[static_cast<std::size_t>(id)] = stat[static_cast<std::size_t>(id)];
                }
                StageRecord sr;
                sr.slot = n;
                sr.declared = declared;
                rec.stages.push_back(std::move(sr));
                std::vector<int> remaining;
                remaining.reserve(active.size() - declared.size());
                std::set_difference(active.begin(), active.end(), declared.begin(),
                                    declared.end(), std::back_inserter(remaining));
                active = std::move(remaining);
                stage_done = true;
            }
        }
    }

    rec.censored = active; // whatever is left at the horizon
    return rec;
}

// ---------------------------------------------------------------------------
// line-oriented record serialization (one record per line)
// ---------------------------------------------------------------------------

namespace detail {

inline std::string join_longs(const std::vector<long>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ',';
        s += v[i] == kCensored ? std::string("-") : std::to_string(v[i]);
    }
    return s;
}

inline std::vector<long> split_longs(const std::string& s) {
    std::vector<long> out;
    if (s.empty()) return out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ','))
        out.push_back(tok == "-" ? kCensored : std::stol(tok));
    return out;
}

} // namespace detail

inline std::string record_to_line(const RunRecord& r) {
    std::ostringstream os;
    os.precision(17);
    os << "K=" << r.K << " q=" << r.q << " t=" << detail::join_longs(r.t)
       << " T=" << detail::join_longs(r.T) << " obs=" << detail::join_longs(r.observed_counts);
    return os.str();
}

inline RunRecord record_from_line(const std::string& line) {
    RunRecord r;
    std::stringstream ss(line);
    std::string field;
    bool saw_k = false, saw_t = false, saw_cap_t = false, saw_obs = false;
    while (ss >> field) {
        const auto eq = field.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("record_from_line: bad field");
        const std::string key = field.substr(0, eq);
        const std::string val = field.substr(eq + 1);
        if (key == "K") {
            r.K = std::stoi(val);
            saw_k = true;
        } else if (key == "q") {
            r.q = std::stod(val);
        } else if (key == "t") {
            r.t = detail::split_longs(val);
            saw_t = true;
        } else if (key == "T") {
            r.T = detail::split_longs(val);
            saw_cap_t = true;
        } else if (key == "obs") {
            r.observed_counts = detail::split_longs(val);
            saw_obs = true;
        } else {
            throw std::invalid_argument("record_from_line: unknown field " + key);
        }
    }
    if (!saw_k || !saw_t || !saw_cap_t || !saw_obs)
        throw std::invalid_argument("record_from_line: missing field");
    if (static_cast<int>(r.t.size()) != r.K || static_cast<int>(r.T.size()) != r.K)
        throw std::invalid_argument("record_from_line: stream count mismatch");
    for (int k = 0; k < r.K; ++k)
        if (r.T[static_cast<std::size_t>(k)] == kCensored) r.censored.push_back(k);
    return r;
}

} // namespace mcpd
