#pragma once
// Monte Carlo experiment engine. Replications are pure functions of
// (seed, cell, run index): they can be computed on any number of worker
// threads and reduced in fixed run order, so output bytes depend only on the
// config and seed. Each sweep cell draws an independent random stream keyed
// by its own parameters.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <string>
#include <thread>
#include <vector>

#include "mcpd/bounds.hpp"
#include "mcpd/config.hpp"
#include "mcpd/metrics.hpp"
#include "mcpd/posterior.hpp"
#include "mcpd/procedures.hpp"
#include "mcpd/rng.hpp"

namespace mcpd {

// change points i.i.d. geometric(rho_true) on {1,2,...}; the post-change
// shape parameter for the p-value model is drawn uniformly from
// [b_min, b_max].
inline std::vector<StreamTruth> generate_truths(int K, double rho_true,
                                                const ScenarioModel& model, const RunRng& rng) {
    if (K < 1) throw std::invalid_argument("generate_truths: K must be >= 1");
    if (!(rho_true > 0.0) || !(rho_true <= 1.0))
        throw std::invalid_argument("generate_truths: rho_true outside (0,1]");
    std::vector<StreamTruth> truths(static_cast<std::size_t>(K));
    const double log1m = std::log1p(-rho_true); // -inf at rho = 1
    for (int k = 0; k < K; ++k) {
        StreamTruth& tr = truths[static_cast<std::size_t>(k)];
        const double u = rng.truth_u(k, 0);
        const double raw = log1m == kNegInf ? 0.0 : std::ceil(std::log(u) / log1m);
        tr.t = std::max(1L, static_cast<long>(raw));
        if (model.kind == ScenarioKind::PValueBeta)
            tr.b_true = model.b_min + rng.truth_u(k, 1) * (model.b_max - model.b_min);
    }
    return truths;
}

struct SummaryRow {
    ProcedureKind procedure = ProcedureKind::SMap;
    std::string scenario;
    int K = 0;
    double q = 0.0;
    double alpha = 0.0;
    double rho = 0.0;
    double rho_assumed = 0.0;
    double c = 0.0;
    MetricsSummary m;
    std::uint64_t seed = 0;
};

struct BestQRow {
    int K = 0;
    double c = 0.0;
    ProcedureKind procedure = ProcedureKind::SMap;
    double best_q = 0.0;
    double risk = 0.0;
    bool monotone_nonincreasing = false; // across the full c grid for this procedure
};

struct SweepResult {
    std::vector<SummaryRow> rows;
    std::vector<BestQRow> best_q;
    std::vector<std::string> gate_failures; // cells whose censoring exceeded 1%
    std::uint64_t config_hash = 0;
    std::uint64_t seed = 0;
};

// Independent random stream per sweep cell.
inline std::uint64_t cell_hash(const ExperimentConfig& cfg, ProcedureKind kind, double q, int K) {
    using detail::derive;
    auto bits = [](double v) {
        std::uint64_t b;
        static_assert(sizeof b == sizeof v);
        std::memcpy(&b, &v, sizeof b);
        return b;
    };
    std::uint64_t h = derive(0x63656c6cull, static_cast<std::uint64_t>(kind));
    h = derive(h, bits(q));
    h = derive(h, static_cast<std::uint64_t>(K));
    h = derive(h, bits(cfg.alpha));
    h = derive(h, bits(cfg.rho));
    h = derive(h, bits(cfg.effective_rho_assumed()));
    h = derive(h, static_cast<std::uint64_t>(cfg.model().kind));
    h = derive(h, bits(cfg.mu0) ^ bits(cfg.b_min));
    h = derive(h, bits(cfg.mu1) ^ bits(cfg.b_max));
    h = derive(h, bits(cfg.sigma));
    return h;
}

namespace detail {

template <typename Fn>
void parallel_for_runs(long runs, int threads, Fn&& body) {
    int n_threads = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
    if (n_threads < 1) n_threads = 1;
    n_threads = static_cast<int>(std::min<long>(n_threads, runs));
    if (n_threads == 1) {
        for (long r = 0; r < runs; ++r) body(r);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int w = 0; w < n_threads; ++w) {
        pool.emplace_back([&, w] {
            for (long r = w; r < runs; r += n_threads) body(r);
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace detail

// All replications of one (procedure, q, K) cell. Record lines, when
// requested, are appended in run order after a cell marker.
inline std::vector<RunStats> simulate_cell(const ExperimentConfig& cfg, ProcedureKind kind,
                                           double q, int K,
                                           std::vector<std::string>* record_lines = nullptr) {
    const ScenarioModel model = cfg.model();
    const ProcedureConfig pc = make_procedure(kind, cfg.alpha, K, cfg.effective_rho_assumed(),
                                              q, cfg.effective_horizon());
    const std::uint64_t cell = cell_hash(cfg, kind, pc.q, K);
    std::vector<RunStats> stats(static_cast<std::size_t>(cfg.runs));
    std::vector<std::string> lines;
    if (record_lines) lines.assign(static_cast<std::size_t>(cfg.runs), {});
    detail::parallel_for_runs(cfg.runs, cfg.threads, [&](long r) {
        const RunRng rng = RunRng::for_cell(cfg.seed, cell, static_cast<std::uint64_t>(r));
        const auto truths = generate_truths(K, cfg.rho, model, rng);
        const RunRecord rec = run_procedure(pc, truths, model, rng);
        stats[static_cast<std::size_t>(r)] = RunStats::from(rec);
        if (record_lines) lines[static_cast<std::size_t>(r)] = record_to_line(rec);
    });
    if (record_lines) {
        char head[96];
        std::snprintf(head, sizeof head, "# cell procedure=%s K=%d q=%.10g", to_string(kind), K,
                      pc.q);
        record_lines->emplace_back(head);
        for (auto& l : lines) record_lines->push_back(std::move(l));
    }
    return stats;
}

// Best proportion per (K, procedure, c) with a flag for whether the best q
// is non-increasing across the whole c grid.
inline std::vector<BestQRow> sweep_weighted_risk(const std::vector<SummaryRow>& rows,
                                                 const std::vector<double>& c_grid) {
    std::vector<BestQRow> table;
    std::vector<int> k_values;
    std::vector<ProcedureKind> kinds;
    for (const auto& row : rows) {
        if (std::find(k_values.begin(), k_values.end(), row.K) == k_values.end())
            k_values.push_back(row.K);
        if (std::find(kinds.begin(), kinds.end(), row.procedure) == kinds.end())
            kinds.push_back(row.procedure);
    }
    for (int K : k_values) {
        for (ProcedureKind kind : kinds) {
            std::vector<double> best_per_c;
            const std::size_t first = table.size();
            for (double c : c_grid) {
                std::vector<SweepPoint> sweep;
                for (const auto& row : rows)
                    if (row.K == K && row.procedure == kind && row.c == c)
                        sweep.push_back({row.q, row.m.add, row.m.ano});
                if (sweep.empty()) continue;
                BestQRow b;
                b.K = K;
                b.c = c;
                b.procedure = kind;
                b.best_q = best_proportion(sweep, c);
                for (const auto& p : sweep)
                    if (p.q == b.best_q) b.risk = weighted_risk(p.add, p.ano, c);
                best_per_c.push_back(b.best_q);
                table.push_back(b);
            }
            bool monotone = true;
            for (std::size_t i = 1; i < best_per_c.size(); ++i)
                if (best_per_c[i] > best_per_c[i - 1]) monotone = false;
            for (std::size_t i = first; i < table.size(); ++i)
                table[i].monotone_nonincreasing = monotone;
        }
    }
    return table;
}

inline SweepResult run_experiment(const ExperimentConfig& cfg,
                                  std::vector<std::string>* record_lines = nullptr) {
    cfg.validate();
    SweepResult result;
    result.config_hash = config_hash(cfg);
    result.seed = cfg.seed;

    for (int K : cfg.k_grid) {
        for (ProcedureKind kind : cfg.procedures) {
            for (double q : cfg.q_grid) {
                // dfdr always observes everything; one cell per K is enough
                if (kind == ProcedureKind::DFdr && q != cfg.q_grid.front()) continue;
                const double q_eff = kind == ProcedureKind::DFdr ? 1.0 : q;
                const auto stats = simulate_cell(cfg, kind, q_eff, K, record_lines);
                for (double c : cfg.c_grid) {
                    SummaryRow row;
                    row.procedure = kind;
                    row.scenario = cfg.scenario;
                    row.K = K;
                    row.q = q_eff;
                    row.alpha = cfg.alpha;
                    row.rho = cfg.rho;
                    row.rho_assumed = cfg.effective_rho_assumed();
                    row.c = c;
                    row.m = summarize(stats, c);
                    row.seed = cfg.seed;
                    result.rows.push_back(std::move(row));
                }
                const double censored = result.rows.back().m.censored_fraction;
                if (censored > 0.01) {
                    char buf[128];
                    std::snprintf(buf, sizeof buf, "%s K=%d q=%.10g: censored_fraction=%.10g",
                                  to_string(kind), K, q_eff, censored);
                    result.gate_failures.emplace_back(buf);
                }
            }
        }
    }

    result.best_q = sweep_weighted_risk(result.rows, cfg.c_grid);
    return result;
}

// ---------------------------------------------------------------------------
// emission
// ---------------------------------------------------------------------------

struct BoundsColumns {
    bool enabled = false;
    double kl = 0.0;
    double g_star = 1.0;
};

inline std::string format_g(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

inline std::string csv_header(const BoundsColumns& bc = {}) {
    std::string s = "procedure,scenario,K,q,alpha,rho,rho_assumed,c,fdr,se_fdr,add,se_add,"
                    "ano,se_ano,censored_fraction,n_runs,seed";
    if (bc.enabled) s += ",add_lb,smap_ub,ismap_ub,smap_ub_gstar,ismap_ub_gstar";
    return s + "\n";
}

inline std::string csv_row(const SummaryRow& r, const BoundsColumns& bc = {}) {
    std::string s;
    s += to_string(r.procedure);
    s += ',';
    s += r.scenario;
    s += ',';
    s += std::to_string(r.K);
    s += ',';
    s += format_g(r.q);
    s += ',';
    s += format_g(r.alpha);
    s += ',';
    s += format_g(r.rho);
    s += ',';
    s += format_g(r.rho_assumed);
    s += ',';
    s += format_g(r.c);
    s += ',';
    s += format_g(r.m.fdr);
    s += ',';
    s += format_g(r.m.se_fdr);
    s += ',';
    s += format_g(r.m.add);
    s += ',';
    s += format_g(r.m.se_add);
    s += ',';
    s += format_g(r.m.ano);
    s += ',';
    s += format_g(r.m.se_ano);
    s += ',';
    s += format_g(r.m.censored_fraction);
    s += ',';
    s += std::to_string(r.m.n_runs);
    s += ',';
    s += std::to_string(r.seed);
    if (bc.enabled) {
        const double ra = r.rho_assumed;
        const auto pair = bounds::gstar_upper_bounds(r.alpha, ra, bc.kl, bc.g_star, r.K);
        s += ',';
        s += format_g(bounds::add_lower_bound(r.alpha, bc.kl, ra));
        s += ',';
        s += format_g(bounds::smap_upper_bound(r.alpha, ra, r.K));
        s += ',';
        s += format_g(bounds::ismap_upper_bound(r.alpha, ra));
        s += ',';
        s += format_g(pair.smap);
        s += ',';
        s += format_g(pair.ismap);
    }
    return s + "\n";
}

inline std::string sweep_to_csv(const SweepResult& res, const BoundsColumns& bc = {}) {
    std::string s = csv_header(bc);
    for (const auto& row : res.rows) s += csv_row(row, bc);
    return s;
}

inline std::string best_q_to_csv(const SweepResult& res) {
    std::string s = "K,c,procedure,best_q,risk,monotone_nonincreasing\n";
    for (const auto& b : res.best_q) {
        s += std::to_string(b.K);
        s += ',';
        s += format_g(b.c);
        s += ',';
        s += to_string(b.procedure);
        s += ',';
        s += format_g(b.best_q);
        s += ',';
        s += format_g(b.risk);
        s += ',';
        s += b.monotone_nonincreasing ? "1" : "0";
        s += "\n";
    }
    return s;
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << content;
}

} // namespace mcpd
