#pragma once
// Which active streams the fusion center observes in a slot, under the
// proportion budget ceil(q * K_n).

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

namespace mcpd {

enum class SchedulerKind { MapTopQ, RandomConsecutive, Full };

// ceil(q * k_n). The epsilon guards against products like 0.3 * 10 landing
// one ulp above the exact integer and ceiling to 4.
inline int subset_size(double q, int k_n) {
    if (!(q >= 0.0) || !(q <= 1.0)) throw std::invalid_argument("subset_size: q outside [0,1]");
    if (k_n < 0) throw std::invalid_argument("subset_size: negative stream count");
    const int m = static_cast<int>(std::ceil(q * static_cast<double>(k_n) - 1e-9));
    return std::clamp(m, 0, k_n);
}

// The ceil(q*|ids|) ids with the largest statistics; ties go to the smaller
// id so selection is deterministic.
inline std::vector<int> select_map(std::span<const int> ids, std::span<const double> stat,
                                   double q) {
    if (ids.size() != stat.size())
        throw std::invalid_argument("select_map: ids/stat size mismatch");
    const int m = subset_size(q, static_cast<int>(ids.size()));
    std::vector<int> order(ids.size());
    std::iota(order.begin(), order.end(), 0);
    std::partial_sort(order.begin(), order.begin() + m, order.end(), [&](int a, int b) {
        if (stat[a] != stat[b]) return stat[a] > stat[b];
        return ids[a] < ids[b];
    });
    std::vector<int> out(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) out[static_cast<std::size_t>(i)] = ids[order[i]];
    std::sort(out.begin(), out.end());
    return out;
}

// Window of ceil(q*|ids|) consecutive positions in the active list, starting
// at `start` (0-based position) and wrapping circularly. Positions, not raw
// ids: the budget stays exact after declarations fragment the id space.
inline std::vector<int> select_consecutive_window(std::span<const int> active_ids_sorted,
                                                  double q, int start) {
    const int kn = static_cast<int>(active_ids_sorted.size());
    const int m = subset_size(q, kn);
    if (kn > 0 && (start < 0 || start >= kn))
        throw std::invalid_argument("select_consecutive_window: start position out of range");
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i)
        out.push_back(active_ids_sorted[static_cast<std::size_t>((start + i) % kn)]);
    std::sort(out.begin(), out.end());
    return out;
}

// Uniform window start from a U(0,1) draw.
inline std::vector<int> select_random_consecutive(std::span<const int> active_ids_sorted,
                                                  double q, double u01) {
    const int kn = static_cast<int>(active_ids_sorted.size());
    if (kn == 0) return {};
    const int start = std::min(static_cast<int>(u01 * kn), kn - 1);
    return select_consecutive_window(active_ids_sorted, q, start);
}

} // namespace mcpd
