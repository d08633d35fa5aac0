#pragma once
// Counter-based random streams. Every draw is a pure function of
// (seed, run, stream, slot, draw index), so two procedures replayed over the
// same run key see identical observations wherever they sample the same
// (stream, slot) pair. That is what makes pathwise procedure comparisons
// meaningful.

#include <cmath>
#include <cstdint>

namespace mcpd {

namespace detail {

// splitmix64 finalizer
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

inline std::uint64_t derive(std::uint64_t key, std::uint64_t word) {
    return mix64(key ^ (word + 0x9e3779b97f4a7c15ull + (key << 6) + (key >> 2)));
}

} // namespace detail

// Uniform draw in the open interval (0,1): 53-bit mantissa offset by 1/2 ulp,
// never exactly 0 or 1 so logs stay finite.
inline double to_u01(std::uint64_t word) {
    return (static_cast<double>(word >> 11) + 0.5) * 0x1.0p-53;
}

struct Draw {
    double u1 = 0.0;
    double u2 = 0.0;
};

// Standard normal from two open-interval uniforms (Box-Muller).
inline double normal_from(Draw d) {
    return std::sqrt(-2.0 * std::log(d.u1)) * std::cos(6.283185307179586476925287 * d.u2);
}

// Random stream scoped to one Monte Carlo replication. Stateless: every
// method keys off (run key, tag, indices) only.
class RunRng {
public:
    RunRng(std::uint64_t seed, std::uint64_t run)
        : key_(detail::derive(detail::mix64(seed), run)) {}

    // replication `run` of a sweep cell; cells draw independent streams
    static RunRng for_cell(std::uint64_t seed, std::uint64_t cell_hash, std::uint64_t run) {
        RunRng rng(seed, run);
        rng.key_ = detail::derive(detail::derive(detail::mix64(seed), cell_hash), run);
        return rng;
    }

    // observation randomness for stream k at time slot n
    Draw obs_draw(int stream, long slot) const {
        const std::uint64_t k = at(kObsTag, static_cast<std::uint64_t>(stream),
                                   static_cast<std::uint64_t>(slot));
        return {to_u01(detail::derive(k, 1)), to_u01(detail::derive(k, 2))};
    }

    // scheduler randomness (window start for the consecutive scheduler)
    double sched_u(long slot) const {
        return to_u01(at(kSchedTag, static_cast<std::uint64_t>(slot), 0));
    }

    // change-point / nuisance-parameter randomness for stream k
    double truth_u(int stream, int idx) const {
        return to_u01(at(kTruthTag, static_cast<std::uint64_t>(stream),
                         static_cast<std::uint64_t>(idx)));
    }

    std::uint64_t key() const { return key_; }

private:
    static constexpr std::uint64_t kObsTag = 0x6f627321u;
    static constexpr std::uint64_t kSchedTag = 0x73636864u;
    static constexpr std::uint64_t kTruthTag = 0x74727574u;

    std::uint64_t at(std::uint64_t tag, std::uint64_t a, std::uint64_t b) const {
        return detail::derive(detail::derive(detail::derive(key_, tag), a), b);
    }

    std::uint64_t key_;
};

} // namespace mcpd
