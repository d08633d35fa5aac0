// Traces one stream through the posterior recursion: which slots were
// observed, how the posterior evolves between hazard-only growth and
// data-driven jumps, and where the flat threshold 1 - alpha stops.

#include <cstdio>
#include <cstdlib>

#include "mcpd/harness.hpp"
#include "mcpd/models.hpp"
#include "mcpd/posterior.hpp"
#include "mcpd/rng.hpp"

int main(int argc, char** argv) {
    using namespace mcpd;
    const std::uint64_t seed = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 7;
    const double rho = 0.05, alpha = 0.1;
    const auto model = ScenarioModel::gaussian(0.0, 1.0, 1.0);
    const RunRng rng(seed, 0);
    const auto truths = generate_truths(1, rho, model, rng);

    std::printf("true change point t = %ld, threshold 1-alpha = %.2f\n", truths[0].t, 1.0 - alpha);
    std::printf("%5s %9s %9s %12s\n", "slot", "observed", "x", "posterior");

    double log_odds = kNegInf;
    const double stop = logit(1.0 - alpha);
    for (long n = 1; n <= 400; ++n) {
        const bool observe = n % 3 != 0; // fixed 2-of-3 sampling pattern
        if (observe) {
            const double x = sample(model, truths[0], n, rng.obs_draw(0, n));
            log_odds = update_observed_log_odds(log_odds, rho, log_likelihood_ratio(model, x));
            std::printf("%5ld %9s %9.3f %12.6f\n", n, "yes", x, sigmoid(log_odds));
        } else {
            log_odds = update_unobserved_log_odds(log_odds, rho);
            std::printf("%5ld %9s %9s %12.6f\n", n, "-", "", sigmoid(log_odds));
        }
        if (log_odds >= stop) {
            std::printf("declared at slot %ld (delay %ld)\n", n, std::max(0L, n - truths[0].t));
            return 0;
        }
    }
    std::printf("no declaration within 400 slots\n");
    return 0;
}
