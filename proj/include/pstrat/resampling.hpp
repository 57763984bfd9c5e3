#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "pstrat/strata_bounds.hpp"
#include "pstrat/trial_data.hpp"

namespace pstrat {

/*
 * Empirical quantile with linear interpolation between order statistics:
 * for sorted x[0..n-1] and h = (n - 1) q, returns
 * x[floor(h)] + (h - floor(h)) (x[floor(h)+1] - x[floor(h)]).
 * q = 0 gives the minimum and q = 1 the maximum.
 */
double percentile(std::span<const double> sorted_values, double q);

// SplitMix64 finalizer.
std::uint64_t splitmix64(std::uint64_t x);

/*
 * Seed for substream `index` of a master seed. Replicate i of a bootstrap
 * run, or trial i of a simulation, draws from
 *   std::mt19937_64(substream_seed(seed, i)),
 * so results do not depend on how work is split across threads.
 */
std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index);

using Rng = std::mt19937_64;

// One unit of an AI arm as seen by the strata analysis.
struct StrataUnit {
    bool adopted = false;
    double y = 0.0;
};

// Fills `out` with arm_size indices into the arm.
using Resampler = std::function<void(std::size_t arm_size, Rng& rng, std::vector<std::size_t>& out)>;

// Uniform draws with replacement.
void resample_with_replacement(std::size_t arm_size, Rng& rng, std::vector<std::size_t>& out);
// Returns 0..n-1 unchanged; replicates then equal the original sample.
void resample_identity(std::size_t arm_size, Rng& rng, std::vector<std::size_t>& out);

enum class BootstrapMethod { PercentileOnBounds };

struct BootstrapConfig {
    std::size_t replications = 2000;
    double level = 0.95;
    std::uint64_t seed = 0;
    BootstrapMethod method = BootstrapMethod::PercentileOnBounds;
    OuterEnds outer = OuterEnds::Support;
    // 0 picks std::thread::hardware_concurrency(). Output does not depend on it.
    unsigned threads = 0;
    // Share of replicates without induced users above which the run is rejected.
    double max_failed_share = 0.20;

    void validate() const;
};

struct BoundCI {
    Effect effect = Effect::Adoption;
    double gamma = 0.0;
    double lower_ci = 0.0;
    double upper_ci = 0.0;
    double point_lower = 0.0;
    double point_upper = 0.0;
    std::size_t n_failed = 0;
    // subset of n_failed with no induced users in the resample
    std::size_t n_monotonicity_failed = 0;
};

StrataInput strata_input_from_units(std::span<const StrataUnit> untreated, std::span<const StrataUnit> treated,
                                    Support support);

/*
 * Percentile bootstrap on the bound endpoints. Each replicate resamples units
 * within each assignment arm, recomputes proportions, baselines and the
 * dominance bounds at every gamma, and the interval for an effect at a given
 * gamma is
 *   [ alpha/2 quantile of replicate lower bounds,
 *     1 - alpha/2 quantile of replicate upper bounds ].
 * Replicates in which the identification step fails (no induced users,
 * monotonicity or support violated, no always users when effectiveness is
 * requested) are dropped and counted in n_failed. When more than
 * max_failed_share of the replicates have no induced users (treated adoption
 * share not above the untreated share) the run throws AssumptionError.
 * Support violations of the deconvolved baseline are dropped but do not
 * count toward that threshold; they are common when the induced-user
 * baseline sits near an end of the support.
 *
 * An infinite gamma gives the support-only bounds.
 *
 * Output is ordered by gamma as given, adoption before effectiveness.
 * Effectiveness rows are omitted when the full sample has no always users.
 */
std::vector<BoundCI> bootstrap_bounds(std::span<const StrataUnit> untreated, std::span<const StrataUnit> treated,
                                      Support support, std::span<const double> gammas, const BootstrapConfig& config,
                                      const Resampler& resampler = resample_with_replacement);

std::vector<BoundCI> bootstrap_bounds(const TrialDataset& dataset, std::span<const double> gammas,
                                      const BootstrapConfig& config,
                                      const Resampler& resampler = resample_with_replacement);

// Units of the AIOnly (untreated) or AITrained (treated) arm, in file order.
std::vector<StrataUnit> strata_units(const TrialDataset& dataset, Arm arm);

}  // namespace pstrat
