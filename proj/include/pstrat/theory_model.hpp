#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pstrat/resampling.hpp"
#include "pstrat/strata_bounds.hpp"
#include "pstrat/trial_data.hpp"

namespace pstrat::theory {

// p(c, e) = scale * c^c_exponent * (1 - e)^e_exponent
struct ErrorProbability {
    double scale = 1.0;
    double c_exponent = 1.0;
    double e_exponent = 1.0;

    double value(double c, double e) const;
    double d_de(double c, double e) const;
    double d_dc(double c, double e) const;
};

// l(c) = lambda * c^exponent
struct ErrorCost {
    double lambda = 1.0;
    double exponent = 1.0;

    double value(double c) const;
    double d_dc(double c) const;
};

// Affine map from productivity in [0, 1] onto the grade-point support.
struct OutcomeScale {
    double y_lo = 1.0;
    double y_hi = 4.3;

    double operator()(double productivity) const { return y_lo + (y_hi - y_lo) * productivity; }
};

struct TheoryConfig {
    double ability_A = 1.0;  // base capability of the technology
    double e0 = 0.5;         // effectiveness of use without training
    double e1 = 0.8;         // ... with training
    double k0 = 0.2;         // adoption cost without training
    double k1 = 0.1;         // ... with training
    double complexity_c = 0.5;
    ErrorProbability error_prob{};
    ErrorCost error_cost{};
    OutcomeScale y_scale{};

    // Throws ValidationError naming the violated condition.
    void validate() const;
    double effectiveness(bool trained) const { return trained ? e1 : e0; }
    double adoption_cost(bool trained) const { return trained ? k1 : k0; }
};

// Beta(a, b) ability distribution; a = b = 1 is uniform.
struct ThetaDistribution {
    double a = 1.0;
    double b = 1.0;

    void validate() const;
    double cdf(double theta) const;
    double quantile(double u) const;
};

enum class Stratum { Always, Induced, Never };
std::string_view stratum_name(Stratum s);

struct Agent {
    double theta = 0.0;
    Stratum stratum = Stratum::Never;
    double noise = 0.0;  // outcome noise shared by the agent's potential outcomes
};

// L(c, e) = p(c, e) * l(c)
double expected_loss(double c, double e, const TheoryConfig& config);
// A * e_T - L(c, e_T): per-unit value of adoption before the (1 - theta) factor.
double net_value(bool trained, const TheoryConfig& config);
// Delta Y_T = (1 - theta) [A e_T - L(c, e_T)]
double net_gain(double theta, bool trained, const TheoryConfig& config);
// Closed forms for the sensitivity of the net gain to effectiveness:
//   d(Delta Y)/de          = (1 - theta) [A - dp/de l(c)]
//   d^2(Delta Y)/de dtheta = -[A - dp/de l(c)]
double d_net_gain_de(double theta, double e, const TheoryConfig& config);
double d2_net_gain_de_dtheta(double e, const TheoryConfig& config);
// Net gain with an arbitrary effectiveness (finite-difference target).
double net_gain_at(double theta, double e, const TheoryConfig& config);

// Y = theta + D (1 - theta) [A e_T - L(c, e_T)]
double productivity(double theta, bool adopt, bool trained, const TheoryConfig& config);
// (1 - theta) [A e_T - L(c, e_T)] > k_T
bool adopts(double theta, bool trained, const TheoryConfig& config);
// Ability cutoff 1 - k_T / (A e_T - L(c, e_T)): adoption iff theta is below
// it. Negative infinity when the net value is not positive.
double adoption_cutoff(bool trained, const TheoryConfig& config);
Stratum classify_stratum(double theta, const TheoryConfig& config);

// Outcome on the grade scale: affine map plus noise, clipped to the support
// and snapped to the nearest letter-grade point.
double observed_outcome(double productivity, double noise, const TheoryConfig& config);
// Observed outcome of an agent under assignment z (z = 1 trained).
double potential_outcome(const Agent& agent, bool trained, const TheoryConfig& config);

struct TheoryTruth {
    double pi_A = 0.0;
    double pi_N = 0.0;
    double pi_C = 0.0;
    bool induced_empty = false;
    // From noiseless potential outcomes on the grade scale (affine map only).
    std::optional<double> tau_adoption;       // E[Y(1,1) - Y(0,0) | induced]
    std::optional<double> tau_effectiveness;  // E[Y(1,1) - Y(0,1) | always]
    // Population means of the observed (noisy, snapped) outcome per cell,
    // for the identified set. Counts are unused and set to zero.
    StrataInput population{};
};

// Population quantities by quadrature over the ability quantile function.
TheoryTruth compute_truth(const TheoryConfig& config, const ThetaDistribution& theta, double noise_sd,
                          std::size_t nodes_per_stratum = 20000);

// Identified set for the population at one gamma (infinity for support only).
EffectBounds identified_set(const TheoryTruth& truth, double gamma);

struct GeneratedTrial {
    TrialDataset dataset;
    std::vector<Agent> agents;  // parallel to dataset.records()
    TheoryTruth truth;
};

/*
 * Draws n_per_arm agents into each of the three arms. Agents in the AI arms
 * adopt per the adoption rule for their arm; NoAI agents never use the tool.
 * Each agent's draws come from std::mt19937_64(substream_seed(seed, 0)) for
 * the whole trial.
 */
GeneratedTrial generate_trial(std::size_t n_per_arm, const ThetaDistribution& theta, double noise_sd,
                              const TheoryConfig& config, std::uint64_t seed);
// Same, reusing a truth record already computed for this configuration.
GeneratedTrial generate_trial(std::size_t n_per_arm, const ThetaDistribution& theta, double noise_sd,
                              const TheoryConfig& config, std::uint64_t seed, const TheoryTruth& truth);

struct StudyOptions {
    std::size_t n_per_arm = 120;
    std::size_t trials = 500;
    double noise_sd = 0.3;
    ThetaDistribution theta{};
    std::uint64_t seed = 1;
    std::vector<double> gammas{0.0};
    // Bootstrap per trial; 0 disables it.
    std::size_t bootstrap_replications = 0;
    double level = 0.95;
};

struct StudyResult {
    TheoryTruth truth;
    std::size_t trials = 0;
    std::size_t usable = 0;           // sample pi_C > 0 and baselines in support
    std::size_t excluded_no_induced = 0;
    std::size_t excluded_other = 0;
    // Support-only bounds containing the true effects.
    std::size_t adoption_covered = 0;
    std::size_t effectiveness_covered = 0;
    std::size_t effectiveness_trials = 0;  // usable trials with always users
    double mean_pi_A_error = 0.0;     // average (estimate - truth)
    double mean_pi_N_error = 0.0;
    double mean_pi_C_error = 0.0;
    // Bootstrap coverage of the population identified set, per gamma.
    std::vector<double> gammas;
    std::vector<std::size_t> ci_adoption_covered;
    std::vector<std::size_t> ci_effectiveness_covered;
    std::size_t bootstrap_trials = 0;
    std::size_t bootstrap_failed = 0;  // trials whose bootstrap was rejected as unstable
};

// Trial t uses seed substream_seed(options.seed, t).
StudyResult run_study(const TheoryConfig& config, const StudyOptions& options);

}  // namespace pstrat::theory
