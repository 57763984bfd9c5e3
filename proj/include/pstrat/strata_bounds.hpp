#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "pstrat/trial_data.hpp"

namespace pstrat {

/*
 * Summary statistics of the two AI arms. Z = 0 is access without training,
 * Z = 1 is access with training, D is self-reported use. A cell mean is only
 * read when its cell is non-empty.
 */
struct StrataInput {
    long n_z0 = 0;
    long n_z0_d1 = 0;
    long n_z1 = 0;
    long n_z1_d1 = 0;
    double mean_y_z0_d0 = 0.0;
    double mean_y_z0_d1 = 0.0;
    double mean_y_z1_d0 = 0.0;
    double mean_y_z1_d1 = 0.0;
    Support support{};

    void validate() const;
};

// Group 2 (AIOnly) is Z = 0 and Group 3 (AITrained) is Z = 1; NoAI is ignored.
StrataInput strata_input_from_dataset(const TrialDataset& dataset, Support support = {});

struct StratumProportions {
    double pi_A = 0.0;  // always users
    double pi_N = 0.0;  // never users
    double pi_C = 0.0;  // induced users
    // Mixture weights of the treated adopters (always + induced).
    double w_A_treated = 0.0;
    double w_C_treated = 0.0;
    // Mixture weights of the untreated non-adopters (never + induced).
    double w_N_untreated = 0.0;
    double w_C_untreated = 0.0;
};

struct BaselineOutcomes {
    std::optional<double> e_y00_never;   // E[Y(0,0) | never]; absent when there are no never users
    std::optional<double> e_y01_always;  // E[Y(0,1) | always]; absent when there are no always users
    double e_y00_induced = 0.0;          // E[Y(0,0) | induced]
};

enum class Effect { Adoption, Effectiveness };
std::string_view effect_name(Effect effect);

struct PrincipalBounds {
    Effect effect = Effect::Adoption;
    double lower = 0.0;
    double upper = 0.0;
    bool lower_clamped = false;
    bool upper_clamped = false;

    double width() const { return upper - lower; }
    bool contains(double value, double tol = 0.0) const { return value >= lower - tol && value <= upper + tol; }
};

// The effectiveness bounds are absent when there are no always users.
struct EffectBounds {
    PrincipalBounds adoption;
    std::optional<PrincipalBounds> effectiveness;
};

// Throws AssumptionError when the treated arm adopts less than the untreated
// arm (monotonicity violated) or equally (no induced users).
StratumProportions stratum_proportions(const StrataInput& input);
// Same checks and weights from population shares P(D=1|Z=0) = pi_A and
// P(D=0|Z=1) = pi_N.
StratumProportions stratum_proportions_from_shares(double pi_A, double pi_N);

// Throws AssumptionError when the deconvolved induced-user baseline leaves
// the outcome support.
BaselineOutcomes baseline_outcomes(const StrataInput& input, const StratumProportions& props);

/*
 * Which values the adoption upper and effectiveness lower ends take.
 *   Support: y_max - E[Y(0,0)|C] and y_min - E[Y(0,1)|A], the conventional
 *            support bounds.
 *   Mixture: also respect the treated-adopter mixture,
 *            min(y_max, (E11 - w_A y_min)/w_C) - E[Y(0,0)|C] and
 *            max(y_min, (E11 - w_C y_max)/w_A) - E[Y(0,1)|A].
 *            These are sharp; Support is valid but can be wider.
 * The two agree unless the treated-adopter mean forces the other stratum
 * against a support end.
 */
enum class OuterEnds { Support, Mixture };

/*
 * Bounds from the support restriction alone:
 *   adoption      in [max((E11 - w_A y_max)/w_C, y_min) - E[Y(0,0)|C], <outer end>]
 *   effectiveness in [<outer end>, min((E11 - w_C y_min)/w_A, y_max) - E[Y(0,1)|A]]
 * where E11 = E[Y | Z=1, D=1] and w are the treated-adopter mixture weights.
 */
EffectBounds support_bounds(const StrataInput& input, const StratumProportions& props, const BaselineOutcomes& base,
                            OuterEnds outer = OuterEnds::Support);

/*
 * Bounds under mean dominance with relaxation gamma >= 0:
 *   E[Y(1,1)|induced] >= E[Y(1,1)|always] - gamma.
 *
 *   U_always  = min(E11 + w_C * gamma, y_max, (E11 - w_C * y_min) / w_A)
 *   L_induced = max((E11 - w_A * U_always) / w_C, y_min)
 *
 * The third term of U_always is the always-user mean when every induced user
 * sits at y_min. It binds exactly when L_induced reaches y_min, which keeps the
 * dominance bounds inside the support-only bounds for every gamma and makes
 * them coincide as gamma grows.
 */
EffectBounds dominance_bounds(const StrataInput& input, const StratumProportions& props, const BaselineOutcomes& base,
                              double gamma, OuterEnds outer = OuterEnds::Support);

// Smallest gamma >= 0 at which the adoption lower bound meets the
// effectiveness upper bound. Both sides are piecewise linear in gamma, so the
// root is found exactly segment by segment. Absent when they never meet or
// when there are no always users.
std::optional<double> crossover_gamma(const StrataInput& input, const StratumProportions& props,
                                      const BaselineOutcomes& base);

struct SweepRow {
    double gamma = 0.0;
    PrincipalBounds adoption;
    std::optional<PrincipalBounds> effectiveness;
};

struct GammaSweep {
    StratumProportions proportions;
    BaselineOutcomes baselines;
    std::vector<SweepRow> rows;       // ascending gamma
    EffectBounds support_only;        // the gamma -> infinity limit
    std::optional<double> crossover_gamma;
};

GammaSweep gamma_sweep(const StrataInput& input, std::span<const double> gammas,
                       OuterEnds outer = OuterEnds::Support);

}  // namespace pstrat
