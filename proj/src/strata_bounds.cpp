#include "pstrat/strata_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "pstrat/errors.hpp"

namespace pstrat {

namespace {

constexpr double kTol = 1e-12;

bool in_support(double y, const Support& s) { return y >= s.y_min - kTol && y <= s.y_max + kTol; }

}  // namespace

std::string_view effect_name(Effect effect) {
    return effect == Effect::Adoption ? "adoption" : "effectiveness";
}

void StrataInput::validate() const {
    if (!(support.y_min < support.y_max)) throw ValidationError("support requires y_min < y_max");
    if (n_z0 < 1 || n_z1 < 1) throw ValidationError("both assignment arms need at least one unit");
    if (n_z0_d1 < 0 || n_z0_d1 > n_z0) throw ValidationError("n_z0_d1 must lie in [0, n_z0]");
    if (n_z1_d1 < 0 || n_z1_d1 > n_z1) throw ValidationError("n_z1_d1 must lie in [0, n_z1]");
    auto check = [&](long count, double mean, const char* name) {
        if (count > 0 && !(std::isfinite(mean) && in_support(mean, support))) {
            throw ValidationError(std::string(name) + " lies outside the outcome support");
        }
    };
    check(n_z0 - n_z0_d1, mean_y_z0_d0, "mean_y_z0_d0");
    check(n_z0_d1, mean_y_z0_d1, "mean_y_z0_d1");
    check(n_z1 - n_z1_d1, mean_y_z1_d0, "mean_y_z1_d0");
    check(n_z1_d1, mean_y_z1_d1, "mean_y_z1_d1");
}

StrataInput strata_input_from_dataset(const TrialDataset& dataset, Support support) {
    StrataInput in;
    in.support = support;
    double sums[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
    long counts[2][2] = {{0, 0}, {0, 0}};
    for (const auto& r : dataset.records()) {
        if (r.arm == Arm::NoAI) continue;
        const int z = r.arm == Arm::AITrained ? 1 : 0;
        const int d = r.adopted.value_or(false) ? 1 : 0;
        sums[z][d] += r.grade_point.value();
        ++counts[z][d];
    }
    auto mean = [&](int z, int d) {
        return counts[z][d] > 0 ? sums[z][d] / static_cast<double>(counts[z][d])
                                : std::numeric_limits<double>::quiet_NaN();
    };
    in.n_z0 = counts[0][0] + counts[0][1];
    in.n_z0_d1 = counts[0][1];
    in.n_z1 = counts[1][0] + counts[1][1];
    in.n_z1_d1 = counts[1][1];
    in.mean_y_z0_d0 = mean(0, 0);
    in.mean_y_z0_d1 = mean(0, 1);
    in.mean_y_z1_d0 = mean(1, 0);
    in.mean_y_z1_d1 = mean(1, 1);
    if (in.n_z0 == 0) throw ValidationError("arm empty: AIOnly has no records");
    if (in.n_z1 == 0) throw ValidationError("arm empty: AITrained has no records");
    return in;
}

StratumProportions stratum_proportions_from_shares(double pi_A, double pi_N) {
    if (!(pi_A >= 0.0 && pi_A <= 1.0 && pi_N >= 0.0 && pi_N <= 1.0)) {
        throw ValidationError("stratum shares must lie in [0, 1]");
    }
    StratumProportions p;
    p.pi_A = pi_A;
    p.pi_N = pi_N;
    p.pi_C = 1.0 - pi_A - pi_N;
    if (p.pi_C < -kTol) {
        throw AssumptionError("monotonicity violated: treated adoption below untreated adoption");
    }
    if (p.pi_C <= kTol) throw AssumptionError("no induced users: adoption effect unidentified");
    p.w_A_treated = p.pi_A / (p.pi_A + p.pi_C);
    p.w_C_treated = p.pi_C / (p.pi_A + p.pi_C);
    p.w_N_untreated = p.pi_N / (p.pi_N + p.pi_C);
    p.w_C_untreated = p.pi_C / (p.pi_N + p.pi_C);
    return p;
}

StratumProportions stratum_proportions(const StrataInput& input) {
    input.validate();
    return stratum_proportions_from_shares(
        static_cast<double>(input.n_z0_d1) / static_cast<double>(input.n_z0),
        static_cast<double>(input.n_z1 - input.n_z1_d1) / static_cast<double>(input.n_z1));
}

BaselineOutcomes baseline_outcomes(const StrataInput& input, const StratumProportions& props) {
    if (!(props.pi_C > 0.0)) throw AssumptionError("no induced users: adoption effect unidentified");
    BaselineOutcomes b;
    if (props.pi_N > 0.0) b.e_y00_never = input.mean_y_z1_d0;
    if (props.pi_A > 0.0) b.e_y01_always = input.mean_y_z0_d1;
    const double never_part = b.e_y00_never ? props.w_N_untreated * *b.e_y00_never : 0.0;
    b.e_y00_induced = (input.mean_y_z0_d0 - never_part) / props.w_C_untreated;
    if (!in_support(b.e_y00_induced, input.support)) {
        std::ostringstream os;
        os << "deconvolved induced-user baseline (" << b.e_y00_induced
           << ") violates support; assumptions inconsistent with data";
        throw AssumptionError(os.str());
    }
    return b;
}

namespace {

// Upper bound on E[Y(1,1)|always] given a cap from the dominance relaxation.
// Besides y_max, the always-user mean can never exceed the value reached when
// every induced user sits at y_min; that cap becomes active at exactly the
// gamma where the induced-user lower bound reaches y_min, so the pair of
// bounds always satisfies w_C * L_induced + w_A * U_always = E11.
EffectBounds bounds_with_cap(const StrataInput& in, const StratumProportions& p, const BaselineOutcomes& b,
                             double dominance_cap, OuterEnds outer) {
    const double e11 = in.mean_y_z1_d1;
    const double y_min = in.support.y_min;
    const double y_max = in.support.y_max;

    const double mixture_cap = p.w_A_treated > 0.0 ? (e11 - p.w_C_treated * y_min) / p.w_A_treated
                                                   : std::numeric_limits<double>::infinity();
    double u_always = dominance_cap;
    bool y_max_binds = false;
    if (y_max < u_always) {
        u_always = y_max;
        y_max_binds = true;
    }
    bool floor_binds = false;
    if (mixture_cap <= u_always) {
        u_always = mixture_cap;
        y_max_binds = false;
        floor_binds = true;
    }

    double l_induced = (e11 - p.w_A_treated * u_always) / p.w_C_treated;
    if (floor_binds || l_induced < y_min) {
        l_induced = y_min;
        floor_binds = true;
    }

    // Mixture limits on the outer ends: the induced mean cannot exceed the
    // value left when every always user sits at y_min, and symmetrically.
    const bool mixture = outer == OuterEnds::Mixture;
    const double u_induced = mixture ? std::min(y_max, (e11 - p.w_A_treated * y_min) / p.w_C_treated) : y_max;

    EffectBounds out;
    out.adoption.effect = Effect::Adoption;
    out.adoption.lower = l_induced - b.e_y00_induced;
    out.adoption.upper = u_induced - b.e_y00_induced;
    out.adoption.lower_clamped = floor_binds;

    if (b.e_y01_always && p.pi_A > 0.0) {
        PrincipalBounds eff;
        eff.effect = Effect::Effectiveness;
        const double l_always = mixture ? std::max(y_min, (e11 - p.w_C_treated * y_max) / p.w_A_treated) : y_min;
        eff.lower = l_always - *b.e_y01_always;
        eff.upper = u_always - *b.e_y01_always;
        eff.upper_clamped = y_max_binds;
        out.effectiveness = eff;
    }
    return out;
}

}  // namespace

EffectBounds support_bounds(const StrataInput& input, const StratumProportions& props, const BaselineOutcomes& base,
                            OuterEnds outer) {
    return bounds_with_cap(input, props, base, std::numeric_limits<double>::infinity(), outer);
}

EffectBounds dominance_bounds(const StrataInput& input, const StratumProportions& props, const BaselineOutcomes& base,
                              double gamma, OuterEnds outer) {
    if (!(gamma >= 0.0)) throw ValidationError("gamma must be nonnegative");
    return bounds_with_cap(input, props, base, input.mean_y_z1_d1 + props.w_C_treated * gamma, outer);
}

std::optional<double> crossover_gamma(const StrataInput& input, const StratumProportions& props,
                                      const BaselineOutcomes& base) {
    if (!(props.pi_A > 0.0) || !base.e_y01_always) return std::nullopt;
    auto gap = [&](double gamma) {
        const auto b = dominance_bounds(input, props, base, gamma);
        return b.adoption.lower - b.effectiveness->upper;
    };
    const double e11 = input.mean_y_z1_d1;
    // Kinks: where U_always reaches y_max and where L_induced reaches y_min
    // (the latter is also where the mixture cap on U_always takes over).
    std::vector<double> knots{0.0};
    const double g_upper = (input.support.y_max - e11) / props.w_C_treated;
    const double g_lower = (e11 - input.support.y_min) / props.w_A_treated;
    for (double g : {g_upper, g_lower}) {
        if (std::isfinite(g) && g > 0.0) knots.push_back(g);
    }
    std::sort(knots.begin(), knots.end());

    double f0 = gap(0.0);
    if (f0 < 0.0) return std::nullopt;
    if (f0 == 0.0) return 0.0;
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
        const double a = knots[i];
        const double b = knots[i + 1];
        const double fa = gap(a);
        const double fb = gap(b);
        if (fb <= 0.0) return a + fa * (b - a) / (fa - fb);
    }
    // Past the last kink both clamps bind and the gap is constant and positive.
    return std::nullopt;
}

GammaSweep gamma_sweep(const StrataInput& input, std::span<const double> gammas, OuterEnds outer) {
    if (gammas.empty()) throw ValidationError("gamma list is empty");
    for (double g : gammas) {
        if (!(g >= 0.0)) throw ValidationError("gamma must be nonnegative");
    }
    GammaSweep sweep;
    sweep.proportions = stratum_proportions(input);
    sweep.baselines = baseline_outcomes(input, sweep.proportions);
    std::vector<double> sorted(gammas.begin(), gammas.end());
    std::sort(sorted.begin(), sorted.end());
    for (double g : sorted) {
        const auto b = dominance_bounds(input, sweep.proportions, sweep.baselines, g, outer);
        sweep.rows.push_back({g, b.adoption, b.effectiveness});
    }
    sweep.support_only = support_bounds(input, sweep.proportions, sweep.baselines, outer);
    sweep.crossover_gamma = crossover_gamma(input, sweep.proportions, sweep.baselines);
    return sweep;
}

}  // namespace pstrat
