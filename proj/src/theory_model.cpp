#include "pstrat/theory_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include <boost/math/distributions/beta.hpp>

#include "pstrat/distributions.hpp"
#include "pstrat/errors.hpp"

namespace pstrat::theory {

double ErrorProbability::value(double c, double e) const {
    return scale * std::pow(c, c_exponent) * std::pow(1.0 - e, e_exponent);
}

double ErrorProbability::d_de(double c, double e) const {
    return -scale * e_exponent * std::pow(c, c_exponent) * std::pow(1.0 - e, e_exponent - 1.0);
}

double ErrorProbability::d_dc(double c, double e) const {
    return scale * c_exponent * std::pow(c, c_exponent - 1.0) * std::pow(1.0 - e, e_exponent);
}

double ErrorCost::value(double c) const { return lambda * std::pow(c, exponent); }

double ErrorCost::d_dc(double c) const { return lambda * exponent * std::pow(c, exponent - 1.0); }

void TheoryConfig::validate() const {
    auto fail = [](const std::string& what) { throw ValidationError("theory config: " + what); };
    if (!(ability_A > 0.0)) fail("ability_A must be positive");
    if (!(e0 >= 0.0 && e0 <= 1.0 && e1 >= 0.0 && e1 <= 1.0)) fail("e0 and e1 must lie in [0, 1]");
    if (e1 < e0) fail("training may not reduce effectiveness (e1 >= e0)");
    if (!(k0 > 0.0 && k1 > 0.0)) fail("adoption costs k0 and k1 must be positive");
    if (k1 > k0) fail("training may not raise the adoption cost (k1 <= k0)");
    if (!(complexity_c >= 0.0 && complexity_c <= 1.0)) fail("complexity_c must lie in [0, 1]");
    if (!(error_prob.scale > 0.0 && error_prob.scale <= 1.0)) fail("error probability scale must lie in (0, 1]");
    if (!(error_prob.c_exponent > 0.0 && error_prob.e_exponent > 0.0)) fail("error probability exponents must be positive");
    if (!(error_cost.lambda > 0.0 && error_cost.exponent > 0.0)) fail("error cost lambda and exponent must be positive");
    if (!(y_scale.y_lo < y_scale.y_hi)) fail("y_scale requires y_lo < y_hi");
    for (bool trained : {false, true}) {
        const double v = ability_A * effectiveness(trained) - error_prob.value(complexity_c, effectiveness(trained)) *
                                                                  error_cost.value(complexity_c);
        if (v > 1.0) fail("A e_T - L(c, e_T) exceeds 1, so productivity would leave [0, 1]");
    }
}

void ThetaDistribution::validate() const {
    if (!(a > 0.0 && b > 0.0)) throw ValidationError("theta distribution: Beta parameters must be positive");
}

double ThetaDistribution::cdf(double theta) const {
    if (theta <= 0.0) return 0.0;
    if (theta >= 1.0) return 1.0;
    if (a == 1.0 && b == 1.0) return theta;
    return boost::math::cdf(boost::math::beta_distribution<double>(a, b), theta);
}

double ThetaDistribution::quantile(double u) const {
    if (a == 1.0 && b == 1.0) return u;
    return boost::math::quantile(boost::math::beta_distribution<double>(a, b), u);
}

std::string_view stratum_name(Stratum s) {
    switch (s) {
        case Stratum::Always: return "always";
        case Stratum::Induced: return "induced";
        case Stratum::Never: return "never";
    }
    return "?";
}

// ---------------------------------------------------------------------------

double expected_loss(double c, double e, const TheoryConfig& config) {
    if (!(c >= 0.0 && c <= 1.0) || !(e >= 0.0 && e <= 1.0)) {
        throw ValidationError("expected_loss: c and e must lie in [0, 1]");
    }
    return config.error_prob.value(c, e) * config.error_cost.value(c);
}

double net_value(bool trained, const TheoryConfig& config) {
    const double e = config.effectiveness(trained);
    return config.ability_A * e - expected_loss(config.complexity_c, e, config);
}

double net_gain_at(double theta, double e, const TheoryConfig& config) {
    return (1.0 - theta) * (config.ability_A * e - expected_loss(config.complexity_c, e, config));
}

double net_gain(double theta, bool trained, const TheoryConfig& config) {
    return (1.0 - theta) * net_value(trained, config);
}

double d_net_gain_de(double theta, double e, const TheoryConfig& config) {
    return (1.0 - theta) * (config.ability_A - config.error_prob.d_de(config.complexity_c, e) *
                                                   config.error_cost.value(config.complexity_c));
}

double d2_net_gain_de_dtheta(double e, const TheoryConfig& config) {
    return -(config.ability_A -
             config.error_prob.d_de(config.complexity_c, e) * config.error_cost.value(config.complexity_c));
}

double productivity(double theta, bool adopt, bool trained, const TheoryConfig& config) {
    if (!(theta >= 0.0 && theta <= 1.0)) throw ValidationError("productivity: theta must lie in [0, 1]");
    if (!adopt) return theta;
    return theta + net_gain(theta, trained, config);
}

bool adopts(double theta, bool trained, const TheoryConfig& config) {
    if (!(theta >= 0.0 && theta <= 1.0)) throw ValidationError("adopts: theta must lie in [0, 1]");
    return net_gain(theta, trained, config) > config.adoption_cost(trained);
}

double adoption_cutoff(bool trained, const TheoryConfig& config) {
    const double v = net_value(trained, config);
    if (!(v > 0.0)) return -std::numeric_limits<double>::infinity();
    return 1.0 - config.adoption_cost(trained) / v;
}

Stratum classify_stratum(double theta, const TheoryConfig& config) {
    if (!(theta >= 0.0 && theta <= 1.0)) throw ValidationError("classify_stratum: theta must lie in [0, 1]");
    if (theta < adoption_cutoff(false, config)) return Stratum::Always;
    if (theta < adoption_cutoff(true, config)) return Stratum::Induced;
    return Stratum::Never;
}

double observed_outcome(double prod, double noise, const TheoryConfig& config) {
    const auto& scale = GradeScale::standard();
    const double y = std::clamp(config.y_scale(prod) + noise, scale.min_points(), scale.max_points());
    return scale.snap(y).value();
}

double potential_outcome(const Agent& agent, bool trained, const TheoryConfig& config) {
    const bool d = adopts(agent.theta, trained, config);
    return observed_outcome(productivity(agent.theta, d, trained, config), agent.noise, config);
}

// ---------------------------------------------------------------------------
// Population truth

namespace {

// E[snap(clip(y0 + noise))] for noise ~ N(0, sd^2).
double expected_observed(double prod, double noise_sd, const TheoryConfig& config) {
    if (noise_sd == 0.0) return observed_outcome(prod, 0.0, config);
    const auto& entries = GradeScale::standard().entries();
    const double y0 = config.y_scale(prod);
    double mean = 0.0;
    double below = 0.0;  // P(Y <= lower edge of the current bin)
    for (std::size_t j = 0; j < entries.size(); ++j) {
        double upto = 1.0;
        if (j + 1 < entries.size()) {
            const double edge = 0.5 * (entries[j].tenths + entries[j + 1].tenths) / 10.0;
            upto = dist::normal_cdf((edge - y0) / noise_sd);
        }
        mean += (upto - below) * entries[j].tenths / 10.0;
        below = upto;
    }
    return mean;
}

struct StratumIntegrals {
    double mass = 0.0;
    double obs_y00 = 0.0;        // E[obs Y(0,0)]
    double obs_y01 = 0.0;        // E[obs Y(0,1)]
    double obs_y11 = 0.0;        // E[obs Y(1,1)]
    double gain_trained = 0.0;   // E[(1 - theta) net1]
    double gain_untrained = 0.0; // E[(1 - theta) net0]
};

StratumIntegrals integrate_stratum(double lo, double hi, const ThetaDistribution& dist_theta, double noise_sd,
                                   const TheoryConfig& config, std::size_t nodes) {
    StratumIntegrals out;
    const double u_lo = dist_theta.cdf(lo);
    const double u_hi = dist_theta.cdf(hi);
    out.mass = std::max(0.0, u_hi - u_lo);
    if (out.mass <= 0.0) return out;
    // Midpoint rule in probability space, which handles any Beta shape.
    const double step = out.mass / static_cast<double>(nodes);
    for (std::size_t i = 0; i < nodes; ++i) {
        const double theta = std::clamp(dist_theta.quantile(u_lo + (static_cast<double>(i) + 0.5) * step), 0.0, 1.0);
        const double g1 = net_gain(theta, true, config);
        const double g0 = net_gain(theta, false, config);
        out.obs_y00 += expected_observed(theta, noise_sd, config);
        out.obs_y01 += expected_observed(theta + g0, noise_sd, config);
        out.obs_y11 += expected_observed(theta + g1, noise_sd, config);
        out.gain_trained += g1;
        out.gain_untrained += g0;
    }
    const double n = static_cast<double>(nodes);
    out.obs_y00 /= n;
    out.obs_y01 /= n;
    out.obs_y11 /= n;
    out.gain_trained /= n;
    out.gain_untrained /= n;
    return out;
}

}  // namespace

TheoryTruth compute_truth(const TheoryConfig& config, const ThetaDistribution& theta, double noise_sd,
                          std::size_t nodes_per_stratum) {
    config.validate();
    theta.validate();
    if (!(noise_sd >= 0.0)) throw ValidationError("noise_sd must be nonnegative");
    const double cut0 = std::clamp(adoption_cutoff(false, config), 0.0, 1.0);
    const double cut1 = std::max(cut0, std::clamp(adoption_cutoff(true, config), 0.0, 1.0));

    const auto A = integrate_stratum(0.0, cut0, theta, noise_sd, config, nodes_per_stratum);
    const auto C = integrate_stratum(cut0, cut1, theta, noise_sd, config, nodes_per_stratum);
    const auto N = integrate_stratum(cut1, 1.0, theta, noise_sd, config, nodes_per_stratum);

    TheoryTruth t;
    t.pi_A = A.mass;
    t.pi_C = C.mass;
    t.pi_N = N.mass;
    t.induced_empty = C.mass <= 0.0;
    const double span = config.y_scale.y_hi - config.y_scale.y_lo;
    if (C.mass > 0.0) t.tau_adoption = span * C.gain_trained;
    if (A.mass > 0.0) t.tau_effectiveness = span * (A.gain_trained - A.gain_untrained);

    const double nan = std::numeric_limits<double>::quiet_NaN();
    auto mix = [&](double wa, double ma, double wb, double mb) {
        return wa + wb > 0.0 ? (wa * ma + wb * mb) / (wa + wb) : nan;
    };
    const auto& scale = GradeScale::standard();
    t.population.support = {scale.min_points(), scale.max_points()};
    t.population.mean_y_z0_d1 = A.mass > 0.0 ? A.obs_y01 : nan;
    t.population.mean_y_z0_d0 = mix(C.mass, C.obs_y00, N.mass, N.obs_y00);
    t.population.mean_y_z1_d1 = mix(A.mass, A.obs_y11, C.mass, C.obs_y11);
    t.population.mean_y_z1_d0 = N.mass > 0.0 ? N.obs_y00 : nan;
    return t;
}

EffectBounds identified_set(const TheoryTruth& truth, double gamma) {
    const auto props = stratum_proportions_from_shares(truth.pi_A, truth.pi_N);
    const auto base = baseline_outcomes(truth.population, props);
    if (std::isinf(gamma)) return support_bounds(truth.population, props, base);
    return dominance_bounds(truth.population, props, base, gamma);
}

// ---------------------------------------------------------------------------
// Trial generation

GeneratedTrial generate_trial(std::size_t n_per_arm, const ThetaDistribution& theta, double noise_sd,
                              const TheoryConfig& config, std::uint64_t seed, const TheoryTruth& truth) {
    config.validate();
    theta.validate();
    if (n_per_arm < 2) throw ValidationError("generate_trial: n_per_arm must be at least 2");
    if (!(noise_sd >= 0.0)) throw ValidationError("noise_sd must be nonnegative");

    Rng rng(substream_seed(seed, 0));
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const RubricConfig rubric{};
    const auto& scale = GradeScale::standard();

    std::vector<ExamRecord> records;
    std::vector<Agent> agents;
    records.reserve(3 * n_per_arm);
    agents.reserve(3 * n_per_arm);
    for (Arm arm : kAllArms) {
        for (std::size_t i = 0; i < n_per_arm; ++i) {
            Agent agent;
            agent.theta = std::clamp(theta.quantile(unif(rng)), 0.0, 1.0);
            agent.stratum = classify_stratum(agent.theta, config);
            agent.noise = noise_sd > 0.0 ? noise_sd * gauss(rng) : 0.0;

            ExamRecord r;
            r.unit_id = std::string(arm_name(arm)) + "-" + std::to_string(i + 1);
            r.arm = arm;
            double y = 0.0;
            if (arm == Arm::NoAI) {
                y = observed_outcome(agent.theta, agent.noise, config);
            } else {
                const bool trained = arm == Arm::AITrained;
                r.adopted = adopts(agent.theta, trained, config);
                y = potential_outcome(agent, trained, config);
            }
            r.grade_point = scale.snap(y);
            // Rubric scores track the grade; text metrics are not simulated.
            const double frac = (y - scale.min_points()) / (scale.max_points() - scale.min_points());
            for (std::size_t k = 0; k < 4; ++k) {
                r.issues[k].max_score = rubric.max_scores[k];
                r.issues[k].spotted = true;
                r.issues[k].score = static_cast<int>(std::lround(frac * rubric.max_scores[k]));
            }
            records.push_back(std::move(r));
            agents.push_back(agent);
        }
    }
    return GeneratedTrial{TrialDataset(std::move(records), rubric), std::move(agents), truth};
}

GeneratedTrial generate_trial(std::size_t n_per_arm, const ThetaDistribution& theta, double noise_sd,
                              const TheoryConfig& config, std::uint64_t seed) {
    return generate_trial(n_per_arm, theta, noise_sd, config, seed, compute_truth(config, theta, noise_sd));
}

// ---------------------------------------------------------------------------

StudyResult run_study(const TheoryConfig& config, const StudyOptions& opt) {
    StudyResult res;
    res.truth = compute_truth(config, opt.theta, opt.noise_sd);
    res.trials = opt.trials;
    res.gammas = opt.gammas;
    res.ci_adoption_covered.assign(opt.gammas.size(), 0);
    res.ci_effectiveness_covered.assign(opt.gammas.size(), 0);

    std::vector<EffectBounds> truth_sets;
    if (opt.bootstrap_replications > 0 && !res.truth.induced_empty) {
        for (double g : opt.gammas) truth_sets.push_back(identified_set(res.truth, g));
    }

    double err_a = 0.0, err_n = 0.0, err_c = 0.0;
    for (std::size_t t = 0; t < opt.trials; ++t) {
        const std::uint64_t trial_seed = substream_seed(opt.seed, t);
        const auto trial = generate_trial(opt.n_per_arm, opt.theta, opt.noise_sd, config, trial_seed, res.truth);
        const StrataInput in = strata_input_from_dataset(trial.dataset);
        const double pa = static_cast<double>(in.n_z0_d1) / static_cast<double>(in.n_z0);
        const double pn = static_cast<double>(in.n_z1 - in.n_z1_d1) / static_cast<double>(in.n_z1);
        err_a += pa - res.truth.pi_A;
        err_n += pn - res.truth.pi_N;
        err_c += (1.0 - pa - pn) - res.truth.pi_C;
        if (1.0 - pa - pn <= 1e-12) {
            ++res.excluded_no_induced;
            continue;
        }
        EffectBounds bounds;
        try {
            const auto props = stratum_proportions(in);
            const auto base = baseline_outcomes(in, props);
            bounds = support_bounds(in, props, base);
        } catch (const AssumptionError&) {
            ++res.excluded_other;
            continue;
        }
        ++res.usable;
        if (res.truth.tau_adoption && bounds.adoption.contains(*res.truth.tau_adoption)) ++res.adoption_covered;
        if (res.truth.tau_effectiveness && bounds.effectiveness) {
            ++res.effectiveness_trials;
            if (bounds.effectiveness->contains(*res.truth.tau_effectiveness)) ++res.effectiveness_covered;
        }

        if (truth_sets.empty()) continue;
        BootstrapConfig bc;
        bc.replications = opt.bootstrap_replications;
        bc.level = opt.level;
        bc.seed = substream_seed(trial_seed, 1);
        std::vector<BoundCI> cis;
        try {
            cis = bootstrap_bounds(trial.dataset, opt.gammas, bc);
        } catch (const AssumptionError&) {
            ++res.bootstrap_failed;
            continue;
        }
        ++res.bootstrap_trials;
        for (const auto& ci : cis) {
            const auto g = static_cast<std::size_t>(
                std::find(opt.gammas.begin(), opt.gammas.end(), ci.gamma) - opt.gammas.begin());
            const auto& truth_set = truth_sets[g];
            if (ci.effect == Effect::Adoption) {
                if (ci.lower_ci <= truth_set.adoption.lower && ci.upper_ci >= truth_set.adoption.upper) {
                    ++res.ci_adoption_covered[g];
                }
            } else if (truth_set.effectiveness) {
                if (ci.lower_ci <= truth_set.effectiveness->lower && ci.upper_ci >= truth_set.effectiveness->upper) {
                    ++res.ci_effectiveness_covered[g];
                }
            }
        }
    }
    if (opt.trials > 0) {
        const double n = static_cast<double>(opt.trials);
        res.mean_pi_A_error = err_a / n;
        res.mean_pi_N_error = err_n / n;
        res.mean_pi_C_error = err_c / n;
    }
    return res;
}

}  // namespace pstrat::theory
