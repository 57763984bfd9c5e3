#include "pstrat/resampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

#include "pstrat/errors.hpp"

namespace pstrat {

double percentile(std::span<const double> sorted, double q) {
    if (sorted.empty()) throw ValidationError("percentile of an empty list");
    if (!(q >= 0.0 && q <= 1.0)) throw ValidationError("percentile level must lie in [0, 1]");
    const double h = static_cast<double>(sorted.size() - 1) * q;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= sorted.size()) return sorted.back();
    const double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) {
    return splitmix64(splitmix64(seed) ^ (index * 0xD1B54A32D192ED03ULL + 1));
}

void resample_with_replacement(std::size_t arm_size, Rng& rng, std::vector<std::size_t>& out) {
    out.resize(arm_size);
    std::uniform_int_distribution<std::size_t> pick(0, arm_size - 1);
    for (auto& i : out) i = pick(rng);
}

void resample_identity(std::size_t arm_size, Rng&, std::vector<std::size_t>& out) {
    out.resize(arm_size);
    std::iota(out.begin(), out.end(), std::size_t{0});
}

void BootstrapConfig::validate() const {
    if (replications < 100) throw ValidationError("bootstrap needs at least 100 replications");
    if (!(level > 0.0 && level < 1.0)) throw ValidationError("confidence level must lie in (0, 1)");
    if (!(max_failed_share >= 0.0 && max_failed_share <= 1.0)) throw ValidationError("max_failed_share must lie in [0, 1]");
}

StrataInput strata_input_from_units(std::span<const StrataUnit> untreated, std::span<const StrataUnit> treated,
                                    Support support) {
    StrataInput in;
    in.support = support;
    auto fill = [](std::span<const StrataUnit> arm, long& n, long& n_d1, double& m0, double& m1) {
        double s0 = 0.0, s1 = 0.0;
        long c0 = 0, c1 = 0;
        for (const auto& u : arm) {
            if (u.adopted) {
                s1 += u.y;
                ++c1;
            } else {
                s0 += u.y;
                ++c0;
            }
        }
        n = c0 + c1;
        n_d1 = c1;
        m0 = c0 ? s0 / static_cast<double>(c0) : std::numeric_limits<double>::quiet_NaN();
        m1 = c1 ? s1 / static_cast<double>(c1) : std::numeric_limits<double>::quiet_NaN();
    };
    fill(untreated, in.n_z0, in.n_z0_d1, in.mean_y_z0_d0, in.mean_y_z0_d1);
    fill(treated, in.n_z1, in.n_z1_d1, in.mean_y_z1_d0, in.mean_y_z1_d1);
    return in;
}

namespace {

EffectBounds bounds_at(const StrataInput& in, const StratumProportions& p, const BaselineOutcomes& b, double gamma,
                       OuterEnds outer) {
    if (std::isinf(gamma)) return support_bounds(in, p, b, outer);
    return dominance_bounds(in, p, b, gamma, outer);
}

// Endpoints per replicate: [gamma][adoption lo, adoption hi, eff lo, eff hi].
struct ReplicateResult {
    bool failed = false;
    bool monotonicity_failed = false;
    std::vector<double> endpoints;
};

}  // namespace

std::vector<BoundCI> bootstrap_bounds(std::span<const StrataUnit> untreated, std::span<const StrataUnit> treated,
                                      Support support, std::span<const double> gammas, const BootstrapConfig& config,
                                      const Resampler& resampler) {
    config.validate();
    if (gammas.empty()) throw ValidationError("gamma list is empty");
    for (double g : gammas) {
        if (!(g >= 0.0)) throw ValidationError("gamma must be nonnegative");
    }
    if (untreated.empty() || treated.empty()) throw ValidationError("arm empty: both AI arms need records");

    const StrataInput full = strata_input_from_units(untreated, treated, support);
    const StratumProportions full_props = stratum_proportions(full);
    const BaselineOutcomes full_base = baseline_outcomes(full, full_props);
    const bool with_effectiveness = full_base.e_y01_always.has_value();
    const std::size_t n_gamma = gammas.size();

    std::vector<ReplicateResult> results(config.replications);
    auto run_range = [&](std::size_t begin, std::size_t end) {
        std::vector<std::size_t> idx0, idx1;
        std::vector<StrataUnit> s0(untreated.size()), s1(treated.size());
        for (std::size_t rep = begin; rep < end; ++rep) {
            Rng rng(substream_seed(config.seed, rep));
            resampler(untreated.size(), rng, idx0);
            resampler(treated.size(), rng, idx1);
            for (std::size_t i = 0; i < idx0.size(); ++i) s0[i] = untreated[idx0[i]];
            for (std::size_t i = 0; i < idx1.size(); ++i) s1[i] = treated[idx1[i]];
            auto& out = results[rep];
            const StrataInput in = strata_input_from_units(s0, s1, support);
            // adoption share under training not above the untreated share
            if (static_cast<double>(in.n_z1_d1) * static_cast<double>(in.n_z0) <=
                static_cast<double>(in.n_z0_d1) * static_cast<double>(in.n_z1)) {
                out.failed = out.monotonicity_failed = true;
                continue;
            }
            try {
                const StratumProportions p = stratum_proportions(in);
                const BaselineOutcomes b = baseline_outcomes(in, p);
                if (with_effectiveness && !b.e_y01_always) {
                    out.failed = true;
                    continue;
                }
                out.endpoints.resize(n_gamma * 4);
                for (std::size_t g = 0; g < n_gamma; ++g) {
                    const auto eb = bounds_at(in, p, b, gammas[g], config.outer);
                    out.endpoints[g * 4 + 0] = eb.adoption.lower;
                    out.endpoints[g * 4 + 1] = eb.adoption.upper;
                    if (eb.effectiveness) {
                        out.endpoints[g * 4 + 2] = eb.effectiveness->lower;
                        out.endpoints[g * 4 + 3] = eb.effectiveness->upper;
                    }
                }
            } catch (const AssumptionError&) {
                out.failed = true;
            } catch (const ValidationError&) {
                out.failed = true;
            }
        }
    };

    unsigned threads = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, config.replications));
    if (threads <= 1) {
        run_range(0, config.replications);
    } else {
        std::vector<std::jthread> pool;
        const std::size_t chunk = (config.replications + threads - 1) / threads;
        for (unsigned t = 0; t < threads; ++t) {
            const std::size_t begin = t * chunk;
            const std::size_t end = std::min(config.replications, begin + chunk);
            if (begin < end) pool.emplace_back(run_range, begin, end);
        }
    }

    const std::size_t n_failed = static_cast<std::size_t>(
        std::count_if(results.begin(), results.end(), [](const ReplicateResult& r) { return r.failed; }));
    const std::size_t n_monotonicity = static_cast<std::size_t>(std::count_if(
        results.begin(), results.end(), [](const ReplicateResult& r) { return r.monotonicity_failed; }));
    if (static_cast<double>(n_monotonicity) > config.max_failed_share * static_cast<double>(config.replications)) {
        throw AssumptionError("bootstrap unstable: monotonicity frequently violated in resamples");
    }

    const double alpha = 1.0 - config.level;
    std::vector<BoundCI> out;
    std::vector<double> lowers, uppers;
    for (std::size_t g = 0; g < n_gamma; ++g) {
        const auto point = bounds_at(full, full_props, full_base, gammas[g], config.outer);
        for (int e = 0; e < (with_effectiveness ? 2 : 1); ++e) {
            lowers.clear();
            uppers.clear();
            for (const auto& r : results) {
                if (r.failed) continue;
                lowers.push_back(r.endpoints[g * 4 + 2 * static_cast<std::size_t>(e)]);
                uppers.push_back(r.endpoints[g * 4 + 2 * static_cast<std::size_t>(e) + 1]);
            }
            std::sort(lowers.begin(), lowers.end());
            std::sort(uppers.begin(), uppers.end());
            BoundCI ci;
            ci.effect = e == 0 ? Effect::Adoption : Effect::Effectiveness;
            ci.gamma = gammas[g];
            const PrincipalBounds& pb = e == 0 ? point.adoption : *point.effectiveness;
            ci.point_lower = pb.lower;
            ci.point_upper = pb.upper;
            ci.lower_ci = percentile(lowers, alpha / 2.0);
            ci.upper_ci = percentile(uppers, 1.0 - alpha / 2.0);
            ci.n_failed = n_failed;
            ci.n_monotonicity_failed = n_monotonicity;
            out.push_back(ci);
        }
    }
    return out;
}

std::vector<StrataUnit> strata_units(const TrialDataset& dataset, Arm arm) {
    std::vector<StrataUnit> units;
    for (const auto& r : dataset.records()) {
        if (r.arm == arm) units.push_back({r.adopted.value_or(false), r.grade_point.value()});
    }
    return units;
}

std::vector<BoundCI> bootstrap_bounds(const TrialDataset& dataset, std::span<const double> gammas,
                                      const BootstrapConfig& config, const Resampler& resampler) {
    const auto z0 = strata_units(dataset, Arm::AIOnly);
    const auto z1 = strata_units(dataset, Arm::AITrained);
    return bootstrap_bounds(z0, z1, dataset.support(), gammas, config, resampler);
}

}  // namespace pstrat
