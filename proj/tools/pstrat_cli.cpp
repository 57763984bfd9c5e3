// pstrat: descriptive tests, principal-stratification bounds and model
// simulations for three-arm encouragement trials.

#include <charconv>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "pstrat/errors.hpp"
#include "pstrat/report.hpp"

using namespace pstrat;
using nlohmann::ordered_json;

namespace {

struct GlobalOptions {
    std::string input;
    bool json = false;
    std::optional<std::uint64_t> seed;
    std::vector<double> gammas;
    std::size_t replications = 2000;
    double level = 0.95;
    double y_min = 1.0;
    double y_max = 4.3;
};

struct SummaryFlags {
    std::optional<long> n_z0, n_z0_d1, n_z1, n_z1_d1;
    std::optional<double> m_z0_d0, m_z0_d1, m_z1_d0, m_z1_d1;

    bool any() const {
        return n_z0 || n_z0_d1 || n_z1 || n_z1_d1 || m_z0_d0 || m_z0_d1 || m_z1_d0 || m_z1_d1;
    }
};

std::string num(double v) {
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

std::string join(const std::vector<double>& v) {
    std::string s;
    for (double x : v) s += (s.empty() ? "" : ",") + num(x);
    return s;
}

StrataInput input_from_flags(const SummaryFlags& f, Support support) {
    auto need = [](const auto& v, const char* name) {
        if (!v) throw ValidationError(std::string("incomplete summary statistics: missing --") + name);
        return *v;
    };
    StrataInput in;
    in.support = support;
    in.n_z0 = need(f.n_z0, "n-z0");
    in.n_z0_d1 = need(f.n_z0_d1, "n-z0-d1");
    in.n_z1 = need(f.n_z1, "n-z1");
    in.n_z1_d1 = need(f.n_z1_d1, "n-z1-d1");
    const double nan = std::numeric_limits<double>::quiet_NaN();
    in.mean_y_z0_d0 = in.n_z0 - in.n_z0_d1 > 0 ? need(f.m_z0_d0, "mean-z0-d0") : f.m_z0_d0.value_or(nan);
    in.mean_y_z0_d1 = in.n_z0_d1 > 0 ? need(f.m_z0_d1, "mean-z0-d1") : f.m_z0_d1.value_or(nan);
    in.mean_y_z1_d0 = in.n_z1 - in.n_z1_d1 > 0 ? need(f.m_z1_d0, "mean-z1-d0") : f.m_z1_d0.value_or(nan);
    in.mean_y_z1_d1 = in.n_z1_d1 > 0 ? need(f.m_z1_d1, "mean-z1-d1") : f.m_z1_d1.value_or(nan);
    return in;
}

void emit(const report::RunManifest& manifest, ordered_json body, bool json) {
    const auto wrapped = report::with_manifest(manifest, std::move(body));
    std::cout << (json ? report::render_json(wrapped) : report::render_text(wrapped));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Principal-stratification analysis of encouragement trials"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", std::string(report::kToolVersion));

    GlobalOptions g;
    app.add_option("--input", g.input, "Trial data file (CSV)");
    app.add_flag("--json", g.json, "Emit structured JSON instead of aligned tables");
    app.add_option("--seed", g.seed, "Random seed");
    app.add_option("--gamma", g.gammas, "Mean-dominance relaxation (repeatable)")->take_all()->allow_extra_args(false);
    app.add_option("--replications", g.replications, "Bootstrap replications");
    app.add_option("--level", g.level, "Confidence level");
    app.add_option("--y-min", g.y_min, "Lower end of the outcome support");
    app.add_option("--y-max", g.y_max, "Upper end of the outcome support");

    auto* describe = app.add_subcommand("describe", "Arm summaries, pairwise tests and adoption tables");
    std::vector<std::string> metrics;
    std::vector<std::string> tails;
    std::string adoption_tail = "greater";
    describe->add_option("--metric", metrics, "Metric to compare (repeatable)");
    describe->add_option("--tail", tails, "Alternative per metric: METRIC[@PAIR]=two-sided|greater|less, PAIR as 23 or AIOnly-AITrained (repeatable)");
    describe->add_option("--adoption-tail", adoption_tail, "Alternative for the adoption z test");

    SummaryFlags f;
    bool with_bootstrap = false;
    bool sharp = false;
    auto add_strata_flags = [&](CLI::App* sub) {
        sub->add_option("--n-z0", f.n_z0, "Units assigned without training");
        sub->add_option("--n-z0-d1", f.n_z0_d1, "... of whom used the tool");
        sub->add_option("--n-z1", f.n_z1, "Units assigned with training");
        sub->add_option("--n-z1-d1", f.n_z1_d1, "... of whom used the tool");
        sub->add_option("--mean-z0-d0", f.m_z0_d0, "Mean outcome, untrained non-users");
        sub->add_option("--mean-z0-d1", f.m_z0_d1, "Mean outcome, untrained users");
        sub->add_option("--mean-z1-d0", f.m_z1_d0, "Mean outcome, trained non-users");
        sub->add_option("--mean-z1-d1", f.m_z1_d1, "Mean outcome, trained users");
        sub->add_flag("--sharp", sharp, "Tighten the adoption upper and effectiveness lower ends by the adopter mixture");
    };
    auto* strata = app.add_subcommand("strata", "Stratum proportions, support bounds and the gamma sweep");
    add_strata_flags(strata);
    strata->add_flag("--bootstrap", with_bootstrap, "Add percentile-bootstrap intervals (needs --input)");
    auto* sweep = app.add_subcommand("sweep-gamma", "Alias for strata");
    add_strata_flags(sweep);
    sweep->add_flag("--bootstrap", with_bootstrap, "Add percentile-bootstrap intervals (needs --input)");
    auto* bootstrap = app.add_subcommand("bootstrap", "strata with percentile-bootstrap intervals");
    bootstrap->add_flag("--sharp", sharp, "Tighten the adoption upper and effectiveness lower ends by the adopter mixture");

    auto* simulate = app.add_subcommand("simulate", "Generate trials from the adoption model and check coverage");
    std::string config_path;
    std::size_t n_per_arm = 120;
    std::size_t trials = 500;
    std::size_t sim_reps = 0;
    std::optional<double> noise_sd;
    simulate->add_option("--config", config_path, "Theory configuration (JSON)");
    simulate->add_option("--n-per-arm", n_per_arm, "Units per arm");
    simulate->add_option("--trials", trials, "Number of simulated trials");
    simulate->add_option("--noise-sd", noise_sd, "Outcome noise SD on the grade scale");
    simulate->add_option("--bootstrap-replications", sim_reps, "Bootstrap replications per trial (0 = off)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? report::kExitOk : report::kExitUsage;
    }

    report::RunManifest manifest;
    manifest.input_path = g.input;
    manifest.seed = g.seed;
    manifest.options["json"] = g.json ? "true" : "false";
    manifest.options["y_min"] = num(g.y_min);
    manifest.options["y_max"] = num(g.y_max);
    const Support support{g.y_min, g.y_max};

    try {
        if (describe->parsed()) {
            manifest.subcommand = "describe";
            if (g.input.empty()) throw ValidationError("describe needs --input");
            const auto data = load_dataset(g.input);
            report::DescribeOptions opt;
            if (!metrics.empty()) opt.metrics = metrics;
            for (const auto& t : tails) {
                const auto eq = t.find('=');
                if (eq == std::string::npos) throw ValidationError("--tail expects METRIC[@PAIR]=TAIL, got '" + t + "'");
                opt.tails[t.substr(0, eq)] = parse_tail(t.substr(eq + 1));
            }
            opt.adoption_tail = parse_tail(adoption_tail);
            std::string ms;
            for (const auto& m : opt.metrics) ms += (ms.empty() ? "" : ",") + m;
            manifest.options["metrics"] = ms;
            for (const auto& [k, v] : opt.tails) manifest.options["tail." + k] = std::string(tail_name(v));
            manifest.options["adoption_tail"] = std::string(tail_name(opt.adoption_tail));
            emit(manifest, report::describe(data, opt), g.json);
        } else if (strata->parsed() || sweep->parsed() || bootstrap->parsed()) {
            manifest.subcommand = strata->parsed() ? "strata" : sweep->parsed() ? "sweep-gamma" : "bootstrap";
            report::StrataOptions opt;
            if (!g.gammas.empty()) opt.gammas = g.gammas;
            opt.outer = sharp ? OuterEnds::Mixture : OuterEnds::Support;
            manifest.options["gammas"] = join(opt.gammas);
            manifest.options["outer_ends"] = sharp ? "mixture" : "support";
            std::optional<TrialDataset> data;
            StrataInput in;
            if (!g.input.empty()) {
                if (f.any()) throw ValidationError("give either --input or summary statistics, not both");
                data = load_dataset(g.input);
                in = strata_input_from_dataset(*data, support);
            } else {
                in = input_from_flags(f, support);
                manifest.options["n_z0"] = std::to_string(in.n_z0);
                manifest.options["n_z0_d1"] = std::to_string(in.n_z0_d1);
                manifest.options["n_z1"] = std::to_string(in.n_z1);
                manifest.options["n_z1_d1"] = std::to_string(in.n_z1_d1);
                manifest.options["mean_z0_d0"] = num(in.mean_y_z0_d0);
                manifest.options["mean_z0_d1"] = num(in.mean_y_z0_d1);
                manifest.options["mean_z1_d0"] = num(in.mean_y_z1_d0);
                manifest.options["mean_z1_d1"] = num(in.mean_y_z1_d1);
            }
            if (with_bootstrap || bootstrap->parsed()) {
                BootstrapConfig bc;
                bc.replications = g.replications;
                bc.level = g.level;
                bc.seed = g.seed.value_or(0);
                manifest.seed = bc.seed;
                manifest.options["replications"] = std::to_string(bc.replications);
                manifest.options["level"] = num(bc.level);
                opt.bootstrap = bc;
            }
            emit(manifest, report::strata(in, opt, data ? &*data : nullptr), g.json);
        } else if (simulate->parsed()) {
            manifest.subcommand = "simulate";
            theory::StudyOptions study;
            theory::TheoryConfig config;
            if (!config_path.empty()) {
                std::ifstream cf(config_path);
                if (!cf) throw ValidationError("cannot open '" + config_path + "'");
                nlohmann::json j;
                try {
                    cf >> j;
                } catch (const nlohmann::json::exception& e) {
                    throw ValidationError("theory config is not valid JSON: " + std::string(e.what()));
                }
                config = report::theory_config_from_json(j, &study);
                manifest.input_path = config_path;
            }
            if (noise_sd) study.noise_sd = *noise_sd;
            study.n_per_arm = n_per_arm;
            study.trials = trials;
            study.seed = g.seed.value_or(1);
            manifest.seed = study.seed;
            if (!g.gammas.empty()) study.gammas = g.gammas;
            study.bootstrap_replications = sim_reps;
            study.level = g.level;
            manifest.options["n_per_arm"] = std::to_string(n_per_arm);
            manifest.options["trials"] = std::to_string(trials);
            manifest.options["noise_sd"] = num(study.noise_sd);
            manifest.options["gammas"] = join(study.gammas);
            manifest.options["bootstrap_replications"] = std::to_string(sim_reps);
            manifest.options["level"] = num(study.level);
            emit(manifest, report::simulate(config, study), g.json);
        }
    } catch (const AssumptionError& e) {
        std::cerr << "pstrat: assumption violated: " << e.what() << '\n'
                  << "  The identifying assumptions (monotone adoption, exclusion for never users, outcome support)\n"
                  << "  are inconsistent with these data; the bounds are not reported.\n";
        return report::kExitAssumption;
    } catch (const ValidationError& e) {
        std::cerr << "pstrat: " << e.what() << '\n';
        return report::kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "pstrat: internal error: " << e.what() << '\n';
        return report::kExitInternal;
    }
    return report::kExitOk;
}
