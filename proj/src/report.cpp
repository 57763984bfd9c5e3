#include "pstrat/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "pstrat/errors.hpp"

namespace pstrat::report {

using nlohmann::ordered_json;

ordered_json RunManifest::to_json() const {
    ordered_json j;
    j["subcommand"] = subcommand;
    j["input_path"] = input_path;
    j["seed"] = seed ? ordered_json(*seed) : ordered_json(nullptr);
    j["options"] = ordered_json::object();
    for (const auto& [k, v] : options) j["options"][k] = v;
    j["tool_version"] = tool_version;
    return j;
}

namespace {

ordered_json opt_number(const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); }

std::string arm_pair_key(Arm a, Arm b) {
    auto digit = [](Arm arm) { return static_cast<char>('1' + static_cast<int>(arm)); };
    return std::string{digit(a), digit(b)};
}

}  // namespace

// ---------------------------------------------------------------------------
// describe

Tail DescribeOptions::tail_for(const std::string& metric, Arm a, Arm b) const {
    if (auto it = tails.find(metric + "@" + arm_pair_key(a, b)); it != tails.end()) return it->second;
    const std::string named = metric + "@" + std::string(arm_name(a)) + "-" + std::string(arm_name(b));
    if (auto it = tails.find(named); it != tails.end()) return it->second;
    if (auto it = tails.find(metric); it != tails.end()) return it->second;
    return Tail::TwoSided;
}

ordered_json test_record(const std::string& metric, Arm a, Arm b, const TestResult& r) {
    ordered_json j;
    j["metric"] = metric;
    j["arms"] = {std::string(arm_name(a)), std::string(arm_name(b))};
    j["effect"] = r.effect;
    j["statistic"] = r.statistic;
    j["df"] = opt_number(r.df);
    j["tail"] = r.tail() == TailKind::OneTailed ? "one_tailed" : "two_tailed";
    j["alternative"] = std::string(tail_name(r.alternative));
    j["p_value"] = r.p_value;
    return j;
}

ordered_json describe(const TrialDataset& dataset, const DescribeOptions& options) {
    for (const auto& m : options.metrics) {
        if (!is_metric(m)) metric_value(ExamRecord{}, m);  // throws with the valid list
    }
    for (const auto& [key, tail] : options.tails) {
        const auto at = key.find('@');
        const auto metric = key.substr(0, at);
        if (!is_metric(metric)) metric_value(ExamRecord{}, metric);
        if (at == std::string::npos) continue;
        const auto pair = key.substr(at + 1);
        bool known = false;
        for (Arm a : kAllArms) {
            for (Arm b : kAllArms) {
                if (static_cast<int>(a) >= static_cast<int>(b)) continue;
                known = known || pair == arm_pair_key(a, b) ||
                        pair == std::string(arm_name(a)) + "-" + std::string(arm_name(b));
            }
        }
        if (!known) {
            throw ValidationError("unknown arm pair '" + pair +
                                  "'; use 12, 13, 23 or NoAI-AIOnly, NoAI-AITrained, AIOnly-AITrained");
        }
    }
    ordered_json body;
    body["arms"] = ordered_json::object();
    for (Arm arm : kAllArms) {
        const auto n = dataset.count(arm);
        if (n == 0) throw ValidationError("arm empty: " + std::string(arm_name(arm)) + " has no records");
        body["arms"][std::string(arm_name(arm))] = n;
    }

    body["summaries"] = ordered_json::array();
    std::map<std::pair<std::string, Arm>, ArmSummary> cache;
    for (const auto& m : options.metrics) {
        for (Arm arm : kAllArms) {
            const auto s = summarize(dataset, arm, m);
            cache[{m, arm}] = s;
            ordered_json row;
            row["metric"] = m;
            row["arm"] = std::string(arm_name(arm));
            row["n"] = s.n;
            row["mean"] = s.mean;
            row["sd"] = opt_number(s.sd);
            body["summaries"].push_back(row);
        }
    }

    body["tests"] = ordered_json::array();
    constexpr std::array<std::pair<Arm, Arm>, 3> pairs{
        {{Arm::NoAI, Arm::AIOnly}, {Arm::NoAI, Arm::AITrained}, {Arm::AIOnly, Arm::AITrained}}};
    for (const auto& m : options.metrics) {
        for (const auto& [a, b] : pairs) {
            const auto r = welch_t_test(cache.at({m, a}), cache.at({m, b}), options.tail_for(m, a, b));
            body["tests"].push_back(test_record(m, a, b, r));
        }
    }

    long x[2] = {0, 0};
    long n[2] = {0, 0};
    for (const auto& r : dataset.records()) {
        if (r.arm == Arm::NoAI) continue;
        const int z = r.arm == Arm::AITrained ? 1 : 0;
        ++n[z];
        if (r.adopted.value_or(false)) ++x[z];
    }
    const auto z = two_proportion_z_test(x[0], n[0], x[1], n[1], options.adoption_tail);
    auto adoption = test_record("adopted", Arm::AIOnly, Arm::AITrained, z);
    adoption["df"] = nullptr;
    adoption["counts"] = {{"AIOnly", {x[0], n[0]}}, {"AITrained", {x[1], n[1]}}};
    body["adoption_test"] = adoption;

    const auto q = adoption_by_quartile(dataset);
    ordered_json quart;
    quart["cut_points"] = {q.cut25, q.cut50, q.cut75};
    quart["cells"] = ordered_json::array();
    for (const auto& c : q.cells) {
        ordered_json cell;
        cell["quartile"] = c.quartile;
        cell["arm"] = std::string(arm_name(c.arm));
        cell["numerator"] = c.numerator;
        cell["denominator"] = c.denominator;
        cell["rate"] = opt_number(c.rate);
        quart["cells"].push_back(cell);
    }
    body["quartiles"] = quart;
    return body;
}

// ---------------------------------------------------------------------------
// strata

ordered_json bounds_json(const PrincipalBounds& b) {
    ordered_json j;
    j["effect"] = std::string(effect_name(b.effect));
    j["lower"] = b.lower;
    j["upper"] = b.upper;
    j["width"] = b.width();
    j["lower_clamped"] = b.lower_clamped;
    j["upper_clamped"] = b.upper_clamped;
    return j;
}

ordered_json strata(const StrataInput& input, const StrataOptions& options, const TrialDataset* dataset) {
    const auto sweep = gamma_sweep(input, options.gammas, options.outer);
    ordered_json body;
    body["outer_ends"] = options.outer == OuterEnds::Mixture ? "mixture" : "support";
    ordered_json in;
    in["n_z0"] = input.n_z0;
    in["n_z0_d1"] = input.n_z0_d1;
    in["n_z1"] = input.n_z1;
    in["n_z1_d1"] = input.n_z1_d1;
    auto cell_mean = [](long count, double mean) { return count > 0 ? ordered_json(mean) : ordered_json(nullptr); };
    in["mean_y_z0_d0"] = cell_mean(input.n_z0 - input.n_z0_d1, input.mean_y_z0_d0);
    in["mean_y_z0_d1"] = cell_mean(input.n_z0_d1, input.mean_y_z0_d1);
    in["mean_y_z1_d0"] = cell_mean(input.n_z1 - input.n_z1_d1, input.mean_y_z1_d0);
    in["mean_y_z1_d1"] = cell_mean(input.n_z1_d1, input.mean_y_z1_d1);
    in["y_min"] = input.support.y_min;
    in["y_max"] = input.support.y_max;
    body["input"] = in;

    const auto& p = sweep.proportions;
    body["proportions"] = {{"pi_A", p.pi_A},
                           {"pi_N", p.pi_N},
                           {"pi_C", p.pi_C},
                           {"w_A_treated", p.w_A_treated},
                           {"w_C_treated", p.w_C_treated},
                           {"w_N_untreated", p.w_N_untreated},
                           {"w_C_untreated", p.w_C_untreated}};
    const auto& b = sweep.baselines;
    body["baselines"] = {{"e_y00_never", opt_number(b.e_y00_never)},
                         {"e_y01_always", opt_number(b.e_y01_always)},
                         {"e_y00_induced", b.e_y00_induced}};
    body["support_bounds"] = {
        {"adoption", bounds_json(sweep.support_only.adoption)},
        {"effectiveness",
         sweep.support_only.effectiveness ? bounds_json(*sweep.support_only.effectiveness) : ordered_json(nullptr)}};

    body["sweep"] = ordered_json::array();
    for (const auto& row : sweep.rows) {
        ordered_json r;
        r["gamma"] = row.gamma;
        r["L_eff"] = row.effectiveness ? ordered_json(row.effectiveness->lower) : ordered_json(nullptr);
        r["U_eff"] = row.effectiveness ? ordered_json(row.effectiveness->upper) : ordered_json(nullptr);
        r["L_adopt"] = row.adoption.lower;
        r["U_adopt"] = row.adoption.upper;
        r["L_adopt_clamped"] = row.adoption.lower_clamped;
        r["U_eff_clamped"] = row.effectiveness ? ordered_json(row.effectiveness->upper_clamped) : ordered_json(nullptr);
        body["sweep"].push_back(r);
    }
    body["crossover_gamma"] = opt_number(sweep.crossover_gamma);

    if (options.bootstrap) {
        if (!dataset) throw ValidationError("bootstrap intervals need a dataset (--input)");
        auto config = *options.bootstrap;
        config.outer = options.outer;
        const auto cis = bootstrap_bounds(*dataset, options.gammas, config);
        ordered_json boot;
        boot["replications"] = options.bootstrap->replications;
        boot["level"] = options.bootstrap->level;
        boot["seed"] = options.bootstrap->seed;
        boot["method"] = "percentile_on_bounds";
        boot["resampling"] = "stratified_by_assignment";
        boot["n_failed"] = cis.empty() ? 0 : cis.front().n_failed;
        boot["n_monotonicity_failed"] = cis.empty() ? 0 : cis.front().n_monotonicity_failed;
        boot["rows"] = ordered_json::array();
        for (const auto& ci : cis) {
            ordered_json r;
            r["gamma"] = ci.gamma;
            r["effect"] = std::string(effect_name(ci.effect));
            r["point_lower"] = ci.point_lower;
            r["point_upper"] = ci.point_upper;
            r["lower_ci"] = ci.lower_ci;
            r["upper_ci"] = ci.upper_ci;
            boot["rows"].push_back(r);
        }
        body["bootstrap"] = boot;
    }
    return body;
}

// ---------------------------------------------------------------------------
// simulate

theory::TheoryConfig theory_config_from_json(const nlohmann::json& j, theory::StudyOptions* study) {
    if (!j.is_object()) throw ValidationError("theory config must be a JSON object");
    theory::TheoryConfig c;
    auto number = [](const nlohmann::json& v, const std::string& key) {
        if (!v.is_number()) throw ValidationError("theory config: '" + key + "' must be a number");
        return v.get<double>();
    };
    auto sub = [&](const nlohmann::json& obj, const std::string& name,
                   std::initializer_list<std::pair<const char*, double*>> fields) {
        if (!obj.is_object()) throw ValidationError("theory config: '" + name + "' must be an object");
        for (const auto& [k, v] : obj.items()) {
            bool known = false;
            for (const auto& [fk, ptr] : fields) {
                if (k == fk) {
                    *ptr = number(v, name + "." + k);
                    known = true;
                }
            }
            if (!known) throw ValidationError("theory config: unknown key '" + name + "." + k + "'");
        }
    };
    theory::StudyOptions ignored;
    theory::StudyOptions& s = study ? *study : ignored;
    for (const auto& [k, v] : j.items()) {
        if (k == "ability_A") c.ability_A = number(v, k);
        else if (k == "e0") c.e0 = number(v, k);
        else if (k == "e1") c.e1 = number(v, k);
        else if (k == "k0") c.k0 = number(v, k);
        else if (k == "k1") c.k1 = number(v, k);
        else if (k == "complexity_c") c.complexity_c = number(v, k);
        else if (k == "error_prob")
            sub(v, k, {{"scale", &c.error_prob.scale}, {"c_exponent", &c.error_prob.c_exponent},
                       {"e_exponent", &c.error_prob.e_exponent}});
        else if (k == "error_cost") sub(v, k, {{"lambda", &c.error_cost.lambda}, {"exponent", &c.error_cost.exponent}});
        else if (k == "y_scale") sub(v, k, {{"y_lo", &c.y_scale.y_lo}, {"y_hi", &c.y_scale.y_hi}});
        else if (k == "noise_sd") s.noise_sd = number(v, k);
        else if (k == "theta") sub(v, k, {{"a", &s.theta.a}, {"b", &s.theta.b}});
        else throw ValidationError("theory config: unknown key '" + k + "'");
    }
    c.validate();
    s.theta.validate();
    if (!(s.noise_sd >= 0.0)) throw ValidationError("theory config: noise_sd must be nonnegative");
    return c;
}

ordered_json theory_config_to_json(const theory::TheoryConfig& c) {
    ordered_json j;
    j["ability_A"] = c.ability_A;
    j["e0"] = c.e0;
    j["e1"] = c.e1;
    j["k0"] = c.k0;
    j["k1"] = c.k1;
    j["complexity_c"] = c.complexity_c;
    j["error_prob"] = {{"scale", c.error_prob.scale},
                       {"c_exponent", c.error_prob.c_exponent},
                       {"e_exponent", c.error_prob.e_exponent}};
    j["error_cost"] = {{"lambda", c.error_cost.lambda}, {"exponent", c.error_cost.exponent}};
    j["y_scale"] = {{"y_lo", c.y_scale.y_lo}, {"y_hi", c.y_scale.y_hi}};
    return j;
}

ordered_json simulate(const theory::TheoryConfig& config, const theory::StudyOptions& options) {
    const auto r = theory::run_study(config, options);
    ordered_json body;
    body["config"] = theory_config_to_json(config);
    body["study"] = {{"n_per_arm", options.n_per_arm},
                     {"trials", options.trials},
                     {"noise_sd", options.noise_sd},
                     {"theta", {{"a", options.theta.a}, {"b", options.theta.b}}},
                     {"bootstrap_replications", options.bootstrap_replications},
                     {"level", options.level}};
    body["truth"] = {{"pi_A", r.truth.pi_A},
                     {"pi_N", r.truth.pi_N},
                     {"pi_C", r.truth.pi_C},
                     {"induced_empty", r.truth.induced_empty},
                     {"tau_adoption", opt_number(r.truth.tau_adoption)},
                     {"tau_effectiveness", opt_number(r.truth.tau_effectiveness)}};
    auto rate = [](std::size_t k, std::size_t n) { return n ? ordered_json(double(k) / double(n)) : ordered_json(nullptr); };
    body["trials"] = {{"total", r.trials},
                      {"usable", r.usable},
                      {"excluded_no_induced", r.excluded_no_induced},
                      {"excluded_other", r.excluded_other}};
    body["coverage"] = {{"adoption_covered", r.adoption_covered},
                        {"adoption_rate", rate(r.adoption_covered, r.usable)},
                        {"effectiveness_covered", r.effectiveness_covered},
                        {"effectiveness_trials", r.effectiveness_trials},
                        {"effectiveness_rate", rate(r.effectiveness_covered, r.effectiveness_trials)}};
    body["pi_bias"] = {{"pi_A", r.mean_pi_A_error}, {"pi_N", r.mean_pi_N_error}, {"pi_C", r.mean_pi_C_error}};
    if (options.bootstrap_replications > 0) {
        ordered_json boot;
        boot["trials"] = r.bootstrap_trials;
        boot["rejected"] = r.bootstrap_failed;
        boot["rows"] = ordered_json::array();
        for (std::size_t g = 0; g < r.gammas.size(); ++g) {
            boot["rows"].push_back({{"gamma", r.gammas[g]},
                                    {"adoption_rate", rate(r.ci_adoption_covered[g], r.bootstrap_trials)},
                                    {"effectiveness_rate", rate(r.ci_effectiveness_covered[g], r.bootstrap_trials)}});
        }
        body["bootstrap_coverage"] = boot;
    }
    return body;
}

// ---------------------------------------------------------------------------
// output

ordered_json with_manifest(const RunManifest& manifest, ordered_json body) {
    ordered_json j;
    j["manifest"] = manifest.to_json();
    j["report"] = std::move(body);
    return j;
}

std::string render_json(const ordered_json& wrapped) { return wrapped.dump(2) + "\n"; }

namespace {

std::string fmt(const ordered_json& v, int digits = 3) {
    if (v.is_null()) return "NA";
    if (v.is_boolean()) return v.get<bool>() ? "yes" : "no";
    if (v.is_number_integer() || v.is_number_unsigned()) return v.dump();
    if (v.is_number()) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.*f", digits, v.get<double>());
        return buf;
    }
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
}

class Table {
public:
    explicit Table(std::vector<std::string> header) { rows_.push_back(std::move(header)); }
    void add(std::vector<std::string> row) { rows_.push_back(std::move(row)); }
    void print(std::ostream& os) const {
        std::vector<std::size_t> width;
        for (const auto& r : rows_) {
            width.resize(std::max(width.size(), r.size()), 0);
            for (std::size_t i = 0; i < r.size(); ++i) width[i] = std::max(width[i], r[i].size());
        }
        for (const auto& r : rows_) {
            std::string line;
            for (std::size_t i = 0; i < r.size(); ++i) {
                if (i) line += "  ";
                line += r[i];
                if (i + 1 < r.size()) line += std::string(width[i] - r[i].size(), ' ');
            }
            os << line << '\n';
        }
    }

private:
    std::vector<std::vector<std::string>> rows_;
};

void render_manifest(std::ostream& os, const ordered_json& m) {
    os << "# " << m["subcommand"].get<std::string>() << " (pstrat " << m["tool_version"].get<std::string>() << ")\n";
    os << "# input: " << (m["input_path"].get<std::string>().empty() ? "-" : m["input_path"].get<std::string>())
       << "\n";
    os << "# seed: " << (m["seed"].is_null() ? std::string("-") : m["seed"].dump()) << '\n';
    for (const auto& [k, v] : m["options"].items()) os << "# " << k << " = " << v.get<std::string>() << '\n';
    os << '\n';
}

void render_describe(std::ostream& os, const ordered_json& r) {
    os << "Arm summaries\n";
    Table s({"metric", "arm", "n", "mean", "sd"});
    for (const auto& row : r["summaries"]) {
        s.add({fmt(row["metric"]), fmt(row["arm"]), fmt(row["n"]), fmt(row["mean"]), fmt(row["sd"])});
    }
    s.print(os);
    os << "\nPairwise Welch t tests (effect = second - first)\n";
    Table t({"metric", "first", "second", "effect", "t", "df", "alternative", "p"});
    for (const auto& row : r["tests"]) {
        t.add({fmt(row["metric"]), fmt(row["arms"][0]), fmt(row["arms"][1]), fmt(row["effect"]),
               fmt(row["statistic"]), fmt(row["df"], 1), fmt(row["alternative"]), fmt(row["p_value"], 4)});
    }
    t.print(os);
    const auto& a = r["adoption_test"];
    os << "\nAdoption (two-proportion z test)\n";
    Table z({"AIOnly", "AITrained", "effect", "z", "alternative", "p"});
    z.add({fmt(a["counts"]["AIOnly"][0]) + "/" + fmt(a["counts"]["AIOnly"][1]),
           fmt(a["counts"]["AITrained"][0]) + "/" + fmt(a["counts"]["AITrained"][1]), fmt(a["effect"], 4),
           fmt(a["statistic"]), fmt(a["alternative"]), fmt(a["p_value"], 4)});
    z.print(os);
    const auto& q = r["quartiles"];
    os << "\nAdoption by grade-point quartile (cuts " << fmt(q["cut_points"][0], 2) << ", "
       << fmt(q["cut_points"][1], 2) << ", " << fmt(q["cut_points"][2], 2) << ")\n";
    Table qt({"quartile", "arm", "rate", "users/total"});
    for (const auto& c : q["cells"]) {
        qt.add({"Q" + fmt(c["quartile"]), fmt(c["arm"]), fmt(c["rate"]),
                fmt(c["numerator"]) + "/" + fmt(c["denominator"])});
    }
    qt.print(os);
}

void render_strata(std::ostream& os, const ordered_json& r) {
    const auto& p = r["proportions"];
    os << "Stratum proportions\n";
    Table t({"pi_always", "pi_never", "pi_induced", "w_A|treated", "w_C|treated", "w_N|untreated", "w_C|untreated"});
    t.add({fmt(p["pi_A"], 4), fmt(p["pi_N"], 4), fmt(p["pi_C"], 4), fmt(p["w_A_treated"], 4),
           fmt(p["w_C_treated"], 4), fmt(p["w_N_untreated"], 4), fmt(p["w_C_untreated"], 4)});
    t.print(os);
    const auto& b = r["baselines"];
    os << "\nBaseline outcomes\n";
    Table bt({"E[Y(0,0)|never]", "E[Y(0,1)|always]", "E[Y(0,0)|induced]"});
    bt.add({fmt(b["e_y00_never"]), fmt(b["e_y01_always"]), fmt(b["e_y00_induced"])});
    bt.print(os);
    os << "\nBounds under the support restriction only";
    if (r.value("outer_ends", "support") == "mixture") os << " (outer ends tightened by the adopter mixture)";
    os << '\n';
    Table sb({"effect", "lower", "upper", "width", "lower clamped", "upper clamped"});
    for (const char* e : {"adoption", "effectiveness"}) {
        const auto& x = r["support_bounds"][e];
        if (x.is_null()) {
            sb.add({e, "NA", "NA", "NA", "-", "-"});
        } else {
            sb.add({e, fmt(x["lower"]), fmt(x["upper"]), fmt(x["width"]), fmt(x["lower_clamped"]),
                    fmt(x["upper_clamped"])});
        }
    }
    sb.print(os);
    os << "\nBounds under mean dominance\n";
    Table sw({"gamma", "L_eff", "U_eff", "L_adopt", "U_adopt", "L_adopt clamped", "U_eff clamped"});
    for (const auto& row : r["sweep"]) {
        sw.add({fmt(row["gamma"]), fmt(row["L_eff"]), fmt(row["U_eff"]), fmt(row["L_adopt"]), fmt(row["U_adopt"]),
                fmt(row["L_adopt_clamped"]), fmt(row["U_eff_clamped"])});
    }
    sw.print(os);
    os << "crossover gamma: " << fmt(r["crossover_gamma"]) << '\n';
    if (r.contains("bootstrap")) {
        const auto& bs = r["bootstrap"];
        os << "\nPercentile bootstrap (" << fmt(bs["replications"]) << " replications, level " << fmt(bs["level"], 2)
           << ", failed " << fmt(bs["n_failed"]) << ", of which without induced users "
           << fmt(bs["n_monotonicity_failed"]) << ")\n";
        Table ct({"gamma", "effect", "bound", "CI"});
        for (const auto& row : bs["rows"]) {
            ct.add({fmt(row["gamma"]), fmt(row["effect"]),
                    "[" + fmt(row["point_lower"]) + ", " + fmt(row["point_upper"]) + "]",
                    "[" + fmt(row["lower_ci"]) + ", " + fmt(row["upper_ci"]) + "]"});
        }
        ct.print(os);
    }
}

void render_simulate(std::ostream& os, const ordered_json& r) {
    const auto& t = r["truth"];
    os << "Population truth\n";
    Table tt({"pi_always", "pi_never", "pi_induced", "tau_adoption", "tau_effectiveness"});
    tt.add({fmt(t["pi_A"], 4), fmt(t["pi_N"], 4), fmt(t["pi_C"], 4), fmt(t["tau_adoption"]),
            fmt(t["tau_effectiveness"])});
    tt.print(os);
    const auto& tr = r["trials"];
    os << "\nTrials: " << fmt(tr["total"]) << " total, " << fmt(tr["usable"]) << " usable, "
       << fmt(tr["excluded_no_induced"]) << " without induced users, " << fmt(tr["excluded_other"])
       << " with support violations\n";
    const auto& c = r["coverage"];
    os << "\nSupport bounds containing the true effect\n";
    Table ct({"effect", "covered", "trials", "rate"});
    ct.add({"adoption", fmt(c["adoption_covered"]), fmt(tr["usable"]), fmt(c["adoption_rate"], 4)});
    ct.add({"effectiveness", fmt(c["effectiveness_covered"]), fmt(c["effectiveness_trials"]),
            fmt(c["effectiveness_rate"], 4)});
    ct.print(os);
    const auto& pb = r["pi_bias"];
    os << "\nMean estimation error of stratum shares: pi_always " << fmt(pb["pi_A"], 5) << ", pi_never "
       << fmt(pb["pi_N"], 5) << ", pi_induced " << fmt(pb["pi_C"], 5) << '\n';
    if (r.contains("bootstrap_coverage")) {
        const auto& b = r["bootstrap_coverage"];
        os << "\nBootstrap intervals covering the identified set (" << fmt(b["trials"]) << " trials, "
           << fmt(b["rejected"]) << " rejected)\n";
        Table bt({"gamma", "adoption", "effectiveness"});
        for (const auto& row : b["rows"]) {
            bt.add({fmt(row["gamma"]), fmt(row["adoption_rate"], 4), fmt(row["effectiveness_rate"], 4)});
        }
        bt.print(os);
    }
}

}  // namespace

std::string render_text(const ordered_json& wrapped) {
    std::ostringstream os;
    const auto& m = wrapped["manifest"];
    render_manifest(os, m);
    const auto& r = wrapped["report"];
    if (r.contains("summaries")) {
        render_describe(os, r);
    } else if (r.contains("sweep")) {
        render_strata(os, r);
    } else if (r.contains("coverage")) {
        render_simulate(os, r);
    } else {
        os << r.dump(2) << '\n';
    }
    return os.str();
}

}  // namespace pstrat::report
