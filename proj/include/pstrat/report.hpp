#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pstrat/descriptives.hpp"
#include "pstrat/resampling.hpp"
#include "pstrat/strata_bounds.hpp"
#include "pstrat/theory_model.hpp"

namespace pstrat::report {

inline constexpr const char* kToolVersion = "0.1.0";

// Process exit codes of the command-line tool.
enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 1,
    kExitValidation = 2,
    kExitAssumption = 3,
    kExitInternal = 4,
};

struct RunManifest {
    std::string subcommand;
    std::string input_path;
    std::optional<std::uint64_t> seed;
    std::map<std::string, std::string> options;
    std::string tool_version = kToolVersion;

    nlohmann::ordered_json to_json() const;
};

// ---------------------------------------------------------------------------
// describe

struct DescribeOptions {
    std::vector<std::string> metrics{"grade_point",        "issues_missed",     "fk_grade", "word_count",
                                     "rule_misstatements", "case_misstatements"};
    // Keyed by "metric" or "metric@ab" where ab is an arm pair such as 23.
    std::map<std::string, Tail> tails;
    Tail adoption_tail = Tail::Greater;

    Tail tail_for(const std::string& metric, Arm a, Arm b) const;
};

nlohmann::ordered_json test_record(const std::string& metric, Arm a, Arm b, const TestResult& r);

nlohmann::ordered_json describe(const TrialDataset& dataset, const DescribeOptions& options);

// ---------------------------------------------------------------------------
// strata

struct StrataOptions {
    std::vector<double> gammas{0.0, 0.4, 0.64, 1.0, 1.665};
    OuterEnds outer = OuterEnds::Support;
    std::optional<BootstrapConfig> bootstrap;  // needs a dataset; its outer setting is overridden
};

nlohmann::ordered_json bounds_json(const PrincipalBounds& b);
nlohmann::ordered_json strata(const StrataInput& input, const StrataOptions& options,
                              const TrialDataset* dataset = nullptr);

// ---------------------------------------------------------------------------
// simulate

theory::TheoryConfig theory_config_from_json(const nlohmann::json& j, theory::StudyOptions* study = nullptr);
nlohmann::ordered_json theory_config_to_json(const theory::TheoryConfig& config);
nlohmann::ordered_json simulate(const theory::TheoryConfig& config, const theory::StudyOptions& options);

// ---------------------------------------------------------------------------
// output

// Wraps a report body with its manifest: {"manifest": ..., "report": ...}.
nlohmann::ordered_json with_manifest(const RunManifest& manifest, nlohmann::ordered_json body);

// Aligned plain-text rendering of a wrapped report.
std::string render_text(const nlohmann::ordered_json& wrapped);
std::string render_json(const nlohmann::ordered_json& wrapped);

}  // namespace pstrat::report
