#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pstrat {

enum class Arm { NoAI, AIOnly, AITrained };

inline constexpr std::array<Arm, 3> kAllArms{Arm::NoAI, Arm::AIOnly, Arm::AITrained};

std::string_view arm_name(Arm arm);
// Accepts the enum names and the group numbers 1/2/3.
Arm parse_arm(std::string_view text);

/*
 * Grade point held as an integer number of tenths so that grid membership
 * and equality are exact. Only values on the letter-grade grid can be
 * constructed.
 */
class GradePoint {
public:
    static GradePoint from_tenths(int tenths);
    // Accepts decimal text such as "2.3" or "2.30"; anything off the grid throws.
    static GradePoint parse(std::string_view text);

    int tenths() const { return tenths_; }
    double value() const { return tenths_ / 10.0; }
    std::string to_string() const;

    friend bool operator==(GradePoint, GradePoint) = default;
    friend auto operator<=>(GradePoint, GradePoint) = default;

private:
    friend class GradeScale;
    explicit GradePoint(int tenths) : tenths_(tenths) {}
    int tenths_;
};

struct GradeEntry {
    std::string letter;
    int tenths;
};

class GradeScale {
public:
    // D=1.0 ... A+=4.3, the eleven-step letter scale.
    static const GradeScale& standard();

    explicit GradeScale(std::vector<GradeEntry> entries);

    GradePoint to_points(std::string_view letter) const;
    const std::string& to_letter(GradePoint gp) const;
    bool on_grid(int tenths) const;
    const std::vector<GradeEntry>& entries() const { return entries_; }

    double min_points() const { return entries_.front().tenths / 10.0; }
    double max_points() const { return entries_.back().tenths / 10.0; }
    // Nearest grid point; ties go to the lower grade.
    GradePoint snap(double points) const;

private:
    std::vector<GradeEntry> entries_;
};

GradePoint grade_to_points(std::string_view letter, const GradeScale& scale = GradeScale::standard());

struct RubricConfig {
    // Per-issue maxima. The four issues total twelve sub-issue points; the split
    // per issue is a configurable assumption.
    std::array<int, 4> max_scores{2, 2, 3, 5};
};

struct IssueScore {
    bool spotted = false;
    std::optional<int> score;  // absent ("NA") when not spotted; 0 is a real score
    int max_score = 1;
};

struct ExamRecord {
    std::string unit_id;
    Arm arm = Arm::NoAI;
    std::optional<bool> adopted;
    std::array<IssueScore, 4> issues{};
    GradePoint grade_point = GradePoint::from_tenths(10);
    std::optional<std::string> answer_text;
    int word_count = 0;
    double fk_grade = 0.0;
    int rule_misstatements = 0;
    int case_hallucinations = 0;
    int case_misstatements = 0;
    int cases_cited = 0;
    std::optional<int> permission;
    std::optional<int> helpfulness;
    std::optional<bool> prior_llm_training;

    int issues_missed() const;
    // NA counts as zero.
    int total_score() const;
};

// Throws ValidationError describing the first violated invariant.
void validate_record(const ExamRecord& record, const RubricConfig& rubric = {});

struct Support {
    double y_min = 1.0;
    double y_max = 4.3;
};

class TrialDataset {
public:
    TrialDataset(std::vector<ExamRecord> records, RubricConfig rubric = {});

    const std::vector<ExamRecord>& records() const { return records_; }
    const RubricConfig& rubric() const { return rubric_; }
    Support support() const { return support_; }
    std::size_t size() const { return records_.size(); }
    std::size_t count(Arm arm) const;
    std::vector<const ExamRecord*> arm_records(Arm arm) const;

private:
    std::vector<ExamRecord> records_;
    RubricConfig rubric_;
    Support support_;
};

inline constexpr std::array<std::string_view, 21> kCsvColumns{
    "unit_id", "arm", "adopted",
    "issue1_spotted", "issue2_spotted", "issue3_spotted", "issue4_spotted",
    "issue1_score", "issue2_score", "issue3_score", "issue4_score",
    "grade_point", "word_count", "fk_grade", "rule_misstatements",
    "case_hallucinations", "case_misstatements", "cases_cited",
    "permission", "helpfulness", "prior_llm_training"};

TrialDataset parse_dataset(std::istream& in, const GradeScale& scale = GradeScale::standard(),
                           const RubricConfig& rubric = {});
TrialDataset load_dataset(const std::string& path, const GradeScale& scale = GradeScale::standard(),
                          const RubricConfig& rubric = {});

// Canonical CSV: fixed column order, booleans as 0/1, "NA" for unspotted
// issue scores, fk_grade with up to 17 significant digits.
void write_dataset(std::ostream& out, const TrialDataset& dataset);
std::string serialize_dataset(const TrialDataset& dataset);

}  // namespace pstrat
