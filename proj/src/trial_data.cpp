#include "pstrat/trial_data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "pstrat/errors.hpp"

namespace pstrat {

std::string_view arm_name(Arm arm) {
    switch (arm) {
        case Arm::NoAI: return "NoAI";
        case Arm::AIOnly: return "AIOnly";
        case Arm::AITrained: return "AITrained";
    }
    return "?";
}

Arm parse_arm(std::string_view text) {
    if (text == "NoAI" || text == "1") return Arm::NoAI;
    if (text == "AIOnly" || text == "2") return Arm::AIOnly;
    if (text == "AITrained" || text == "3") return Arm::AITrained;
    throw ValidationError("unknown arm '" + std::string(text) + "' (expected NoAI, AIOnly or AITrained)");
}

// ---------------------------------------------------------------------------
// Grade scale

GradePoint GradePoint::from_tenths(int tenths) {
    if (!GradeScale::standard().on_grid(tenths)) {
        std::ostringstream os;
        os << "grade point " << tenths / 10 << '.' << tenths % 10 << " is not on the letter-grade grid";
        throw ValidationError(os.str());
    }
    return GradePoint(tenths);
}

GradePoint GradePoint::parse(std::string_view text) {
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value)) {
        throw ValidationError("grade point '" + std::string(text) + "' is not a number");
    }
    const double scaled = value * 10.0;
    const double rounded = std::round(scaled);
    if (std::abs(scaled - rounded) > 1e-6) {
        throw ValidationError("grade point " + std::string(text) + " is not on the letter-grade grid");
    }
    return from_tenths(static_cast<int>(rounded));
}

std::string GradePoint::to_string() const {
    std::ostringstream os;
    os << tenths_ / 10 << '.' << tenths_ % 10;
    return os.str();
}

const GradeScale& GradeScale::standard() {
    static const GradeScale scale({{"D", 10},  {"D+", 13}, {"C-", 17}, {"C", 20},  {"C+", 23}, {"B-", 27},
                                   {"B", 30},  {"B+", 33}, {"A-", 37}, {"A", 40},  {"A+", 43}});
    return scale;
}

GradeScale::GradeScale(std::vector<GradeEntry> entries) : entries_(std::move(entries)) {
    if (entries_.empty()) throw ValidationError("grade scale is empty");
    for (std::size_t i = 1; i < entries_.size(); ++i) {
        if (entries_[i].tenths <= entries_[i - 1].tenths) {
            throw ValidationError("grade scale must be strictly increasing in points");
        }
    }
}

GradePoint GradeScale::to_points(std::string_view letter) const {
    for (const auto& e : entries_) {
        if (e.letter == letter) return GradePoint(e.tenths);
    }
    throw ValidationError("unknown letter grade '" + std::string(letter) + "'");
}

const std::string& GradeScale::to_letter(GradePoint gp) const {
    for (const auto& e : entries_) {
        if (e.tenths == gp.tenths()) return e.letter;
    }
    throw ValidationError("grade point " + gp.to_string() + " has no letter on this scale");
}

bool GradeScale::on_grid(int tenths) const {
    return std::any_of(entries_.begin(), entries_.end(), [&](const GradeEntry& e) { return e.tenths == tenths; });
}

GradePoint GradeScale::snap(double points) const {
    const double target = points * 10.0;
    int best = entries_.front().tenths;
    double best_dist = std::abs(target - best);
    for (const auto& e : entries_) {
        const double d = std::abs(target - e.tenths);
        if (d < best_dist) {
            best = e.tenths;
            best_dist = d;
        }
    }
    return GradePoint(best);
}

GradePoint grade_to_points(std::string_view letter, const GradeScale& scale) { return scale.to_points(letter); }

// ---------------------------------------------------------------------------
// Records

int ExamRecord::issues_missed() const {
    return static_cast<int>(std::count_if(issues.begin(), issues.end(), [](const IssueScore& s) { return !s.spotted; }));
}

int ExamRecord::total_score() const {
    int total = 0;
    for (const auto& s : issues) total += s.score.value_or(0);
    return total;
}

void validate_record(const ExamRecord& r, const RubricConfig& rubric) {
    const std::string who = "unit '" + r.unit_id + "'";
    if (r.unit_id.empty()) throw ValidationError("unit_id is empty");
    if (r.arm == Arm::NoAI && r.adopted) throw ValidationError(who + ": adopted must be empty for the NoAI arm");
    if (r.arm != Arm::NoAI && !r.adopted) throw ValidationError(who + ": adopted is required for AI arms");
    for (std::size_t i = 0; i < r.issues.size(); ++i) {
        const auto& s = r.issues[i];
        const std::string issue = who + ": issue" + std::to_string(i + 1);
        if (s.max_score != rubric.max_scores[i]) throw ValidationError(issue + " max_score disagrees with rubric");
        if (!s.spotted && s.score) throw ValidationError(issue + " is unspotted but has a score (use NA)");
        if (s.spotted && !s.score) throw ValidationError(issue + " is spotted but its score is NA");
        if (s.score && (*s.score < 0 || *s.score > s.max_score)) {
            throw ValidationError(issue + " score " + std::to_string(*s.score) + " outside [0, " +
                                  std::to_string(s.max_score) + "]");
        }
    }
    if (!GradeScale::standard().on_grid(r.grade_point.tenths())) throw ValidationError(who + ": grade point off grid");
    if (r.word_count < 0) throw ValidationError(who + ": word_count is negative");
    if (!std::isfinite(r.fk_grade)) throw ValidationError(who + ": fk_grade is not finite");
    if (r.rule_misstatements < 0 || r.rule_misstatements > 4) throw ValidationError(who + ": rule_misstatements outside [0, 4]");
    if (r.case_hallucinations < 0 || r.case_misstatements < 0 || r.cases_cited < 0) {
        throw ValidationError(who + ": case counts must be nonnegative");
    }
    if (r.permission && (*r.permission < 1 || *r.permission > 5)) throw ValidationError(who + ": permission outside [1, 5]");
    if (r.helpfulness && (*r.helpfulness < 1 || *r.helpfulness > 5)) throw ValidationError(who + ": helpfulness outside [1, 5]");
}

TrialDataset::TrialDataset(std::vector<ExamRecord> records, RubricConfig rubric)
    : records_(std::move(records)), rubric_(rubric) {
    if (records_.empty()) throw ValidationError("no records");
    std::set<std::string> seen;
    for (const auto& r : records_) {
        validate_record(r, rubric_);
        if (!seen.insert(r.unit_id).second) throw ValidationError("duplicate unit_id '" + r.unit_id + "'");
        const double y = r.grade_point.value();
        if (y < support_.y_min || y > support_.y_max) throw ValidationError("grade point outside support");
    }
}

std::size_t TrialDataset::count(Arm arm) const {
    return static_cast<std::size_t>(
        std::count_if(records_.begin(), records_.end(), [arm](const ExamRecord& r) { return r.arm == arm; }));
}

std::vector<const ExamRecord*> TrialDataset::arm_records(Arm arm) const {
    std::vector<const ExamRecord*> out;
    for (const auto& r : records_) {
        if (r.arm == arm) out.push_back(&r);
    }
    return out;
}

// ---------------------------------------------------------------------------
// CSV

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(ch);
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    fields.push_back(std::move(cur));
    return fields;
}

std::string quote_csv(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out.push_back('"');
        out.push_back(ch);
    }
    out.push_back('"');
    return out;
}

class RowReader {
public:
    RowReader(const std::vector<std::string>& fields, const std::map<std::string, std::size_t>& index,
              std::size_t row)
        : fields_(fields), index_(index), row_(row) {}

    const std::string& raw(std::string_view column) const {
        return fields_.at(index_.at(std::string(column)));
    }

    [[noreturn]] void fail(std::string_view column, const std::string& what) const {
        throw ValidationError("row " + std::to_string(row_) + ", field " + std::string(column) + ": " + what);
    }

    std::optional<int> opt_int(std::string_view column) const {
        const auto& s = raw(column);
        if (s.empty()) return std::nullopt;
        int v = 0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || ptr != s.data() + s.size()) fail(column, "expected an integer, got '" + s + "'");
        return v;
    }

    int req_int(std::string_view column) const {
        auto v = opt_int(column);
        if (!v) fail(column, "value is required");
        return *v;
    }

    double req_double(std::string_view column) const {
        const auto& s = raw(column);
        if (s.empty()) fail(column, "value is required");
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || ptr != s.data() + s.size()) fail(column, "expected a number, got '" + s + "'");
        return v;
    }

    std::optional<bool> opt_bool(std::string_view column) const {
        const auto& s = raw(column);
        if (s.empty()) return std::nullopt;
        if (s == "1" || s == "true" || s == "TRUE" || s == "True" || s == "yes") return true;
        if (s == "0" || s == "false" || s == "FALSE" || s == "False" || s == "no") return false;
        fail(column, "expected a boolean, got '" + s + "'");
    }

private:
    const std::vector<std::string>& fields_;
    const std::map<std::string, std::size_t>& index_;
    std::size_t row_;
};

}  // namespace

TrialDataset parse_dataset(std::istream& in, const GradeScale& scale, const RubricConfig& rubric) {
    std::string line;
    auto next_line = [&]() -> bool {
        if (!std::getline(in, line)) return false;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return true;
    };
    // Header, skipping leading blank lines and a UTF-8 BOM.
    bool have_header = false;
    while (next_line()) {
        if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
        if (!line.empty()) {
            have_header = true;
            break;
        }
    }
    if (!have_header) throw ValidationError("no records");

    std::map<std::string, std::size_t> index;
    const auto header = split_csv_line(line);
    for (std::size_t i = 0; i < header.size(); ++i) index[header[i]] = i;
    for (auto column : kCsvColumns) {
        if (!index.count(std::string(column))) throw ValidationError("header is missing column '" + std::string(column) + "'");
    }
    const bool has_text = index.count("answer_text") > 0;

    std::vector<ExamRecord> records;
    std::size_t row = 0;
    while (next_line()) {
        if (line.empty()) continue;
        ++row;
        const auto fields = split_csv_line(line);
        if (fields.size() != header.size()) {
            throw ValidationError("row " + std::to_string(row) + ": expected " + std::to_string(header.size()) +
                                  " fields, got " + std::to_string(fields.size()));
        }
        RowReader rd(fields, index, row);
        ExamRecord r;
        r.unit_id = rd.raw("unit_id");
        if (r.unit_id.empty()) rd.fail("unit_id", "value is required");
        try {
            r.arm = parse_arm(rd.raw("arm"));
        } catch (const ValidationError& e) {
            rd.fail("arm", e.what());
        }
        r.adopted = rd.opt_bool("adopted");
        for (int i = 0; i < 4; ++i) {
            const std::string spotted_col = "issue" + std::to_string(i + 1) + "_spotted";
            const std::string score_col = "issue" + std::to_string(i + 1) + "_score";
            auto& issue = r.issues[static_cast<std::size_t>(i)];
            issue.max_score = rubric.max_scores[static_cast<std::size_t>(i)];
            const auto spotted = rd.opt_bool(spotted_col);
            if (!spotted) rd.fail(spotted_col, "value is required");
            issue.spotted = *spotted;
            const auto& score_raw = rd.raw(score_col);
            if (score_raw == "NA") {
                issue.score.reset();
            } else if (score_raw.empty()) {
                rd.fail(score_col, "use NA for an unspotted issue");
            } else {
                issue.score = rd.req_int(score_col);
            }
        }
        try {
            r.grade_point = GradePoint::parse(rd.raw("grade_point"));
            scale.to_letter(r.grade_point);
        } catch (const ValidationError& e) {
            rd.fail("grade_point", e.what());
        }
        r.word_count = rd.req_int("word_count");
        r.fk_grade = rd.req_double("fk_grade");
        r.rule_misstatements = rd.req_int("rule_misstatements");
        r.case_hallucinations = rd.req_int("case_hallucinations");
        r.case_misstatements = rd.req_int("case_misstatements");
        r.cases_cited = rd.req_int("cases_cited");
        r.permission = rd.opt_int("permission");
        r.helpfulness = rd.opt_int("helpfulness");
        r.prior_llm_training = rd.opt_bool("prior_llm_training");
        if (has_text && !rd.raw("answer_text").empty()) r.answer_text = rd.raw("answer_text");
        try {
            validate_record(r, rubric);
        } catch (const ValidationError& e) {
            throw ValidationError("row " + std::to_string(row) + ": " + e.what());
        }
        records.push_back(std::move(r));
    }
    return TrialDataset(std::move(records), rubric);
}

TrialDataset load_dataset(const std::string& path, const GradeScale& scale, const RubricConfig& rubric) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open '" + path + "'");
    return parse_dataset(in, scale, rubric);
}

void write_dataset(std::ostream& out, const TrialDataset& dataset) {
    auto boolean = [](std::optional<bool> b) -> std::string { return b ? (*b ? "1" : "0") : ""; };
    auto integer = [](std::optional<int> v) -> std::string { return v ? std::to_string(*v) : ""; };
    const bool has_text = std::any_of(dataset.records().begin(), dataset.records().end(),
                                      [](const ExamRecord& r) { return r.answer_text.has_value(); });
    for (std::size_t i = 0; i < kCsvColumns.size(); ++i) out << (i ? "," : "") << kCsvColumns[i];
    if (has_text) out << ",answer_text";
    out << '\n';
    for (const auto& r : dataset.records()) {
        out << quote_csv(r.unit_id) << ',' << arm_name(r.arm) << ',' << boolean(r.adopted);
        for (const auto& s : r.issues) out << ',' << (s.spotted ? "1" : "0");
        for (const auto& s : r.issues) out << ',' << (s.score ? std::to_string(*s.score) : "NA");
        char buf[64];
        auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, r.fk_grade);
        (void)ec;
        out << ',' << r.grade_point.to_string() << ',' << r.word_count << ',' << std::string(buf, ptr) << ','
            << r.rule_misstatements << ',' << r.case_hallucinations << ',' << r.case_misstatements << ','
            << r.cases_cited << ',' << integer(r.permission) << ',' << integer(r.helpfulness) << ','
            << boolean(r.prior_llm_training);
        if (has_text) out << ',' << quote_csv(r.answer_text.value_or(""));
        out << '\n';
    }
}

std::string serialize_dataset(const TrialDataset& dataset) {
    std::ostringstream os;
    write_dataset(os, dataset);
    return os.str();
}

}  // namespace pstrat
