#include "pstrat/descriptives.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pstrat/distributions.hpp"
#include "pstrat/errors.hpp"
#include "pstrat/resampling.hpp"

namespace pstrat {

std::string_view tail_name(Tail tail) {
    switch (tail) {
        case Tail::TwoSided: return "two-sided";
        case Tail::Greater: return "greater";
        case Tail::Less: return "less";
    }
    return "?";
}

Tail parse_tail(std::string_view text) {
    if (text == "two-sided" || text == "two" || text == "two_tailed") return Tail::TwoSided;
    if (text == "greater") return Tail::Greater;
    if (text == "less") return Tail::Less;
    throw ValidationError("unknown tail '" + std::string(text) + "' (expected two-sided, greater or less)");
}

const std::vector<std::string>& metric_names() {
    static const std::vector<std::string> names{
        "grade_point",        "issues_missed",       "total_score",        "word_count",
        "fk_grade",           "rule_misstatements",  "case_hallucinations", "case_misstatements",
        "cases_cited",        "permission",          "helpfulness"};
    return names;
}

bool is_metric(std::string_view name) {
    const auto& names = metric_names();
    return std::find(names.begin(), names.end(), name) != names.end();
}

std::optional<double> metric_value(const ExamRecord& r, std::string_view metric) {
    if (metric == "grade_point") return r.grade_point.value();
    if (metric == "issues_missed") return r.issues_missed();
    if (metric == "total_score") return r.total_score();
    if (metric == "word_count") return r.word_count;
    if (metric == "fk_grade") return r.fk_grade;
    if (metric == "rule_misstatements") return r.rule_misstatements;
    if (metric == "case_hallucinations") return r.case_hallucinations;
    if (metric == "case_misstatements") return r.case_misstatements;
    if (metric == "cases_cited") return r.cases_cited;
    if (metric == "permission") return r.permission ? std::optional<double>(*r.permission) : std::nullopt;
    if (metric == "helpfulness") return r.helpfulness ? std::optional<double>(*r.helpfulness) : std::nullopt;
    std::string valid;
    for (const auto& n : metric_names()) valid += (valid.empty() ? "" : ", ") + n;
    throw ValidationError("unknown metric '" + std::string(metric) + "'; valid metrics: " + valid);
}

ArmSummary summarize_values(Arm arm, std::string metric, std::span<const double> values) {
    if (values.empty()) {
        throw ValidationError("arm " + std::string(arm_name(arm)) + " has no values for metric " + metric);
    }
    ArmSummary s;
    s.arm = arm;
    s.metric = std::move(metric);
    s.n = values.size();
    // Welford keeps the variance accurate for large-magnitude metrics such as word counts.
    double mean = 0.0;
    double m2 = 0.0;
    std::size_t k = 0;
    for (double v : values) {
        ++k;
        const double delta = v - mean;
        mean += delta / static_cast<double>(k);
        m2 += delta * (v - mean);
    }
    s.mean = mean;
    if (s.n >= 2) s.sd = std::sqrt(std::max(0.0, m2 / static_cast<double>(s.n - 1)));
    return s;
}

ArmSummary summarize(const TrialDataset& dataset, Arm arm, std::string_view metric) {
    std::vector<double> values;
    for (const auto& r : dataset.records()) {
        if (r.arm != arm) continue;
        if (auto v = metric_value(r, metric)) values.push_back(*v);
    }
    return summarize_values(arm, std::string(metric), values);
}

namespace {

double tail_p(Tail tail, double upper_of_stat, double lower_of_stat) {
    switch (tail) {
        case Tail::Greater: return upper_of_stat;
        case Tail::Less: return lower_of_stat;
        case Tail::TwoSided: return std::min(1.0, 2.0 * std::min(upper_of_stat, lower_of_stat));
    }
    return 1.0;
}

}  // namespace

TestResult welch_t_test(const ArmSummary& a, const ArmSummary& b, Tail tail) {
    if (a.n < 2 || b.n < 2 || !a.sd || !b.sd) {
        throw ValidationError("welch_t_test needs at least two observations per arm");
    }
    TestResult out;
    out.alternative = tail;
    out.effect = b.mean - a.mean;
    const double va = *a.sd * *a.sd / static_cast<double>(a.n);
    const double vb = *b.sd * *b.sd / static_cast<double>(b.n);
    if (va + vb == 0.0) {
        if (a.mean != b.mean) throw ValidationError("welch_t_test: both arms have zero variance and different means");
        out.statistic = 0.0;
        out.p_value = 1.0;
        return out;
    }
    out.statistic = out.effect / std::sqrt(va + vb);
    const double df = (va + vb) * (va + vb) /
                      (va * va / static_cast<double>(a.n - 1) + vb * vb / static_cast<double>(b.n - 1));
    out.df = df;
    out.p_value = tail_p(tail, dist::student_t_upper(out.statistic, df), dist::student_t_cdf(out.statistic, df));
    return out;
}

TestResult two_proportion_z_test(long x1, long n1, long x2, long n2, Tail tail) {
    if (n1 < 1 || n2 < 1 || x1 < 0 || x2 < 0 || x1 > n1 || x2 > n2) {
        throw ValidationError("two_proportion_z_test: need 0 <= x <= n and n >= 1 in both groups");
    }
    const double p1 = static_cast<double>(x1) / static_cast<double>(n1);
    const double p2 = static_cast<double>(x2) / static_cast<double>(n2);
    const double pooled = static_cast<double>(x1 + x2) / static_cast<double>(n1 + n2);
    if (pooled <= 0.0 || pooled >= 1.0) throw ValidationError("degenerate proportions");
    const double se = std::sqrt(pooled * (1.0 - pooled) * (1.0 / static_cast<double>(n1) + 1.0 / static_cast<double>(n2)));
    TestResult out;
    out.alternative = tail;
    out.effect = p2 - p1;
    out.statistic = out.effect / se;
    out.p_value = tail_p(tail, dist::normal_upper(out.statistic), dist::normal_cdf(out.statistic));
    return out;
}

// ---------------------------------------------------------------------------

int quartile_of(double y, const QuartileTable& t) {
    if (y <= t.cut25) return 1;
    if (y <= t.cut50) return 2;
    if (y <= t.cut75) return 3;
    return 4;
}

QuartileTable adoption_by_quartile(const TrialDataset& dataset) {
    std::vector<double> pooled;
    for (const auto& r : dataset.records()) {
        if (r.arm != Arm::NoAI) pooled.push_back(r.grade_point.value());
    }
    if (pooled.empty()) throw ValidationError("adoption_by_quartile: both AI arms are empty");
    std::sort(pooled.begin(), pooled.end());
    QuartileTable table;
    table.cut25 = percentile(pooled, 0.25);
    table.cut50 = percentile(pooled, 0.50);
    table.cut75 = percentile(pooled, 0.75);

    for (int q = 1; q <= 4; ++q) {
        for (Arm arm : {Arm::AIOnly, Arm::AITrained}) {
            QuartileCell cell;
            cell.quartile = q;
            cell.arm = arm;
            for (const auto& r : dataset.records()) {
                if (r.arm != arm || quartile_of(r.grade_point.value(), table) != q) continue;
                ++cell.denominator;
                if (r.adopted.value_or(false)) ++cell.numerator;
            }
            if (cell.denominator > 0) {
                cell.rate = static_cast<double>(cell.numerator) / static_cast<double>(cell.denominator);
            }
            table.cells.push_back(cell);
        }
    }
    return table;
}

}  // namespace pstrat
