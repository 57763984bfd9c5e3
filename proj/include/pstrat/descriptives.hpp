#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pstrat/trial_data.hpp"

namespace pstrat {

// Alternative hypothesis, stated for the difference (second - first).
enum class Tail { TwoSided, Greater, Less };
enum class TailKind { OneTailed, TwoTailed };

std::string_view tail_name(Tail tail);
Tail parse_tail(std::string_view text);
inline TailKind tail_kind(Tail tail) { return tail == Tail::TwoSided ? TailKind::TwoTailed : TailKind::OneTailed; }

struct ArmSummary {
    Arm arm = Arm::NoAI;
    std::string metric;
    std::size_t n = 0;
    double mean = 0.0;
    std::optional<double> sd;  // sample SD (n - 1); absent when n < 2
};

struct TestResult {
    double statistic = 0.0;
    std::optional<double> df;  // Welch only
    double p_value = 1.0;
    Tail alternative = Tail::TwoSided;
    double effect = 0.0;  // raw difference, second minus first

    TailKind tail() const { return tail_kind(alternative); }
};

// Numeric outcome columns that can be summarized and compared.
const std::vector<std::string>& metric_names();
bool is_metric(std::string_view name);
// Absent when the record has no value for an optional metric.
std::optional<double> metric_value(const ExamRecord& record, std::string_view metric);

ArmSummary summarize_values(Arm arm, std::string metric, std::span<const double> values);
ArmSummary summarize(const TrialDataset& dataset, Arm arm, std::string_view metric);

/*
 * Welch's unequal-variance t test of mean(b) against mean(a).
 *
 *   t  = (mean_b - mean_a) / sqrt(s_a^2/n_a + s_b^2/n_b)
 *   df = (s_a^2/n_a + s_b^2/n_b)^2 / [ (s_a^2/n_a)^2/(n_a-1) + (s_b^2/n_b)^2/(n_b-1) ]
 *
 * Tail probabilities come from the regularized incomplete beta function.
 * When both SDs are zero and the means agree, t = 0 and p = 1 for every
 * alternative; zero SDs with different means throw.
 */
TestResult welch_t_test(const ArmSummary& a, const ArmSummary& b, Tail tail);

/*
 * Pooled two-proportion z test of x2/n2 against x1/n1.
 *
 * The normal approximation is checked against exact enumeration under the
 * pooled null in the unit tests. At (3/10, 7/10) they differ by 0.021
 * one-sided and 0.042 two-sided; the tests allow 0.03 and 0.05.
 */
TestResult two_proportion_z_test(long x1, long n1, long x2, long n2, Tail tail);

// ---------------------------------------------------------------------------
// Text metrics
//
// Words: whitespace-delimited tokens with at least one alphanumeric character.
// Sentences: a '.', '!' or '?' followed by whitespace or end of text closes a
// sentence; trailing words with no terminator form one more sentence.
// Syllables: maximal runs of vowels (a e i o u y) in the lowercase letters of
// the word, minus one for a trailing silent 'e', never less than one.

struct TextCounts {
    std::size_t sentences = 0;
    std::size_t words = 0;
    std::size_t syllables = 0;
};

std::size_t syllable_count(std::string_view word);
TextCounts count_text(std::string_view text);
std::size_t word_count(std::string_view text);
// 0.39 (words/sentences) + 11.8 (syllables/words) - 15.59
double flesch_kincaid(std::string_view text);

// ---------------------------------------------------------------------------
// Adoption by grade-point quartile, pooled over the two AI arms.

struct QuartileCell {
    int quartile = 1;  // 1..4
    Arm arm = Arm::AIOnly;
    std::size_t numerator = 0;
    std::size_t denominator = 0;
    std::optional<double> rate;  // absent when the cell is empty
};

struct QuartileTable {
    double cut25 = 0.0;
    double cut50 = 0.0;
    double cut75 = 0.0;
    std::vector<QuartileCell> cells;  // ordered by quartile, then AIOnly before AITrained
};

// Values equal to a cut point fall in the lower bin: Q1 is y <= cut25,
// Q4 is y > cut75.
int quartile_of(double y, const QuartileTable& table);
QuartileTable adoption_by_quartile(const TrialDataset& dataset);

}  // namespace pstrat
