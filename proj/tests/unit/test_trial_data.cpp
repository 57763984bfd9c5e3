#include <doctest.h>

#include <sstream>

#include "pstrat/errors.hpp"
#include "pstrat/trial_data.hpp"

using namespace pstrat;

namespace {

const std::string kHeader =
    "unit_id,arm,adopted,issue1_spotted,issue2_spotted,issue3_spotted,issue4_spotted,issue1_score,issue2_score,"
    "issue3_score,issue4_score,grade_point,word_count,fk_grade,rule_misstatements,case_hallucinations,"
    "case_misstatements,cases_cited,permission,helpfulness,prior_llm_training\n";

TrialDataset parse(const std::string& body) {
    std::istringstream in(kHeader + body);
    return parse_dataset(in);
}

std::string error_of(const std::string& body) {
    try {
        parse(body);
    } catch (const ValidationError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("letter grades map onto the eleven-step scale") {
    const auto& scale = GradeScale::standard();
    CHECK(grade_to_points("D").value() == doctest::Approx(1.0));
    CHECK(grade_to_points("C-").value() == doctest::Approx(1.7));
    CHECK(grade_to_points("B").value() == doctest::Approx(3.0));
    CHECK(grade_to_points("A+").value() == doctest::Approx(4.3));
    CHECK(scale.entries().size() == 11);
    for (const auto& e : scale.entries()) {
        CHECK(scale.to_letter(grade_to_points(e.letter)) == e.letter);
    }
    CHECK_THROWS_AS(grade_to_points("E"), ValidationError);
    CHECK(scale.min_points() == 1.0);
    CHECK(scale.max_points() == doctest::Approx(4.3));
}

TEST_CASE("grade points must sit on the grid") {
    CHECK(GradePoint::parse("2.3").tenths() == 23);
    CHECK(GradePoint::parse("2.30").tenths() == 23);
    CHECK_THROWS_AS(GradePoint::parse("2.5"), ValidationError);
    CHECK_THROWS_AS(GradePoint::parse("0.0"), ValidationError);
    CHECK_THROWS_AS(GradePoint::parse("x"), ValidationError);
    CHECK(GradePoint::parse("3.7").to_string() == "3.7");
}

TEST_CASE("snap picks the nearest grid point, ties to the lower grade") {
    const auto& scale = GradeScale::standard();
    CHECK(scale.snap(0.2).tenths() == 10);
    CHECK(scale.snap(2.14).tenths() == 20);
    CHECK(scale.snap(2.15).tenths() == 20);  // halfway between 2.0 and 2.3
    CHECK(scale.snap(2.16).tenths() == 23);
    CHECK(scale.snap(9.0).tenths() == 43);
}

TEST_CASE("arm names and group numbers") {
    CHECK(parse_arm("NoAI") == Arm::NoAI);
    CHECK(parse_arm("2") == Arm::AIOnly);
    CHECK(parse_arm("AITrained") == Arm::AITrained);
    CHECK_THROWS_AS(parse_arm("4"), ValidationError);
}

TEST_CASE("NA and zero are different issue scores") {
    const auto d = parse("u1,AIOnly,1,1,0,1,1,0,NA,3,2,2.3,900,12.5,2,0,0,3,4,4,0\n");
    const auto& r = d.records().front();
    CHECK(r.issues[0].spotted);
    REQUIRE(r.issues[0].score.has_value());
    CHECK(*r.issues[0].score == 0);
    CHECK_FALSE(r.issues[1].spotted);
    CHECK_FALSE(r.issues[1].score.has_value());
    CHECK(r.issues_missed() == 1);
    CHECK(r.total_score() == 5);
    CHECK(r.grade_point.tenths() == 23);
    CHECK(r.adopted == true);
}

TEST_CASE("parse errors name the row and field") {
    CHECK(error_of("u1,AIOnly,1,1,1,1,1,1,1,1,1,2.5,900,12,2,0,0,3,,,\n").find("row 1, field grade_point") !=
          std::string::npos);
    CHECK(error_of("u1,AIOnly,1,1,1,1,1,1,1,1,1,2.3,lots,12,2,0,0,3,,,\n").find("row 1, field word_count") !=
          std::string::npos);
    CHECK(error_of("u1,AIOnly,1,1,1,1,1,1,1,1,1,2.3,900,12,2,0,0,3,,,\n"
                   "u2,AIOnly,1,1,1,1,1,,1,1,1,2.3,900,12,2,0,0,3,,,\n")
              .find("row 2, field issue1_score") != std::string::npos);
    CHECK(error_of("u1,Group9,1,1,1,1,1,1,1,1,1,2.3,900,12,2,0,0,3,,,\n").find("row 1, field arm") !=
          std::string::npos);
    CHECK(error_of("u1,AIOnly,1,1,1,1\n").find("row 1: expected 21 fields") != std::string::npos);
}

TEST_CASE("record invariants are enforced") {
    // score above the rubric maximum for issue 1 (max 2)
    CHECK(error_of("u1,AIOnly,1,1,1,1,1,3,1,1,1,2.3,900,12,2,0,0,3,,,\n").find("outside [0, 2]") != std::string::npos);
    // unspotted issue with a score
    CHECK(error_of("u1,AIOnly,1,0,1,1,1,1,1,1,1,2.3,900,12,2,0,0,3,,,\n").find("unspotted") != std::string::npos);
    // NoAI unit reporting adoption
    CHECK(error_of("u1,NoAI,1,1,1,1,1,1,1,1,1,2.3,900,12,2,0,0,3,,,\n").find("NoAI") != std::string::npos);
    // AI unit without adoption
    CHECK(error_of("u1,AITrained,,1,1,1,1,1,1,1,1,2.3,900,12,2,0,0,3,,,\n").find("adopted is required") !=
          std::string::npos);
    CHECK(error_of("u1,AIOnly,1,1,1,1,1,1,1,1,1,2.3,900,12,5,0,0,3,,,\n").find("rule_misstatements") !=
          std::string::npos);
    CHECK(error_of("u1,AIOnly,1,1,1,1,1,1,1,1,1,2.3,900,12,2,0,0,3,6,,\n").find("permission") != std::string::npos);
    CHECK(error_of("u1,AIOnly,1,1,1,1,1,1,1,1,1,2.3,900,12,2,0,0,3,,,\n"
                   "u1,AIOnly,0,1,1,1,1,1,1,1,1,2.3,900,12,2,0,0,3,,,\n")
              .find("duplicate unit_id") != std::string::npos);
    CHECK(error_of("") == "no records");
}

TEST_CASE("missing header column is reported") {
    std::istringstream in("unit_id,arm\nu1,NoAI\n");
    CHECK_THROWS_WITH_AS(parse_dataset(in), "header is missing column 'adopted'", ValidationError);
}

TEST_CASE("rubric maxima are configurable") {
    RubricConfig rubric{{3, 3, 3, 3}};
    std::istringstream in(kHeader + "u1,AIOnly,1,1,1,1,1,3,3,3,3,2.3,900,12,2,0,0,3,,,\n");
    const auto d = parse_dataset(in, GradeScale::standard(), rubric);
    CHECK(d.records().front().total_score() == 12);
    std::istringstream in2(kHeader + "u1,AIOnly,1,1,1,1,1,3,3,3,3,2.3,900,12,2,0,0,3,,,\n");
    CHECK_THROWS_AS(parse_dataset(in2), ValidationError);
}

TEST_CASE("answer text column is optional and quoted") {
    std::istringstream in(kHeader.substr(0, kHeader.size() - 1) + ",answer_text\n" +
                          "u1,NoAI,,1,1,1,1,1,1,1,1,2.3,3,12,2,0,0,3,,,,\"One, two \"\"three\"\".\"\n");
    const auto d = parse_dataset(in);
    REQUIRE(d.records().front().answer_text.has_value());
    CHECK(*d.records().front().answer_text == "One, two \"three\".");
    const auto text = serialize_dataset(d);
    std::istringstream again(text);
    CHECK(serialize_dataset(parse_dataset(again)) == text);
}

TEST_CASE("reference fixture loads with the expected arm sizes") {
    const auto d = load_dataset(std::string(PSTRAT_FIXTURES) + "/reference_trial.csv");
    CHECK(d.size() == 164);
    CHECK(d.count(Arm::NoAI) == 49);
    CHECK(d.count(Arm::AIOnly) == 57);
    CHECK(d.count(Arm::AITrained) == 58);
    SUBCASE("serialization round-trips byte for byte") {
        const auto text = serialize_dataset(d);
        std::istringstream in(text);
        CHECK(serialize_dataset(parse_dataset(in)) == text);
    }
}

TEST_CASE("CRLF line endings and a BOM are accepted") {
    std::istringstream in("\xEF\xBB\xBF" + kHeader.substr(0, kHeader.size() - 1) + "\r\n" +
                          "u1,NoAI,,1,1,1,1,1,1,1,1,2.3,900,12,2,0,0,3,,,\r\n");
    CHECK(parse_dataset(in).size() == 1);
}

TEST_CASE("missing input file") {
    CHECK_THROWS_WITH_AS(load_dataset("/nonexistent/x.csv"), "cannot open '/nonexistent/x.csv'", ValidationError);
}
