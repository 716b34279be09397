#include <doctest.h>

#include <algorithm>
#include <cmath>

#include <sstream>

#include "gaitsense/error.hpp"
#include "gaitsense/feature_table.hpp"

using namespace gaitsense;

namespace {

FeatureTable small_table() {
    FeatureTableBuilder b({"A", "B", "C"});
    b.add({"P01", Routine::Straight, Cohort::Patient, 3.5}, {1.0, 0.1, -2.5e-7});
    b.add({"H01", Routine::RightTurning, Cohort::Healthy, std::nullopt}, {2.0, 1.0 / 3.0, 1e20});
    return std::move(b).build();
}

}  // namespace

TEST_CASE("feature table CSV round trip is exact") {
    const auto t = small_table();
    std::stringstream s;
    write_feature_table(s, t);
    const auto text = s.str();
    CHECK(text.rfind("subject_id,routine,cohort,truth,A,B,C\n", 0) == 0);
    const auto back = read_feature_table(s);
    CHECK(back == t);
    std::stringstream again;
    write_feature_table(again, back);
    CHECK(again.str() == text);
}

TEST_CASE("column lookup and filtering") {
    const auto t = small_table();
    CHECK(t.column_index("B") == 1);
    CHECK_FALSE(t.find_column("Z").has_value());
    CHECK_THROWS_AS(t.column_index("Z"), SchemaError);
    const auto f = t.filter_columns([](const std::string& n) { return n != "B"; });
    CHECK(f.names() == std::vector<std::string>{"A", "C"});
    CHECK(f.values()(1, 1) == 1e20);
    const auto s = t.select_columns({"C", "A"});
    CHECK(s.values()(0, 1) == 1.0);
}

TEST_CASE("schema violations") {
    FeatureTableBuilder b({"A", "B"});
    CHECK_THROWS_AS(b.add({"P01", Routine::Straight, Cohort::Patient, 3.0}, {1.0}), SchemaError);
    std::stringstream bad("subject_id,routine,cohort,truth,A\nP01,str,patient,3.0,1.0,2.0\n");
    CHECK_THROWS(read_feature_table(bad));
}
