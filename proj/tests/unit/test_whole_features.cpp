#include <doctest.h>

#include <algorithm>
#include <cmath>

#include <set>

#include "gaitsense/error.hpp"
#include "gaitsense/whole_features.hpp"
#include "support/formula_suite.hpp"

using namespace gaitsense;

TEST_CASE("symmetry coefficient") {
    CHECK(symmetry(3.0, 3.0) == 0.0);
    CHECK(symmetry(0.0, 5.0) == 1.0);
    CHECK(symmetry(3.0, 4.0) == doctest::Approx(0.25));
    CHECK(symmetry(0.0, 0.0) == 0.0);
    CHECK(symmetry(-3.0, 4.0) == doctest::Approx(0.25));
    CHECK(symmetry(2.0, 7.0) == symmetry(7.0, 2.0));
    CHECK(symmetry(2.0, 7.0) == doctest::Approx(symmetry(20.0, 70.0)));
}

TEST_CASE("whole statistics of short series") {
    const auto s = whole_statistics(std::vector<double>{2.0, 6.0});
    CHECK(s[stat::kMean] == 4.0);
    const auto same = whole_statistics(std::vector<double>{1.5, 1.5, 1.5});
    CHECK(same[stat::kSD] == 0.0);
    CHECK(same[stat::kRange] == 0.0);
    CHECK_THROWS_AS(whole_statistics(std::vector<double>{1.0}), DegenerateInputError);
}

TEST_CASE("whole feature schema") {
    const auto& names = whole_feature_names();
    CHECK(names.size() == 169248);
    CHECK(std::set<std::string>(names.begin(), names.end()).size() == names.size());
    CHECK(names.front() == "LPhaseCycle_Max");
    CHECK(names.back() == "BackGyroXyz_Kurtosis_Kurtosis_Symmetry");
    CHECK(std::find(names.begin(), names.end(), "RForeGyroY_MaxTime_RForeAccX_Median") != names.end());
}

TEST_CASE("feature modality tags") {
    CHECK(feature_modality("LForeAccX_Max_Mean").imu);
    CHECK_FALSE(feature_modality("LForeAccX_Max_Mean").pressure);
    CHECK(feature_modality("RImageHu3_SD_Max").pressure);
    CHECK(feature_modality("LPhaseStance_Mean").pressure);
    const auto f = feature_modality("RForeGyroY_MaxTime_RMatTotalForce_Median");
    CHECK(f.fusion);
    CHECK(f.imu);
    CHECK(f.pressure);
    CHECK(feature_modality("ForeGyroY_Max_Mean_Symmetry").imu);
}

TEST_CASE("z-score fitted on a subset") {
    Matrix m(3, 2);
    m(0, 0) = 2;
    m(1, 0) = 4;
    m(2, 0) = 10;
    for (std::size_t r = 0; r < 3; ++r) m(r, 1) = 7.0;
    const std::vector<std::size_t> fit_rows = {0, 1};
    const auto z = ZScore::fit(m.select_rows(fit_rows));
    CHECK(z.mean()[0] == 3.0);
    CHECK(z.sd()[0] == 1.0);
    const auto out = z.apply(m);
    CHECK(out(0, 0) == -1.0);
    CHECK(out(1, 0) == 1.0);
    CHECK(out(2, 0) == 7.0);
    CHECK(z.is_constant(1));
    CHECK(z.constant_count() == 1);
    for (std::size_t r = 0; r < 3; ++r) CHECK(out(r, 1) == 0.0);
    CHECK_THROWS_AS(ZScore::fit(Matrix(0, 2)), DegenerateInputError);
}

TEST_CASE("standardized fit rows have mean 0 and SD 1") {
    Matrix m(25, 3);
    for (std::size_t r = 0; r < 25; ++r)
        for (std::size_t c = 0; c < 3; ++c) m(r, c) = std::sin(1.7 * static_cast<double>(r * (c + 1))) * 40.0 + 5.0;
    const auto out = ZScore::fit(m).apply(m);
    for (std::size_t c = 0; c < 3; ++c) {
        double s = 0, ss = 0;
        for (std::size_t r = 0; r < 25; ++r) s += out(r, c);
        for (std::size_t r = 0; r < 25; ++r) ss += (out(r, c) - s / 25) * (out(r, c) - s / 25);
        CHECK(std::abs(s / 25) < 1e-9);
        CHECK(std::abs(std::sqrt(ss / 25) - 1.0) < 1e-9);
    }
}

TEST_CASE("whole statistics, symmetry and z-score match their oracles") {
    for (const auto& r : {oracle::check_whole_statistics(61, 100), oracle::check_symmetry(62, 100),
                          oracle::check_whole_vector(63, 5), oracle::check_zscore(64, 100)}) {
        INFO(r.family << ": " << r.first_mismatch);
        CHECK(r.mismatches == 0);
        CHECK(r.values > 0);
    }
}
