#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "gaitsense/error.hpp"
#include "gaitsense/statistics.hpp"
#include "support/formula_suite.hpp"

using namespace gaitsense;

TEST_CASE("constant series") {
    const std::vector<double> s(9, 4.0);
    const auto st = series_statistics(s);
    CHECK(st[stat::kRange] == 0.0);
    CHECK(st[stat::kSD] == 0.0);
    CHECK(st[stat::kSkewness] == 0.0);
    CHECK(st[stat::kKurtosis] == 0.0);
    CHECK(st[stat::kPeaks] == 0.0);
    CHECK(st[stat::kEntropy] == 0.0);
}

TEST_CASE("symmetric ramp") {
    const std::vector<double> s = {1, 2, 3, 4, 5};
    const auto st = series_statistics(s);
    CHECK(st[stat::kMean] == 3.0);
    CHECK(st[stat::kMedian] == 3.0);
    CHECK(st[stat::kSkewness] == doctest::Approx(0.0));
    CHECK(st[stat::kSD] == doctest::Approx(std::sqrt(2.0)));
    CHECK(st[stat::kCV] == doctest::Approx(std::sqrt(2.0) / 3.0));
    CHECK(st[stat::kKurtosis] == doctest::Approx(1.7));
}

TEST_CASE("peaks and valleys need 5% prominence") {
    const std::vector<double> s = {0, 10, 0, 10.2, 9.9, 10.3, 0};
    // The dip 10.2 -> 9.9 -> 10.3 is too shallow to split a peak.
    CHECK(count_peaks(s) == 2);
    CHECK(count_valleys(s) == 1);
    CHECK(count_peaks(std::vector<double>{1, 2}) == 0);
    const std::vector<double> plateau = {0, 5, 5, 0};
    CHECK(count_peaks(plateau) == 0);
}

TEST_CASE("median of even and odd lengths") {
    CHECK(median(std::vector<double>{3, 1, 2}) == 2.0);
    CHECK(median(std::vector<double>{4, 1, 3, 2}) == 2.5);
}

TEST_CASE("statistics need two values") {
    CHECK_THROWS_AS(series_statistics(std::vector<double>{1.0}), DegenerateInputError);
}

TEST_CASE("random series match the direct-summation oracle") {
    const auto r = oracle::check_step_statistics(41, 100);
    INFO(r.first_mismatch);
    CHECK(r.mismatches == 0);
}

TEST_CASE("mean of a constant series is exact") {
    for (double c : {0.1, -3.7, 1e-9, 123.456}) {
        for (std::size_t n : {3u, 7u, 29u, 113u}) {
            const std::vector<double> s(n, c);
            const auto st = series_statistics(s);
            CHECK(st[stat::kMean] == c);
            CHECK(st[stat::kSD] == 0.0);
        }
    }
}
