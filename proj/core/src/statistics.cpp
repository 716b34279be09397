#include "gaitsense/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "gaitsense/error.hpp"
#include "gaitsense/frame_features.hpp"

namespace gaitsense {

namespace {

constexpr std::array<std::string_view, kStatCount> kNames = {
    "Max", "Min", "Range", "Median", "Mean", "SD", "CV", "Entropy", "Peaks", "Valleys", "Skewness", "Kurtosis",
};

template <typename Value>
std::size_t count_prominent(std::span<const double> s, double min_prominence, Value value) {
    std::size_t count = 0;
    const std::size_t n = s.size();
    for (std::size_t p = 1; p + 1 < n; ++p) {
        const double v = value(s[p]);
        if (!(value(s[p - 1]) < v && v > value(s[p + 1]))) continue;
        // Lowest point between the peak and the nearest higher sample (or the
        // series edge) on each side.
        double left_min = v;
        for (std::size_t i = p; i-- > 0;) {
            const double w = value(s[i]);
            if (w > v) break;
            left_min = std::min(left_min, w);
        }
        double right_min = v;
        for (std::size_t i = p + 1; i < n; ++i) {
            const double w = value(s[i]);
            if (w > v) break;
            right_min = std::min(right_min, w);
        }
        if (v - std::max(left_min, right_min) >= min_prominence) ++count;
    }
    return count;
}

double min_prominence(std::span<const double> s, double fraction) {
    const auto [lo, hi] = std::minmax_element(s.begin(), s.end());
    return fraction * (*hi - *lo);
}

}  // namespace

const std::array<std::string_view, kStatCount>& statistic_names() { return kNames; }

double median(std::span<const double> values) {
    if (values.empty()) return 0.0;
    std::vector<double> v(values.begin(), values.end());
    std::sort(v.begin(), v.end());
    const auto n = v.size();
    return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

std::size_t count_peaks(std::span<const double> s, double fraction) {
    if (s.size() < 3) return 0;
    const double threshold = min_prominence(s, fraction);
    if (!(threshold > 0.0)) return 0;
    return count_prominent(s, threshold, [](double x) { return x; });
}

std::size_t count_valleys(std::span<const double> s, double fraction) {
    if (s.size() < 3) return 0;
    const double threshold = min_prominence(s, fraction);
    if (!(threshold > 0.0)) return 0;
    return count_prominent(s, threshold, [](double x) { return -x; });
}

SeriesStatistics series_statistics(std::span<const double> s) {
    if (s.size() < 2) throw DegenerateInputError("statistics need a series of at least 2 values");
    SeriesStatistics out{};
    const double n = static_cast<double>(s.size());
    const auto [lo, hi] = std::minmax_element(s.begin(), s.end());
    double sum = 0.0;
    for (double v : s) sum += v;
    // Rounding can push the mean of a constant series off its value.
    const double mean = std::clamp(sum / n, *lo, *hi);
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double v : s) {
        const double d = v - mean;
        const double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    // A constant series can leave rounding residue in m2; pin it to zero.
    const double sd = *hi > *lo ? std::sqrt(m2 / n) : 0.0;

    out[stat::kMax] = *hi;
    out[stat::kMin] = *lo;
    out[stat::kRange] = *hi - *lo;
    out[stat::kMedian] = median(s);
    out[stat::kMean] = mean;
    out[stat::kSD] = sd;
    out[stat::kCV] = mean != 0.0 ? sd / mean : 0.0;
    out[stat::kEntropy] = histogram_entropy(s, kSeriesEntropyBins);
    out[stat::kPeaks] = static_cast<double>(count_peaks(s));
    out[stat::kValleys] = static_cast<double>(count_valleys(s));
    if (sd > 0.0) {
        out[stat::kSkewness] = m3 / (n * sd * sd * sd);
        out[stat::kKurtosis] = m4 / (n * sd * sd * sd * sd);
    }
    return out;
}

}  // namespace gaitsense
