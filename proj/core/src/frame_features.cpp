#include "gaitsense/frame_features.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gaitsense/error.hpp"

namespace gaitsense {

namespace {

constexpr std::array<std::string_view, kFrameFeatureCount> kNames = {
    "MatTotalForce", "MatArea",       "MatAvgPressure", "MatCentreX",    "MatCentreY",     "MatCentreSpeedX",
    "MatCentreSpeedY", "MatCentreSpeed", "MatCentreDirection", "ImageMax", "ImageMin",     "ImageRange",
    "ImageMedian",   "ImageMean",     "ImageSD",        "ImageCV",       "ImageEntropy",   "ImageHu1",
    "ImageHu2",      "ImageHu3",      "ImageHu4",       "ImageHu5",      "ImageHu6",       "ImageHu7",
    "ForeAccX",      "ForeAccY",      "ForeAccZ",       "ForeAccXyz",    "ForeGyroX",      "ForeGyroY",
    "ForeGyroZ",     "ForeGyroXyz",   "BackAccX",       "BackAccY",      "BackAccZ",       "BackAccXyz",
    "BackGyroX",     "BackGyroY",     "BackGyroZ",      "BackGyroXyz",
};

double median_of(std::vector<double> v) {
    const auto n = v.size();
    const auto mid = v.begin() + static_cast<std::ptrdiff_t>(n / 2);
    std::nth_element(v.begin(), mid, v.end());
    if (n % 2 == 1) return *mid;
    const double upper = *mid;
    const double lower = *std::max_element(v.begin(), mid);
    return (lower + upper) / 2.0;
}

}  // namespace

const std::array<std::string_view, kFrameFeatureCount>& frame_feature_names() { return kNames; }

double area_threshold(std::span<const ProcessedFrame> frames) {
    if (frames.empty()) throw DegenerateInputError("area threshold needs at least one frame");
    double sum = 0.0;
    double lo = std::numeric_limits<double>::infinity();
    std::size_t count = 0;
    for (const auto& f : frames) {
        for (double p : f.pressure.values()) {
            sum += p;
            lo = std::min(lo, p);
        }
        count += f.pressure.size();
    }
    return 0.7 * (sum / static_cast<double>(count)) + 0.3 * lo;
}

std::array<double, kBiomechCount> biomech_features(const Grid& image, const FrameFeatureRow* prev, double delta) {
    double total = 0.0, mx = 0.0, my = 0.0;
    std::size_t area = 0;
    for (std::size_t y = 0; y < image.height(); ++y) {
        for (std::size_t x = 0; x < image.width(); ++x) {
            const double p = image.at(x, y);
            total += p;
            mx += static_cast<double>(x + 1) * p;
            my += static_cast<double>(y + 1) * p;
            if (p > delta) ++area;
        }
    }

    std::array<double, kBiomechCount> f{};
    f[fdes::kTotalForce] = total;
    f[fdes::kArea] = static_cast<double>(area);
    if (area > 0 && total > 0.0) {
        f[fdes::kAvgPressure] = total / static_cast<double>(area);
        f[fdes::kCentreX] = mx / total;
        f[fdes::kCentreY] = my / total;
    } else if (prev) {
        // Swing phase: no contact, the centre of pressure stays put.
        f[fdes::kCentreX] = prev->values[fdes::kCentreX];
        f[fdes::kCentreY] = prev->values[fdes::kCentreY];
    } else {
        f[fdes::kCentreX] = (static_cast<double>(image.width()) + 1.0) / 2.0;
        f[fdes::kCentreY] = (static_cast<double>(image.height()) + 1.0) / 2.0;
    }
    if (prev) {
        f[fdes::kCentreSpeedX] = f[fdes::kCentreX] - prev->values[fdes::kCentreX];
        f[fdes::kCentreSpeedY] = f[fdes::kCentreY] - prev->values[fdes::kCentreY];
        f[fdes::kCentreSpeed] = std::hypot(f[fdes::kCentreSpeedX], f[fdes::kCentreSpeedY]);
        f[fdes::kCentreDirection] = std::atan2(f[fdes::kCentreSpeedX], f[fdes::kCentreSpeedY]);
    }
    return f;
}

double histogram_entropy(std::span<const double> values, std::size_t bins) {
    if (values.empty() || bins == 0) return 0.0;
    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    const double lo = *lo_it, hi = *hi_it;
    if (!(hi > lo)) return 0.0;
    std::vector<std::size_t> counts(bins, 0);
    const double scale = static_cast<double>(bins) / (hi - lo);
    for (double v : values) {
        auto b = static_cast<std::size_t>((v - lo) * scale);
        counts[std::min(b, bins - 1)]++;
    }
    const double n = static_cast<double>(values.size());
    double h = 0.0;
    for (auto c : counts) {
        if (c == 0) continue;
        const double p = static_cast<double>(c) / n;
        h -= p * std::log2(p);
    }
    return h;
}

std::array<double, 7> hu_moments(const Grid& image) {
    double m00 = 0.0, m10 = 0.0, m01 = 0.0;
    for (std::size_t y = 0; y < image.height(); ++y) {
        for (std::size_t x = 0; x < image.width(); ++x) {
            const double p = image.at(x, y);
            m00 += p;
            m10 += static_cast<double>(x + 1) * p;
            m01 += static_cast<double>(y + 1) * p;
        }
    }
    if (!(m00 > 0.0)) return {};
    const double cx = m10 / m00, cy = m01 / m00;

    // Central moments of the pressure distribution normalized to unit mass,
    // which makes the invariants independent of overall intensity.
    double mu20 = 0, mu02 = 0, mu11 = 0, mu30 = 0, mu03 = 0, mu21 = 0, mu12 = 0;
    for (std::size_t y = 0; y < image.height(); ++y) {
        const double dy = static_cast<double>(y + 1) - cy;
        for (std::size_t x = 0; x < image.width(); ++x) {
            const double p = image.at(x, y);
            if (p == 0.0) continue;
            const double dx = static_cast<double>(x + 1) - cx;
            mu20 += dx * dx * p;
            mu02 += dy * dy * p;
            mu11 += dx * dy * p;
            mu30 += dx * dx * dx * p;
            mu03 += dy * dy * dy * p;
            mu21 += dx * dx * dy * p;
            mu12 += dx * dy * dy * p;
        }
    }
    const double n20 = mu20 / m00, n02 = mu02 / m00, n11 = mu11 / m00;
    const double n30 = mu30 / m00, n03 = mu03 / m00, n21 = mu21 / m00, n12 = mu12 / m00;

    const double a = n30 + n12;
    const double b = n21 + n03;
    const double c = n30 - 3.0 * n12;
    const double d = 3.0 * n21 - n03;
    std::array<double, 7> hu{};
    hu[0] = n20 + n02;
    hu[1] = (n20 - n02) * (n20 - n02) + 4.0 * n11 * n11;
    hu[2] = c * c + d * d;
    hu[3] = a * a + b * b;
    hu[4] = c * a * (a * a - 3.0 * b * b) + d * b * (3.0 * a * a - b * b);
    hu[5] = (n20 - n02) * (a * a - b * b) + 4.0 * n11 * a * b;
    hu[6] = d * a * (a * a - 3.0 * b * b) - c * b * (3.0 * a * a - b * b);
    return hu;
}

std::array<double, kImageFeatureCount> image_features(const Grid& image) {
    const auto values = image.values();
    std::array<double, kImageFeatureCount> f{};
    if (values.empty()) return f;

    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    const double n = static_cast<double>(values.size());
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / n);
    const double median = median_of({values.begin(), values.end()});

    f[0] = *hi_it;
    f[1] = *lo_it;
    f[2] = f[0] - f[1];
    f[3] = median;
    f[4] = mean;
    f[5] = sd;
    f[6] = median != 0.0 ? sd / median : 0.0;
    f[7] = histogram_entropy(values, kImageEntropyBins);
    const auto hu = hu_moments(image);
    std::copy(hu.begin(), hu.end(), f.begin() + 8);
    return f;
}

std::array<double, kImuFeatureCount> imu_features(const ImuReading& fore, const ImuReading& hind) {
    std::array<double, kImuFeatureCount> f{};
    std::size_t k = 0;
    for (const auto* imu : {&fore, &hind}) {
        f[k++] = imu->acc_x;
        f[k++] = imu->acc_y;
        f[k++] = imu->acc_z;
        f[k++] = std::sqrt(imu->acc_x * imu->acc_x + imu->acc_y * imu->acc_y + imu->acc_z * imu->acc_z);
        f[k++] = imu->gyro_x;
        f[k++] = imu->gyro_y;
        f[k++] = imu->gyro_z;
        f[k++] = std::sqrt(imu->gyro_x * imu->gyro_x + imu->gyro_y * imu->gyro_y + imu->gyro_z * imu->gyro_z);
    }
    return f;
}

std::vector<FrameFeatureRow> frame_features(std::span<const ProcessedFrame> frames) {
    const double delta = area_threshold(frames);
    std::vector<FrameFeatureRow> rows;
    rows.reserve(frames.size());
    for (const auto& frame : frames) {
        FrameFeatureRow row;
        row.t_index = frame.t_index;
        const auto bio = biomech_features(frame.pressure, rows.empty() ? nullptr : &rows.back(), delta);
        const auto img = image_features(frame.pressure);
        const auto imu = imu_features(frame.fore_imu, frame.hind_imu);
        auto it = std::copy(bio.begin(), bio.end(), row.values.begin());
        it = std::copy(img.begin(), img.end(), it);
        std::copy(imu.begin(), imu.end(), it);
        rows.push_back(row);
    }
    return rows;
}

FeatureSeries to_series(std::span<const FrameFeatureRow> rows) {
    FeatureSeries series;
    for (auto& s : series) s.resize(rows.size());
    for (std::size_t t = 0; t < rows.size(); ++t)
        for (std::size_t i = 0; i < kFrameFeatureCount; ++i) series[i][t] = rows[t].values[i];
    return series;
}

}  // namespace gaitsense
