#pragma once

#include <span>
#include <string>
#include <vector>

#include "gaitsense/matrix.hpp"
#include "gaitsense/statistics.hpp"
#include "gaitsense/step_features.hpp"

namespace gaitsense {

// Wst_1..Wst_12 over one step feature's values across a test's steps.
// Requires >= 2 steps.
SeriesStatistics whole_statistics(std::span<const double> step_series);

// 1 - min(|L|, |R|) / max(|L|, |R|); 0 when both are 0.
double symmetry(double left, double right);

// Names of every whole feature in vector order. Identical for every test.
const std::vector<std::string>& whole_feature_names();

// Whole-feature vector of one test, aligned with whole_feature_names().
// Throws DegenerateInputError when a foot has fewer than 2 usable steps.
std::vector<double> whole_features(const FootStepFeatures& left, const FootStepFeatures& right);

struct FeatureModality {
    bool imu = false;
    bool pressure = false;
    bool fusion = false;
};

// Sensing modalities a feature name draws on. Phase-duration features count as
// pressure since steps are cut from the total force.
FeatureModality feature_modality(std::string_view name);

// Per-column standardization fitted on a subset of rows.
class ZScore {
public:
    // Statistics from the rows of `fit` (typically training rows only).
    static ZScore fit(const Matrix& fit);

    // (x - mean) / sd per column; constant columns become all-zero.
    Matrix apply(const Matrix& m) const;
    // row[i] is a raw value of column cols[i].
    std::vector<double> apply_row(std::span<const double> row, std::span<const std::size_t> cols) const;

    const std::vector<double>& mean() const { return mean_; }
    const std::vector<double>& sd() const { return sd_; }
    bool is_constant(std::size_t col) const { return sd_[col] == 0.0; }
    std::size_t constant_count() const;

private:
    std::vector<double> mean_;
    std::vector<double> sd_;
};

}  // namespace gaitsense
