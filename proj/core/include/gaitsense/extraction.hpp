#pragma once

#include <string>
#include <vector>

#include "gaitsense/feature_table.hpp"
#include "gaitsense/frame_features.hpp"
#include "gaitsense/recording.hpp"
#include "gaitsense/segmentation.hpp"

namespace gaitsense {

// Intermediate products of one recording, kept for inspection and plotting.
struct TestAnalysis {
    TestRecording recording;  // gap-repaired and synchronized
    FeatureSeries left_frames;
    FeatureSeries right_frames;
    Segmentation left_segmentation;
    Segmentation right_segmentation;
    std::vector<double> whole;  // aligned with whole_feature_names()
    std::vector<std::string> warnings;
};

// Repair, synchronize, preprocess, frame/step/whole features.
TestAnalysis analyze_recording(const TestRecording& raw);

// Whole-feature vector only.
std::vector<double> extract_features(const TestRecording& raw);

TableRow table_row(const TestRecording& recording);

}  // namespace gaitsense
