#include "gaitsense/extraction.hpp"

#include "gaitsense/preprocess.hpp"
#include "gaitsense/step_features.hpp"
#include "gaitsense/whole_features.hpp"

namespace gaitsense {

TestAnalysis analyze_recording(const TestRecording& raw) {
    TestAnalysis a;
    a.recording = repaired(raw);

    a.left_frames = to_series(frame_features(preprocess(a.recording.left)));
    a.right_frames = to_series(frame_features(preprocess(a.recording.right)));

    a.left_segmentation = segment_foot(a.left_frames[fdes::kTotalForce]);
    a.right_segmentation = segment_foot(a.right_frames[fdes::kTotalForce]);
    label_phases(a.left_segmentation.steps, a.right_segmentation.steps, a.left_segmentation.contact,
                 a.right_segmentation.contact);

    const BilateralSeries bilateral{&a.left_frames, &a.right_frames};
    auto left = step_features(Foot::Left, a.left_segmentation.steps, bilateral);
    auto right = step_features(Foot::Right, a.right_segmentation.steps, bilateral);
    for (auto* foot : {&left, &right})
        for (auto& w : foot->warnings) a.warnings.push_back(std::string(1, foot_letter(foot->foot)) + ": " + w);

    a.whole = whole_features(left, right);
    return a;
}

std::vector<double> extract_features(const TestRecording& raw) { return analyze_recording(raw).whole; }

TableRow table_row(const TestRecording& recording) {
    return {recording.subject_id, recording.routine, recording.label.cohort, recording.label.truth()};
}

}  // namespace gaitsense
