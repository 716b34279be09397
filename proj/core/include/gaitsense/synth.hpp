#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gaitsense/recording.hpp"

namespace gaitsense {

struct GaitProfile {
    double cadence = 108.0;  // steps per minute, both feet together
    double stance_ratio = 0.62;
    double double_support_ratio = 0.24;  // both double-support windows of a cycle together
    double asymmetry = 0.0;              // 0 symmetric .. 1 severe
    Foot hemiplegic_side = Foot::Right;
    double noise_sd = 0.02;  // fraction of the peak sensor amplitude
    std::uint64_t seed = 0;
};

// Peak per-sensor pressure of an unimpaired foot, in raw counts.
inline constexpr double kSynthPeakPressure = 200.0;

struct StepTruth {
    std::int64_t strike = 0;   // first contact frame
    std::int64_t toe_off = 0;  // first frame after contact
    bool operator==(const StepTruth&) const = default;
};

struct RecordingTruth {
    std::vector<StepTruth> left;
    std::vector<StepTruth> right;
    const std::vector<StepTruth>& steps(Foot foot) const { return foot == Foot::Left ? left : right; }
};

struct SynthRecording {
    TestRecording recording;
    RecordingTruth truth;
};

// Paretic-side stance ratio and the contralateral one for a profile.
double paretic_stance_ratio(const GaitProfile& profile);
double nonparetic_stance_ratio(const GaitProfile& profile);

// Throws DomainError for inconsistent ratios or a duration below 10 s.
SynthRecording generate_recording(const GaitProfile& profile, Routine routine, double duration_s,
                                  const std::string& subject_id = "S01", const SubjectLabel& label = {});

// Maps asymmetry to numeric strength; must be monotone on [0.2, 0.8] with
// values inside [2.67, 4.67].
using StrengthMap = std::function<double(double)>;
double linear_strength_map(double asymmetry);

// Walk duration per routine: 10 m for Straight, 20 m around the square for
// the turning routines.
double routine_duration(Routine routine);

struct SynthSubject {
    std::string id;
    SubjectLabel label;
    GaitProfile profile;
    std::optional<double> strength;  // strength_map(asymmetry), patients only
};

struct CohortPlan {
    std::vector<SynthSubject> subjects;
    std::uint64_t seed = 0;

    SynthRecording recording(const SynthSubject& subject, Routine routine) const;
    std::size_t recording_count() const { return subjects.size() * 3; }
};

// Patients get asymmetry in [0.2, 0.8] snapped so that strength_map lands on
// a mean of two adjacent physician grades; healthy subjects get [0, 0.05].
CohortPlan generate_cohort(std::size_t n_patients, std::size_t n_healthy, const StrengthMap& strength_map,
                           std::uint64_t seed);

std::filesystem::path recording_file_name(const std::string& subject_id, Routine routine);

// Writes every recording plus truth.json into dir. Returns the recording paths.
std::vector<std::filesystem::path> write_cohort(const CohortPlan& plan, const std::filesystem::path& dir);

nlohmann::ordered_json truth_json(const SynthSubject& subject, Routine routine, const RecordingTruth& truth);

}  // namespace gaitsense
