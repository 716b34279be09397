#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gaitsense {

inline constexpr std::size_t kRawWidth = 16;
inline constexpr std::size_t kRawHeight = 25;
inline constexpr std::size_t kRawPixels = kRawWidth * kRawHeight;
inline constexpr int kSampleRate = 60;
inline constexpr std::size_t kMaxRepairableGap = 30;

enum class Foot { Left, Right };
enum class Routine { Straight, RightTurning, LeftTurning };
enum class Cohort { Patient, Healthy };

char foot_letter(Foot foot);
std::string_view routine_token(Routine routine);
Routine parse_routine(std::string_view token);
std::string_view cohort_token(Cohort cohort);
Cohort parse_cohort(std::string_view token);

// Six-axis IMU reading: acceleration in g, angular velocity in deg/s.
struct ImuReading {
    double acc_x = 0, acc_y = 0, acc_z = 0;
    double gyro_x = 0, gyro_y = 0, gyro_z = 0;

    std::array<double, 6> as_array() const { return {acc_x, acc_y, acc_z, gyro_x, gyro_y, gyro_z}; }
    static ImuReading from_array(const std::array<double, 6>& v) {
        return {v[0], v[1], v[2], v[3], v[4], v[5]};
    }
    bool operator==(const ImuReading&) const = default;
};

// One frame of one shoe. Pressure is row-major, 25 rows (heel to toe) of 16
// sensors.
struct ShoeSample {
    std::int64_t t_index = 0;
    std::vector<double> pressure;
    ImuReading fore_imu;
    ImuReading hind_imu;

    bool operator==(const ShoeSample&) const = default;
};

using SampleStream = std::vector<ShoeSample>;

// MRC grade tokens "3-" .. "5-" and their numeric strength.
double mrc_numeric(std::string_view grade);
bool is_mrc_grade(std::string_view grade);
// Numeric values of the seven grades, ascending.
const std::array<double, 7>& mrc_scale();
const std::array<std::string_view, 7>& mrc_tokens();

inline constexpr double kStrengthMin = 2.67;
inline constexpr double kStrengthMax = 4.67;

struct SubjectLabel {
    Cohort cohort = Cohort::Healthy;
    std::optional<std::string> mrc_a;
    std::optional<std::string> mrc_b;

    // Mean of the two physicians' numeric grades; present for patients only.
    std::optional<double> truth() const;

    static SubjectLabel healthy() { return {}; }
    static SubjectLabel patient(std::string grade_a, std::string grade_b);

    bool operator==(const SubjectLabel&) const = default;
};

struct TestRecording {
    std::string subject_id;
    Routine routine = Routine::Straight;
    SubjectLabel label;
    SampleStream left;
    SampleStream right;
    int sample_rate = kSampleRate;

    const SampleStream& stream(Foot foot) const { return foot == Foot::Left ? left : right; }
    SampleStream& stream(Foot foot) { return foot == Foot::Left ? left : right; }

    bool operator==(const TestRecording&) const = default;
};

TestRecording parse_recording(std::istream& in);
TestRecording parse_recording(const std::filesystem::path& path);

// Canonical text form: header, then frames ordered by t, left before right.
void write_recording(std::ostream& out, const TestRecording& recording);
void write_recording(const std::filesystem::path& path, const TestRecording& recording);

// Fills every missing t_index between the first and last sample by linear
// interpolation of pressure and both IMUs. Throws GapError for a gap longer
// than max_gap frames.
SampleStream repair_gaps(const SampleStream& stream, std::size_t max_gap = kMaxRepairableGap);

// Same, but the result must cover [first, last]. A missing first or last frame
// has no bracketing sample and is reported as a boundary GapError.
SampleStream repair_gaps(const SampleStream& stream, std::int64_t first, std::int64_t last,
                         std::size_t max_gap = kMaxRepairableGap);

// Trims both feet to their common t_index window.
void synchronize(TestRecording& recording);

// repair_gaps on both feet, then synchronize.
TestRecording repaired(const TestRecording& recording, std::size_t max_gap = kMaxRepairableGap);

}  // namespace gaitsense
