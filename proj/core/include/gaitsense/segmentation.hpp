#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

namespace gaitsense {

inline constexpr std::size_t kDebounceFrames = 6;
inline constexpr std::size_t kMinSteps = 3;

// Half-open frame window [begin, end) on the synchronized stream.
struct FrameWindow {
    std::size_t begin = 0;
    std::size_t end = 0;
    std::size_t length() const { return end - begin; }
    bool operator==(const FrameWindow&) const = default;
};

// One gait cycle of one foot: heel strike to the next heel strike.
struct StepSpan {
    std::size_t k = 0;
    std::size_t start_t = 0;       // heel strike
    std::size_t stance_end_t = 0;  // toe-off
    std::size_t end_t = 0;         // next heel strike (exclusive)
    std::vector<FrameWindow> double_support;

    std::size_t cycle_frames() const { return end_t - start_t; }
    std::size_t stance_frames() const { return stance_end_t - start_t; }
    std::size_t swing_frames() const { return end_t - stance_end_t; }
    std::size_t double_support_frames() const;
};

using ContactMask = std::vector<std::uint8_t>;

// Lloyd's algorithm on scalars. Centroids start at evenly spaced order
// statistics (min, median, max for k = 3) and are returned ascending.
std::vector<double> kmeans_1d(std::span<const double> values, std::size_t k = 3, std::size_t max_iterations = 100,
                              double tolerance = 1e-9);

// 0.9 * x1 + 0.1 * x2 of the ascending centroids.
double contact_threshold(std::span<const double> centroids);
double contact_threshold_for(std::span<const double> total_force);

// force > threshold, debounced: a state change only sticks once it has held
// for `min_run` consecutive frames.
ContactMask contact_mask(std::span<const double> total_force, double threshold,
                         std::size_t min_run = kDebounceFrames);

// Rising edge to rising edge; incomplete first and last cycles are dropped.
std::vector<StepSpan> steps_from_contact(const ContactMask& contact);

struct Segmentation {
    double threshold = 0.0;
    ContactMask contact;
    std::vector<StepSpan> steps;
};

// Threshold, mask and steps in one go. Throws DegenerateInputError when fewer
// than 3 complete steps are found.
Segmentation detect_steps(std::span<const double> total_force, double threshold);
Segmentation segment_foot(std::span<const double> total_force);

// Fills double_support on every step of both feet.
void label_phases(std::vector<StepSpan>& left_steps, std::vector<StepSpan>& right_steps, const ContactMask& left,
                  const ContactMask& right);

// Plot data: t,total_force,contact,step_index (-1 outside complete steps).
void write_segmentation_csv(std::ostream& out, std::span<const double> total_force, const Segmentation& seg);

}  // namespace gaitsense
