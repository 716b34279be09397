#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gaitsense/learners.hpp"
#include "gaitsense/matrix.hpp"

namespace gaitsense {

inline constexpr std::size_t kSelectionPortions = 5;
inline constexpr std::size_t kMaxSelected = 10;
inline constexpr double kMaxAbsCorrelation = 0.9;

// Rows available to feature selection. Built from training rows only; the
// selection API has no way to reach held-out rows.
struct TrainingSet {
    Matrix x;                          // z-scored training rows
    std::vector<double> y;             // class id or strength
    std::vector<std::string> groups;   // subject id per row
    std::vector<std::string> names;    // one per column of x
};

struct RankedFeature {
    std::string name;
    double importance = 0.0;
    bool operator==(const RankedFeature&) const = default;
};

struct SelectionResult {
    std::vector<RankedFeature> ranked;    // descending importance, ties by name
    std::vector<RankedFeature> selected;  // pick order
    LearnerKind selector = LearnerKind::DecisionTree;
};

double pearson(std::span<const double> a, std::span<const double> b);

// Mean importance over fits that each leave out one of five subject-disjoint
// portions. Sorted descending, ties broken by name.
std::vector<RankedFeature> embedded_importance(const TrainingSet& data, Task task, LearnerKind selector,
                                               std::uint64_t seed, const LearnerOptions& options = {});

// Greedy scan in rank order; a feature joins when |r| < 0.9 against every
// feature already picked. Stops at `cap`.
std::vector<RankedFeature> dedup_select(std::span<const RankedFeature> ranked, const TrainingSet& data,
                                        std::size_t cap = kMaxSelected);

// embedded_importance + dedup_select over features with positive importance.
SelectionResult select_features(const TrainingSet& data, Task task, LearnerKind selector, std::uint64_t seed,
                                std::size_t cap = kMaxSelected, const LearnerOptions& options = {});

}  // namespace gaitsense
