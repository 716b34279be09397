#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "gaitsense/feature_table.hpp"
#include "gaitsense/learners.hpp"
#include "gaitsense/selection.hpp"

namespace gaitsense {

inline constexpr std::size_t kClassificationFolds = 5;

// Test combinations: which routines of a subject are evaluated together.
enum class Combo { Str, RT, LT, RTLT, All };

std::string_view combo_token(Combo combo);
Combo parse_combo(std::string_view token);
std::vector<Routine> combo_routines(Combo combo);

enum class ModalitySubset { Imu, Pressure, ImuPressure, All };

std::string_view modality_token(ModalitySubset subset);
ModalitySubset parse_modality(std::string_view token);
bool in_modality_subset(std::string_view feature_name, ModalitySubset subset);
// Throws SchemaError when no column survives the filter.
FeatureTable filter_modality(const FeatureTable& table, ModalitySubset subset);

struct ErrorMetrics {
    double mae = 0.0;
    double rmse = 0.0;
    double me = 0.0;
};

ErrorMetrics error_metrics(std::span<const double> predicted, std::span<const double> truth);

// Patient (class 1) is the positive class.
struct ClassMetrics {
    std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

ClassMetrics class_metrics(std::span<const int> predicted, std::span<const int> truth);

// Sums class probabilities over a subject's tests and takes the argmax. A tie
// goes to the higher class id, i.e. Patient.
int fuse_probabilities(std::span<const std::vector<double>> per_test);

inline constexpr int kHealthyClass = 0;
inline constexpr int kPatientClass = 1;

struct EvalConfig {
    Combo combo = Combo::All;
    LearnerKind selector = LearnerKind::DecisionTree;
    LearnerKind learner = LearnerKind::RandomForest;
    std::uint64_t seed = 0;
    std::size_t max_selected = kMaxSelected;
    LearnerOptions learner_options{};
    // Bypasses per-fold selection and uses these columns in every fold.
    std::optional<std::vector<std::string>> fixed_features;
};

struct FoldRecord {
    std::size_t index = 0;
    std::vector<std::string> train_subjects;
    std::vector<std::string> test_subjects;
    std::size_t train_rows = 0;
    std::size_t constant_columns = 0;
    std::vector<RankedFeature> selected;
};

struct SubjectPrediction {
    std::string subject_id;
    std::size_t fold = 0;
    Cohort cohort = Cohort::Healthy;
    std::optional<double> truth;
    std::vector<Routine> routines;
    // Classification: summed class probabilities and the fused class.
    std::vector<double> probability_sum;
    int predicted_class = -1;
    // Regression: clamped per-test predictions and their mean.
    std::vector<double> per_test;
    double predicted = 0.0;
};

struct EvalReport {
    Task task = Task::Classify;
    Combo combo = Combo::All;
    LearnerKind selector = LearnerKind::DecisionTree;
    LearnerKind learner = LearnerKind::RandomForest;
    std::uint64_t seed = 0;
    std::string modality = "all";
    std::size_t n_patients = 0;
    std::size_t n_healthy = 0;
    std::size_t n_test = 0;
    std::size_t n_sample = 0;
    std::vector<FoldRecord> folds;
    std::vector<SubjectPrediction> predictions;
    std::optional<ClassMetrics> classification;
    std::optional<ErrorMetrics> regression;
    std::vector<std::string> warnings;
};

// Healthy/patient classification with 5 subject-disjoint folds. Feature
// selection and z-scoring are refit inside every fold on its training rows.
EvalReport classify_subjects(const FeatureTable& table, const EvalConfig& config);

// Leave-one-subject-out strength regression over patient rows with truth.
EvalReport regress_strength(const FeatureTable& table, const EvalConfig& config);

struct AblationEntry {
    ModalitySubset subset = ModalitySubset::All;
    std::size_t feature_count = 0;
    EvalReport report;
};

std::vector<AblationEntry> modality_ablation(const FeatureTable& table, const EvalConfig& config,
                                             std::span<const ModalitySubset> subsets);

// Greedy forward search: each size adds the unused candidate that gives the
// lowest MAE (regression, leave-one-subject-out) or the highest F1
// (classification, 5 folds).
struct ForwardStep {
    std::size_t size = 0;
    std::string feature;
    ErrorMetrics error;
    ClassMetrics classes;
};

struct ForwardConfig {
    Task task = Task::Regress;
    LearnerKind learner = LearnerKind::RandomForest;
    Combo combo = Combo::All;
    std::uint64_t seed = 0;
    std::size_t max_size = 0;  // 0: every candidate
    LearnerOptions learner_options{};
};

std::vector<ForwardStep> forward_search(const FeatureTable& table, const std::vector<std::string>& candidates,
                                        const ForwardConfig& config);

nlohmann::ordered_json report_json(const EvalReport& report);
nlohmann::ordered_json ablation_json(std::span<const AblationEntry> entries);
nlohmann::ordered_json selection_json(const SelectionResult& result, std::size_t ranked_limit = 50);
nlohmann::ordered_json forward_json(std::span<const ForwardStep> steps, Task task);

void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& doc);
nlohmann::ordered_json read_json(const std::filesystem::path& path);

// One line per subject.
void write_predictions_csv(std::ostream& out, const EvalReport& report);
// Table VII style: size,feature,MAE,RMSE,ME (regression) or size,feature,accuracy,precision,F1.
void write_forward_csv(std::ostream& out, std::span<const ForwardStep> steps, Task task);

}  // namespace gaitsense
