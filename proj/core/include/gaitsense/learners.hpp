#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gaitsense/matrix.hpp"

namespace gaitsense {

enum class Task { Classify, Regress };
enum class LearnerKind { DecisionTree, RandomForest, Knn, LogisticRegression, LinearRegressionSgd };

std::string_view learner_token(LearnerKind kind);
LearnerKind parse_learner(std::string_view token);
std::string_view task_token(Task task);

struct LearnerOptions {
    std::size_t max_depth = 8;
    std::size_t min_samples_split = 2;
    std::size_t trees = 100;
    std::size_t neighbors = 5;
    std::size_t epochs = 500;
    double learning_rate = 0.01;
    std::size_t num_classes = 2;
    std::uint64_t seed = 0;
};

// Uniform interface over the in-repo learners. Classification targets are
// class ids 0 .. num_classes-1 stored as doubles.
class Learner {
public:
    virtual ~Learner() = default;

    virtual void fit(const Matrix& x, std::span<const double> y) = 0;

    // Class id (classification) or value (regression) per row.
    std::vector<double> predict(const Matrix& x) const;

    // Class probabilities per row; each row sums to 1. Classification only.
    std::vector<std::vector<double>> predict_proba(const Matrix& x) const;

    // Non-negative per-feature importance from the last fit.
    virtual std::vector<double> feature_importances() const = 0;

    Task task() const { return task_; }
    bool fitted() const { return fitted_; }

protected:
    Learner(Task task, LearnerOptions options) : task_(task), options_(options) {}

    virtual std::vector<double> predict_values(const Matrix& x) const = 0;
    virtual std::vector<std::vector<double>> predict_probabilities(const Matrix& x) const = 0;

    void check_fit_input(const Matrix& x, std::span<const double> y);
    void check_predict_input(const Matrix& x) const;

    Task task_;
    LearnerOptions options_;
    bool fitted_ = false;
    std::size_t feature_count_ = 0;
};

std::unique_ptr<Learner> make_learner(LearnerKind kind, Task task, const LearnerOptions& options = {});

}  // namespace gaitsense
