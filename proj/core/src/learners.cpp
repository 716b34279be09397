#include "gaitsense/learners.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gaitsense/error.hpp"
#include "gaitsense/rng.hpp"

namespace gaitsense {

std::string_view learner_token(LearnerKind kind) {
    switch (kind) {
        case LearnerKind::DecisionTree: return "dt";
        case LearnerKind::RandomForest: return "rf";
        case LearnerKind::Knn: return "knn";
        case LearnerKind::LogisticRegression: return "lr";
        case LearnerKind::LinearRegressionSgd: return "sgd";
    }
    return "dt";
}

LearnerKind parse_learner(std::string_view token) {
    if (token == "dt") return LearnerKind::DecisionTree;
    if (token == "rf") return LearnerKind::RandomForest;
    if (token == "knn") return LearnerKind::Knn;
    if (token == "lr") return LearnerKind::LogisticRegression;
    if (token == "sgd" || token == "sr") return LearnerKind::LinearRegressionSgd;
    throw DomainError("unknown learner '" + std::string(token) + "' (expected dt, rf, knn, lr or sgd)");
}

std::string_view task_token(Task task) { return task == Task::Classify ? "classify" : "regress"; }

void Learner::check_fit_input(const Matrix& x, std::span<const double> y) {
    if (x.rows() == 0) throw DegenerateInputError("cannot fit on zero rows");
    if (x.rows() != y.size()) throw SchemaError("feature rows and targets differ in count");
    if (task_ == Task::Classify) {
        for (double v : y) {
            if (v < 0 || v >= static_cast<double>(options_.num_classes) || v != std::floor(v)) {
                throw DomainError("classification target outside 0.." + std::to_string(options_.num_classes - 1));
            }
        }
    }
    feature_count_ = x.cols();
}

void Learner::check_predict_input(const Matrix& x) const {
    if (!fitted_) throw Error("predict called before fit");
    if (x.cols() != feature_count_) {
        throw SchemaError("model fitted on " + std::to_string(feature_count_) + " features, got " +
                          std::to_string(x.cols()));
    }
}

std::vector<double> Learner::predict(const Matrix& x) const {
    check_predict_input(x);
    if (task_ == Task::Regress) return predict_values(x);
    const auto proba = predict_probabilities(x);
    std::vector<double> out(proba.size());
    for (std::size_t r = 0; r < proba.size(); ++r) {
        const auto best = std::max_element(proba[r].begin(), proba[r].end());
        out[r] = static_cast<double>(best - proba[r].begin());
    }
    return out;
}

std::vector<std::vector<double>> Learner::predict_proba(const Matrix& x) const {
    check_predict_input(x);
    if (task_ != Task::Classify) throw DomainError("class probabilities requested from a regression model");
    return predict_probabilities(x);
}

namespace {

void normalize(std::vector<double>& v) {
    const double total = std::accumulate(v.begin(), v.end(), 0.0);
    if (total > 0.0)
        for (auto& x : v) x /= total;
}

// CART tree shared by the decision tree and the forest.
class CartTree {
public:
    struct Params {
        Task task = Task::Classify;
        std::size_t num_classes = 2;
        std::size_t max_depth = 8;
        std::size_t min_samples_split = 2;
        std::size_t max_features = 0;  // 0: all features at every node
    };

    void fit(const Matrix& x, std::span<const double> y, std::vector<std::size_t> samples, const Params& params,
             Rng* rng) {
        params_ = params;
        nodes_.clear();
        importance_.assign(x.cols(), 0.0);
        feature_order_.resize(x.cols());
        std::iota(feature_order_.begin(), feature_order_.end(), std::size_t{0});
        build(x, y, samples, 0, rng);
        normalize(importance_);
    }

    const std::vector<double>& leaf_value(std::span<const double> row) const {
        std::size_t n = 0;
        while (nodes_[n].feature >= 0) {
            n = row[static_cast<std::size_t>(nodes_[n].feature)] <= nodes_[n].threshold ? nodes_[n].left
                                                                                        : nodes_[n].right;
        }
        return nodes_[n].value;
    }

    const std::vector<double>& importances() const { return importance_; }

private:
    struct Node {
        long feature = -1;
        double threshold = 0.0;
        std::size_t left = 0;
        std::size_t right = 0;
        std::vector<double> value;
    };

    struct Split {
        long feature = -1;
        double threshold = 0.0;
        double gain = 0.0;
        double margin = 0.0;  // gap at the threshold over the node's value range
    };

    // n * impurity of a sample set.
    double impurity(std::span<const double> y, const std::vector<std::size_t>& samples) const {
        const double n = static_cast<double>(samples.size());
        if (params_.task == Task::Classify) {
            std::vector<double> counts(params_.num_classes, 0.0);
            for (auto s : samples) counts[static_cast<std::size_t>(y[s])] += 1.0;
            double sq = 0.0;
            for (double c : counts) sq += c * c;
            return n - sq / n;
        }
        double sum = 0.0, ss = 0.0;
        for (auto s : samples) {
            sum += y[s];
            ss += y[s] * y[s];
        }
        return std::max(0.0, ss - sum * sum / n);
    }

    std::vector<double> node_value(std::span<const double> y, const std::vector<std::size_t>& samples) const {
        if (params_.task == Task::Classify) {
            std::vector<double> p(params_.num_classes, 0.0);
            for (auto s : samples) p[static_cast<std::size_t>(y[s])] += 1.0;
            for (auto& v : p) v /= static_cast<double>(samples.size());
            return p;
        }
        double sum = 0.0;
        for (auto s : samples) sum += y[s];
        return {sum / static_cast<double>(samples.size())};
    }

    Split best_split(const Matrix& x, std::span<const double> y, const std::vector<std::size_t>& samples,
                     double parent, Rng* rng) {
        Split best;
        const std::size_t p = x.cols();
        std::size_t candidates = p;
        if (params_.max_features > 0 && params_.max_features < p && rng) {
            candidates = params_.max_features;
            for (std::size_t i = 0; i < candidates; ++i) {
                const auto j = i + static_cast<std::size_t>(rng->below(p - i));
                std::swap(feature_order_[i], feature_order_[j]);
            }
        }
        const std::size_t n = samples.size();
        pairs_.resize(n);
        std::vector<double> left_counts(params_.num_classes), total_counts(params_.num_classes, 0.0);
        double total_sum = 0.0, total_ss = 0.0;
        if (params_.task == Task::Classify) {
            for (auto s : samples) total_counts[static_cast<std::size_t>(y[s])] += 1.0;
        } else {
            for (auto s : samples) {
                total_sum += y[s];
                total_ss += y[s] * y[s];
            }
        }

        for (std::size_t ci = 0; ci < candidates; ++ci) {
            const std::size_t f = feature_order_[ci];
            const auto col = x.column(f);
            double lo = col[samples[0]], hi = lo;
            for (std::size_t i = 0; i < n; ++i) {
                const double v = col[samples[i]];
                pairs_[i] = {v, y[samples[i]]};
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
            if (!(hi > lo)) continue;
            std::sort(pairs_.begin(), pairs_.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

            std::fill(left_counts.begin(), left_counts.end(), 0.0);
            double ls = 0.0, lss = 0.0;
            for (std::size_t i = 0; i + 1 < n; ++i) {
                const double yi = pairs_[i].second;
                if (params_.task == Task::Classify) {
                    left_counts[static_cast<std::size_t>(yi)] += 1.0;
                } else {
                    ls += yi;
                    lss += yi * yi;
                }
                if (!(pairs_[i].first < pairs_[i + 1].first)) continue;
                const double nl = static_cast<double>(i + 1);
                const double nr = static_cast<double>(n - i - 1);
                double child = 0.0;
                if (params_.task == Task::Classify) {
                    double sql = 0.0, sqr = 0.0;
                    for (std::size_t c = 0; c < params_.num_classes; ++c) {
                        const double r = total_counts[c] - left_counts[c];
                        sql += left_counts[c] * left_counts[c];
                        sqr += r * r;
                    }
                    child = (nl - sql / nl) + (nr - sqr / nr);
                } else {
                    const double rs = total_sum - ls, rss = total_ss - lss;
                    child = std::max(0.0, lss - ls * ls / nl) + std::max(0.0, rss - rs * rs / nr);
                }
                const double gain = parent - child;
                const double margin = (pairs_[i + 1].first - pairs_[i].first) / (hi - lo);
                // Equal gains (common with few rows and many features) go to the
                // split with the widest gap, not to the lowest column index.
                const double tol = 1e-12 * std::max(1.0, parent);
                const bool wins = gain > best.gain + tol || (gain >= best.gain - tol && best.feature >= 0 &&
                                                              margin > best.margin);
                if (wins && gain > tol) {
                    best.gain = gain;
                    best.margin = margin;
                    best.feature = static_cast<long>(f);
                    double t = 0.5 * (pairs_[i].first + pairs_[i + 1].first);
                    if (!(t < pairs_[i + 1].first)) t = pairs_[i].first;
                    best.threshold = t;
                }
            }
        }
        return best;
    }

    std::size_t build(const Matrix& x, std::span<const double> y, const std::vector<std::size_t>& samples,
                      std::size_t depth, Rng* rng) {
        const std::size_t id = nodes_.size();
        nodes_.push_back({});
        nodes_[id].value = node_value(y, samples);
        const double parent = impurity(y, samples);
        if (depth >= params_.max_depth || samples.size() < params_.min_samples_split || parent <= 1e-12) return id;

        const Split split = best_split(x, y, samples, parent, rng);
        if (split.feature < 0) return id;

        std::vector<std::size_t> left, right;
        const auto col = x.column(static_cast<std::size_t>(split.feature));
        for (auto s : samples) (col[s] <= split.threshold ? left : right).push_back(s);
        if (left.empty() || right.empty()) return id;

        importance_[static_cast<std::size_t>(split.feature)] += split.gain;
        nodes_[id].feature = split.feature;
        nodes_[id].threshold = split.threshold;
        const std::size_t l = build(x, y, left, depth + 1, rng);
        const std::size_t r = build(x, y, right, depth + 1, rng);
        nodes_[id].left = l;
        nodes_[id].right = r;
        return id;
    }

    Params params_;
    std::vector<Node> nodes_;
    std::vector<double> importance_;
    std::vector<std::size_t> feature_order_;
    std::vector<std::pair<double, double>> pairs_;
};

class DecisionTree final : public Learner {
public:
    DecisionTree(Task task, LearnerOptions options) : Learner(task, options) {}

    void fit(const Matrix& x, std::span<const double> y) override {
        check_fit_input(x, y);
        std::vector<std::size_t> samples(x.rows());
        std::iota(samples.begin(), samples.end(), std::size_t{0});
        tree_.fit(x, y, std::move(samples),
                  {task_, options_.num_classes, options_.max_depth, options_.min_samples_split, 0}, nullptr);
        fitted_ = true;
    }

    std::vector<double> feature_importances() const override { return tree_.importances(); }

protected:
    std::vector<double> predict_values(const Matrix& x) const override {
        std::vector<double> out(x.rows());
        for (std::size_t r = 0; r < x.rows(); ++r) out[r] = tree_.leaf_value(x.row(r))[0];
        return out;
    }

    std::vector<std::vector<double>> predict_probabilities(const Matrix& x) const override {
        std::vector<std::vector<double>> out(x.rows());
        for (std::size_t r = 0; r < x.rows(); ++r) out[r] = tree_.leaf_value(x.row(r));
        return out;
    }

private:
    CartTree tree_;
};

class RandomForest final : public Learner {
public:
    RandomForest(Task task, LearnerOptions options) : Learner(task, options) {}

    void fit(const Matrix& x, std::span<const double> y) override {
        check_fit_input(x, y);
        const std::size_t n = x.rows();
        const auto mtry = std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(x.cols()))));
        trees_.assign(options_.trees, CartTree{});
        Rng master(options_.seed);
        for (std::size_t t = 0; t < trees_.size(); ++t) {
            Rng rng = master.fork(t);
            std::vector<std::size_t> boot(n);
            for (auto& s : boot) s = static_cast<std::size_t>(rng.below(n));
            std::sort(boot.begin(), boot.end());
            trees_[t].fit(x, y, std::move(boot),
                          {task_, options_.num_classes, options_.max_depth, options_.min_samples_split, mtry}, &rng);
        }
        fitted_ = true;
    }

    std::vector<double> feature_importances() const override {
        std::vector<double> imp(feature_count_, 0.0);
        for (const auto& t : trees_)
            for (std::size_t f = 0; f < imp.size(); ++f) imp[f] += t.importances()[f];
        normalize(imp);
        return imp;
    }

protected:
    std::vector<double> predict_values(const Matrix& x) const override {
        std::vector<double> out(x.rows(), 0.0);
        for (std::size_t r = 0; r < x.rows(); ++r) {
            const auto row = x.row(r);
            for (const auto& t : trees_) out[r] += t.leaf_value(row)[0];
            out[r] /= static_cast<double>(trees_.size());
        }
        return out;
    }

    std::vector<std::vector<double>> predict_probabilities(const Matrix& x) const override {
        std::vector<std::vector<double>> out(x.rows(), std::vector<double>(options_.num_classes, 0.0));
        for (std::size_t r = 0; r < x.rows(); ++r) {
            const auto row = x.row(r);
            for (const auto& t : trees_) {
                const auto& p = t.leaf_value(row);
                for (std::size_t c = 0; c < p.size(); ++c) out[r][c] += p[c];
            }
            for (auto& v : out[r]) v /= static_cast<double>(trees_.size());
        }
        return out;
    }

private:
    std::vector<CartTree> trees_;
};

class Knn final : public Learner {
public:
    Knn(Task task, LearnerOptions options) : Learner(task, options) {}

    void fit(const Matrix& x, std::span<const double> y) override {
        check_fit_input(x, y);
        x_ = x;
        y_.assign(y.begin(), y.end());
        fitted_ = true;
    }

    // Nearest neighbours carry no per-feature weight.
    std::vector<double> feature_importances() const override { return std::vector<double>(feature_count_, 0.0); }

protected:
    std::vector<std::size_t> neighbours(const Matrix& x, std::size_t r) const {
        std::vector<std::pair<double, std::size_t>> d(x_.rows());
        for (std::size_t i = 0; i < x_.rows(); ++i) {
            double s = 0.0;
            for (std::size_t c = 0; c < x.cols(); ++c) {
                const double diff = x(r, c) - x_(i, c);
                s += diff * diff;
            }
            d[i] = {s, i};
        }
        const std::size_t k = std::min(options_.neighbors, d.size());
        std::partial_sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(k), d.end());
        std::vector<std::size_t> out(k);
        for (std::size_t i = 0; i < k; ++i) out[i] = d[i].second;
        return out;
    }

    std::vector<double> predict_values(const Matrix& x) const override {
        std::vector<double> out(x.rows());
        for (std::size_t r = 0; r < x.rows(); ++r) {
            const auto nb = neighbours(x, r);
            double s = 0.0;
            for (auto i : nb) s += y_[i];
            out[r] = s / static_cast<double>(nb.size());
        }
        return out;
    }

    std::vector<std::vector<double>> predict_probabilities(const Matrix& x) const override {
        std::vector<std::vector<double>> out(x.rows(), std::vector<double>(options_.num_classes, 0.0));
        for (std::size_t r = 0; r < x.rows(); ++r) {
            const auto nb = neighbours(x, r);
            for (auto i : nb) out[r][static_cast<std::size_t>(y_[i])] += 1.0 / static_cast<double>(nb.size());
        }
        return out;
    }

private:
    Matrix x_;
    std::vector<double> y_;
};

// Shared by logistic (full-batch gradient descent) and linear (stochastic
// gradient descent) regression.
class LinearModel : public Learner {
public:
    using Learner::Learner;

    std::vector<double> feature_importances() const override {
        std::vector<double> imp(weights_.size());
        for (std::size_t i = 0; i < imp.size(); ++i) imp[i] = std::abs(weights_[i]);
        return imp;
    }

protected:
    double linear(const Matrix& x, std::size_t r) const {
        double z = bias_;
        for (std::size_t c = 0; c < weights_.size(); ++c) z += weights_[c] * x(r, c);
        return z;
    }

    std::vector<double> weights_;
    double bias_ = 0.0;
};

class LogisticRegression final : public LinearModel {
public:
    LogisticRegression(Task task, LearnerOptions options) : LinearModel(task, options) {
        if (task != Task::Classify || options.num_classes != 2) {
            throw DomainError("logistic regression supports binary classification only");
        }
    }

    void fit(const Matrix& x, std::span<const double> y) override {
        check_fit_input(x, y);
        const std::size_t n = x.rows(), p = x.cols();
        weights_.assign(p, 0.0);
        bias_ = 0.0;
        std::vector<double> grad(p);
        for (std::size_t epoch = 0; epoch < options_.epochs; ++epoch) {
            std::fill(grad.begin(), grad.end(), 0.0);
            double grad_b = 0.0;
            for (std::size_t r = 0; r < n; ++r) {
                const double err = sigmoid(linear(x, r)) - y[r];
                for (std::size_t c = 0; c < p; ++c) grad[c] += err * x(r, c);
                grad_b += err;
            }
            for (std::size_t c = 0; c < p; ++c) weights_[c] -= options_.learning_rate * grad[c] / static_cast<double>(n);
            bias_ -= options_.learning_rate * grad_b / static_cast<double>(n);
        }
        fitted_ = true;
    }

protected:
    static double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

    std::vector<double> predict_values(const Matrix& x) const override { return predict(x); }

    std::vector<std::vector<double>> predict_probabilities(const Matrix& x) const override {
        std::vector<std::vector<double>> out(x.rows());
        for (std::size_t r = 0; r < x.rows(); ++r) {
            const double p1 = sigmoid(linear(x, r));
            out[r] = {1.0 - p1, p1};
        }
        return out;
    }
};

class LinearRegressionSgd final : public LinearModel {
public:
    LinearRegressionSgd(Task task, LearnerOptions options) : LinearModel(task, options) {
        if (task != Task::Regress) throw DomainError("SGD linear regression is a regression learner");
    }

    void fit(const Matrix& x, std::span<const double> y) override {
        check_fit_input(x, y);
        const std::size_t n = x.rows(), p = x.cols();
        weights_.assign(p, 0.0);
        bias_ = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), std::size_t{0});
        Rng rng(options_.seed);
        for (std::size_t epoch = 0; epoch < options_.epochs; ++epoch) {
            rng.shuffle(std::span<std::size_t>(order));
            for (auto r : order) {
                const double err = linear(x, r) - y[r];
                for (std::size_t c = 0; c < p; ++c) weights_[c] -= options_.learning_rate * err * x(r, c);
                bias_ -= options_.learning_rate * err;
            }
        }
        fitted_ = true;
    }

protected:
    std::vector<double> predict_values(const Matrix& x) const override {
        std::vector<double> out(x.rows());
        for (std::size_t r = 0; r < x.rows(); ++r) out[r] = linear(x, r);
        return out;
    }

    std::vector<std::vector<double>> predict_probabilities(const Matrix&) const override {
        throw DomainError("class probabilities requested from a regression model");
    }
};

}  // namespace

std::unique_ptr<Learner> make_learner(LearnerKind kind, Task task, const LearnerOptions& options) {
    switch (kind) {
        case LearnerKind::DecisionTree: return std::make_unique<DecisionTree>(task, options);
        case LearnerKind::RandomForest: return std::make_unique<RandomForest>(task, options);
        case LearnerKind::Knn: return std::make_unique<Knn>(task, options);
        case LearnerKind::LogisticRegression: return std::make_unique<LogisticRegression>(task, options);
        case LearnerKind::LinearRegressionSgd: return std::make_unique<LinearRegressionSgd>(task, options);
    }
    throw DomainError("unknown learner kind");
}

}  // namespace gaitsense
