#include "gaitsense/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <ostream>

#include "gaitsense/error.hpp"
#include "gaitsense/rng.hpp"
#include "gaitsense/whole_features.hpp"
#include "text_util.hpp"

namespace gaitsense {

using nlohmann::ordered_json;
using detail::format_double;

std::string_view combo_token(Combo combo) {
    switch (combo) {
        case Combo::Str: return "str";
        case Combo::RT: return "rt";
        case Combo::LT: return "lt";
        case Combo::RTLT: return "rt+lt";
        case Combo::All: return "all";
    }
    return "all";
}

Combo parse_combo(std::string_view token) {
    if (token == "str") return Combo::Str;
    if (token == "rt") return Combo::RT;
    if (token == "lt") return Combo::LT;
    if (token == "rt+lt") return Combo::RTLT;
    if (token == "all") return Combo::All;
    throw DomainError("unknown combo '" + std::string(token) + "' (expected str, rt, lt, rt+lt or all)");
}

std::vector<Routine> combo_routines(Combo combo) {
    switch (combo) {
        case Combo::Str: return {Routine::Straight};
        case Combo::RT: return {Routine::RightTurning};
        case Combo::LT: return {Routine::LeftTurning};
        case Combo::RTLT: return {Routine::RightTurning, Routine::LeftTurning};
        case Combo::All: return {Routine::Straight, Routine::RightTurning, Routine::LeftTurning};
    }
    return {};
}

std::string_view modality_token(ModalitySubset subset) {
    switch (subset) {
        case ModalitySubset::Imu: return "imu";
        case ModalitySubset::Pressure: return "pressure";
        case ModalitySubset::ImuPressure: return "imu+pressure";
        case ModalitySubset::All: return "all";
    }
    return "all";
}

ModalitySubset parse_modality(std::string_view token) {
    if (token == "imu") return ModalitySubset::Imu;
    if (token == "pressure") return ModalitySubset::Pressure;
    if (token == "imu+pressure") return ModalitySubset::ImuPressure;
    if (token == "all") return ModalitySubset::All;
    throw DomainError("unknown modality '" + std::string(token) + "' (expected imu, pressure, imu+pressure or all)");
}

bool in_modality_subset(std::string_view feature_name, ModalitySubset subset) {
    const auto m = feature_modality(feature_name);
    switch (subset) {
        case ModalitySubset::Imu: return m.imu && !m.pressure && !m.fusion;
        case ModalitySubset::Pressure: return m.pressure && !m.imu && !m.fusion;
        case ModalitySubset::ImuPressure: return !m.fusion;
        case ModalitySubset::All: return true;
    }
    return true;
}

FeatureTable filter_modality(const FeatureTable& table, ModalitySubset subset) {
    auto out = table.filter_columns([subset](const std::string& n) { return in_modality_subset(n, subset); });
    if (out.feature_count() == 0) {
        throw SchemaError("no feature left for modality subset '" + std::string(modality_token(subset)) + "'");
    }
    return out;
}

ErrorMetrics error_metrics(std::span<const double> predicted, std::span<const double> truth) {
    if (predicted.size() != truth.size()) throw DimensionError("predictions and truth differ in length");
    if (predicted.empty()) throw DegenerateInputError("error metrics need at least one prediction");
    ErrorMetrics m;
    double abs_sum = 0.0, sq_sum = 0.0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        const double e = std::abs(predicted[i] - truth[i]);
        abs_sum += e;
        sq_sum += e * e;
        m.me = std::max(m.me, e);
    }
    const double n = static_cast<double>(predicted.size());
    m.mae = abs_sum / n;
    m.rmse = std::sqrt(sq_sum / n);
    return m;
}

ClassMetrics class_metrics(std::span<const int> predicted, std::span<const int> truth) {
    if (predicted.size() != truth.size()) throw DimensionError("predictions and truth differ in length");
    if (predicted.empty()) throw DegenerateInputError("class metrics need at least one prediction");
    ClassMetrics m;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        const bool p = predicted[i] == kPatientClass;
        const bool t = truth[i] == kPatientClass;
        if (p && t) ++m.tp;
        else if (p) ++m.fp;
        else if (t) ++m.fn;
        else ++m.tn;
    }
    m.accuracy = static_cast<double>(m.tp + m.tn) / static_cast<double>(predicted.size());
    m.precision = m.tp + m.fp ? static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fp) : 0.0;
    m.recall = m.tp + m.fn ? static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fn) : 0.0;
    m.f1 = m.precision + m.recall > 0.0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
    return m;
}

int fuse_probabilities(std::span<const std::vector<double>> per_test) {
    if (per_test.empty()) throw DegenerateInputError("no test probabilities to fuse");
    std::vector<double> sum(per_test.front().size(), 0.0);
    for (const auto& p : per_test) {
        if (p.size() != sum.size()) throw DimensionError("probability rows differ in class count");
        for (std::size_t c = 0; c < p.size(); ++c) sum[c] += p[c];
    }
    int best = 0;
    for (std::size_t c = 1; c < sum.size(); ++c)
        if (sum[c] >= sum[static_cast<std::size_t>(best)]) best = static_cast<int>(c);
    return best;
}

namespace {

struct Subject {
    std::string id;
    Cohort cohort = Cohort::Healthy;
    std::optional<double> truth;
    std::vector<std::size_t> rows;  // one per routine of the combo, combo order
};

std::vector<Subject> gather_subjects(const FeatureTable& table, Combo combo, bool patients_only,
                                     std::vector<std::string>& warnings) {
    const auto routines = combo_routines(combo);
    std::map<std::string, std::map<Routine, std::size_t>> by_subject;
    std::map<std::string, TableRow> first_row;
    for (std::size_t r = 0; r < table.row_count(); ++r) {
        const auto& row = table.rows()[r];
        if (std::find(routines.begin(), routines.end(), row.routine) == routines.end()) continue;
        if (patients_only && row.cohort != Cohort::Patient) continue;
        auto [it, inserted] = by_subject[row.subject_id].emplace(row.routine, r);
        if (!inserted) {
            throw SchemaError("subject " + row.subject_id + " has two '" + std::string(routine_token(row.routine)) +
                              "' rows");
        }
        first_row.emplace(row.subject_id, row);
    }

    std::vector<Subject> subjects;
    for (const auto& [id, found] : by_subject) {
        if (found.size() != routines.size()) {
            warnings.push_back("subject " + id + " lacks a routine of combo " + std::string(combo_token(combo)) +
                               "; excluded");
            continue;
        }
        const auto& row = first_row.at(id);
        if (patients_only && !row.truth) {
            warnings.push_back("patient " + id + " has no strength truth; excluded");
            continue;
        }
        Subject s{id, row.cohort, row.truth, {}};
        for (auto routine : routines) s.rows.push_back(found.at(routine));
        subjects.push_back(std::move(s));
    }
    return subjects;
}

FeatureTable take_rows(const FeatureTable& table, std::span<const std::size_t> rows) {
    std::vector<TableRow> meta;
    meta.reserve(rows.size());
    for (auto r : rows) meta.push_back(table.rows()[r]);
    return FeatureTable(table.names(), std::move(meta), table.values().select_rows(rows));
}

double target(const TableRow& row, Task task) {
    if (task == Task::Classify) return row.cohort == Cohort::Patient ? kPatientClass : kHealthyClass;
    if (!row.truth) throw SchemaError("row of " + row.subject_id + " has no strength truth");
    return *row.truth;
}

// Everything a fold learns from its training rows.
class FoldModel {
public:
    FoldModel(const FeatureTable& train, Task task, const EvalConfig& config, std::uint64_t seed) {
        std::vector<double> y;
        std::vector<std::string> groups;
        for (const auto& row : train.rows()) {
            y.push_back(target(row, task));
            groups.push_back(row.subject_id);
        }

        Matrix x;
        if (config.fixed_features) {
            for (const auto& name : *config.fixed_features) {
                columns_.push_back(train.column_index(name));
                selected_.push_back({name, 0.0});
            }
            const Matrix raw = train.values().select(all_rows(train.row_count()), columns_);
            const auto z = ZScore::fit(raw);
            constant_columns_ = z.constant_count();
            mean_ = z.mean();
            sd_ = z.sd();
            x = z.apply(raw);
        } else {
            const auto z = ZScore::fit(train.values());
            constant_columns_ = z.constant_count();
            TrainingSet data{z.apply(train.values()), y, groups, train.names()};
            const auto result = select_features(data, task, config.selector, seed, config.max_selected,
                                                config.learner_options);
            selected_ = result.selected;
            for (const auto& f : selected_) {
                const auto c = train.column_index(f.name);
                columns_.push_back(c);
                mean_.push_back(z.mean()[c]);
                sd_.push_back(z.sd()[c]);
            }
            x = data.x.select(all_rows(train.row_count()), columns_);
        }

        LearnerOptions opts = config.learner_options;
        opts.seed = Rng::mix(seed ^ 0x5eedULL);
        learner_ = make_learner(config.learner, task, opts);
        learner_->fit(x, y);
    }

    // Raw feature rows of the held-out tests, restricted to this fold's columns.
    Matrix standardize(const FeatureTable& table, std::span<const std::size_t> rows) const {
        std::vector<std::size_t> cols;
        for (const auto& f : selected_) cols.push_back(table.column_index(f.name));
        Matrix x = table.values().select(rows, cols);
        for (std::size_t c = 0; c < cols.size(); ++c) {
            for (std::size_t r = 0; r < x.rows(); ++r) {
                x(r, c) = sd_[c] > 0.0 ? (x(r, c) - mean_[c]) / sd_[c] : 0.0;
            }
        }
        return x;
    }

    const Learner& learner() const { return *learner_; }
    const std::vector<RankedFeature>& selected() const { return selected_; }
    std::size_t constant_columns() const { return constant_columns_; }

private:
    static std::vector<std::size_t> all_rows(std::size_t n) {
        std::vector<std::size_t> r(n);
        std::iota(r.begin(), r.end(), std::size_t{0});
        return r;
    }

    std::vector<std::size_t> columns_;
    std::vector<RankedFeature> selected_;
    std::vector<double> mean_;
    std::vector<double> sd_;
    std::size_t constant_columns_ = 0;
    std::unique_ptr<Learner> learner_;
};

EvalReport make_report(Task task, const EvalConfig& config) {
    EvalReport report;
    report.task = task;
    report.combo = config.combo;
    report.selector = config.selector;
    report.learner = config.learner;
    report.seed = config.seed;
    return report;
}

void count_cohort(EvalReport& report, const std::vector<Subject>& subjects, Combo combo) {
    for (const auto& s : subjects) (s.cohort == Cohort::Patient ? report.n_patients : report.n_healthy)++;
    report.n_test = combo_routines(combo).size();
    report.n_sample = subjects.size() * report.n_test;
}

FeatureTable restrict_to_fixed(const FeatureTable& table, const EvalConfig& config) {
    if (!config.fixed_features) return table;
    if (config.fixed_features->empty()) throw DomainError("fixed feature list is empty");
    return table.select_columns(*config.fixed_features);
}

std::vector<std::size_t> rows_of(const std::vector<Subject>& subjects, std::span<const std::size_t> which) {
    std::vector<std::size_t> rows;
    for (auto i : which) rows.insert(rows.end(), subjects[i].rows.begin(), subjects[i].rows.end());
    std::sort(rows.begin(), rows.end());
    return rows;
}

}  // namespace

EvalReport classify_subjects(const FeatureTable& full, const EvalConfig& config) {
    const FeatureTable table = restrict_to_fixed(full, config);
    EvalReport report = make_report(Task::Classify, config);
    const auto subjects = gather_subjects(table, config.combo, false, report.warnings);
    count_cohort(report, subjects, config.combo);
    if (report.n_patients == 0 || report.n_healthy == 0) {
        throw DegenerateInputError("classification needs both patients and healthy subjects");
    }

    const std::size_t folds = std::min(kClassificationFolds, subjects.size());
    std::vector<std::size_t> order(subjects.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(config.seed);
    rng.shuffle(std::span<std::size_t>(order));
    std::vector<std::size_t> fold_of(subjects.size());
    for (std::size_t i = 0; i < order.size(); ++i) fold_of[order[i]] = i % folds;

    std::vector<SubjectPrediction> predictions(subjects.size());
    for (std::size_t f = 0; f < folds; ++f) {
        std::vector<std::size_t> train_ids, test_ids;
        for (std::size_t s = 0; s < subjects.size(); ++s) (fold_of[s] == f ? test_ids : train_ids).push_back(s);

        const auto train_rows = rows_of(subjects, train_ids);
        const FoldModel model(take_rows(table, train_rows), Task::Classify, config, Rng::mix(config.seed + f));

        FoldRecord record;
        record.index = f;
        for (auto s : train_ids) record.train_subjects.push_back(subjects[s].id);
        for (auto s : test_ids) record.test_subjects.push_back(subjects[s].id);
        record.train_rows = train_rows.size();
        record.constant_columns = model.constant_columns();
        record.selected = model.selected();
        report.folds.push_back(std::move(record));

        for (auto s : test_ids) {
            const auto& subject = subjects[s];
            const auto proba = model.learner().predict_proba(model.standardize(table, subject.rows));
            auto& p = predictions[s];
            p.subject_id = subject.id;
            p.fold = f;
            p.cohort = subject.cohort;
            p.truth = subject.truth;
            p.routines = combo_routines(config.combo);
            p.probability_sum.assign(proba.front().size(), 0.0);
            for (const auto& row : proba)
                for (std::size_t c = 0; c < row.size(); ++c) p.probability_sum[c] += row[c];
            p.predicted_class = fuse_probabilities(proba);
        }
    }

    std::vector<int> predicted, truth;
    for (const auto& p : predictions) {
        predicted.push_back(p.predicted_class);
        truth.push_back(p.cohort == Cohort::Patient ? kPatientClass : kHealthyClass);
    }
    report.classification = class_metrics(predicted, truth);
    report.predictions = std::move(predictions);
    return report;
}

EvalReport regress_strength(const FeatureTable& full, const EvalConfig& config) {
    const FeatureTable table = restrict_to_fixed(full, config);
    EvalReport report = make_report(Task::Regress, config);
    const auto subjects = gather_subjects(table, config.combo, true, report.warnings);
    if (subjects.size() < 2) throw DegenerateInputError("leave-one-out regression needs at least 2 patients");
    count_cohort(report, subjects, config.combo);

    std::vector<double> predicted, truth;
    for (std::size_t held = 0; held < subjects.size(); ++held) {
        std::vector<std::size_t> train_ids;
        for (std::size_t s = 0; s < subjects.size(); ++s)
            if (s != held) train_ids.push_back(s);

        const auto train_rows = rows_of(subjects, train_ids);
        const FoldModel model(take_rows(table, train_rows), Task::Regress, config, Rng::mix(config.seed + held));

        FoldRecord record;
        record.index = held;
        for (auto s : train_ids) record.train_subjects.push_back(subjects[s].id);
        record.test_subjects.push_back(subjects[held].id);
        record.train_rows = train_rows.size();
        record.constant_columns = model.constant_columns();
        record.selected = model.selected();
        report.folds.push_back(std::move(record));

        const auto& subject = subjects[held];
        SubjectPrediction p;
        p.subject_id = subject.id;
        p.fold = held;
        p.cohort = subject.cohort;
        p.truth = subject.truth;
        p.routines = combo_routines(config.combo);
        p.per_test = model.learner().predict(model.standardize(table, subject.rows));
        for (auto& v : p.per_test) v = std::clamp(v, kStrengthMin, kStrengthMax);
        p.predicted = std::accumulate(p.per_test.begin(), p.per_test.end(), 0.0) / static_cast<double>(p.per_test.size());
        predicted.push_back(p.predicted);
        truth.push_back(*subject.truth);
        report.predictions.push_back(std::move(p));
    }
    report.regression = error_metrics(predicted, truth);
    return report;
}

std::vector<AblationEntry> modality_ablation(const FeatureTable& table, const EvalConfig& config,
                                             std::span<const ModalitySubset> subsets) {
    std::vector<AblationEntry> out;
    for (auto subset : subsets) {
        AblationEntry entry;
        entry.subset = subset;
        const auto filtered = filter_modality(table, subset);
        entry.feature_count = filtered.feature_count();
        entry.report = classify_subjects(filtered, config);
        entry.report.modality = modality_token(subset);
        out.push_back(std::move(entry));
    }
    return out;
}

std::vector<ForwardStep> forward_search(const FeatureTable& table, const std::vector<std::string>& candidates,
                                        const ForwardConfig& config) {
    if (candidates.empty()) throw DomainError("forward search needs at least one candidate feature");
    for (const auto& c : candidates) table.column_index(c);

    EvalConfig eval;
    eval.combo = config.combo;
    eval.learner = config.learner;
    eval.seed = config.seed;
    eval.learner_options = config.learner_options;

    const std::size_t max_size = config.max_size ? std::min(config.max_size, candidates.size()) : candidates.size();
    std::vector<std::string> chosen;
    std::vector<std::string> remaining = candidates;
    std::vector<ForwardStep> ledger;
    for (std::size_t size = 1; size <= max_size; ++size) {
        std::optional<ForwardStep> best;
        std::size_t best_index = 0;
        for (std::size_t i = 0; i < remaining.size(); ++i) {
            auto trial = chosen;
            trial.push_back(remaining[i]);
            eval.fixed_features = trial;
            ForwardStep step;
            step.size = size;
            step.feature = remaining[i];
            bool better = false;
            if (config.task == Task::Regress) {
                step.error = *regress_strength(table, eval).regression;
                better = !best || step.error.mae < best->error.mae;
            } else {
                step.classes = *classify_subjects(table, eval).classification;
                better = !best || step.classes.f1 > best->classes.f1 ||
                         (step.classes.f1 == best->classes.f1 && step.classes.accuracy > best->classes.accuracy);
            }
            if (better) {
                best = step;
                best_index = i;
            }
        }
        chosen.push_back(best->feature);
        remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(best_index));
        ledger.push_back(*best);
    }
    return ledger;
}

namespace {

ordered_json features_json(const std::vector<RankedFeature>& features) {
    ordered_json out = ordered_json::array();
    for (const auto& f : features) out.push_back({{"name", f.name}, {"importance", f.importance}});
    return out;
}

ordered_json routines_json(const std::vector<Routine>& routines) {
    ordered_json out = ordered_json::array();
    for (auto r : routines) out.push_back(routine_token(r));
    return out;
}

}  // namespace

ordered_json report_json(const EvalReport& report) {
    ordered_json doc;
    doc["task"] = task_token(report.task);
    doc["combo"] = combo_token(report.combo);
    doc["modality"] = report.modality;
    doc["selector"] = learner_token(report.selector);
    doc["learner"] = learner_token(report.learner);
    doc["seed"] = report.seed;
    doc["N_p"] = report.n_patients;
    doc["N_h"] = report.n_healthy;
    doc["N_test"] = report.n_test;
    doc["N_sample"] = report.n_sample;

    ordered_json metrics;
    if (report.classification) {
        const auto& m = *report.classification;
        metrics = {{"accuracy", m.accuracy}, {"precision", m.precision}, {"recall", m.recall}, {"F1", m.f1},
                   {"tp", m.tp},             {"fp", m.fp},               {"tn", m.tn},         {"fn", m.fn}};
    }
    if (report.regression) {
        const auto& m = *report.regression;
        metrics = {{"MAE", m.mae}, {"RMSE", m.rmse}, {"ME", m.me}};
    }
    doc["metrics"] = metrics;

    ordered_json folds = ordered_json::array();
    for (const auto& f : report.folds) {
        folds.push_back({{"index", f.index},
                         {"train_subjects", f.train_subjects},
                         {"test_subjects", f.test_subjects},
                         {"train_rows", f.train_rows},
                         {"constant_columns", f.constant_columns},
                         {"selected", features_json(f.selected)}});
    }
    doc["folds"] = folds;

    ordered_json preds = ordered_json::array();
    for (const auto& p : report.predictions) {
        ordered_json j;
        j["subject_id"] = p.subject_id;
        j["fold"] = p.fold;
        j["cohort"] = cohort_token(p.cohort);
        j["truth"] = p.truth ? ordered_json(*p.truth) : ordered_json(nullptr);
        j["routines"] = routines_json(p.routines);
        if (report.task == Task::Classify) {
            j["probability_sum"] = p.probability_sum;
            j["predicted_class"] = p.predicted_class == kPatientClass ? "patient" : "healthy";
        } else {
            j["per_test"] = p.per_test;
            j["predicted"] = p.predicted;
        }
        preds.push_back(std::move(j));
    }
    doc["predictions"] = preds;
    doc["warnings"] = report.warnings;
    return doc;
}

ordered_json ablation_json(std::span<const AblationEntry> entries) {
    ordered_json out = ordered_json::array();
    for (const auto& e : entries) {
        out.push_back({{"modality", modality_token(e.subset)},
                       {"feature_count", e.feature_count},
                       {"report", report_json(e.report)}});
    }
    return out;
}

ordered_json selection_json(const SelectionResult& result, std::size_t ranked_limit) {
    ordered_json doc;
    doc["selector"] = learner_token(result.selector);
    doc["selected"] = features_json(result.selected);
    std::vector<RankedFeature> top(result.ranked.begin(),
                                   result.ranked.begin() + static_cast<std::ptrdiff_t>(
                                                               std::min(ranked_limit, result.ranked.size())));
    doc["ranked"] = features_json(top);
    return doc;
}

ordered_json forward_json(std::span<const ForwardStep> steps, Task task) {
    ordered_json out = ordered_json::array();
    for (const auto& s : steps) {
        ordered_json j{{"size", s.size}, {"feature", s.feature}};
        if (task == Task::Regress) {
            j["MAE"] = s.error.mae;
            j["RMSE"] = s.error.rmse;
            j["ME"] = s.error.me;
        } else {
            j["accuracy"] = s.classes.accuracy;
            j["precision"] = s.classes.precision;
            j["F1"] = s.classes.f1;
        }
        out.push_back(std::move(j));
    }
    return out;
}

void write_json(const std::filesystem::path& path, const ordered_json& doc) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << doc.dump(2) << '\n';
    if (!out) throw Error("failed writing " + path.string());
}

ordered_json read_json(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path.string());
    try {
        return ordered_json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw SchemaError(path.string() + ": " + e.what());
    }
}

void write_predictions_csv(std::ostream& out, const EvalReport& report) {
    if (report.task == Task::Classify) {
        out << "subject_id,fold,cohort,predicted,p_healthy,p_patient\n";
        for (const auto& p : report.predictions) {
            const double total = p.probability_sum[0] + p.probability_sum[1];
            out << p.subject_id << ',' << p.fold << ',' << cohort_token(p.cohort) << ','
                << (p.predicted_class == kPatientClass ? "patient" : "healthy") << ','
                << format_double(p.probability_sum[0] / total) << ',' << format_double(p.probability_sum[1] / total)
                << '\n';
        }
        return;
    }
    out << "subject_id,fold,truth,predicted,abs_error\n";
    for (const auto& p : report.predictions) {
        out << p.subject_id << ',' << p.fold << ',' << format_double(*p.truth) << ',' << format_double(p.predicted)
            << ',' << format_double(std::abs(p.predicted - *p.truth)) << '\n';
    }
}

void write_forward_csv(std::ostream& out, std::span<const ForwardStep> steps, Task task) {
    if (task == Task::Regress) {
        out << "size,feature,MAE,RMSE,ME\n";
        for (const auto& s : steps) {
            out << s.size << ',' << s.feature << ',' << format_double(s.error.mae) << ','
                << format_double(s.error.rmse) << ',' << format_double(s.error.me) << '\n';
        }
        return;
    }
    out << "size,feature,accuracy,precision,F1\n";
    for (const auto& s : steps) {
        out << s.size << ',' << s.feature << ',' << format_double(s.classes.accuracy) << ','
            << format_double(s.classes.precision) << ',' << format_double(s.classes.f1) << '\n';
    }
}

}  // namespace gaitsense
