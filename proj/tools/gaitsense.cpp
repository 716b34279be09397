#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "gaitsense/error.hpp"
#include "gaitsense/evaluation.hpp"
#include "gaitsense/extraction.hpp"
#include "gaitsense/synth.hpp"
#include "gaitsense/whole_features.hpp"

namespace fs = std::filesystem;
using namespace gaitsense;
using nlohmann::ordered_json;

namespace {

struct RunConfig {
    std::uint64_t seed = 0;
    std::string combo = "all";
    std::string selector = "dt";
    std::string learner = "rf";
    std::string modality = "all";
    std::string task = "classify";
    fs::path in;
    fs::path table;
    fs::path manifest;
    fs::path out;
    fs::path debug;
    fs::path forward;
    std::size_t patients = 23;
    std::size_t healthy = 17;
    std::size_t max_size = 0;
    std::size_t threads = 0;
    fs::path classify_report;
    fs::path regress_report;
    fs::path ablation_report;
    fs::path labels;
};

void require_file(const fs::path& path, const std::string& what, const std::string& produced_by) {
    if (path.empty()) throw Error(what + " path is required");
    if (!fs::is_regular_file(path)) {
        throw Error(what + " '" + path.string() + "' not found; run `gaitsense " + produced_by + "` first");
    }
}

void require_out(const fs::path& path) {
    if (path.empty()) throw Error("--out is required");
    const auto parent = path.parent_path();
    if (!parent.empty()) fs::create_directories(parent);
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
    if (!out) throw Error("failed writing " + path.string());
}

fs::path sibling(const fs::path& path, const std::string& suffix) {
    auto p = path;
    p.replace_extension();
    return p.string() + suffix;
}

std::size_t thread_count(std::size_t requested) {
    if (requested) return requested;
    return std::max(1u, std::thread::hardware_concurrency());
}

// Runs fn(i) for i in [0, n) on a few threads; fn writes to slot i only.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t threads, Fn fn) {
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(n);
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < std::min(threads, n); ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

FeatureTable load_table(const RunConfig& cfg) {
    require_file(cfg.table, "feature table", "extract");
    auto table = read_feature_table(cfg.table);
    return filter_modality(table, parse_modality(cfg.modality));
}

EvalConfig eval_config(const RunConfig& cfg, const FeatureTable& table) {
    EvalConfig e;
    e.combo = parse_combo(cfg.combo);
    e.selector = parse_learner(cfg.selector);
    e.learner = parse_learner(cfg.learner);
    e.seed = cfg.seed;
    if (!cfg.manifest.empty()) {
        require_file(cfg.manifest, "selection manifest", "select");
        const auto doc = read_json(cfg.manifest);
        std::vector<std::string> names;
        for (const auto& f : doc.at("selected")) {
            const auto name = f.at("name").get<std::string>();
            if (!table.find_column(name)) {
                throw SchemaError("manifest feature '" + name + "' is not a column of " + cfg.table.string());
            }
            names.push_back(name);
        }
        e.fixed_features = std::move(names);
    }
    return e;
}

void write_report(const RunConfig& cfg, const EvalReport& report) {
    require_out(cfg.out);
    auto doc = report_json(report);
    write_json(cfg.out, doc);
    std::ostringstream csv;
    write_predictions_csv(csv, report);
    write_text(sibling(cfg.out, ".csv"), csv.str());
}

int cmd_synth(const RunConfig& cfg) {
    if (cfg.out.empty()) throw Error("--out directory is required");
    const auto plan = generate_cohort(cfg.patients, cfg.healthy, linear_strength_map, cfg.seed);
    const auto paths = write_cohort(plan, cfg.out);
    std::cout << "wrote " << paths.size() << " recordings and truth.json to " << cfg.out.string() << '\n';
    return 0;
}

int cmd_extract(const RunConfig& cfg) {
    if (cfg.in.empty() || !fs::is_directory(cfg.in)) {
        throw Error("recording directory '" + cfg.in.string() + "' not found; run `gaitsense synth` first");
    }
    require_out(cfg.out);
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(cfg.in))
        if (entry.is_regular_file() && entry.path().extension() == ".gaitrec") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    if (files.empty()) throw Error("no .gaitrec files in " + cfg.in.string());
    if (!cfg.debug.empty()) fs::create_directories(cfg.debug);

    std::vector<TableRow> rows(files.size());
    std::vector<std::vector<double>> values(files.size());
    std::vector<SubjectLabel> labels(files.size());
    std::vector<std::vector<std::string>> warnings(files.size());
    parallel_for(files.size(), thread_count(cfg.threads), [&](std::size_t i) {
        try {
            const auto rec = parse_recording(files[i]);
            const auto analysis = analyze_recording(rec);
            rows[i] = table_row(rec);
            labels[i] = rec.label;
            values[i] = analysis.whole;
            warnings[i] = analysis.warnings;
            if (!cfg.debug.empty()) {
                const auto stem = files[i].stem().string();
                for (auto foot : {Foot::Left, Foot::Right}) {
                    const auto& frames = foot == Foot::Left ? analysis.left_frames : analysis.right_frames;
                    const auto& seg = foot == Foot::Left ? analysis.left_segmentation : analysis.right_segmentation;
                    std::ostringstream csv;
                    write_segmentation_csv(csv, frames[fdes::kTotalForce], seg);
                    write_text(cfg.debug / (stem + "_" + foot_letter(foot) + "_segmentation.csv"), csv.str());
                }
            }
        } catch (const std::exception& e) {
            throw Error(files[i].string() + ": " + e.what());
        }
    });

    FeatureTableBuilder builder(whole_feature_names());
    for (std::size_t i = 0; i < files.size(); ++i) builder.add(rows[i], std::move(values[i]));
    write_feature_table(cfg.out, std::move(builder).build());

    std::map<std::string, SubjectLabel> by_subject;
    for (std::size_t i = 0; i < files.size(); ++i) by_subject.emplace(rows[i].subject_id, labels[i]);
    std::ostringstream sidecar;
    sidecar << "subject_id,cohort,mrc_a,mrc_b\n";
    for (const auto& [id, label] : by_subject) {
        sidecar << id << ',' << cohort_token(label.cohort) << ',' << label.mrc_a.value_or("") << ','
                << label.mrc_b.value_or("") << '\n';
    }
    write_text(sibling(cfg.out, ".labels.csv"), sidecar.str());

    for (std::size_t i = 0; i < files.size(); ++i)
        for (const auto& w : warnings[i]) std::cerr << "warning: " << files[i].filename().string() << ": " << w << '\n';
    std::cout << "extracted " << files.size() << " recordings x " << whole_feature_names().size() << " features to "
              << cfg.out.string() << '\n';
    return 0;
}

Task parse_task(const std::string& token) {
    if (token == "classify") return Task::Classify;
    if (token == "regress") return Task::Regress;
    throw DomainError("unknown task '" + token + "' (expected classify or regress)");
}

int cmd_select(const RunConfig& cfg) {
    const auto table = load_table(cfg);
    const Task task = parse_task(cfg.task);
    const Combo combo = parse_combo(cfg.combo);
    const auto routines = combo_routines(combo);

    std::vector<std::size_t> rows;
    for (std::size_t r = 0; r < table.row_count(); ++r) {
        const auto& row = table.rows()[r];
        if (std::find(routines.begin(), routines.end(), row.routine) == routines.end()) continue;
        if (task == Task::Regress && (row.cohort != Cohort::Patient || !row.truth)) continue;
        rows.push_back(r);
    }
    if (rows.empty()) throw DegenerateInputError("no rows match the task and combo");

    const auto raw = table.values().select_rows(rows);
    TrainingSet data{ZScore::fit(raw).apply(raw), {}, {}, table.names()};
    for (auto r : rows) {
        const auto& row = table.rows()[r];
        data.y.push_back(task == Task::Classify ? (row.cohort == Cohort::Patient ? kPatientClass : kHealthyClass)
                                                : *row.truth);
        data.groups.push_back(row.subject_id);
    }
    const auto result = select_features(data, task, parse_learner(cfg.selector), cfg.seed);

    require_out(cfg.out);
    auto doc = selection_json(result);
    ordered_json wrapped;
    wrapped["task"] = task_token(task);
    wrapped["combo"] = combo_token(combo);
    wrapped["modality"] = cfg.modality;
    wrapped["seed"] = cfg.seed;
    for (auto& [k, v] : doc.items()) wrapped[k] = v;

    if (!cfg.forward.empty()) {
        std::vector<std::string> candidates;
        for (const auto& f : result.selected) candidates.push_back(f.name);
        ForwardConfig fc;
        fc.task = task;
        fc.learner = parse_learner(cfg.learner);
        fc.combo = combo;
        fc.seed = cfg.seed;
        fc.max_size = cfg.max_size;
        const auto ledger = forward_search(table, candidates, fc);
        std::ostringstream csv;
        write_forward_csv(csv, ledger, task);
        const auto parent = cfg.forward.parent_path();
        if (!parent.empty()) fs::create_directories(parent);
        write_text(cfg.forward, csv.str());
        wrapped["forward_search"] = forward_json(ledger, task);
    }
    write_json(cfg.out, wrapped);
    std::cout << "selected " << result.selected.size() << " features; manifest " << cfg.out.string() << '\n';
    return 0;
}

int cmd_evaluate(const RunConfig& cfg, Task task) {
    const auto table = load_table(cfg);
    const auto e = eval_config(cfg, table);
    auto report = task == Task::Classify ? classify_subjects(table, e) : regress_strength(table, e);
    report.modality = cfg.modality;
    write_report(cfg, report);
    for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
    if (report.classification) {
        std::cout << "N_sample=" << report.n_sample << " accuracy=" << report.classification->accuracy
                  << " precision=" << report.classification->precision << " F1=" << report.classification->f1 << '\n';
    } else {
        std::cout << "N_sample=" << report.n_sample << " MAE=" << report.regression->mae
                  << " RMSE=" << report.regression->rmse << " ME=" << report.regression->me << '\n';
    }
    return 0;
}

int cmd_ablate(const RunConfig& cfg) {
    require_file(cfg.table, "feature table", "extract");
    const auto table = read_feature_table(cfg.table);
    auto e = eval_config(cfg, table);
    const std::vector<ModalitySubset> subsets = {ModalitySubset::Imu, ModalitySubset::Pressure,
                                                 ModalitySubset::ImuPressure, ModalitySubset::All};
    const auto entries = modality_ablation(table, e, subsets);
    require_out(cfg.out);
    write_json(cfg.out, ablation_json(entries));
    for (const auto& entry : entries) {
        std::cout << modality_token(entry.subset) << ": features=" << entry.feature_count
                  << " F1=" << entry.report.classification->f1 << '\n';
    }
    return 0;
}

std::string fixed3(double v) {
    std::ostringstream s;
    s.setf(std::ios::fixed);
    s.precision(3);
    s << v;
    return s.str();
}

std::map<std::string, std::pair<std::string, std::string>> read_labels(const fs::path& path) {
    std::map<std::string, std::pair<std::string, std::string>> out;
    std::ifstream in(path);
    if (!in) throw Error("cannot read " + path.string());
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) f.push_back(cell);
        while (f.size() < 4) f.emplace_back();
        out[f[0]] = {f[2], f[3]};
    }
    return out;
}

int cmd_report(const RunConfig& cfg) {
    require_out(cfg.out);
    std::ostringstream md;
    md << "# gaitsense report\n";

    if (!cfg.classify_report.empty()) {
        require_file(cfg.classify_report, "classification report", "classify");
        const auto r = read_json(cfg.classify_report);
        const auto& m = r.at("metrics");
        md << "\n## Classification\n\n"
           << "| Combo | Selector | Classifier | N_sample | Accuracy | Precision | F1 |\n"
           << "|---|---|---|---|---|---|---|\n"
           << "| " << r.at("combo").get<std::string>() << " | " << r.at("selector").get<std::string>() << " | "
           << r.at("learner").get<std::string>() << " | " << r.at("N_sample").get<std::size_t>() << " | "
           << fixed3(m.at("accuracy").get<double>()) << " | " << fixed3(m.at("precision").get<double>()) << " | "
           << fixed3(m.at("F1").get<double>()) << " |\n";
    }

    if (!cfg.ablation_report.empty()) {
        require_file(cfg.ablation_report, "ablation report", "ablate");
        const auto a = read_json(cfg.ablation_report);
        md << "\n## Sensing modality\n\n"
           << "| Modality | Features | Accuracy | Precision | F1 |\n|---|---|---|---|---|\n";
        for (const auto& entry : a) {
            const auto& m = entry.at("report").at("metrics");
            md << "| " << entry.at("modality").get<std::string>() << " | " << entry.at("feature_count").get<std::size_t>()
               << " | " << fixed3(m.at("accuracy").get<double>()) << " | " << fixed3(m.at("precision").get<double>())
               << " | " << fixed3(m.at("F1").get<double>()) << " |\n";
        }
    }

    if (!cfg.regress_report.empty()) {
        require_file(cfg.regress_report, "regression report", "regress");
        const auto r = read_json(cfg.regress_report);
        const auto& m = r.at("metrics");
        md << "\n## Muscle strength regression\n\n"
           << "| Combo | Selector | Regressor | N_sample | MAE | RMSE | ME |\n|---|---|---|---|---|---|---|\n"
           << "| " << r.at("combo").get<std::string>() << " | " << r.at("selector").get<std::string>() << " | "
           << r.at("learner").get<std::string>() << " | " << r.at("N_sample").get<std::size_t>() << " | "
           << fixed3(m.at("MAE").get<double>()) << " | " << fixed3(m.at("RMSE").get<double>()) << " | "
           << fixed3(m.at("ME").get<double>()) << " |\n";

        // Predicted strength next to both physicians' grades, one row per patient.
        std::map<std::string, std::pair<std::string, std::string>> grades;
        if (!cfg.labels.empty()) {
            require_file(cfg.labels, "labels sidecar", "extract");
            grades = read_labels(cfg.labels);
        }
        std::ostringstream fig4;
        fig4 << "subject_id,truth,predicted,physician_a,physician_b\n";
        for (const auto& p : r.at("predictions")) {
            const auto id = p.at("subject_id").get<std::string>();
            std::string a, b;
            if (auto it = grades.find(id); it != grades.end()) {
                a = it->second.first.empty() ? "" : std::to_string(mrc_numeric(it->second.first));
                b = it->second.second.empty() ? "" : std::to_string(mrc_numeric(it->second.second));
            }
            fig4 << id << ',' << p.at("truth").dump() << ',' << p.at("predicted").dump() << ',' << a << ',' << b
                 << '\n';
        }
        write_text(sibling(cfg.out, "_strength.csv"), fig4.str());
    }

    if (!cfg.forward.empty()) {
        require_file(cfg.forward, "forward-search ledger", "select --forward");
        std::ifstream in(cfg.forward);
        std::string header, line;
        std::getline(in, header);
        std::string row_header;
        for (char c : header) row_header += c == ',' ? std::string(" | ") : std::string(1, c);
        md << "\n## Forward search\n\n| " << row_header << " |\n|---|---|---|---|---|\n";
        std::ostringstream fig5;
        fig5 << "size,error\n";
        while (std::getline(in, line)) {
            std::vector<std::string> f;
            std::stringstream ss(line);
            std::string cell;
            while (std::getline(ss, cell, ',')) f.push_back(cell);
            md << "| ";
            for (std::size_t i = 0; i < f.size(); ++i) md << f[i] << (i + 1 < f.size() ? " | " : " |\n");
            if (f.size() >= 3) fig5 << f[0] << ',' << f[2] << '\n';
        }
        write_text(sibling(cfg.out, "_forward.csv"), fig5.str());
    }

    write_text(cfg.out, md.str());
    std::cout << "wrote " << cfg.out.string() << '\n';
    return 0;
}

void add_common(CLI::App* cmd, RunConfig& cfg) {
    cmd->add_option("--seed", cfg.seed, "Seed for every random choice")->capture_default_str();
    cmd->add_option("--combo", cfg.combo, "Test combination: str, rt, lt, rt+lt or all")->capture_default_str();
    cmd->add_option("--selector", cfg.selector, "Learner used for feature importances: dt, rf, knn, lr, sgd")
        ->capture_default_str();
    cmd->add_option("--learner", cfg.learner, "Classifier or regressor: dt, rf, knn, lr, sgd")->capture_default_str();
    cmd->add_option("--modality", cfg.modality, "Feature subset: imu, pressure, imu+pressure or all")
        ->capture_default_str();
    cmd->add_option("--out", cfg.out, "Output path")->required();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Smart-shoe gait analysis: synthesize, extract, select, classify, regress, ablate, report"};
    app.require_subcommand(1);
    RunConfig cfg;

    auto* synth = app.add_subcommand("synth", "Generate a synthetic cohort of recordings");
    synth->add_option("--patients", cfg.patients, "Number of patients")->capture_default_str();
    synth->add_option("--healthy", cfg.healthy, "Number of healthy subjects")->capture_default_str();
    synth->add_option("--seed", cfg.seed, "Seed for every random choice")->capture_default_str();
    synth->add_option("--out", cfg.out, "Output directory")->required();

    auto* extract = app.add_subcommand("extract", "Extract whole-test features from a directory of recordings");
    extract->add_option("--in", cfg.in, "Directory of .gaitrec files")->required();
    extract->add_option("--debug", cfg.debug, "Directory for per-foot segmentation CSVs");
    extract->add_option("--threads", cfg.threads, "Worker threads (0: all cores)");
    extract->add_option("--out", cfg.out, "Feature table CSV")->required();

    auto* select = app.add_subcommand("select", "Rank and select features on a feature table");
    add_common(select, cfg);
    select->add_option("--table", cfg.table, "Feature table CSV")->required();
    select->add_option("--task", cfg.task, "classify or regress")->capture_default_str();
    select->add_option("--forward", cfg.forward, "Also run forward search and write its ledger CSV here");
    select->add_option("--max-size", cfg.max_size, "Forward-search size limit (0: all selected)");

    auto* classify = app.add_subcommand("classify", "Healthy/patient classification with 5 subject-disjoint folds");
    add_common(classify, cfg);
    classify->add_option("--table", cfg.table, "Feature table CSV")->required();
    classify->add_option("--manifest", cfg.manifest, "Use the manifest's features instead of per-fold selection");

    auto* regress = app.add_subcommand("regress", "Leave-one-subject-out muscle strength regression");
    add_common(regress, cfg);
    regress->add_option("--table", cfg.table, "Feature table CSV")->required();
    regress->add_option("--manifest", cfg.manifest, "Use the manifest's features instead of per-fold selection");

    auto* ablate = app.add_subcommand("ablate", "Classification per sensing-modality subset");
    add_common(ablate, cfg);
    ablate->add_option("--table", cfg.table, "Feature table CSV")->required();

    auto* report = app.add_subcommand("report", "Markdown summary plus plot-data CSVs");
    report->add_option("--classify", cfg.classify_report, "Classification report JSON");
    report->add_option("--regress", cfg.regress_report, "Regression report JSON");
    report->add_option("--ablate", cfg.ablation_report, "Ablation report JSON");
    report->add_option("--forward", cfg.forward, "Forward-search ledger CSV");
    report->add_option("--labels", cfg.labels, "Labels sidecar written by extract");
    report->add_option("--out", cfg.out, "Markdown output path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*synth) return cmd_synth(cfg);
        if (*extract) return cmd_extract(cfg);
        if (*select) return cmd_select(cfg);
        if (*classify) return cmd_evaluate(cfg, Task::Classify);
        if (*regress) return cmd_evaluate(cfg, Task::Regress);
        if (*ablate) return cmd_ablate(cfg);
        if (*report) return cmd_report(cfg);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
