#include "criteria.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "gaitsense/evaluation.hpp"
#include "gaitsense/frame_features.hpp"
#include "gaitsense/preprocess.hpp"
#include "gaitsense/segmentation.hpp"
#include "gaitsense/synth.hpp"
#include "generators.hpp"
#include "oracles.hpp"

namespace oracle {

namespace gs = gaitsense;
using testgen::Engine;
using testgen::index;
using testgen::uniform;

namespace {

std::string fmt(double v) {
    std::ostringstream s;
    s.precision(3);
    s << v;
    return s.str();
}

// Every channel of a sample as one flat vector: pressure, fore IMU, hind IMU.
std::vector<double> channels(const gs::ShoeSample& s) {
    std::vector<double> v = s.pressure;
    for (double x : s.fore_imu.as_array()) v.push_back(x);
    for (double x : s.hind_imu.as_array()) v.push_back(x);
    return v;
}

gs::ShoeSample from_channels(std::int64_t t, const std::vector<double>& v) {
    gs::ShoeSample s;
    s.t_index = t;
    s.pressure.assign(v.begin(), v.begin() + gs::kRawPixels);
    std::array<double, 6> a{}, b{};
    std::copy(v.begin() + gs::kRawPixels, v.begin() + gs::kRawPixels + 6, a.begin());
    std::copy(v.begin() + gs::kRawPixels + 6, v.end(), b.begin());
    s.fore_imu = gs::ImuReading::from_array(a);
    s.hind_imu = gs::ImuReading::from_array(b);
    return s;
}

// Marks random interior frames as missing, in runs of 1..30 separated by at
// least one kept frame.
std::vector<bool> random_gaps(Engine& e, std::size_t n) {
    std::vector<bool> missing(n, false);
    std::size_t t = index(e, 1, 10);
    while (t + 2 < n) {
        const std::size_t len = std::min<std::size_t>(index(e, 1, gs::kMaxRepairableGap), n - 2 - t);
        for (std::size_t k = t; k < t + len; ++k) missing[k] = true;
        t += len + index(e, 1, 15);
    }
    return missing;
}

gs::GaitProfile random_profile(Engine& e, double max_noise) {
    gs::GaitProfile p;
    p.cadence = uniform(e, 85, 120);
    p.stance_ratio = uniform(e, 0.58, 0.66);
    p.double_support_ratio = uniform(e, 0.18, 0.26);
    p.asymmetry = uniform(e, 0.0, 0.8);
    p.hemiplegic_side = index(e, 0, 1) ? gs::Foot::Left : gs::Foot::Right;
    p.noise_sd = uniform(e, 0.0, max_noise);
    p.seed = e();
    return p;
}

std::vector<double> total_force(const gs::SampleStream& stream) {
    return gs::to_series(gs::frame_features(gs::preprocess(stream)))[gs::fdes::kTotalForce];
}

bool same_record(const gs::FoldRecord& a, const gs::FoldRecord& b) {
    if (a.train_subjects != b.train_subjects || a.test_subjects != b.test_subjects ||
        a.train_rows != b.train_rows || a.constant_columns != b.constant_columns ||
        a.selected.size() != b.selected.size())
        return false;
    for (std::size_t i = 0; i < a.selected.size(); ++i) {
        if (a.selected[i].name != b.selected[i].name || a.selected[i].importance != b.selected[i].importance)
            return false;
    }
    return true;
}

// Subject-disjointness of every fold and full coverage of the subjects.
bool disjoint_folds(const gs::EvalReport& report, std::size_t subjects, std::string& why) {
    std::multiset<std::string> tested;
    for (const auto& f : report.folds) {
        const std::set<std::string> train(f.train_subjects.begin(), f.train_subjects.end());
        for (const auto& s : f.test_subjects) {
            if (train.contains(s)) {
                why = "subject " + s + " in train and test of fold " + std::to_string(f.index);
                return false;
            }
            tested.insert(s);
        }
        if (train.size() + f.test_subjects.size() != subjects) {
            why = "fold " + std::to_string(f.index) + " does not partition the subjects";
            return false;
        }
    }
    for (const auto& s : tested) {
        if (tested.count(s) != 1) {
            why = "subject " + s + " tested more than once";
            return false;
        }
    }
    if (tested.size() != subjects) {
        why = "only " + std::to_string(tested.size()) + " of " + std::to_string(subjects) + " subjects tested";
        return false;
    }
    return true;
}

// Copy of `table` whose rows for `subjects` are overwritten with huge values.
gs::FeatureTable poison(const gs::FeatureTable& table, const std::vector<std::string>& subjects, Engine& e) {
    const std::set<std::string> hit(subjects.begin(), subjects.end());
    gs::FeatureTableBuilder b(table.names());
    for (std::size_t r = 0; r < table.row_count(); ++r) {
        auto values = table.values().row(r);
        if (hit.contains(table.rows()[r].subject_id))
            for (auto& v : values) v = uniform(e, -1e6, 1e6);
        b.add(table.rows()[r], values);
    }
    return std::move(b).build();
}

}  // namespace

Outcome check_gap_repair(std::uint64_t seed, std::size_t trials) {
    Engine e(seed);
    std::size_t ramp_exact = 0, random_ok = 0, filled = 0;
    double worst = 0.0;
    const std::size_t width = gs::kRawPixels + 12;
    for (std::size_t trial = 0; trial < 2 * trials; ++trial) {
        const bool ramp = trial < trials;
        const std::size_t n = index(e, 60, 200);
        std::vector<std::vector<double>> truth(n, std::vector<double>(width));
        std::vector<double> c0(width), c1(width);
        for (std::size_t c = 0; c < width; ++c) {
            c0[c] = static_cast<double>(index(e, 0, 400));
            c1[c] = static_cast<double>(index(e, 0, 6)) - 3.0;
        }
        for (std::size_t t = 0; t < n; ++t)
            for (std::size_t c = 0; c < width; ++c)
                truth[t][c] = ramp ? c0[c] + c1[c] * static_cast<double>(t) : uniform(e, 0, 255);

        const auto missing = random_gaps(e, n);
        gs::SampleStream kept;
        for (std::size_t t = 0; t < n; ++t)
            if (!missing[t]) kept.push_back(from_channels(static_cast<std::int64_t>(t), truth[t]));
        const auto repaired = gs::repair_gaps(kept);

        bool ok = repaired.size() == n;
        for (std::size_t t = 0; ok && t < n; ++t) {
            const auto got = channels(repaired[t]);
            ok = repaired[t].t_index == static_cast<std::int64_t>(t);
            if (!missing[t]) {
                ok = ok && got == truth[t];
                continue;
            }
            ++filled;
            std::size_t a = t, b = t;
            while (missing[a]) --a;
            while (missing[b]) ++b;
            for (std::size_t c = 0; ok && c < width; ++c) {
                if (ramp) {
                    ok = got[c] == truth[t][c];
                } else {
                    const double want = lerp_fill(truth[a][c], truth[b][c], t - a, b - a - 1);
                    worst = std::max(worst, std::abs(got[c] - want));
                    ok = std::abs(got[c] - want) <= 1e-12;
                }
            }
        }
        (ramp ? ramp_exact : random_ok) += ok ? 1 : 0;
    }
    Outcome out;
    out.pass = ramp_exact == trials && random_ok == trials;
    out.detail = "ramps exact " + std::to_string(ramp_exact) + "/" + std::to_string(trials) + ", random within 1e-12 " +
                 std::to_string(random_ok) + "/" + std::to_string(trials) + " (" + std::to_string(filled) +
                 " filled frames, worst |err| " + fmt(worst) + ")";
    return out;
}

Outcome check_segmentation_recovery(std::uint64_t seed, std::size_t recordings) {
    Engine e(seed);
    std::size_t detected = 0, matched = 0, truth_in_range = 0, steps = 0, identity_ok = 0;
    for (std::size_t r = 0; r < recordings; ++r) {
        const auto profile = random_profile(e, 0.05);
        const auto routine = static_cast<gs::Routine>(r % 3);
        const auto synth = gs::generate_recording(profile, routine, 12.0);
        const auto rec = gs::repaired(synth.recording);
        for (auto foot : {gs::Foot::Left, gs::Foot::Right}) {
            const auto& stream = rec.stream(foot);
            const auto seg = gs::segment_foot(total_force(stream));
            std::vector<std::int64_t> strikes;
            for (const auto& s : seg.steps) {
                strikes.push_back(stream[s.start_t].t_index);
                ++steps;
                identity_ok += s.stance_frames() + s.swing_frames() == s.cycle_frames() ? 1 : 0;
            }
            strikes.push_back(stream[seg.steps.back().end_t].t_index);
            const auto& truth = synth.truth.steps(foot);
            for (auto t : strikes) {
                ++detected;
                const bool hit = std::any_of(truth.begin(), truth.end(),
                                             [&](const gs::StepTruth& s) { return std::llabs(s.strike - t) <= 2; });
                matched += hit ? 1 : 0;
            }
            for (const auto& s : truth)
                if (s.strike >= strikes.front() - 2 && s.strike <= strikes.back() + 2) ++truth_in_range;
        }
    }
    Outcome out;
    const double rate = detected ? static_cast<double>(matched) / static_cast<double>(detected) : 0.0;
    out.pass = rate >= 0.99 && truth_in_range == detected && identity_ok == steps;
    out.detail = std::to_string(matched) + "/" + std::to_string(detected) + " strikes within +-2 frames (" +
                 fmt(100.0 * rate) + "%), " + std::to_string(truth_in_range) + " true strikes in the detected span, " +
                 "stance+swing=cycle for " + std::to_string(identity_ok) + "/" + std::to_string(steps) + " steps";
    return out;
}

Outcome check_threshold_plateaus(std::uint64_t seed, std::size_t trials) {
    Engine e(seed);
    std::size_t ok = 0;
    double tightest = 1.0;
    for (std::size_t trial = 0; trial < trials; ++trial) {
        const auto profile = random_profile(e, 0.05);
        const auto synth = gs::generate_recording(profile, gs::Routine::Straight, 10.0);
        const auto foot = trial % 2 ? gs::Foot::Right : gs::Foot::Left;
        const auto& stream = synth.recording.stream(foot);
        const auto force = total_force(stream);
        const double threshold = gs::contact_threshold_for(force);

        // Swing plateau: frames well clear of every contact; stance plateau:
        // the middle 60% of every stance.
        const auto& truth = synth.truth.steps(foot);
        const auto t0 = stream.front().t_index;
        std::vector<int> state(force.size(), 0);  // 0 swing, 1 stance edge, 2 mid-stance
        for (const auto& s : truth) {
            const double len = static_cast<double>(s.toe_off - s.strike);
            for (auto t = s.strike - 3; t <= s.toe_off + 3; ++t) {
                const auto i = t - t0;
                if (i < 0 || i >= static_cast<std::int64_t>(force.size())) continue;
                const double u = static_cast<double>(t - s.strike) / len;
                auto& st = state[static_cast<std::size_t>(i)];
                st = std::max(st, u >= 0.2 && u <= 0.8 ? 2 : 1);
            }
        }
        // Frames before the first truth strike may belong to a stance that
        // began before the recording.
        const auto first = truth.front().strike - t0;
        double swing_top = 0.0, stance_floor = INFINITY;
        for (std::size_t i = static_cast<std::size_t>(std::max<std::int64_t>(first, 0)); i < force.size(); ++i) {
            if (state[i] == 0) swing_top = std::max(swing_top, force[i]);
            if (state[i] == 2) stance_floor = std::min(stance_floor, force[i]);
        }
        const bool between = swing_top < threshold && threshold < stance_floor;
        ok += between ? 1 : 0;
        tightest = std::min(tightest, (threshold - swing_top) / (stance_floor - swing_top));
    }
    Outcome out;
    out.pass = ok == trials;
    out.detail = std::to_string(ok) + "/" + std::to_string(trials) +
                 " traces with swing max < threshold < mid-stance min (closest relative position " + fmt(tightest) +
                 ")";
    return out;
}

Outcome check_hu_invariance(std::uint64_t seed, std::size_t trials) {
    Engine e(seed);
    std::size_t ok = 0;
    double worst = 0.0;
    auto rel = [](double a, double b, double h1, int k) {
        const double floor = 1e-6 * std::pow(std::abs(h1), kHuDegree[static_cast<std::size_t>(k)]);
        return std::abs(a - b) / std::max(std::max(std::abs(a), std::abs(b)), floor);
    };
    for (std::size_t trial = 0; trial < trials; ++trial) {
        const std::size_t margin = 8;
        const auto img = testgen::blob_image(e, gs::kImageWidth, gs::kImageHeight, margin);
        long dx = 0, dy = 0;
        while (dx == 0 && dy == 0) {
            dx = static_cast<long>(index(e, 0, 12)) - 6;
            dy = static_cast<long>(index(e, 0, 12)) - 6;
        }
        gs::Grid moved(img.width(), img.height());
        for (std::size_t y = 0; y < img.height(); ++y)
            for (std::size_t x = 0; x < img.width(); ++x) {
                const long xx = static_cast<long>(x) + dx, yy = static_cast<long>(y) + dy;
                if (xx >= 0 && yy >= 0 && xx < static_cast<long>(img.width()) && yy < static_cast<long>(img.height()))
                    moved.at(static_cast<std::size_t>(xx), static_cast<std::size_t>(yy)) = img.at(x, y);
            }
        gs::Grid scaled = img;
        const double c = std::exp(uniform(e, std::log(0.01), std::log(100.0)));
        for (auto& v : scaled.values()) v *= c;

        const auto h = gs::hu_moments(img), hm = gs::hu_moments(moved), hs = gs::hu_moments(scaled);
        bool all = true;
        for (int k = 0; k < 7; ++k) {
            const auto ku = static_cast<std::size_t>(k);
            const double r1 = rel(hm[ku], h[ku], h[0], k), r2 = rel(hs[ku], h[ku], h[0], k);
            worst = std::max({worst, r1, r2});
            all = all && r1 < 1e-6 && r2 < 1e-6;
        }
        ok += all ? 1 : 0;
    }
    Outcome out;
    out.pass = ok == trials;
    out.detail = std::to_string(ok) + "/" + std::to_string(trials) +
                 " blobs invariant under translation and intensity scaling (worst relative change " + fmt(worst) + ")";
    return out;
}

gs::FeatureTable leakage_table(std::uint64_t seed, std::size_t patients, std::size_t healthy) {
    Engine e(seed);
    std::vector<std::string> names = {"Signal", "Strength", "Const"};
    for (int k = 0; k < 12; ++k) names.push_back("Noise" + std::to_string(k));
    gs::FeatureTableBuilder b(names);
    const auto& grades = gs::mrc_tokens();
    for (std::size_t s = 0; s < patients + healthy; ++s) {
        const bool patient = s < patients;
        const std::string id = (patient ? "P" : "H") + std::to_string(patient ? s + 1 : s - patients + 1);
        std::optional<double> truth;
        if (patient) {
            const auto g = index(e, 0, grades.size() - 2);
            truth = gs::SubjectLabel::patient(std::string(grades[g]), std::string(grades[g + 1])).truth();
        }
        for (auto routine : {gs::Routine::Straight, gs::Routine::RightTurning, gs::Routine::LeftTurning}) {
            std::vector<double> v;
            v.push_back((patient ? 1.0 : 0.0) + uniform(e, -0.2, 0.2));
            v.push_back(patient ? *truth + uniform(e, -0.05, 0.05) : uniform(e, 4.5, 5.0));
            v.push_back(7.0);
            for (int k = 0; k < 12; ++k) v.push_back(uniform(e, -1, 1));
            b.add({id, routine, patient ? gs::Cohort::Patient : gs::Cohort::Healthy, truth}, v);
        }
    }
    return std::move(b).build();
}

Outcome check_leakage_guard(std::uint64_t seed) {
    Engine e(seed);
    const auto table = leakage_table(seed, 12, 8);
    gs::EvalConfig cfg;
    cfg.combo = gs::Combo::All;
    cfg.seed = seed;
    cfg.learner_options.trees = 20;

    std::string why;
    const auto cls = gs::classify_subjects(table, cfg);
    bool pass = disjoint_folds(cls, 20, why);
    std::size_t audited = 0, unchanged = 0;
    for (std::size_t f = 0; pass && f < cls.folds.size(); ++f) {
        const auto again = gs::classify_subjects(poison(table, cls.folds[f].test_subjects, e), cfg);
        ++audited;
        unchanged += same_record(cls.folds[f], again.folds[f]) ? 1 : 0;
    }

    const auto reg = gs::regress_strength(table, cfg);
    if (pass && !disjoint_folds(reg, 12, why)) pass = false;
    for (const auto& f : reg.folds) {
        if (f.test_subjects.size() != 1) {
            pass = false;
            why = "leave-one-out fold with " + std::to_string(f.test_subjects.size()) + " test subjects";
        }
    }
    for (std::size_t f = 0; pass && f < reg.folds.size(); f += 4) {
        const auto again = gs::regress_strength(poison(table, reg.folds[f].test_subjects, e), cfg);
        ++audited;
        unchanged += same_record(reg.folds[f], again.folds[f]) ? 1 : 0;
    }

    Outcome out;
    out.pass = pass && unchanged == audited;
    out.detail = pass ? std::to_string(cls.folds.size()) + " five-fold and " + std::to_string(reg.folds.size()) +
                            " leave-one-out folds subject-disjoint; " + std::to_string(unchanged) + "/" +
                            std::to_string(audited) +
                            " fold records (z-score constants, selection, importances) unchanged when the held-out "
                            "rows are overwritten"
                      : why;
    return out;
}

}  // namespace oracle
