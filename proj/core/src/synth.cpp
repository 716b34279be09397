#include "gaitsense/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

#include "gaitsense/error.hpp"
#include "gaitsense/rng.hpp"

namespace gaitsense {

namespace {

constexpr double kPi = std::numbers::pi;

// Blob geometry in raw sensor units (columns 0..15, rows 0..24 heel to toe).
constexpr double kBlobSigmaX = 2.2;
constexpr double kBlobSigmaY = 3.2;
constexpr double kHeelRow = 3.0;
constexpr double kRollRows = 18.0;

// Effect sizes of the asymmetry parameter on the paretic side.
constexpr double kPareticStanceLoss = 0.18;
constexpr double kNonPareticStanceGain = 0.10;
constexpr double kPareticPressureLoss = 0.35;
constexpr double kPareticRollLoss = 0.25;
constexpr double kPareticImuLoss = 0.15;

// Step-to-step variability; hemiplegic gait grows more variable with
// impairment, so each jitter has a base part and a part scaled by asymmetry.
constexpr double kStrikeJitter = 0.015;  // of the cycle
constexpr double kStanceJitter = 0.02;   // relative
constexpr double kAmplitudeJitter = 0.03;
constexpr double kStrikeJitterPerAsym = 0.03;
constexpr double kStanceJitterPerAsym = 0.06;
constexpr double kAmplitudeJitterPerAsym = 0.07;

struct Stance {
    double strike = 0.0;
    double toe_off = 0.0;
    double amplitude = 1.0;
};

struct FootPlan {
    std::vector<Stance> stances;  // ordered by strike, covering the whole recording
    double pressure_scale = 1.0;
    double roll_scale = 1.0;
    double imu_scale = 1.0;
};

double stance_ratio_of(const GaitProfile& p, Foot foot) {
    return foot == p.hemiplegic_side ? paretic_stance_ratio(p) : nonparetic_stance_ratio(p);
}

void validate(const GaitProfile& p, double duration_s) {
    if (!(duration_s >= 10.0)) throw DomainError("synthetic recordings need a duration of at least 10 s");
    if (!(p.cadence > 0.0)) throw DomainError("cadence must be positive");
    if (!(p.stance_ratio > 0.0 && p.stance_ratio < 1.0)) throw DomainError("inconsistent ratios: stance ratio outside (0, 1)");
    if (!(p.double_support_ratio >= 0.0 && p.double_support_ratio < p.stance_ratio)) {
        throw DomainError("inconsistent ratios: double-support ratio outside [0, stance ratio)");
    }
    if (!(p.asymmetry >= 0.0 && p.asymmetry <= 1.0)) throw DomainError("asymmetry outside [0, 1]");
    if (!(p.noise_sd >= 0.0)) throw DomainError("noise_sd must be non-negative");
    // The second double-support window is what remains after both stances and
    // the first window share one cycle.
    const double second = paretic_stance_ratio(p) + nonparetic_stance_ratio(p) - p.double_support_ratio / 2.0 - 1.0;
    if (second < 0.0) {
        throw DomainError("inconsistent ratios: stance and double-support ratios leave no room for the second "
                          "double-support window");
    }
    if (std::max(paretic_stance_ratio(p), nonparetic_stance_ratio(p)) >= 1.0) {
        throw DomainError("inconsistent ratios: stance fills the whole cycle");
    }
}

std::pair<FootPlan, FootPlan> plan_feet(const GaitProfile& p, double duration_s, Rng& rng) {
    const double cycle = 120.0 / p.cadence;
    const double half_ds = p.double_support_ratio / 2.0;
    const double s_left = stance_ratio_of(p, Foot::Left);
    const double s_right = stance_ratio_of(p, Foot::Right);

    const double strike_jitter = kStrikeJitter + kStrikeJitterPerAsym * p.asymmetry;
    const double stance_jitter = kStanceJitter + kStanceJitterPerAsym * p.asymmetry;
    const double amplitude_jitter = kAmplitudeJitter + kAmplitudeJitterPerAsym * p.asymmetry;

    const double t0 = rng.uniform(0.1, 0.4) * cycle;
    std::vector<double> left_strikes;
    for (int k = -2; t0 + (k - 1) * cycle <= duration_s + 2.0 * cycle; ++k) {
        left_strikes.push_back(t0 + k * cycle + rng.normal(0.0, strike_jitter * cycle));
    }

    FootPlan left, right;
    for (std::size_t k = 0; k + 1 < left_strikes.size(); ++k) {
        const double c = left_strikes[k + 1] - left_strikes[k];
        const double sl = s_left * (1.0 + rng.normal(0.0, stance_jitter));
        const double sr = s_right * (1.0 + rng.normal(0.0, stance_jitter));
        const double l_strike = left_strikes[k];
        const double l_off = l_strike + sl * c;
        const double r_strike = l_off - half_ds * c;
        const double r_off = r_strike + sr * c;
        left.stances.push_back({l_strike, l_off, 1.0 + rng.normal(0.0, amplitude_jitter)});
        right.stances.push_back({r_strike, r_off, 1.0 + rng.normal(0.0, amplitude_jitter)});
    }

    FootPlan& paretic = p.hemiplegic_side == Foot::Left ? left : right;
    paretic.pressure_scale = 1.0 - kPareticPressureLoss * p.asymmetry;
    paretic.roll_scale = 1.0 - kPareticRollLoss * p.asymmetry;
    paretic.imu_scale = 1.0 - kPareticImuLoss * p.asymmetry;
    return {std::move(left), std::move(right)};
}

// Division by an exact power of ten keeps the stored value short in text form.
double round_to(double v, double scale) { return std::round(v * scale) / scale; }

class FootSynth {
public:
    FootSynth(const FootPlan& plan, double noise_sd, Rng rng) : plan_(plan), noise_sd_(noise_sd), rng_(rng) {}

    ShoeSample sample(std::int64_t frame) {
        const double t = static_cast<double>(frame) / kSampleRate;
        while (cursor_ + 1 < plan_.stances.size() && plan_.stances[cursor_ + 1].strike <= t) ++cursor_;
        const Stance& st = plan_.stances[cursor_];
        const Stance& next = plan_.stances[std::min(cursor_ + 1, plan_.stances.size() - 1)];

        ShoeSample s;
        s.t_index = frame;
        s.pressure.assign(kRawPixels, 0.0);
        if (t > st.strike && t < st.toe_off) add_blob(s.pressure, (t - st.strike) / (st.toe_off - st.strike), st.amplitude);
        const double noise = noise_sd_ * kSynthPeakPressure;
        for (auto& v : s.pressure) v = std::max(0.0, std::round(v + rng_.normal(0.0, noise)));

        const double cycle = next.strike > st.strike ? next.strike - st.strike : 1.0;
        const double phase = std::clamp((t - st.strike) / cycle, 0.0, 1.0);
        s.fore_imu = imu(phase, 0.0, 1.0);
        s.hind_imu = imu(phase, -0.3, 0.8);
        return s;
    }

private:
    void add_blob(std::vector<double>& pressure, double u, double amplitude) const {
        const double peak = kSynthPeakPressure * plan_.pressure_scale * amplitude * std::pow(std::sin(kPi * u), 0.4);
        const double xc = 7.5 + 1.0 * std::sin(kPi * u);
        const double yc = kHeelRow + kRollRows * u * plan_.roll_scale;
        for (std::size_t y = 0; y < kRawHeight; ++y) {
            const double dy = (static_cast<double>(y) - yc) / kBlobSigmaY;
            for (std::size_t x = 0; x < kRawWidth; ++x) {
                const double dx = (static_cast<double>(x) - xc) / kBlobSigmaX;
                pressure[y * kRawWidth + x] = peak * std::exp(-0.5 * (dx * dx + dy * dy));
            }
        }
    }

    ImuReading imu(double phase, double shift, double gain) {
        const double w = 2.0 * kPi * phase + shift;
        const double a = plan_.imu_scale * gain;
        const double acc_noise = noise_sd_;
        const double gyro_noise = noise_sd_ * 100.0;
        ImuReading r;
        r.acc_x = a * (0.6 * std::sin(w) + 0.25 * std::sin(2.0 * w + 0.3)) + rng_.normal(0.0, acc_noise);
        r.acc_y = a * 0.3 * std::sin(w + 1.1) + rng_.normal(0.0, acc_noise);
        r.acc_z = 1.0 + a * 0.5 * std::cos(w) + rng_.normal(0.0, acc_noise);
        r.gyro_x = a * 120.0 * std::sin(w + 0.4) + rng_.normal(0.0, gyro_noise);
        r.gyro_y = a * (250.0 * std::sin(w + 2.0) + 60.0 * std::sin(2.0 * w)) + rng_.normal(0.0, gyro_noise);
        r.gyro_z = a * 40.0 * std::sin(w + 0.7) + rng_.normal(0.0, gyro_noise);
        r.acc_x = round_to(r.acc_x, 1e4);
        r.acc_y = round_to(r.acc_y, 1e4);
        r.acc_z = round_to(r.acc_z, 1e4);
        r.gyro_x = round_to(r.gyro_x, 1e2);
        r.gyro_y = round_to(r.gyro_y, 1e2);
        r.gyro_z = round_to(r.gyro_z, 1e2);
        return r;
    }

    const FootPlan& plan_;
    double noise_sd_;
    Rng rng_;
    std::size_t cursor_ = 0;
};

std::vector<StepTruth> truth_of(const FootPlan& plan, std::int64_t frames) {
    std::vector<StepTruth> out;
    for (const auto& st : plan.stances) {
        if (st.strike < 0.0) continue;
        const auto strike = static_cast<std::int64_t>(std::floor(st.strike * kSampleRate)) + 1;
        if (strike >= frames) break;
        const auto toe_off = static_cast<std::int64_t>(std::ceil(st.toe_off * kSampleRate));
        out.push_back({strike, toe_off});
    }
    return out;
}

struct GradeLevel {
    double value;
    std::size_t lo, hi;
};

// Means of two equal or adjacent grades, ascending.
std::vector<GradeLevel> grade_levels() {
    const auto& scale = mrc_scale();
    std::vector<GradeLevel> levels;
    for (std::size_t i = 0; i < scale.size(); ++i) {
        levels.push_back({(scale[i] + scale[i]) / 2.0, i, i});
        if (i + 1 < scale.size()) levels.push_back({(scale[i] + scale[i + 1]) / 2.0, i, i + 1});
    }
    return levels;
}

double invert(const StrengthMap& map, double target, double lo, double hi) {
    const bool increasing = map(hi) >= map(lo);
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        const bool below = map(mid) < target;
        if (below == increasing) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

void check_strength_map(const StrengthMap& map) {
    constexpr int kProbes = 60;
    double prev = map(0.2);
    int direction = 0;
    for (int i = 0; i <= kProbes; ++i) {
        const double a = 0.2 + 0.6 * i / kProbes;
        const double v = map(a);
        if (!(v >= kStrengthMin - 1e-9 && v <= kStrengthMax + 1e-9)) {
            throw DomainError("strength map leaves [2.67, 4.67] at asymmetry " + std::to_string(a));
        }
        const int d = v > prev ? 1 : (v < prev ? -1 : 0);
        if (d != 0 && direction != 0 && d != direction) throw DomainError("strength map is not monotone");
        if (d != 0) direction = d;
        prev = v;
    }
}

std::string subject_id(char prefix, std::size_t n) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%c%02zu", prefix, n);
    return buf;
}

int routine_index(Routine r) {
    switch (r) {
        case Routine::Straight: return 0;
        case Routine::RightTurning: return 1;
        case Routine::LeftTurning: return 2;
    }
    return 0;
}

}  // namespace

double paretic_stance_ratio(const GaitProfile& p) { return p.stance_ratio * (1.0 - kPareticStanceLoss * p.asymmetry); }

double nonparetic_stance_ratio(const GaitProfile& p) {
    return p.stance_ratio * (1.0 + kNonPareticStanceGain * p.asymmetry);
}

SynthRecording generate_recording(const GaitProfile& profile, Routine routine, double duration_s,
                                  const std::string& subject_id, const SubjectLabel& label) {
    validate(profile, duration_s);
    Rng rng(profile.seed);
    auto schedule_rng = rng.fork(1);
    const auto [left_plan, right_plan] = plan_feet(profile, duration_s, schedule_rng);

    const auto frames = static_cast<std::int64_t>(std::llround(duration_s * kSampleRate));
    SynthRecording out;
    out.recording.subject_id = subject_id;
    out.recording.routine = routine;
    out.recording.label = label;
    FootSynth left(left_plan, profile.noise_sd, rng.fork(2));
    FootSynth right(right_plan, profile.noise_sd, rng.fork(3));
    out.recording.left.reserve(static_cast<std::size_t>(frames));
    out.recording.right.reserve(static_cast<std::size_t>(frames));
    for (std::int64_t f = 0; f < frames; ++f) {
        out.recording.left.push_back(left.sample(f));
        out.recording.right.push_back(right.sample(f));
    }
    out.truth.left = truth_of(left_plan, frames);
    out.truth.right = truth_of(right_plan, frames);
    return out;
}

double linear_strength_map(double asymmetry) {
    return kStrengthMax - (asymmetry - 0.2) / 0.6 * (kStrengthMax - kStrengthMin);
}

double routine_duration(Routine routine) { return routine == Routine::Straight ? 12.0 : 24.0; }

SynthRecording CohortPlan::recording(const SynthSubject& subject, Routine routine) const {
    GaitProfile profile = subject.profile;
    profile.seed = Rng::mix(subject.profile.seed + 1 + static_cast<std::uint64_t>(routine_index(routine)));
    return generate_recording(profile, routine, routine_duration(routine), subject.id, subject.label);
}

CohortPlan generate_cohort(std::size_t n_patients, std::size_t n_healthy, const StrengthMap& strength_map,
                           std::uint64_t seed) {
    if (n_patients < 2) throw DomainError("a cohort needs at least 2 patients for regression");
    check_strength_map(strength_map);

    const auto levels = grade_levels();
    const auto& tokens = mrc_tokens();
    const double range_lo = std::min(strength_map(0.2), strength_map(0.8));
    const double range_hi = std::max(strength_map(0.2), strength_map(0.8));

    CohortPlan plan;
    plan.seed = seed;
    Rng rng(seed);
    for (std::size_t i = 0; i < n_patients; ++i) {
        Rng r = rng.fork(i);
        double a = r.uniform(0.2, 0.8);
        const double s = strength_map(a);
        // Nearest reachable grade mean; the asymmetry is moved onto it so the
        // physicians' mean grade equals strength_map(a) exactly.
        const GradeLevel* best = nullptr;
        for (const auto& level : levels) {
            if (level.value < range_lo - 1e-9 || level.value > range_hi + 1e-9) continue;
            if (!best || std::abs(level.value - s) < std::abs(best->value - s)) best = &level;
        }
        if (!best) throw DomainError("strength map range holds no physician grade level");
        a = invert(strength_map, best->value, 0.2, 0.8);

        SynthSubject subject;
        subject.id = subject_id('P', i + 1);
        subject.label = SubjectLabel::patient(std::string(tokens[best->lo]), std::string(tokens[best->hi]));
        subject.strength = best->value;
        subject.profile.asymmetry = a;
        subject.profile.hemiplegic_side = r.uniform() < 18.0 / 23.0 ? Foot::Right : Foot::Left;
        subject.profile.cadence = 108.0 - 25.0 * a + r.normal(0.0, 4.0);
        subject.profile.stance_ratio = 0.62 + r.normal(0.0, 0.01);
        subject.profile.seed = r.next();
        plan.subjects.push_back(std::move(subject));
    }
    for (std::size_t i = 0; i < n_healthy; ++i) {
        Rng r = rng.fork(100000 + i);
        SynthSubject subject;
        subject.id = subject_id('H', i + 1);
        subject.label = SubjectLabel::healthy();
        subject.profile.asymmetry = r.uniform(0.0, 0.05);
        subject.profile.hemiplegic_side = r.uniform() < 0.5 ? Foot::Right : Foot::Left;
        subject.profile.cadence = 108.0 + r.normal(0.0, 4.0);
        subject.profile.stance_ratio = 0.62 + r.normal(0.0, 0.01);
        subject.profile.seed = r.next();
        plan.subjects.push_back(std::move(subject));
    }
    return plan;
}

std::filesystem::path recording_file_name(const std::string& subject_id, Routine routine) {
    return subject_id + "_" + std::string(routine_token(routine)) + ".gaitrec";
}

nlohmann::ordered_json truth_json(const SynthSubject& subject, Routine routine, const RecordingTruth& truth) {
    auto steps = [](const std::vector<StepTruth>& v) {
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (const auto& s : v) arr.push_back({{"strike", s.strike}, {"toe_off", s.toe_off}});
        return arr;
    };
    nlohmann::ordered_json j;
    j["subject_id"] = subject.id;
    j["routine"] = routine_token(routine);
    j["cohort"] = cohort_token(subject.label.cohort);
    j["asymmetry"] = subject.profile.asymmetry;
    j["hemiplegic_side"] = std::string(1, foot_letter(subject.profile.hemiplegic_side));
    j["cadence"] = subject.profile.cadence;
    j["strength"] = subject.strength ? nlohmann::ordered_json(*subject.strength) : nlohmann::ordered_json(nullptr);
    j["left"] = steps(truth.left);
    j["right"] = steps(truth.right);
    return j;
}

std::vector<std::filesystem::path> write_cohort(const CohortPlan& plan, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    std::vector<std::filesystem::path> paths;
    nlohmann::ordered_json manifest;
    manifest["seed"] = plan.seed;
    manifest["recordings"] = nlohmann::ordered_json::array();
    for (const auto& subject : plan.subjects) {
        for (auto routine : {Routine::Straight, Routine::RightTurning, Routine::LeftTurning}) {
            const auto synth = plan.recording(subject, routine);
            const auto path = dir / recording_file_name(subject.id, routine);
            write_recording(path, synth.recording);
            paths.push_back(path);
            auto entry = truth_json(subject, routine, synth.truth);
            entry["file"] = path.filename().string();
            manifest["recordings"].push_back(std::move(entry));
        }
    }
    std::ofstream out(dir / "truth.json", std::ios::binary);
    if (!out) throw Error("cannot write " + (dir / "truth.json").string());
    out << manifest.dump(2) << '\n';
    return paths;
}

}  // namespace gaitsense
