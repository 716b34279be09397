#include "gaitsense/recording.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <span>

#include "gaitsense/error.hpp"
#include "text_util.hpp"

namespace gaitsense {

namespace {

constexpr std::array<std::string_view, 7> kGradeTokens = {"3-", "3", "3+", "4-", "4", "4+", "5-"};
constexpr std::array<double, 7> kGradeValues = {2.67, 3.00, 3.33, 3.67, 4.00, 4.33, 4.67};

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> tokens(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
        const std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
        if (i > start) out.push_back(line.substr(start, i - start));
    }
    return out;
}

std::pair<std::string_view, std::string_view> key_value(std::string_view token) {
    const auto eq = token.find('=');
    if (eq == std::string_view::npos) return {token, {}};
    return {token.substr(0, eq), token.substr(eq + 1)};
}

std::vector<double> parse_values(std::string_view field, std::size_t line_no, std::string_view name) {
    std::vector<double> values;
    for (auto part : detail::split(field, ',')) {
        auto v = detail::parse_double(part);
        if (!v || !std::isfinite(*v)) {
            throw ParseError(line_no, "non-numeric value '" + std::string(part) + "' in " + std::string(name));
        }
        values.push_back(*v);
    }
    return values;
}

ImuReading parse_imu(std::string_view field, std::size_t line_no, std::string_view name) {
    const auto values = parse_values(field, line_no, name);
    if (values.size() != 6) {
        throw ParseError(line_no, std::string(name) + " needs 6 values, got " + std::to_string(values.size()));
    }
    return ImuReading::from_array({values[0], values[1], values[2], values[3], values[4], values[5]});
}

void append_values(std::string& out, std::span<const double> values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out.push_back(',');
        detail::append_double(out, values[i]);
    }
}

void append_sample(std::string& out, char foot, const ShoeSample& s) {
    out.push_back(foot);
    out += " t=";
    out += std::to_string(s.t_index);
    out += " p=";
    append_values(out, s.pressure);
    out += " fore=";
    const auto fore = s.fore_imu.as_array();
    append_values(out, fore);
    out += " hind=";
    const auto hind = s.hind_imu.as_array();
    append_values(out, hind);
    out.push_back('\n');
}

ImuReading lerp(const ImuReading& a, const ImuReading& b, double i, double span) {
    const auto va = a.as_array();
    const auto vb = b.as_array();
    std::array<double, 6> out{};
    for (std::size_t k = 0; k < 6; ++k) out[k] = va[k] + (i * (vb[k] - va[k])) / span;
    return ImuReading::from_array(out);
}

}  // namespace

char foot_letter(Foot foot) { return foot == Foot::Left ? 'L' : 'R'; }

std::string_view routine_token(Routine routine) {
    switch (routine) {
        case Routine::Straight: return "straight";
        case Routine::RightTurning: return "rt";
        case Routine::LeftTurning: return "lt";
    }
    return "straight";
}

Routine parse_routine(std::string_view token) {
    if (token == "straight") return Routine::Straight;
    if (token == "rt") return Routine::RightTurning;
    if (token == "lt") return Routine::LeftTurning;
    throw DomainError("unknown routine '" + std::string(token) + "'");
}

std::string_view cohort_token(Cohort cohort) { return cohort == Cohort::Patient ? "patient" : "healthy"; }

Cohort parse_cohort(std::string_view token) {
    if (token == "patient") return Cohort::Patient;
    if (token == "healthy") return Cohort::Healthy;
    throw DomainError("unknown cohort '" + std::string(token) + "'");
}

const std::array<double, 7>& mrc_scale() { return kGradeValues; }
const std::array<std::string_view, 7>& mrc_tokens() { return kGradeTokens; }

bool is_mrc_grade(std::string_view grade) {
    return std::find(kGradeTokens.begin(), kGradeTokens.end(), grade) != kGradeTokens.end();
}

double mrc_numeric(std::string_view grade) {
    for (std::size_t i = 0; i < kGradeTokens.size(); ++i) {
        if (kGradeTokens[i] == grade) return kGradeValues[i];
    }
    throw DomainError("unknown MRC grade '" + std::string(grade) + "'");
}

std::optional<double> SubjectLabel::truth() const {
    if (cohort != Cohort::Patient || !mrc_a || !mrc_b) return std::nullopt;
    return (mrc_numeric(*mrc_a) + mrc_numeric(*mrc_b)) / 2.0;
}

SubjectLabel SubjectLabel::patient(std::string grade_a, std::string grade_b) {
    mrc_numeric(grade_a);
    mrc_numeric(grade_b);
    return {Cohort::Patient, std::move(grade_a), std::move(grade_b)};
}

TestRecording parse_recording(std::istream& in) {
    TestRecording rec;
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;

    while (std::getline(in, line)) {
        ++line_no;
        const auto text = trim(line);
        if (text.empty()) continue;

        if (!have_header) {
            const auto toks = tokens(text);
            if (toks.size() < 2 || toks[0] != "#gaitrec" || toks[1] != "v1") {
                throw ParseError(line_no, "expected '#gaitrec v1' header");
            }
            std::map<std::string_view, std::string_view> fields;
            for (std::size_t i = 2; i < toks.size(); ++i) {
                auto [k, v] = key_value(toks[i]);
                fields[k] = v;
            }
            for (const char* required : {"subject", "routine", "cohort"}) {
                if (!fields.contains(required) || fields[required].empty()) {
                    throw ParseError(line_no, std::string("header missing '") + required + "'");
                }
            }
            rec.subject_id = std::string(fields["subject"]);
            try {
                rec.routine = parse_routine(fields["routine"]);
                rec.label.cohort = parse_cohort(fields["cohort"]);
            } catch (const DomainError& e) {
                throw ParseError(line_no, e.what());
            }
            const bool has_a = fields.contains("mrc_a");
            const bool has_b = fields.contains("mrc_b");
            if (rec.label.cohort == Cohort::Patient) {
                if (!has_a || !has_b) throw ParseError(line_no, "patient header needs mrc_a and mrc_b");
                for (auto g : {fields["mrc_a"], fields["mrc_b"]}) {
                    if (!is_mrc_grade(g)) throw ParseError(line_no, "unknown MRC grade '" + std::string(g) + "'");
                }
                rec.label.mrc_a = std::string(fields["mrc_a"]);
                rec.label.mrc_b = std::string(fields["mrc_b"]);
            } else if (has_a || has_b) {
                throw ParseError(line_no, "healthy subjects carry no MRC grades");
            }
            have_header = true;
            continue;
        }

        if (text.front() == '#') continue;

        const auto toks = tokens(text);
        if (toks[0] != "L" && toks[0] != "R") {
            throw ParseError(line_no, "expected foot 'L' or 'R', got '" + std::string(toks[0]) + "'");
        }
        const Foot foot = toks[0] == "L" ? Foot::Left : Foot::Right;

        ShoeSample sample;
        bool has_t = false, has_p = false, has_fore = false, has_hind = false;
        for (std::size_t i = 1; i < toks.size(); ++i) {
            auto [k, v] = key_value(toks[i]);
            if (k == "t") {
                auto t = detail::parse_int<std::int64_t>(v);
                if (!t) throw ParseError(line_no, "bad frame index '" + std::string(v) + "'");
                sample.t_index = *t;
                has_t = true;
            } else if (k == "p") {
                sample.pressure = parse_values(v, line_no, "p");
                if (sample.pressure.size() != kRawPixels) {
                    throw ParseError(line_no, "pressure needs " + std::to_string(kRawPixels) + " values (16x25), got " +
                                                  std::to_string(sample.pressure.size()));
                }
                if (std::any_of(sample.pressure.begin(), sample.pressure.end(), [](double x) { return x < 0; })) {
                    throw ParseError(line_no, "negative pressure value");
                }
                has_p = true;
            } else if (k == "fore") {
                sample.fore_imu = parse_imu(v, line_no, "fore");
                has_fore = true;
            } else if (k == "hind") {
                sample.hind_imu = parse_imu(v, line_no, "hind");
                has_hind = true;
            }
        }
        if (!has_t || !has_p || !has_fore || !has_hind) {
            throw ParseError(line_no, "sample line needs t=, p=, fore= and hind=");
        }
        auto& stream = rec.stream(foot);
        if (!stream.empty() && sample.t_index <= stream.back().t_index) {
            throw ParseError(line_no, "frame index " + std::to_string(sample.t_index) + " not increasing for foot " +
                                          std::string(1, foot_letter(foot)));
        }
        stream.push_back(std::move(sample));
    }
    if (!have_header) throw ParseError(line_no, "empty recording");
    return rec;
}

TestRecording parse_recording(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open recording " + path.string());
    return parse_recording(in);
}

void write_recording(std::ostream& out, const TestRecording& rec) {
    std::string buf = "#gaitrec v1 subject=" + rec.subject_id + " routine=" + std::string(routine_token(rec.routine)) +
                      " cohort=" + std::string(cohort_token(rec.label.cohort));
    if (rec.label.mrc_a && rec.label.mrc_b) buf += " mrc_a=" + *rec.label.mrc_a + " mrc_b=" + *rec.label.mrc_b;
    buf.push_back('\n');
    out << buf;

    std::size_t li = 0, ri = 0;
    while (li < rec.left.size() || ri < rec.right.size()) {
        buf.clear();
        const bool take_left =
            ri >= rec.right.size() || (li < rec.left.size() && rec.left[li].t_index <= rec.right[ri].t_index);
        if (take_left) {
            append_sample(buf, 'L', rec.left[li++]);
        } else {
            append_sample(buf, 'R', rec.right[ri++]);
        }
        out << buf;
    }
}

void write_recording(const std::filesystem::path& path, const TestRecording& rec) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write recording " + path.string());
    write_recording(out, rec);
}

SampleStream repair_gaps(const SampleStream& stream, std::size_t max_gap) {
    SampleStream out;
    if (stream.empty()) return out;
    out.reserve(static_cast<std::size_t>(stream.back().t_index - stream.front().t_index + 1));
    out.push_back(stream.front());
    for (std::size_t s = 1; s < stream.size(); ++s) {
        const ShoeSample& a = stream[s - 1];
        const ShoeSample& b = stream[s];
        if (b.t_index <= a.t_index) throw GapError("frame indices not increasing at t=" + std::to_string(b.t_index));
        const auto missing = static_cast<std::size_t>(b.t_index - a.t_index - 1);
        if (missing > max_gap) {
            throw GapError("gap of " + std::to_string(missing) + " frames after t=" + std::to_string(a.t_index) +
                           " exceeds the repairable maximum of " + std::to_string(max_gap));
        }
        const double span = static_cast<double>(missing + 1);
        for (std::size_t i = 1; i <= missing; ++i) {
            const double w = static_cast<double>(i);
            ShoeSample fill;
            fill.t_index = a.t_index + static_cast<std::int64_t>(i);
            fill.pressure.resize(a.pressure.size());
            for (std::size_t k = 0; k < a.pressure.size(); ++k) {
                fill.pressure[k] = a.pressure[k] + (w * (b.pressure[k] - a.pressure[k])) / span;
            }
            fill.fore_imu = lerp(a.fore_imu, b.fore_imu, w, span);
            fill.hind_imu = lerp(a.hind_imu, b.hind_imu, w, span);
            out.push_back(std::move(fill));
        }
        out.push_back(b);
    }
    return out;
}

SampleStream repair_gaps(const SampleStream& stream, std::int64_t first, std::int64_t last, std::size_t max_gap) {
    if (stream.empty() || stream.front().t_index > first) {
        throw GapError("boundary gap: frame " + std::to_string(first) + " missing at stream start");
    }
    if (stream.back().t_index < last) {
        throw GapError("boundary gap: frame " + std::to_string(last) + " missing at stream end");
    }
    SampleStream out = repair_gaps(stream, max_gap);
    std::erase_if(out, [&](const ShoeSample& s) { return s.t_index < first || s.t_index > last; });
    return out;
}

void synchronize(TestRecording& rec) {
    if (rec.left.empty() || rec.right.empty()) throw GapError("cannot synchronize an empty foot stream");
    const auto first = std::max(rec.left.front().t_index, rec.right.front().t_index);
    const auto last = std::min(rec.left.back().t_index, rec.right.back().t_index);
    if (first > last) throw GapError("left and right streams do not overlap");
    for (auto* stream : {&rec.left, &rec.right}) {
        std::erase_if(*stream, [&](const ShoeSample& s) { return s.t_index < first || s.t_index > last; });
    }
}

TestRecording repaired(const TestRecording& rec, std::size_t max_gap) {
    TestRecording out = rec;
    out.left = repair_gaps(rec.left, max_gap);
    out.right = repair_gaps(rec.right, max_gap);
    synchronize(out);
    return out;
}

}  // namespace gaitsense
