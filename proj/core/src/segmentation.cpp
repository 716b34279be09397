#include "gaitsense/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "gaitsense/error.hpp"
#include "text_util.hpp"

namespace gaitsense {

std::size_t StepSpan::double_support_frames() const {
    std::size_t total = 0;
    for (const auto& w : double_support) total += w.length();
    return total;
}

std::vector<double> kmeans_1d(std::span<const double> values, std::size_t k, std::size_t max_iterations,
                              double tolerance) {
    if (k == 0) throw DomainError("k-means needs k >= 1");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const auto distinct = static_cast<std::size_t>(std::unique(sorted.begin(), sorted.end()) - sorted.begin());
    if (distinct < k) {
        throw DegenerateInputError("k-means needs at least " + std::to_string(k) + " distinct values, got " +
                                   std::to_string(distinct));
    }
    // Seeds are order statistics of the distinct values so no two coincide.
    sorted.resize(distinct);

    std::vector<double> centroids(k);
    const std::size_t n = sorted.size();
    if (k == 1) {
        centroids[0] = sorted[n / 2];
    } else {
        for (std::size_t c = 0; c < k; ++c) centroids[c] = sorted[(c * (n - 1)) / (k - 1)];
    }

    std::vector<double> sums(k);
    std::vector<std::size_t> counts(k);
    for (std::size_t iter = 0; iter < max_iterations; ++iter) {
        std::fill(sums.begin(), sums.end(), 0.0);
        std::fill(counts.begin(), counts.end(), 0);
        for (double v : values) {
            std::size_t best = 0;
            double best_d = std::abs(v - centroids[0]);
            for (std::size_t c = 1; c < k; ++c) {
                const double d = std::abs(v - centroids[c]);
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            sums[best] += v;
            counts[best]++;
        }
        double shift = 0.0;
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] == 0) continue;
            const double next = sums[c] / static_cast<double>(counts[c]);
            shift = std::max(shift, std::abs(next - centroids[c]));
            centroids[c] = next;
        }
        if (shift <= tolerance) break;
    }
    std::sort(centroids.begin(), centroids.end());
    return centroids;
}

double contact_threshold(std::span<const double> centroids) {
    if (centroids.size() < 2) throw DomainError("contact threshold needs two centroids");
    return 0.9 * centroids[0] + 0.1 * centroids[1];
}

double contact_threshold_for(std::span<const double> total_force) {
    const auto centroids = kmeans_1d(total_force, 3);
    return contact_threshold(centroids);
}

ContactMask contact_mask(std::span<const double> force, double threshold, std::size_t min_run) {
    const std::size_t n = force.size();
    ContactMask out(n, 0);
    if (n == 0) return out;
    auto raw = [&](std::size_t t) -> std::uint8_t { return force[t] > threshold ? 1 : 0; };
    std::uint8_t state = raw(0);
    for (std::size_t t = 0; t < n; ++t) {
        const auto r = raw(t);
        if (r != state && t + min_run <= n) {
            bool holds = true;
            for (std::size_t u = t; u < t + min_run; ++u) {
                if (raw(u) != r) {
                    holds = false;
                    break;
                }
            }
            if (holds) state = r;
        }
        out[t] = state;
    }
    return out;
}

std::vector<StepSpan> steps_from_contact(const ContactMask& contact) {
    std::vector<std::size_t> strikes;
    for (std::size_t t = 1; t < contact.size(); ++t) {
        if (contact[t] && !contact[t - 1]) strikes.push_back(t);
    }
    std::vector<StepSpan> steps;
    for (std::size_t i = 0; i + 1 < strikes.size(); ++i) {
        StepSpan s;
        s.k = steps.size();
        s.start_t = strikes[i];
        s.end_t = strikes[i + 1];
        s.stance_end_t = s.end_t;
        for (std::size_t t = s.start_t + 1; t < s.end_t; ++t) {
            if (!contact[t] && contact[t - 1]) {
                s.stance_end_t = t;
                break;
            }
        }
        steps.push_back(std::move(s));
    }
    return steps;
}

Segmentation detect_steps(std::span<const double> total_force, double threshold) {
    Segmentation seg;
    seg.threshold = threshold;
    seg.contact = contact_mask(total_force, threshold);
    seg.steps = steps_from_contact(seg.contact);
    if (seg.steps.size() < kMinSteps) {
        throw DegenerateInputError("recording too short: " + std::to_string(seg.steps.size()) +
                                   " complete steps detected, need " + std::to_string(kMinSteps));
    }
    return seg;
}

Segmentation segment_foot(std::span<const double> total_force) {
    return detect_steps(total_force, contact_threshold_for(total_force));
}

void label_phases(std::vector<StepSpan>& left_steps, std::vector<StepSpan>& right_steps, const ContactMask& left,
                  const ContactMask& right) {
    if (left.size() != right.size()) {
        throw Error("synchronization error: left and right contact traces differ in length (" +
                    std::to_string(left.size()) + " vs " + std::to_string(right.size()) + ")");
    }
    auto fill = [&](std::vector<StepSpan>& steps) {
        for (auto& s : steps) {
            if (s.end_t > left.size()) throw Error("synchronization error: step extends past the common time base");
            s.double_support.clear();
            std::size_t t = s.start_t;
            while (t < s.end_t) {
                if (left[t] && right[t]) {
                    const std::size_t begin = t;
                    while (t < s.end_t && left[t] && right[t]) ++t;
                    s.double_support.push_back({begin, t});
                } else {
                    ++t;
                }
            }
        }
    };
    fill(left_steps);
    fill(right_steps);
}

void write_segmentation_csv(std::ostream& out, std::span<const double> total_force, const Segmentation& seg) {
    std::vector<long> step_of(total_force.size(), -1);
    for (const auto& s : seg.steps)
        for (std::size_t t = s.start_t; t < s.end_t && t < step_of.size(); ++t) step_of[t] = static_cast<long>(s.k);
    std::string line = "t,total_force,contact,step_index\n";
    out << line;
    for (std::size_t t = 0; t < total_force.size(); ++t) {
        line = std::to_string(t) + ',';
        detail::append_double(line, total_force[t]);
        line += ',' + std::to_string(t < seg.contact.size() ? int(seg.contact[t]) : 0) + ',' +
                std::to_string(step_of[t]) + '\n';
        out << line;
    }
}

}  // namespace gaitsense
