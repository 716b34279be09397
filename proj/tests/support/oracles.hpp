#pragma once

// Brute-force reference formulas for the tests. Written from the definitions,
// not from the library: plain loops, long double accumulators, sort-based order
// statistics, and no shared helpers with the code under test.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "gaitsense/grid.hpp"

namespace oracle {

using real = long double;

// |a - b| <= rel * max(|a|, |b|) + abs_floor.
inline bool close(double a, double b, double rel, double abs_floor = 1e-12) {
    if (std::isnan(a) || std::isnan(b)) return false;
    const double scale = std::max(std::abs(a), std::abs(b));
    return std::abs(a - b) <= rel * scale + abs_floor;
}

// i-th of n inserted values between a and b.
inline double lerp_fill(double a, double b, std::size_t i, std::size_t n) {
    const real w = static_cast<real>(i) / static_cast<real>(n + 1);
    return static_cast<double>(static_cast<real>(a) + w * (static_cast<real>(b) - static_cast<real>(a)));
}

// Align-corners bilinear value at output pixel (x, y), written as a sum of
// tent weights over every input pixel.
inline double bilinear_pixel(const gaitsense::Grid& raw, std::size_t out_w, std::size_t out_h, std::size_t x,
                             std::size_t y) {
    const real u = static_cast<real>(x) * static_cast<real>(raw.width() - 1) / static_cast<real>(out_w - 1);
    const real v = static_cast<real>(y) * static_cast<real>(raw.height() - 1) / static_cast<real>(out_h - 1);
    real acc = 0;
    for (std::size_t j = 0; j < raw.height(); ++j) {
        const real wy = std::max<real>(0, 1 - std::fabs(v - static_cast<real>(j)));
        if (wy == 0) continue;
        for (std::size_t i = 0; i < raw.width(); ++i) {
            const real wx = std::max<real>(0, 1 - std::fabs(u - static_cast<real>(i)));
            acc += wx * wy * raw.at(i, j);
        }
    }
    return static_cast<double>(acc);
}

// Direct 2-D convolution with the 25 unseparated weights exp(-r^2 / 2), edge
// replication at the borders.
inline double gaussian_pixel(const gaitsense::Grid& img, std::size_t x, std::size_t y) {
    real norm = 0, acc = 0;
    for (int dy = -2; dy <= 2; ++dy) {
        for (int dx = -2; dx <= 2; ++dx) {
            const real w = std::exp(-static_cast<real>(dx * dx + dy * dy) / 2);
            const long xx = std::clamp<long>(static_cast<long>(x) + dx, 0, static_cast<long>(img.width()) - 1);
            const long yy = std::clamp<long>(static_cast<long>(y) + dy, 0, static_cast<long>(img.height()) - 1);
            acc += w * img.at(static_cast<std::size_t>(xx), static_cast<std::size_t>(yy));
            norm += w;
        }
    }
    return static_cast<double>(acc / norm);
}

inline double area_threshold(const std::vector<gaitsense::Grid>& frames) {
    std::vector<double> all;
    for (const auto& f : frames) all.insert(all.end(), f.values().begin(), f.values().end());
    real sum = 0;
    for (double v : all) sum += v;
    const double lo = *std::min_element(all.begin(), all.end());
    return static_cast<double>(0.7L * sum / static_cast<real>(all.size()) + 0.3L * lo);
}

// Fdes_1..9 for frame t of a stream, recomputing the centre-of-pressure trail
// from the first frame on. Coordinates are 1-based.
inline std::array<double, 9> biomech(const std::vector<gaitsense::Grid>& frames, std::size_t t, double delta) {
    std::vector<std::array<real, 2>> centre(t + 1);
    std::array<double, 9> out{};
    for (std::size_t f = 0; f <= t; ++f) {
        const auto& img = frames[f];
        real total = 0, sx = 0, sy = 0;
        std::size_t area = 0;
        for (std::size_t y = 0; y < img.height(); ++y)
            for (std::size_t x = 0; x < img.width(); ++x) {
                const real p = img.at(x, y);
                total += p;
                sx += p * static_cast<real>(x + 1);
                sy += p * static_cast<real>(y + 1);
                area += img.at(x, y) > delta ? 1 : 0;
            }
        if (area > 0 && total > 0) {
            centre[f] = {sx / total, sy / total};
        } else if (f > 0) {
            centre[f] = centre[f - 1];
        } else {
            centre[f] = {(static_cast<real>(img.width()) + 1) / 2, (static_cast<real>(img.height()) + 1) / 2};
        }
        if (f == t) {
            out[0] = static_cast<double>(total);
            out[1] = static_cast<double>(area);
            out[2] = area > 0 ? static_cast<double>(total / static_cast<real>(area)) : 0.0;
            out[3] = static_cast<double>(centre[f][0]);
            out[4] = static_cast<double>(centre[f][1]);
            if (f > 0) {
                const real vx = centre[f][0] - centre[f - 1][0];
                const real vy = centre[f][1] - centre[f - 1][1];
                out[5] = static_cast<double>(vx);
                out[6] = static_cast<double>(vy);
                out[7] = static_cast<double>(std::sqrt(vx * vx + vy * vy));
                out[8] = static_cast<double>(std::atan2(vx, vy));
            }
        }
    }
    return out;
}

inline double sorted_median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

// Shannon entropy (bits) with bin b covering [lo + b*w, lo + (b+1)*w), the
// last bin closed on the right.
inline double entropy(std::span<const double> values, std::size_t bins) {
    const double lo = *std::min_element(values.begin(), values.end());
    const double hi = *std::max_element(values.begin(), values.end());
    if (!(hi > lo)) return 0.0;
    std::vector<std::size_t> count(bins, 0);
    for (double v : values) {
        std::size_t b = 0;
        while (b + 1 < bins && (v - lo) * static_cast<double>(bins) / (hi - lo) >= static_cast<double>(b + 1)) ++b;
        count[b]++;
    }
    real h = 0;
    for (auto c : count) {
        if (c == 0) continue;
        const real p = static_cast<real>(c) / static_cast<real>(values.size());
        h -= p * std::log2(p);
    }
    return static_cast<double>(h);
}

// Hu invariants from raw moments m_pq, converted to central moments by the
// binomial expansion, each divided by the total mass.
inline std::array<double, 7> hu(const gaitsense::Grid& img) {
    real m[4][4] = {};
    for (std::size_t y = 0; y < img.height(); ++y)
        for (std::size_t x = 0; x < img.width(); ++x) {
            const real p = img.at(x, y);
            const real xx = static_cast<real>(x + 1), yy = static_cast<real>(y + 1);
            for (int a = 0; a < 4; ++a)
                for (int b = 0; a + b < 4; ++b) m[a][b] += p * std::pow(xx, a) * std::pow(yy, b);
        }
    if (!(m[0][0] > 0)) return {};
    const real cx = m[1][0] / m[0][0], cy = m[0][1] / m[0][0];
    auto binom = [](int n, int k) {
        real r = 1;
        for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
        return r;
    };
    auto mu = [&](int p, int q) {
        real s = 0;
        for (int i = 0; i <= p; ++i)
            for (int j = 0; j <= q; ++j)
                s += binom(p, i) * binom(q, j) * std::pow(-cx, p - i) * std::pow(-cy, q - j) * m[i][j];
        return s / m[0][0];
    };
    const real n20 = mu(2, 0), n02 = mu(0, 2), n11 = mu(1, 1);
    const real n30 = mu(3, 0), n03 = mu(0, 3), n21 = mu(2, 1), n12 = mu(1, 2);
    std::array<double, 7> h{};
    h[0] = static_cast<double>(n20 + n02);
    h[1] = static_cast<double>((n20 - n02) * (n20 - n02) + 4 * n11 * n11);
    h[2] = static_cast<double>((n30 - 3 * n12) * (n30 - 3 * n12) + (3 * n21 - n03) * (3 * n21 - n03));
    h[3] = static_cast<double>((n30 + n12) * (n30 + n12) + (n21 + n03) * (n21 + n03));
    h[4] = static_cast<double>(
        (n30 - 3 * n12) * (n30 + n12) * ((n30 + n12) * (n30 + n12) - 3 * (n21 + n03) * (n21 + n03)) +
        (3 * n21 - n03) * (n21 + n03) * (3 * (n30 + n12) * (n30 + n12) - (n21 + n03) * (n21 + n03)));
    h[5] = static_cast<double>((n20 - n02) * ((n30 + n12) * (n30 + n12) - (n21 + n03) * (n21 + n03)) +
                               4 * n11 * (n30 + n12) * (n21 + n03));
    h[6] = static_cast<double>(
        (3 * n21 - n03) * (n30 + n12) * ((n30 + n12) * (n30 + n12) - 3 * (n21 + n03) * (n21 + n03)) -
        (n30 - 3 * n12) * (n21 + n03) * (3 * (n30 + n12) * (n30 + n12) - (n21 + n03) * (n21 + n03)));
    return h;
}

// Polynomial degree of each Hu invariant in the normalized moments; sets the
// natural scale h1^degree used as a comparison floor.
inline constexpr std::array<int, 7> kHuDegree = {1, 2, 3, 3, 6, 4, 6};

inline bool hu_close(double got, double want, double h1, int k, double rel) {
    const double floor = rel * 1e-6 * std::pow(std::abs(h1), kHuDegree[static_cast<std::size_t>(k)]);
    return close(got, want, rel, floor);
}

// Fdes_10..24 of one image.
inline std::array<double, 15> image_features(const gaitsense::Grid& img) {
    std::vector<double> v(img.values().begin(), img.values().end());
    std::array<double, 15> out{};
    const double mx = *std::max_element(v.begin(), v.end());
    const double mn = *std::min_element(v.begin(), v.end());
    real sum = 0;
    for (double x : v) sum += x;
    const real mean = sum / static_cast<real>(v.size());
    real ss = 0;
    for (double x : v) ss += (x - mean) * (x - mean);
    const double sd = static_cast<double>(std::sqrt(ss / static_cast<real>(v.size())));
    const double med = sorted_median(v);
    out[0] = mx;
    out[1] = mn;
    out[2] = mx - mn;
    out[3] = med;
    out[4] = static_cast<double>(mean);
    out[5] = sd;
    out[6] = med != 0.0 ? sd / med : 0.0;
    out[7] = entropy(v, 64);
    const auto h = hu(img);
    std::copy(h.begin(), h.end(), out.begin() + 8);
    return out;
}

// Prominence of a strict local maximum at p: its height above the higher of
// the two lowest points reached before meeting a higher sample (or the edge).
inline double prominence(const std::vector<double>& s, std::size_t p) {
    const double v = s[p];
    std::size_t l = p;
    while (l > 0 && s[l - 1] <= v) --l;
    std::size_t r = p;
    while (r + 1 < s.size() && s[r + 1] <= v) ++r;
    const double left_base = *std::min_element(s.begin() + static_cast<long>(l), s.begin() + static_cast<long>(p) + 1);
    const double right_base = *std::min_element(s.begin() + static_cast<long>(p), s.begin() + static_cast<long>(r) + 1);
    return v - std::max(left_base, right_base);
}

inline std::size_t peaks(const std::vector<double>& s, double fraction = 0.05) {
    if (s.size() < 3) return 0;
    const double range = *std::max_element(s.begin(), s.end()) - *std::min_element(s.begin(), s.end());
    if (!(range > 0)) return 0;
    std::size_t n = 0;
    for (std::size_t p = 1; p + 1 < s.size(); ++p)
        if (s[p] > s[p - 1] && s[p] > s[p + 1] && prominence(s, p) >= fraction * range) ++n;
    return n;
}

// The twelve series statistics: Max, Min, Range, Median, Mean, SD, CV,
// Entropy, Peaks, Valleys, Skewness, Kurtosis.
inline std::array<double, 12> series_stats(const std::vector<double>& s) {
    std::array<double, 12> out{};
    const real n = static_cast<real>(s.size());
    const double mx = *std::max_element(s.begin(), s.end());
    const double mn = *std::min_element(s.begin(), s.end());
    real sum = 0;
    for (double v : s) sum += v;
    const real mean = sum / n;
    real m2 = 0, m3 = 0, m4 = 0;
    for (double v : s) {
        const real d = v - mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    const real sd = mx > mn ? std::sqrt(m2 / n) : 0;
    std::vector<double> neg(s.size());
    std::transform(s.begin(), s.end(), neg.begin(), [](double v) { return -v; });
    out[0] = mx;
    out[1] = mn;
    out[2] = mx - mn;
    out[3] = sorted_median(s);
    out[4] = static_cast<double>(mean);
    out[5] = static_cast<double>(sd);
    out[6] = mean != 0 ? static_cast<double>(sd / mean) : 0.0;
    out[7] = entropy(s, 16);
    out[8] = static_cast<double>(peaks(s));
    out[9] = static_cast<double>(peaks(neg));
    if (sd > 0) {
        out[10] = static_cast<double>(m3 / (n * sd * sd * sd));
        out[11] = static_cast<double>(m4 / (n * sd * sd * sd * sd));
    }
    return out;
}

// Value of `other` at the first frame of [begin, end) where `index` is
// largest (want_max) or smallest.
inline double fusion(const std::vector<double>& index, const std::vector<double>& other, std::size_t begin,
                     std::size_t end, bool want_max) {
    std::size_t at = begin;
    for (std::size_t t = begin; t < end; ++t) {
        if (want_max ? index[t] > index[at] : index[t] < index[at]) at = t;
    }
    return other[at];
}

inline double symmetry(double l, double r) {
    const double a = std::abs(l), b = std::abs(r);
    if (a == 0.0 && b == 0.0) return 0.0;
    return 1.0 - (a < b ? a / b : b / a);
}

struct ZStats {
    double mean;
    double sd;
};

inline ZStats zstats(const std::vector<double>& fit_values) {
    real sum = 0;
    for (double v : fit_values) sum += v;
    const real mean = sum / static_cast<real>(fit_values.size());
    real ss = 0;
    for (double v : fit_values) ss += (v - mean) * (v - mean);
    return {static_cast<double>(mean), static_cast<double>(std::sqrt(ss / static_cast<real>(fit_values.size())))};
}

struct Errors {
    double mae, rmse, me;
};

inline Errors errors(const std::vector<double>& pred, const std::vector<double>& truth) {
    real sa = 0, sq = 0;
    double mx = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const real e = static_cast<real>(pred[i]) - truth[i];
        sa += std::fabs(e);
        sq += e * e;
        mx = std::max(mx, static_cast<double>(std::fabs(e)));
    }
    const real n = static_cast<real>(pred.size());
    return {static_cast<double>(sa / n), static_cast<double>(std::sqrt(sq / n)), mx};
}

}  // namespace oracle
