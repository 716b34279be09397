#include "gaitsense/selection.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "gaitsense/error.hpp"
#include "gaitsense/rng.hpp"

namespace gaitsense {

namespace {

// Subject -> portion, shuffled by seed.
std::map<std::string, std::size_t> assign_portions(const std::vector<std::string>& groups, std::size_t portions,
                                                   Rng& rng) {
    std::set<std::string> unique(groups.begin(), groups.end());
    std::vector<std::string> subjects(unique.begin(), unique.end());
    rng.shuffle(std::span<std::string>(subjects));
    std::map<std::string, std::size_t> out;
    for (std::size_t i = 0; i < subjects.size(); ++i) out[subjects[i]] = i % portions;
    return out;
}

bool single_class(std::span<const double> y, std::span<const std::size_t> rows) {
    for (auto r : rows)
        if (y[r] != y[rows[0]]) return false;
    return true;
}

std::vector<std::vector<std::size_t>> portion_training_rows(const TrainingSet& data, Task task, std::uint64_t seed) {
    std::set<std::string> unique(data.groups.begin(), data.groups.end());
    if (unique.size() < 2) throw DegenerateInputError("feature selection needs at least 2 subjects");
    const std::size_t portions = std::min(kSelectionPortions, unique.size());

    Rng rng(seed);
    for (int attempt = 0; attempt < 2; ++attempt) {
        const auto portion_of = assign_portions(data.groups, portions, rng);
        std::vector<std::vector<std::size_t>> fits(portions);
        bool degenerate = false;
        for (std::size_t p = 0; p < portions; ++p) {
            for (std::size_t r = 0; r < data.groups.size(); ++r) {
                if (portion_of.at(data.groups[r]) != p) fits[p].push_back(r);
            }
            if (task == Task::Classify && single_class(data.y, fits[p])) degenerate = true;
        }
        if (!degenerate) return fits;
    }
    throw DegenerateInputError("feature selection: a training portion holds a single class after reshuffling");
}

}  // namespace

double pearson(std::span<const double> a, std::span<const double> b) {
    const std::size_t n = std::min(a.size(), b.size());
    if (n < 2) return 0.0;
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= static_cast<double>(n);
    mb /= static_cast<double>(n);
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double da = a[i] - ma, db = b[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (saa <= 0.0 || sbb <= 0.0) return 0.0;
    return sab / std::sqrt(saa * sbb);
}

std::vector<RankedFeature> embedded_importance(const TrainingSet& data, Task task, LearnerKind selector,
                                               std::uint64_t seed, const LearnerOptions& options) {
    if (data.x.cols() != data.names.size() || data.x.rows() != data.y.size() || data.y.size() != data.groups.size()) {
        throw SchemaError("training set parts disagree in shape");
    }
    const auto fits = portion_training_rows(data, task, seed);
    std::vector<double> mean(data.x.cols(), 0.0);
    std::vector<std::size_t> all_cols(data.x.cols());
    std::iota(all_cols.begin(), all_cols.end(), std::size_t{0});

    for (std::size_t p = 0; p < fits.size(); ++p) {
        const Matrix x = data.x.select_rows(fits[p]);
        std::vector<double> y;
        for (auto r : fits[p]) y.push_back(data.y[r]);
        LearnerOptions opts = options;
        opts.seed = Rng::mix(seed + p);
        auto learner = make_learner(selector, task, opts);
        learner->fit(x, y);
        const auto imp = learner->feature_importances();
        for (std::size_t c = 0; c < mean.size(); ++c) mean[c] += imp[c];
    }

    std::vector<RankedFeature> ranked(mean.size());
    for (std::size_t c = 0; c < mean.size(); ++c) {
        ranked[c] = {data.names[c], mean[c] / static_cast<double>(fits.size())};
    }
    std::sort(ranked.begin(), ranked.end(), [](const RankedFeature& a, const RankedFeature& b) {
        if (a.importance != b.importance) return a.importance > b.importance;
        return a.name < b.name;
    });
    return ranked;
}

std::vector<RankedFeature> dedup_select(std::span<const RankedFeature> ranked, const TrainingSet& data,
                                        std::size_t cap) {
    std::map<std::string, std::size_t> column;
    for (std::size_t c = 0; c < data.names.size(); ++c) column[data.names[c]] = c;

    std::vector<RankedFeature> selected;
    std::vector<std::size_t> selected_cols;
    for (const auto& candidate : ranked) {
        if (selected.size() >= cap) break;
        auto it = column.find(candidate.name);
        if (it == column.end()) throw SchemaError("ranked feature '" + candidate.name + "' not in training set");
        const auto col = data.x.column(it->second);
        bool admitted = true;
        for (auto s : selected_cols) {
            if (std::abs(pearson(col, data.x.column(s))) >= kMaxAbsCorrelation) {
                admitted = false;
                break;
            }
        }
        if (admitted) {
            selected.push_back(candidate);
            selected_cols.push_back(it->second);
        }
    }
    return selected;
}

SelectionResult select_features(const TrainingSet& data, Task task, LearnerKind selector, std::uint64_t seed,
                                std::size_t cap, const LearnerOptions& options) {
    SelectionResult result;
    result.selector = selector;
    result.ranked = embedded_importance(data, task, selector, seed, options);
    // Zero-importance features were never used by any fit; picking among them
    // would be alphabetical, not informative.
    const auto positive = std::find_if(result.ranked.begin(), result.ranked.end(),
                                       [](const RankedFeature& f) { return !(f.importance > 0.0); });
    std::span<const RankedFeature> pool(result.ranked.data(), static_cast<std::size_t>(positive - result.ranked.begin()));
    if (pool.empty()) pool = result.ranked;
    result.selected = dedup_select(pool, data, cap);
    return result;
}

}  // namespace gaitsense
