#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "gaitsense/matrix.hpp"
#include "gaitsense/recording.hpp"

namespace gaitsense {

struct TableRow {
    std::string subject_id;
    Routine routine = Routine::Straight;
    Cohort cohort = Cohort::Healthy;
    std::optional<double> truth;

    bool operator==(const TableRow&) const = default;
};

// Whole-test feature vectors, one row per (subject, routine).
class FeatureTable {
public:
    FeatureTable() = default;
    FeatureTable(std::vector<std::string> names, std::vector<TableRow> rows, Matrix values);

    const std::vector<std::string>& names() const noexcept { return names_; }
    const std::vector<TableRow>& rows() const noexcept { return rows_; }
    const Matrix& values() const noexcept { return values_; }

    std::size_t row_count() const noexcept { return rows_.size(); }
    std::size_t feature_count() const noexcept { return names_.size(); }

    // Throws SchemaError for an unknown name.
    std::size_t column_index(const std::string& name) const;
    std::optional<std::size_t> find_column(const std::string& name) const;

    // Keeps only columns whose name satisfies the predicate.
    FeatureTable filter_columns(const std::function<bool(const std::string&)>& keep) const;
    FeatureTable select_columns(const std::vector<std::string>& names) const;

    bool operator==(const FeatureTable& other) const {
        return names_ == other.names_ && rows_ == other.rows_ && values_ == other.values_;
    }

private:
    void index_names();

    std::vector<std::string> names_;
    std::vector<TableRow> rows_;
    Matrix values_;
    std::unordered_map<std::string, std::size_t> index_;
};

// Accumulates rows that must all share one schema.
class FeatureTableBuilder {
public:
    explicit FeatureTableBuilder(std::vector<std::string> names) : names_(std::move(names)) {}

    void add(TableRow row, std::vector<double> values);
    std::size_t size() const { return rows_.size(); }
    FeatureTable build() &&;

private:
    std::vector<std::string> names_;
    std::vector<TableRow> rows_;
    std::vector<std::vector<double>> values_;
};

// CSV with header subject_id,routine,cohort,truth,<features...>.
void write_feature_table(std::ostream& out, const FeatureTable& table);
void write_feature_table(const std::filesystem::path& path, const FeatureTable& table);
FeatureTable read_feature_table(std::istream& in);
FeatureTable read_feature_table(const std::filesystem::path& path);

}  // namespace gaitsense
