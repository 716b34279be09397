#include "gaitsense/feature_table.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>
#include <sstream>

#include "gaitsense/error.hpp"
#include "text_util.hpp"

namespace gaitsense {

namespace {

constexpr std::size_t kLeadingColumns = 4;

}  // namespace

FeatureTable::FeatureTable(std::vector<std::string> names, std::vector<TableRow> rows, Matrix values)
    : names_(std::move(names)), rows_(std::move(rows)), values_(std::move(values)) {
    if (values_.rows() != rows_.size() || values_.cols() != names_.size()) {
        throw SchemaError("feature table shape does not match its names and rows");
    }
    index_names();
}

void FeatureTable::index_names() {
    index_.clear();
    index_.reserve(names_.size());
    for (std::size_t i = 0; i < names_.size(); ++i) {
        if (!index_.emplace(names_[i], i).second) throw SchemaError("duplicate feature name '" + names_[i] + "'");
    }
}

std::optional<std::size_t> FeatureTable::find_column(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::size_t FeatureTable::column_index(const std::string& name) const {
    auto idx = find_column(name);
    if (!idx) throw SchemaError("feature '" + name + "' not in table");
    return *idx;
}

FeatureTable FeatureTable::filter_columns(const std::function<bool(const std::string&)>& keep) const {
    std::vector<std::string> names;
    std::vector<std::size_t> cols;
    for (std::size_t c = 0; c < names_.size(); ++c) {
        if (keep(names_[c])) {
            names.push_back(names_[c]);
            cols.push_back(c);
        }
    }
    std::vector<std::size_t> all_rows(rows_.size());
    for (std::size_t r = 0; r < all_rows.size(); ++r) all_rows[r] = r;
    return FeatureTable(std::move(names), rows_, values_.select(all_rows, cols));
}

FeatureTable FeatureTable::select_columns(const std::vector<std::string>& names) const {
    std::vector<std::size_t> cols;
    for (const auto& n : names) cols.push_back(column_index(n));
    std::vector<std::size_t> all_rows(rows_.size());
    for (std::size_t r = 0; r < all_rows.size(); ++r) all_rows[r] = r;
    return FeatureTable(names, rows_, values_.select(all_rows, cols));
}

void FeatureTableBuilder::add(TableRow row, std::vector<double> values) {
    if (values.size() != names_.size()) {
        throw SchemaError("row for " + row.subject_id + " has " + std::to_string(values.size()) +
                          " features, schema has " + std::to_string(names_.size()));
    }
    rows_.push_back(std::move(row));
    values_.push_back(std::move(values));
}

FeatureTable FeatureTableBuilder::build() && {
    Matrix m(rows_.size(), names_.size());
    for (std::size_t r = 0; r < rows_.size(); ++r)
        for (std::size_t c = 0; c < names_.size(); ++c) m(r, c) = values_[r][c];
    values_.clear();
    return FeatureTable(std::move(names_), std::move(rows_), std::move(m));
}

void write_feature_table(std::ostream& out, const FeatureTable& table) {
    std::string line = "subject_id,routine,cohort,truth";
    for (const auto& n : table.names()) {
        line.push_back(',');
        line += n;
    }
    line.push_back('\n');
    out << line;
    const auto& m = table.values();
    for (std::size_t r = 0; r < table.row_count(); ++r) {
        const auto& row = table.rows()[r];
        line = row.subject_id;
        line.push_back(',');
        line += routine_token(row.routine);
        line.push_back(',');
        line += cohort_token(row.cohort);
        line.push_back(',');
        if (row.truth) detail::append_double(line, *row.truth);
        for (std::size_t c = 0; c < table.feature_count(); ++c) {
            line.push_back(',');
            detail::append_double(line, m(r, c));
        }
        line.push_back('\n');
        out << line;
    }
}

void write_feature_table(const std::filesystem::path& path, const FeatureTable& table) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write feature table " + path.string());
    write_feature_table(out, table);
}

FeatureTable read_feature_table(std::istream& in) {
    std::string line;
    std::size_t line_no = 1;
    if (!std::getline(in, line)) throw ParseError(line_no, "empty feature table");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto header = detail::split(line, ',');
    if (header.size() < kLeadingColumns || header[0] != "subject_id" || header[1] != "routine" ||
        header[2] != "cohort" || header[3] != "truth") {
        throw ParseError(line_no, "feature table header must start with subject_id,routine,cohort,truth");
    }
    std::vector<std::string> names;
    names.reserve(header.size() - kLeadingColumns);
    for (std::size_t i = kLeadingColumns; i < header.size(); ++i) names.emplace_back(header[i]);

    FeatureTableBuilder builder(names);
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = detail::split(line, ',');
        if (fields.size() != header.size()) {
            throw ParseError(line_no, "expected " + std::to_string(header.size()) + " fields, got " +
                                          std::to_string(fields.size()));
        }
        TableRow row;
        row.subject_id = std::string(fields[0]);
        try {
            row.routine = parse_routine(fields[1]);
            row.cohort = parse_cohort(fields[2]);
        } catch (const DomainError& e) {
            throw ParseError(line_no, e.what());
        }
        if (!fields[3].empty()) {
            auto t = detail::parse_double(fields[3]);
            if (!t) throw ParseError(line_no, "bad truth value");
            row.truth = *t;
        }
        std::vector<double> values(names.size());
        for (std::size_t c = 0; c < names.size(); ++c) {
            auto v = detail::parse_double(fields[kLeadingColumns + c]);
            if (!v || !std::isfinite(*v)) throw ParseError(line_no, "bad value for feature '" + names[c] + "'");
            values[c] = *v;
        }
        builder.add(std::move(row), std::move(values));
    }
    return std::move(builder).build();
}

FeatureTable read_feature_table(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open feature table " + path.string());
    return read_feature_table(in);
}

}  // namespace gaitsense
