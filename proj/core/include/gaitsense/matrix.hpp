#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace gaitsense {

// Column-major dense matrix: rows are samples, columns are features.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    double& operator()(std::size_t r, std::size_t c) { return data_[c * rows_ + r]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[c * rows_ + r]; }

    std::span<double> column(std::size_t c) { return {data_.data() + c * rows_, rows_}; }
    std::span<const double> column(std::size_t c) const { return {data_.data() + c * rows_, rows_}; }

    std::vector<double> row(std::size_t r) const {
        std::vector<double> out(cols_);
        for (std::size_t c = 0; c < cols_; ++c) out[c] = (*this)(r, c);
        return out;
    }

    // Sub-matrix of the given rows and columns, in the given order.
    Matrix select(std::span<const std::size_t> row_ids, std::span<const std::size_t> col_ids) const {
        Matrix out(row_ids.size(), col_ids.size());
        for (std::size_t c = 0; c < col_ids.size(); ++c) {
            const auto src = column(col_ids[c]);
            auto dst = out.column(c);
            for (std::size_t r = 0; r < row_ids.size(); ++r) dst[r] = src[row_ids[r]];
        }
        return out;
    }

    Matrix select_rows(std::span<const std::size_t> row_ids) const {
        Matrix out(row_ids.size(), cols_);
        for (std::size_t c = 0; c < cols_; ++c) {
            const auto src = column(c);
            auto dst = out.column(c);
            for (std::size_t r = 0; r < row_ids.size(); ++r) dst[r] = src[row_ids[r]];
        }
        return out;
    }

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

}  // namespace gaitsense
