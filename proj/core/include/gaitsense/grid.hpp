#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace gaitsense {

// Dense row-major image. x indexes columns (width), y indexes rows (height).
class Grid {
public:
    Grid() = default;
    Grid(std::size_t width, std::size_t height, double fill = 0.0)
        : width_(width), height_(height), data_(width * height, fill) {}
    Grid(std::size_t width, std::size_t height, std::vector<double> data);

    std::size_t width() const noexcept { return width_; }
    std::size_t height() const noexcept { return height_; }
    std::size_t size() const noexcept { return data_.size(); }

    double& at(std::size_t x, std::size_t y) { return data_[y * width_ + x]; }
    double at(std::size_t x, std::size_t y) const { return data_[y * width_ + x]; }

    std::span<double> values() noexcept { return data_; }
    std::span<const double> values() const noexcept { return data_; }

    bool operator==(const Grid&) const = default;

private:
    std::size_t width_ = 0;
    std::size_t height_ = 0;
    std::vector<double> data_;
};

}  // namespace gaitsense
