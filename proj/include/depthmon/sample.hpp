#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace depthmon {

/// A set of d-dimensional points stored row-major in one contiguous buffer.
class Sample {
public:
    Sample() = default;
    explicit Sample(std::size_t dim) : dim_(dim) {}
    Sample(std::size_t dim, std::vector<double> flat);

    static Sample from_rows(const std::vector<std::vector<double>>& rows);
    static Sample from_values(std::span<const double> values);

    [[nodiscard]] std::size_t size() const noexcept { return dim_ == 0 ? 0 : data_.size() / dim_; }
    [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
    [[nodiscard]] bool empty() const noexcept { return data_.empty(); }

    [[nodiscard]] std::span<const double> operator[](std::size_t i) const noexcept {
        return {data_.data() + i * dim_, dim_};
    }

    void push_back(std::span<const double> point);
    void reserve(std::size_t points) { data_.reserve(points * dim_); }

    [[nodiscard]] const std::vector<double>& flat() const noexcept { return data_; }

    /// Sample with `offset` added to every point.
    [[nodiscard]] Sample translated(std::span<const double> offset) const;

    /// Points of this sample followed by the points of `other`.
    [[nodiscard]] Sample concatenated(const Sample& other) const;

    friend bool operator==(const Sample&, const Sample&) = default;

private:
    std::size_t dim_ = 0;
    std::vector<double> data_;
};

}  // namespace depthmon
