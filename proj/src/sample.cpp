#include "depthmon/sample.hpp"

#include <stdexcept>
#include <string>

namespace depthmon {

Sample::Sample(std::size_t dim, std::vector<double> flat) : dim_(dim), data_(std::move(flat)) {
    if (dim_ == 0) {
        throw std::invalid_argument("sample dimension must be positive");
    }
    if (data_.size() % dim_ != 0) {
        throw std::invalid_argument("flat buffer length " + std::to_string(data_.size()) +
                                    " is not a multiple of dimension " + std::to_string(dim_));
    }
}

Sample Sample::from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) {
        return {};
    }
    Sample out(rows.front().size());
    out.reserve(rows.size());
    for (const auto& row : rows) {
        out.push_back(row);
    }
    return out;
}

Sample Sample::from_values(std::span<const double> values) {
    return Sample(1, std::vector<double>(values.begin(), values.end()));
}

void Sample::push_back(std::span<const double> point) {
    if (dim_ == 0) {
        dim_ = point.size();
    }
    if (point.size() != dim_ || dim_ == 0) {
        throw std::invalid_argument("point dimension " + std::to_string(point.size()) +
                                    " does not match sample dimension " + std::to_string(dim_));
    }
    data_.insert(data_.end(), point.begin(), point.end());
}

Sample Sample::translated(std::span<const double> offset) const {
    if (offset.size() != dim_) {
        throw std::invalid_argument("translation offset has wrong dimension");
    }
    Sample out = *this;
    for (std::size_t i = 0; i < out.data_.size(); ++i) {
        out.data_[i] += offset[i % dim_];
    }
    return out;
}

Sample Sample::concatenated(const Sample& other) const {
    if (empty()) {
        return other;
    }
    if (other.empty()) {
        return *this;
    }
    if (other.dim_ != dim_) {
        throw std::invalid_argument("cannot concatenate samples of dimension " + std::to_string(dim_) +
                                    " and " + std::to_string(other.dim_));
    }
    Sample out = *this;
    out.data_.insert(out.data_.end(), other.data_.begin(), other.data_.end());
    return out;
}

}  // namespace depthmon
