#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "depthmon/sample.hpp"

namespace depthmon::core {

/// One element of a d-dimensional stream.
struct Observation {
    std::size_t index = 0;
    /// Seconds; carried through to reports but not used by the estimators.
    std::optional<double> time;
    std::vector<double> value;
};

/// Fixed-capacity sliding window over a stream, oldest observation first.
///
/// Pushing into a full window evicts the oldest element. Windows are plain
/// values: copying one yields an independent snapshot.
class Window {
public:
    /// `dim == 0` lets the first pushed observation fix the stream dimension.
    explicit Window(std::size_t capacity, std::size_t dim = 0);

    /// Throws std::invalid_argument on a dimension mismatch, a non-finite
    /// component, or a stream index / timestamp that does not increase.
    void push(Observation obs);

    [[nodiscard]] std::size_t capacity() const noexcept { return buffer_.size(); }
    [[nodiscard]] std::size_t size() const noexcept { return size_; }
    [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
    [[nodiscard]] bool empty() const noexcept { return size_ == 0; }
    [[nodiscard]] bool full() const noexcept { return size_ == buffer_.size(); }

    /// Stream position of the newest element. Throws std::logic_error when empty.
    [[nodiscard]] std::size_t end_index() const;

    /// i-th element counted from the oldest.
    [[nodiscard]] const Observation& operator[](std::size_t i) const noexcept {
        return buffer_[(head_ + i) % buffer_.size()];
    }

    [[nodiscard]] std::vector<Observation> contents() const;
    [[nodiscard]] Sample sample() const;

    /// Values of a one-dimensional window, oldest first.
    [[nodiscard]] std::vector<double> values() const;

private:
    std::vector<Observation> buffer_;
    std::size_t head_ = 0;
    std::size_t size_ = 0;
    std::size_t dim_ = 0;
};

/// Functional form of Window::push.
[[nodiscard]] Window push(Window window, Observation obs);

/// Window filled from a 1-D value sequence (indices 0, 1, ...), keeping the last `capacity`.
[[nodiscard]] Window window_from_values(std::span<const double> values, std::size_t capacity);

/// Window filled from the points of a sample, indices 0, 1, ....
[[nodiscard]] Window window_from_sample(const Sample& sample);

/// Pairs (x[t - lag], x[t]) of a one-dimensional window.
struct LaggedPairs {
    std::size_t lag = 1;
    std::vector<std::array<double, 2>> pairs;

    [[nodiscard]] std::size_t size() const noexcept { return pairs.size(); }
    [[nodiscard]] Sample as_sample() const;
    [[nodiscard]] std::vector<double> xs() const;
    [[nodiscard]] std::vector<double> ys() const;
};

/// Throws std::invalid_argument when lag == 0 or lag >= number of values.
[[nodiscard]] LaggedPairs lag_embed(std::span<const double> values, std::size_t lag);
[[nodiscard]] LaggedPairs lag_embed(const Window& window, std::size_t lag);

}  // namespace depthmon::core
