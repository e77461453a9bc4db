#include "depthmon/window.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace depthmon::core {

Window::Window(std::size_t capacity, std::size_t dim) : buffer_(capacity), dim_(dim) {
    if (capacity == 0) {
        throw std::invalid_argument("window capacity must be positive");
    }
}

void Window::push(Observation obs) {
    if (obs.value.empty()) {
        throw std::invalid_argument("observation " + std::to_string(obs.index) + " has no components");
    }
    if (dim_ == 0) {
        dim_ = obs.value.size();
    }
    if (obs.value.size() != dim_) {
        throw std::invalid_argument("observation " + std::to_string(obs.index) + " has dimension " +
                                    std::to_string(obs.value.size()) + ", stream dimension is " +
                                    std::to_string(dim_));
    }
    for (double v : obs.value) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument("observation " + std::to_string(obs.index) +
                                        " has a non-finite component");
        }
    }
    if (obs.time && !std::isfinite(*obs.time)) {
        throw std::invalid_argument("observation " + std::to_string(obs.index) + " has a non-finite time");
    }
    if (size_ > 0) {
        const Observation& last = (*this)[size_ - 1];
        if (obs.index <= last.index) {
            throw std::invalid_argument("stream index " + std::to_string(obs.index) +
                                        " does not follow " + std::to_string(last.index));
        }
        if (obs.time && last.time && *obs.time <= *last.time) {
            throw std::invalid_argument("timestamp at index " + std::to_string(obs.index) +
                                        " is not strictly increasing");
        }
    }

    if (full()) {
        buffer_[head_] = std::move(obs);
        head_ = (head_ + 1) % buffer_.size();
    } else {
        buffer_[(head_ + size_) % buffer_.size()] = std::move(obs);
        ++size_;
    }
}

std::size_t Window::end_index() const {
    if (empty()) {
        throw std::logic_error("end_index of an empty window");
    }
    return (*this)[size_ - 1].index;
}

std::vector<Observation> Window::contents() const {
    std::vector<Observation> out;
    out.reserve(size_);
    for (std::size_t i = 0; i < size_; ++i) {
        out.push_back((*this)[i]);
    }
    return out;
}

Sample Window::sample() const {
    Sample out(dim_);
    out.reserve(size_);
    for (std::size_t i = 0; i < size_; ++i) {
        out.push_back((*this)[i].value);
    }
    return out;
}

std::vector<double> Window::values() const {
    if (dim_ > 1) {
        throw std::invalid_argument("values() requires a one-dimensional window");
    }
    std::vector<double> out;
    out.reserve(size_);
    for (std::size_t i = 0; i < size_; ++i) {
        out.push_back((*this)[i].value.front());
    }
    return out;
}

Window push(Window window, Observation obs) {
    window.push(std::move(obs));
    return window;
}

Window window_from_values(std::span<const double> values, std::size_t capacity) {
    Window w(capacity, 1);
    for (std::size_t i = 0; i < values.size(); ++i) {
        w.push({i, std::nullopt, {values[i]}});
    }
    return w;
}

Window window_from_sample(const Sample& sample) {
    Window w(std::max<std::size_t>(sample.size(), 1), sample.dim());
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const auto p = sample[i];
        w.push({i, std::nullopt, std::vector<double>(p.begin(), p.end())});
    }
    return w;
}

Sample LaggedPairs::as_sample() const {
    Sample out(2);
    out.reserve(pairs.size());
    for (const auto& p : pairs) {
        out.push_back(p);
    }
    return out;
}

std::vector<double> LaggedPairs::xs() const {
    std::vector<double> out;
    out.reserve(pairs.size());
    for (const auto& p : pairs) {
        out.push_back(p[0]);
    }
    return out;
}

std::vector<double> LaggedPairs::ys() const {
    std::vector<double> out;
    out.reserve(pairs.size());
    for (const auto& p : pairs) {
        out.push_back(p[1]);
    }
    return out;
}

LaggedPairs lag_embed(std::span<const double> values, std::size_t lag) {
    if (lag == 0) {
        throw std::invalid_argument("lag must be positive");
    }
    if (lag >= values.size()) {
        throw std::invalid_argument("lag " + std::to_string(lag) + " is not smaller than window length " +
                                    std::to_string(values.size()));
    }
    LaggedPairs out;
    out.lag = lag;
    out.pairs.reserve(values.size() - lag);
    for (std::size_t t = lag; t < values.size(); ++t) {
        out.pairs.push_back({values[t - lag], values[t]});
    }
    return out;
}

LaggedPairs lag_embed(const Window& window, std::size_t lag) {
    const auto values = window.values();
    return lag_embed(values, lag);
}

}  // namespace depthmon::core
