#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace uavsim {

/// Grid cell index. `row` grows southwards, `col` grows eastwards.
struct Cell {
    int row = 0;
    int col = 0;

    friend bool operator==(const Cell&, const Cell&) = default;
    friend auto operator<=>(const Cell&, const Cell&) = default;
};

inline std::string to_string(const Cell& c) {
    return "(" + std::to_string(c.row) + "," + std::to_string(c.col) + ")";
}

/// Dense channel-major tensor (channels x height x width).
///
/// Map layers are stored one plane after the other, so a single layer is a
/// contiguous span. This matches the layout consumed by the convolution code.
template <typename T>
class Tensor3 {
public:
    Tensor3() = default;

    Tensor3(int channels, int height, int width, T fill = T{})
        : channels_(channels), height_(height), width_(width) {
        if (channels < 0 || height < 0 || width < 0) {
            throw std::invalid_argument("Tensor3: negative dimension");
        }
        data_.assign(static_cast<std::size_t>(channels) * height * width, fill);
    }

    int channels() const { return channels_; }
    int height() const { return height_; }
    int width() const { return width_; }
    std::size_t size() const { return data_.size(); }
    std::size_t plane_size() const { return static_cast<std::size_t>(height_) * width_; }

    T& operator()(int c, int i, int j) { return data_[index(c, i, j)]; }
    const T& operator()(int c, int i, int j) const { return data_[index(c, i, j)]; }

    std::span<T> channel(int c) { return {data_.data() + c * plane_size(), plane_size()}; }
    std::span<const T> channel(int c) const {
        return {data_.data() + c * plane_size(), plane_size()};
    }

    std::span<T> values() { return data_; }
    std::span<const T> values() const { return data_; }

    bool same_shape(const Tensor3& o) const {
        return channels_ == o.channels_ && height_ == o.height_ && width_ == o.width_;
    }

    template <typename U>
    Tensor3<U> cast() const {
        Tensor3<U> out(channels_, height_, width_);
        for (std::size_t k = 0; k < data_.size(); ++k) out.values()[k] = static_cast<U>(data_[k]);
        return out;
    }

    friend bool operator==(const Tensor3&, const Tensor3&) = default;

private:
    std::size_t index(int c, int i, int j) const {
        return (static_cast<std::size_t>(c) * height_ + i) * width_ + j;
    }

    int channels_ = 0;
    int height_ = 0;
    int width_ = 0;
    std::vector<T> data_;
};

}  // namespace uavsim
