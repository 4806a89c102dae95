// Camera frame, grayscale/binary images and the fixed cell grid
#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace mochi::perception {

inline constexpr int kFrameWidth = 320;
inline constexpr int kFrameHeight = 240;
inline constexpr int kCellSize = 16;
inline constexpr int kGridCols = kFrameWidth / kCellSize;  // 20
inline constexpr int kGridRows = kFrameHeight / kCellSize; // 15
inline constexpr int kCellCount = kGridCols * kGridRows;

static_assert(kGridCols * kCellSize == kFrameWidth);
static_assert(kGridRows * kCellSize == kFrameHeight);

struct Rgb {
    std::uint8_t r = 0, g = 0, b = 0;
    bool operator==(const Rgb &) const = default;
};

class DimensionMismatch : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Row-major image of `Pixel` values.
template <typename Pixel> struct Image {
    int width = 0;
    int height = 0;
    std::vector<Pixel> pixels;

    Image() = default;
    Image(int w, int h, Pixel fill = Pixel{})
        : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, fill) {}

    Pixel &at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
    const Pixel &at(int x, int y) const {
        return pixels[static_cast<std::size_t>(y) * width + x];
    }
    bool contains(int x, int y) const { return x >= 0 && y >= 0 && x < width && y < height; }
    bool same_size(const Image &o) const { return width == o.width && height == o.height; }
    bool operator==(const Image &) const = default;
};

/// RGB camera frame. `ir` records whether the IR illuminator was on at capture.
struct Frame : Image<Rgb> {
    bool ir = false;

    Frame() : Image<Rgb>(kFrameWidth, kFrameHeight) {}
    Frame(int w, int h, Rgb fill = {}) : Image<Rgb>(w, h, fill) {}
    bool operator==(const Frame &) const = default;
};

using GrayFrame = Image<std::uint8_t>;
using Mask = Image<std::uint8_t>; ///< 0 = background, nonzero = foreground

/// One flag per grid cell, row-major (row * kGridCols + col).
using CellMask = std::array<bool, kCellCount>;

inline constexpr int cell_index(int row, int col) { return row * kGridCols + col; }

/// Pixel coordinates of a cell center.
inline constexpr std::array<double, 2> cell_center(int row, int col) {
    return {col * kCellSize + kCellSize / 2.0, row * kCellSize + kCellSize / 2.0};
}

inline void require_grid_frame(const Frame &frame) {
    if (frame.width != kFrameWidth || frame.height != kFrameHeight) {
        throw DimensionMismatch("frame must be 320x240 to match the cell grid");
    }
}

} // namespace mochi::perception
