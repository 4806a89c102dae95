// Balloon detection: per-cell chroma activation, log-odds grid filter, and
// largest 4-connected cluster extraction.
#pragma once

#include <mochi/perception/color.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>

namespace mochi::perception {

/// Per-cell mean color expressed in (A, B): the cell's mean sRGB value converted to LAB.
inline std::array<Vec2, kCellCount> cell_chroma(const Frame &frame) {
    require_grid_frame(frame);
    std::array<std::array<std::uint32_t, 3>, kCellCount> sums{};
    for (int y = 0; y < kFrameHeight; ++y) {
        const int row = y / kCellSize;
        const Rgb *line = &frame.pixels[static_cast<std::size_t>(y) * kFrameWidth];
        for (int col = 0; col < kGridCols; ++col) {
            auto &s = sums[cell_index(row, col)];
            const Rgb *px = line + col * kCellSize;
            std::uint32_t r = 0, g = 0, b = 0;
            for (int i = 0; i < kCellSize; ++i) {
                r += px[i].r;
                g += px[i].g;
                b += px[i].b;
            }
            s[0] += r;
            s[1] += g;
            s[2] += b;
        }
    }
    std::array<Vec2, kCellCount> out;
    constexpr double inv = 1.0 / (kCellSize * kCellSize);
    for (int i = 0; i < kCellCount; ++i) {
        out[i] = chroma(rgb_to_lab(sums[i][0] * inv, sums[i][1] * inv, sums[i][2] * inv));
    }
    return out;
}

/// A cell is activated iff its mean chroma lies strictly within `d_thresh` of the family.
inline CellMask activate_cells(const Frame &frame, const ColorFamily &family, double d_thresh) {
    const ColorGate gate(family, d_thresh);
    const auto means = cell_chroma(frame);
    CellMask mask{};
    for (int i = 0; i < kCellCount; ++i) {
        mask[i] = gate.accepts(means[i]);
    }
    return mask;
}

// =============================================================================
// Log-odds filter
// =============================================================================

inline double logit(double p) { return std::log(p / (1.0 - p)); }
inline double sigmoid(double l) { return 1.0 / (1.0 + std::exp(-l)); }

struct FilterParams {
    double p_hit = 0.8;   ///< P(occupied | activated)
    double p_miss = 0.3;  ///< P(occupied | not activated)
    double l_min = -6.0;
    double l_max = 6.0;
    double p_act = 0.7;   ///< belief needed for a cell to count as detected

    double l_hit() const { return logit(p_hit); }
    double l_miss() const { return logit(p_miss); }
};

/// Recursive per-cell belief stored as clamped log-odds.
class LogOddsGrid {
  public:
    explicit LogOddsGrid(FilterParams params = {}) : params_(params) { cells_.fill(0.0); }

    void update(const CellMask &activations) {
        const double hit = params_.l_hit();
        const double miss = params_.l_miss();
        for (int i = 0; i < kCellCount; ++i) {
            cells_[i] = std::clamp(cells_[i] + (activations[i] ? hit : miss), params_.l_min,
                                   params_.l_max);
        }
    }

    void reset() { cells_.fill(0.0); }

    double log_odds(int i) const { return cells_[i]; }
    double probability(int i) const { return sigmoid(cells_[i]); }

    /// Cells whose belief reaches p_act.
    CellMask detected() const {
        CellMask out{};
        const double threshold = logit(params_.p_act);
        for (int i = 0; i < kCellCount; ++i) {
            out[i] = cells_[i] >= threshold;
        }
        return out;
    }

    const FilterParams &params() const { return params_; }
    void set_params(const FilterParams &p) { params_ = p; }
    const std::array<double, kCellCount> &raw() const { return cells_; }

  private:
    FilterParams params_;
    std::array<double, kCellCount> cells_{};
};

// =============================================================================
// Cluster extraction
// =============================================================================

struct Detection {
    Vec2 center = Vec2::Zero(); ///< c_b [px]
    int cells = 0;              ///< n_b
    bool valid = false;

    bool operator==(const Detection &) const = default;
};

/// Largest 4-connected component of active cells. Equal sizes resolve to the component
/// whose first cell in row-major order comes first. Center = mean of member cell centers.
inline Detection largest_cluster(const CellMask &active) {
    std::array<bool, kCellCount> seen{};
    std::array<int, kCellCount> queue{};
    Detection best;
    for (int start = 0; start < kCellCount; ++start) {
        if (!active[start] || seen[start]) {
            continue;
        }
        int head = 0, tail = 0;
        queue[tail++] = start;
        seen[start] = true;
        double sx = 0.0, sy = 0.0;
        while (head < tail) {
            const int idx = queue[head++];
            const int row = idx / kGridCols, col = idx % kGridCols;
            const auto c = cell_center(row, col);
            sx += c[0];
            sy += c[1];
            const int neighbors[4][2] = {{row - 1, col}, {row + 1, col}, {row, col - 1}, {row, col + 1}};
            for (const auto &n : neighbors) {
                if (n[0] < 0 || n[0] >= kGridRows || n[1] < 0 || n[1] >= kGridCols) {
                    continue;
                }
                const int j = cell_index(n[0], n[1]);
                if (active[j] && !seen[j]) {
                    seen[j] = true;
                    queue[tail++] = j;
                }
            }
        }
        if (tail > best.cells) {
            best = {Vec2(sx / tail, sy / tail), tail, true};
        }
    }
    return best;
}

/// Per-blimp balloon detector: activation -> filter update -> cluster.
class BalloonTracker {
  public:
    explicit BalloonTracker(FilterParams params = {}) : grid_(params) {}

    Detection update(const Frame &frame, const ColorFamily &family, double d_thresh) {
        last_activation_ = activate_cells(frame, family, d_thresh);
        grid_.update(last_activation_);
        return largest_cluster(grid_.detected());
    }

    const LogOddsGrid &grid() const { return grid_; }
    LogOddsGrid &grid() { return grid_; }
    const CellMask &last_activation() const { return last_activation_; }

  private:
    LogOddsGrid grid_;
    CellMask last_activation_{};
};

} // namespace mochi::perception
