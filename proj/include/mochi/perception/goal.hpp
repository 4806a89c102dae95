// Goal hoop detection: binary mask from color or IR frame differencing, largest
// blobs, outer contour, polygon approximation and corner-count shape filter.
#pragma once

#include <mochi/perception/color.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

namespace mochi::perception {

enum class Shape { Triangle, Rectangle, Circle, Unknown };

inline const char *to_string(Shape s) {
    switch (s) {
    case Shape::Triangle: return "triangle";
    case Shape::Rectangle: return "rectangle";
    case Shape::Circle: return "circle";
    default: return "unknown";
    }
}

struct GoalDetection {
    Vec2 center = Vec2::Zero(); ///< c_g, bounding-box center [px]
    int size = 0;               ///< n_g, blob pixel count
    Shape shape = Shape::Unknown;
    bool valid = false;

    bool operator==(const GoalDetection &) const = default;
};

struct GoalParams {
    int min_blob_pixels = 100;
    double approx_tolerance = 0.02; ///< polygon tolerance as a fraction of the perimeter
    int max_candidates = 4;         ///< largest blobs examined before giving up
};

// =============================================================================
// Mask sources
// =============================================================================

/// F = ||F1 - F2|| per pixel (Euclidean over RGB), saturated to 8 bits.
inline GrayFrame diff_frames(const Frame &f1, const Frame &f2) {
    if (!f1.same_size(f2)) {
        throw DimensionMismatch("diff_frames: frames differ in size");
    }
    GrayFrame out(f1.width, f1.height);
    for (std::size_t i = 0; i < f1.pixels.size(); ++i) {
        const int dr = int(f1.pixels[i].r) - f2.pixels[i].r;
        const int dg = int(f1.pixels[i].g) - f2.pixels[i].g;
        const int db = int(f1.pixels[i].b) - f2.pixels[i].b;
        const double norm = std::sqrt(double(dr * dr + dg * dg + db * db));
        out.pixels[i] = static_cast<std::uint8_t>(std::min(255.0, std::round(norm)));
    }
    return out;
}

/// Pixels strictly brighter than `threshold`.
inline Mask threshold_mask(const GrayFrame &gray, int threshold) {
    Mask m(gray.width, gray.height);
    for (std::size_t i = 0; i < gray.pixels.size(); ++i) {
        m.pixels[i] = gray.pixels[i] > threshold ? 1 : 0;
    }
    return m;
}

/// Pixels whose chroma falls inside the family's Mahalanobis gate.
inline Mask color_mask(const Frame &frame, const ColorFamily &family, double d_thresh) {
    const ColorGate gate(family, d_thresh);
    const ChromaTable &table = ChromaTable::instance();
    Mask m(frame.width, frame.height);
    for (std::size_t i = 0; i < frame.pixels.size(); ++i) {
        m.pixels[i] = gate.accepts(table.lookup(frame.pixels[i])) ? 1 : 0;
    }
    return m;
}

// =============================================================================
// Blobs and contours
// =============================================================================

struct Point {
    int x = 0, y = 0;
    bool operator==(const Point &) const = default;
};

struct Blob {
    int label = 0;
    int pixels = 0;
    int min_x = 0, min_y = 0, max_x = 0, max_y = 0;
    Point first; ///< first pixel in raster order

    Vec2 bbox_center() const { return {(min_x + max_x + 1) / 2.0, (min_y + max_y + 1) / 2.0}; }
};

struct BlobLabels {
    Image<int> labels; ///< 0 = background, otherwise 1-based blob label
    std::vector<Blob> blobs;
};

/// 8-connected component labeling.
inline BlobLabels label_blobs(const Mask &mask) {
    BlobLabels out{Image<int>(mask.width, mask.height), {}};
    std::vector<int> stack;
    for (int y = 0; y < mask.height; ++y) {
        for (int x = 0; x < mask.width; ++x) {
            if (!mask.at(x, y) || out.labels.at(x, y) != 0) {
                continue;
            }
            Blob blob{static_cast<int>(out.blobs.size()) + 1, 0, x, y, x, y, {x, y}};
            out.labels.at(x, y) = blob.label;
            stack.assign(1, y * mask.width + x);
            while (!stack.empty()) {
                const int idx = stack.back();
                stack.pop_back();
                const int px = idx % mask.width, py = idx / mask.width;
                ++blob.pixels;
                blob.min_x = std::min(blob.min_x, px);
                blob.max_x = std::max(blob.max_x, px);
                blob.min_y = std::min(blob.min_y, py);
                blob.max_y = std::max(blob.max_y, py);
                for (int dy = -1; dy <= 1; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        const int nx = px + dx, ny = py + dy;
                        if ((dx || dy) && mask.contains(nx, ny) && mask.at(nx, ny) &&
                            out.labels.at(nx, ny) == 0) {
                            out.labels.at(nx, ny) = blob.label;
                            stack.push_back(ny * mask.width + nx);
                        }
                    }
                }
            }
            out.blobs.push_back(blob);
        }
    }
    return out;
}

/// Moore-neighbor trace of a blob's outer boundary, clockwise, starting at its first pixel.
inline std::vector<Point> trace_outer_contour(const Image<int> &labels, const Blob &blob) {
    static constexpr int dx[8] = {1, 1, 0, -1, -1, -1, 0, 1};
    static constexpr int dy[8] = {0, 1, 1, 1, 0, -1, -1, -1};
    const auto inside = [&](int x, int y) {
        return labels.contains(x, y) && labels.at(x, y) == blob.label;
    };
    const auto direction_to = [](Point from, Point to) {
        for (int d = 0; d < 8; ++d) {
            if (from.x + dx[d] == to.x && from.y + dy[d] == to.y) {
                return d;
            }
        }
        return 4;
    };

    const Point start = blob.first;
    std::vector<Point> contour{start};
    Point current = start, back{start.x - 1, start.y};
    const std::size_t limit = 4 * static_cast<std::size_t>(blob.pixels) + 16;
    for (std::size_t iter = 0; iter < limit; ++iter) {
        const int b = direction_to(current, back);
        bool moved = false;
        for (int k = 1; k <= 8; ++k) {
            const int d = (b + k) % 8;
            const Point q{current.x + dx[d], current.y + dy[d]};
            if (inside(q.x, q.y)) {
                const int prev = (d + 7) % 8;
                back = {current.x + dx[prev], current.y + dy[prev]};
                // Done once the walk leaves the start the same way it first did.
                if (current == start && contour.size() > 1 && q == contour[1]) {
                    contour.pop_back();
                    return contour;
                }
                current = q;
                moved = true;
                break;
            }
        }
        if (!moved) {
            break; // isolated pixel
        }
        contour.push_back(current);
    }
    if (contour.size() > 1 && contour.back() == start) {
        contour.pop_back();
    }
    return contour;
}

inline double contour_perimeter(const std::vector<Point> &c) {
    double p = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        const Point &a = c[i], &b = c[(i + 1) % c.size()];
        p += std::hypot(double(a.x - b.x), double(a.y - b.y));
    }
    return p;
}

namespace detail {

inline double segment_distance(const Point &p, const Point &a, const Point &b) {
    const double vx = b.x - a.x, vy = b.y - a.y;
    const double wx = p.x - a.x, wy = p.y - a.y;
    const double len2 = vx * vx + vy * vy;
    if (len2 == 0.0) {
        return std::hypot(wx, wy);
    }
    const double t = std::clamp((wx * vx + wy * vy) / len2, 0.0, 1.0);
    return std::hypot(wx - t * vx, wy - t * vy);
}

/// Douglas-Peucker over the open chain c[first..last] (indices modulo size); appends kept
/// interior indices to `keep` in traversal order.
inline void douglas_peucker(const std::vector<Point> &c, std::size_t first, std::size_t last,
                            double eps, std::vector<std::size_t> &keep) {
    const std::size_t n = c.size();
    const std::size_t span = (last + n - first) % n;
    if (span < 2) {
        return;
    }
    double best = -1.0;
    std::size_t best_off = 0;
    for (std::size_t off = 1; off < span; ++off) {
        const double d = segment_distance(c[(first + off) % n], c[first], c[last]);
        if (d > best) {
            best = d;
            best_off = off;
        }
    }
    if (best <= eps) {
        return;
    }
    const std::size_t mid = (first + best_off) % n;
    douglas_peucker(c, first, mid, eps, keep);
    keep.push_back(mid);
    douglas_peucker(c, mid, last, eps, keep);
}

} // namespace detail

/// Closed-curve polygon approximation with tolerance `eps` pixels.
///
/// The curve is split at the point farthest from the centroid and the point farthest
/// from that one; either split vertex is dropped afterwards if it lies within eps of
/// the chord joining its neighbours.
inline std::vector<Point> approx_polygon(const std::vector<Point> &c, double eps) {
    const std::size_t n = c.size();
    if (n < 3) {
        return c;
    }
    double cx = 0.0, cy = 0.0;
    for (const Point &p : c) {
        cx += p.x;
        cy += p.y;
    }
    cx /= n;
    cy /= n;
    std::size_t i0 = 0;
    double far = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = std::hypot(c[i].x - cx, c[i].y - cy);
        if (d > far) {
            far = d;
            i0 = i;
        }
    }
    std::size_t i1 = i0;
    far = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = std::hypot(double(c[i].x - c[i0].x), double(c[i].y - c[i0].y));
        if (d > far) {
            far = d;
            i1 = i;
        }
    }
    if (i1 == i0) {
        return {c[i0]};
    }
    std::vector<std::size_t> keep{i0};
    detail::douglas_peucker(c, i0, i1, eps, keep);
    const std::size_t split = keep.size();
    keep.push_back(i1);
    detail::douglas_peucker(c, i1, i0, eps, keep);

    std::vector<Point> poly;
    poly.reserve(keep.size());
    for (std::size_t idx : keep) {
        poly.push_back(c[idx]);
    }
    // Split vertices are forced; drop them when they are not real corners.
    for (std::size_t forced : {split, std::size_t{0}}) {
        const std::size_t m = poly.size();
        if (m <= 3) {
            break;
        }
        const Point &prev = poly[(forced + m - 1) % m];
        const Point &next = poly[(forced + 1) % m];
        if (detail::segment_distance(poly[forced], prev, next) <= eps) {
            poly.erase(poly.begin() + static_cast<std::ptrdiff_t>(forced));
        }
    }
    return poly;
}

/// 3 corners -> triangle, 4 -> rectangle, 8 or more -> circle, anything else unknown.
inline Shape classify_vertices(std::size_t vertices) {
    if (vertices == 3) {
        return Shape::Triangle;
    }
    if (vertices == 4) {
        return Shape::Rectangle;
    }
    if (vertices >= 8) {
        return Shape::Circle;
    }
    return Shape::Unknown;
}

inline Shape classify_blob(const BlobLabels &labeled, const Blob &blob, double tolerance) {
    const std::vector<Point> contour = trace_outer_contour(labeled.labels, blob);
    if (contour.size() < 3) {
        return Shape::Unknown;
    }
    const double eps = tolerance * contour_perimeter(contour);
    return classify_vertices(approx_polygon(contour, eps).size());
}

/// Picks the largest blob (>= min size) whose outline reads as a triangle, rectangle or
/// circle. Blobs of any other shape are rejected as false positives.
inline GoalDetection detect_goal(const Mask &mask, const GoalParams &params = {}) {
    const BlobLabels labeled = label_blobs(mask);
    std::vector<const Blob *> candidates;
    for (const Blob &b : labeled.blobs) {
        if (b.pixels >= params.min_blob_pixels) {
            candidates.push_back(&b);
        }
    }
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const Blob *a, const Blob *b) { return a->pixels > b->pixels; });
    const std::size_t limit =
        std::min(candidates.size(), static_cast<std::size_t>(std::max(params.max_candidates, 0)));
    for (std::size_t i = 0; i < limit; ++i) {
        const Blob &b = *candidates[i];
        const Shape shape = classify_blob(labeled, b, params.approx_tolerance);
        if (shape != Shape::Unknown) {
            return {b.bbox_center(), b.pixels, shape, true};
        }
    }
    return {};
}

/// Color-blob path.
inline GoalDetection detect_goal_color(const Frame &frame, const ColorFamily &family,
                                       double d_thresh, const GoalParams &params = {}) {
    return detect_goal(color_mask(frame, family, d_thresh), params);
}

/// IR path: F = ||F1 - F2|| thresholded on luminance.
inline GoalDetection detect_goal_ir(const Frame &ir_on, const Frame &ir_off, int luminance_thresh,
                                    const GoalParams &params = {}) {
    return detect_goal(threshold_mask(diff_frames(ir_on, ir_off), luminance_thresh), params);
}

} // namespace mochi::perception
