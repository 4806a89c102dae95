// Synthetic camera: box-room background, shaded balloon disks, thick hoop outlines.
#pragma once

#include <mochi/dynamics/types.hpp>
#include <mochi/sim/config.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <random>
#include <span>
#include <vector>

namespace mochi::sim {

using perception::Frame;

/// Camera axes coincide with the body axes; only the origin is offset.
struct CameraPose {
    Vec3 position = Vec3::Zero();
    Mat3 rotation = Mat3::Identity();
};

inline CameraPose camera_pose(const dynamics::RigidState &s, const CameraModel &cam) {
    const Mat3 R = rotation_zyx(s.euler);
    return {s.position + R * cam.mount, R};
}

struct Projection {
    Vec2 pixel = Vec2::Zero(); ///< continuous pixel coordinates, (0,0) = top-left corner
    double depth = 0.0;        ///< along the optical axis
};

inline std::optional<Projection> project(const CameraModel &cam, const CameraPose &pose,
                                         const Vec3 &world, double min_depth = 0.05) {
    const Vec3 q = pose.rotation.transpose() * (world - pose.position);
    if (q.x() < min_depth) {
        return std::nullopt;
    }
    const double f = cam.focal();
    const Vec2 c = cam.center();
    return Projection{Vec2(c.x() - f * q.y() / q.x(), c.y() - f * q.z() / q.x()), q.x()};
}

/// Apparent radius in pixels of a sphere whose center projects at depth `depth`.
inline double projected_radius(const CameraModel &cam, double radius, double distance) {
    const double d2 = std::max(distance * distance - radius * radius, 1e-6);
    return cam.focal() * radius / std::sqrt(d2);
}

struct BalloonView {
    Vec3 position = Vec3::Zero();
    double radius = 0.15;
    Rgb color{205, 35, 45};
};

/// World-space outline of a hoop opening.
inline std::vector<Vec3> hoop_outline(const HoopSpec &h, int per_edge = 8) {
    const Vec3 e1(-std::sin(h.yaw), std::cos(h.yaw), 0.0);
    const Vec3 e2 = Vec3::UnitZ();
    std::vector<Vec2> corners;
    switch (h.shape) {
    case Shape::Triangle:
        for (int k = 0; k < 3; ++k) {
            const double a = kPi / 2.0 + k * 2.0 * kPi / 3.0;
            corners.emplace_back(std::cos(a), std::sin(a));
        }
        break;
    case Shape::Rectangle:
        corners = {{1, 1}, {-1, 1}, {-1, -1}, {1, -1}};
        for (Vec2 &c : corners) {
            c *= std::sqrt(0.5);
        }
        break;
    default: {
        std::vector<Vec3> pts;
        const int n = 48;
        for (int k = 0; k <= n; ++k) {
            const double a = 2.0 * kPi * k / n;
            pts.push_back(h.center + h.aperture * (std::cos(a) * e1 + std::sin(a) * e2));
        }
        return pts;
    }
    }
    std::vector<Vec3> pts;
    for (std::size_t k = 0; k < corners.size(); ++k) {
        const Vec2 a = corners[k];
        const Vec2 b = corners[(k + 1) % corners.size()];
        for (int j = 0; j < per_edge; ++j) {
            const Vec2 p = a + (b - a) * (static_cast<double>(j) / per_edge);
            pts.push_back(h.center + h.aperture * (p.x() * e1 + p.y() * e2));
        }
    }
    pts.push_back(pts.front());
    return pts;
}

struct RenderOptions {
    bool noise = true;
    bool jitter = true;
    bool retroreflect = true; ///< tape glows when the illuminator is on
    /// Optional per-pixel object labels: 0 background, 1+i balloon i, kHoopLabel+j hoop j.
    perception::Image<std::uint16_t> *labels = nullptr;
};

inline constexpr std::uint16_t kHoopLabel = 1000;

class Renderer {
  public:
    explicit Renderer(const WorldConfig &cfg, std::uint64_t seed = 0x5eed)
        : arena_(cfg.arena), cam_(cfg.camera), look_(cfg.look) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> n(0.0, look_.noise_sigma);
        const std::size_t samples = static_cast<std::size_t>(cam_.width) * cam_.height * 3;
        noise_.resize(std::max<std::size_t>(std::size_t{1} << 19, 2 * samples));
        for (auto &v : noise_) {
            v = static_cast<std::int8_t>(std::clamp(std::lround(n(rng)), -127L, 127L));
        }
    }

    const CameraModel &camera() const { return cam_; }

    template <typename Rng>
    Frame render(const CameraPose &pose, std::span<const BalloonView> balloons,
                 std::span<const HoopSpec> hoops, bool ir, Rng &rng,
                 const RenderOptions &opt = {}) const {
        Frame frame(cam_.width, cam_.height);
        frame.ir = ir;
        Labels labels(cam_.width, cam_.height, 0);
        draw_background(frame, pose);

        struct Item {
            double depth;
            int index; ///< >= 0 balloon, < 0 hoop (-1 - j)
        };
        std::vector<Item> items;
        for (std::size_t i = 0; i < balloons.size(); ++i) {
            const Vec3 q = pose.rotation.transpose() * (balloons[i].position - pose.position);
            items.push_back({q.x(), static_cast<int>(i)});
        }
        for (std::size_t j = 0; j < hoops.size(); ++j) {
            const Vec3 q = pose.rotation.transpose() * (hoops[j].center - pose.position);
            items.push_back({q.x(), -1 - static_cast<int>(j)});
        }
        std::stable_sort(items.begin(), items.end(),
                         [](const Item &a, const Item &b) { return a.depth > b.depth; });

        std::uniform_real_distribution<double> jit(1.0 - look_.jitter, 1.0 + look_.jitter);
        for (const Item &it : items) {
            const double j = opt.jitter ? jit(rng) : 1.0;
            if (it.index >= 0) {
                draw_balloon(frame, labels, pose, balloons[it.index], j,
                             static_cast<std::uint16_t>(1 + it.index));
            } else {
                const int h = -1 - it.index;
                draw_hoop(frame, labels, pose, hoops[h], j, ir && opt.retroreflect,
                          static_cast<std::uint16_t>(kHoopLabel + h));
            }
        }
        if (ir) {
            const double k = 1.0 - look_.ir_dim;
            for (std::size_t i = 0; i < frame.pixels.size(); ++i) {
                if (!(opt.retroreflect && labels.pixels[i] >= kHoopLabel)) {
                    frame.pixels[i] = scale(frame.pixels[i], k);
                }
            }
        }
        if (opt.labels) {
            *opt.labels = std::move(labels);
        }
        if (opt.noise) {
            std::uniform_int_distribution<std::size_t> off(0, noise_.size() - 1);
            add_noise(frame, off(rng));
        }
        return frame;
    }

  private:
    using Labels = perception::Image<std::uint16_t>;

    static std::uint8_t sat(double v) {
        return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
    }
    static Rgb scale(Rgb c, double k) { return {sat(c.r * k), sat(c.g * k), sat(c.b * k)}; }

    Rgb face_color(const Vec3 &origin, const Vec3 &dir) const {
        double best = std::numeric_limits<double>::infinity();
        Rgb color = look_.floor;
        const auto consider = [&](double t, Rgb c) {
            if (t > 0.0 && t < best) {
                best = t;
                color = c;
            }
        };
        if (dir.x() < 0.0) consider(-origin.x() / dir.x(), look_.walls[0]);
        if (dir.x() > 0.0) consider((arena_.x() - origin.x()) / dir.x(), look_.walls[1]);
        if (dir.y() < 0.0) consider(-origin.y() / dir.y(), look_.walls[2]);
        if (dir.y() > 0.0) consider((arena_.y() - origin.y()) / dir.y(), look_.walls[3]);
        if (dir.z() < 0.0) consider(-origin.z() / dir.z(), look_.floor);
        if (dir.z() > 0.0) consider((arena_.z() - origin.z()) / dir.z(), look_.ceiling);
        return color;
    }

    void draw_background(Frame &frame, const CameraPose &pose) const {
        const double f = cam_.focal();
        const Vec2 c = cam_.center();
        constexpr int B = 4;
        for (int by = 0; by < frame.height; by += B) {
            for (int bx = 0; bx < frame.width; bx += B) {
                const double u = bx + B / 2.0;
                const double v = by + B / 2.0;
                const Vec3 dir = pose.rotation * Vec3(1.0, (c.x() - u) / f, (c.y() - v) / f);
                const Rgb col = face_color(pose.position, dir);
                const int xe = std::min(bx + B, frame.width);
                for (int y = by; y < std::min(by + B, frame.height); ++y) {
                    std::fill(&frame.at(bx, y), &frame.at(xe - 1, y) + 1, col);
                }
            }
        }
    }

    void draw_balloon(Frame &frame, Labels &labels, const CameraPose &pose, const BalloonView &b,
                      double jitter, std::uint16_t label) const {
        const auto p = project(cam_, pose, b.position, b.radius + 0.02);
        if (!p) {
            return;
        }
        const double rho = projected_radius(cam_, b.radius, (b.position - pose.position).norm());
        const double u0 = p->pixel.x();
        const double v0 = p->pixel.y();
        const double hu = u0 - 0.35 * rho;
        const double hv = v0 - 0.35 * rho;
        const double hr = 0.3 * rho;
        const int x0 = std::max(0, static_cast<int>(std::floor(u0 - rho)));
        const int x1 = std::min(frame.width - 1, static_cast<int>(std::ceil(u0 + rho)));
        const int y0 = std::max(0, static_cast<int>(std::floor(v0 - rho)));
        const int y1 = std::min(frame.height - 1, static_cast<int>(std::ceil(v0 + rho)));
        const double rho2 = rho * rho;
        for (int y = y0; y <= y1; ++y) {
            for (int x = x0; x <= x1; ++x) {
                const double du = x + 0.5 - u0;
                const double dv = y + 0.5 - v0;
                const double d2 = du * du + dv * dv;
                if (d2 > rho2) {
                    continue;
                }
                const double shade = jitter * (1.0 - 0.25 * d2 / rho2);
                double r = b.color.r * shade, g = b.color.g * shade, bl = b.color.b * shade;
                const double h2 = (x + 0.5 - hu) * (x + 0.5 - hu) + (y + 0.5 - hv) * (y + 0.5 - hv);
                if (h2 < hr * hr) {
                    const double w = 0.35 * (1.0 - h2 / (hr * hr));
                    r += (255.0 - r) * w;
                    g += (255.0 - g) * w;
                    bl += (255.0 - bl) * w;
                }
                frame.at(x, y) = {sat(r), sat(g), sat(bl)};
                labels.at(x, y) = label;
            }
        }
    }

    void draw_hoop(Frame &frame, Labels &labels, const CameraPose &pose, const HoopSpec &h,
                   double jitter, bool glow, std::uint16_t label) const {
        const std::vector<Vec3> pts = hoop_outline(h);
        const Rgb color = glow ? look_.ir_glow : scale(look_.goal, jitter);
        const double f = cam_.focal();
        std::optional<Projection> prev;
        for (const Vec3 &w : pts) {
            const auto cur = project(cam_, pose, w, 0.1);
            if (prev && cur) {
                const double hw = std::max(0.75, 0.5 * f * h.tube / std::min(prev->depth, cur->depth));
                draw_segment(frame, labels, prev->pixel, cur->pixel, hw, color, label);
            }
            prev = cur;
        }
    }

    void draw_segment(Frame &frame, Labels &labels, const Vec2 &a, const Vec2 &b, double hw,
                      Rgb color, std::uint16_t label) const {
        const double lim = 4.0 * (frame.width + frame.height);
        if (std::abs(a.x()) > lim || std::abs(a.y()) > lim || std::abs(b.x()) > lim ||
            std::abs(b.y()) > lim) {
            return;
        }
        const int y0 = std::max(0, static_cast<int>(std::floor(std::min(a.y(), b.y()) - hw)));
        const int y1 = std::min(frame.height - 1, static_cast<int>(std::ceil(std::max(a.y(), b.y()) + hw)));
        const Vec2 ab = b - a;
        const double len2 = ab.squaredNorm();
        const double len = std::sqrt(len2);
        constexpr double inf = std::numeric_limits<double>::infinity();
        for (int y = y0; y <= y1; ++y) {
            // The capsule is convex, so its trace on a pixel row is one interval: the hull of
            // the traces of the two end disks and of the swept rectangle.
            const double yc = y + 0.5;
            double lo = inf, hi = -inf;
            for (const Vec2 *e : {&a, &b}) {
                const double dy = yc - e->y();
                if (dy * dy <= hw * hw) {
                    const double s = std::sqrt(hw * hw - dy * dy);
                    lo = std::min(lo, e->x() - s);
                    hi = std::max(hi, e->x() + s);
                }
            }
            if (len2 > 0.0) {
                // 0 <= (p - a).ab <= len2 and |ab x (p - a)| <= hw |ab|, each linear in x.
                double rlo = -inf, rhi = inf;
                const auto clip = [&](double k, double c, double lower, double upper) {
                    if (k == 0.0) {
                        if (c < lower || c > upper) {
                            rlo = inf;
                        }
                        return;
                    }
                    double p = (lower - c) / k, q = (upper - c) / k;
                    if (p > q) {
                        std::swap(p, q);
                    }
                    rlo = std::max(rlo, p);
                    rhi = std::min(rhi, q);
                };
                const double dy = yc - a.y();
                clip(ab.x(), dy * ab.y() - a.x() * ab.x(), 0.0, len2);
                clip(-ab.y(), ab.x() * dy + ab.y() * a.x(), -hw * len, hw * len);
                if (rlo <= rhi) {
                    lo = std::min(lo, rlo);
                    hi = std::max(hi, rhi);
                }
            }
            if (!(lo <= hi)) {
                continue;
            }
            const int x0 = std::max(0, static_cast<int>(std::ceil(lo - 0.5)));
            const int x1 = std::min(frame.width - 1, static_cast<int>(std::floor(hi - 0.5)));
            for (int x = x0; x <= x1; ++x) {
                frame.at(x, y) = color;
                labels.at(x, y) = label;
            }
        }
    }

    /// Saturating add of a contiguous slice of the noise table.
    void add_noise(Frame &frame, std::size_t offset) const {
        static_assert(sizeof(Rgb) == 3);
        auto *bytes = reinterpret_cast<std::uint8_t *>(frame.pixels.data());
        const std::size_t n = frame.pixels.size() * 3;
        const std::int8_t *noise = noise_.data() + offset % (noise_.size() - n + 1);
        for (std::size_t i = 0; i < n; ++i) {
            const int v = bytes[i] + noise[i];
            bytes[i] = static_cast<std::uint8_t>(v < 0 ? 0 : (v > 255 ? 255 : v));
        }
    }

    Vec3 arena_;
    CameraModel cam_;
    SceneLook look_;
    std::vector<std::int8_t> noise_;
};

} // namespace mochi::sim
