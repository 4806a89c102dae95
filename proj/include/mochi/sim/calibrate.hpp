// Default color families learned from the renderer itself
#pragma once

#include <mochi/perception/balloon.hpp>
#include <mochi/perception/color.hpp>
#include <mochi/sim/render.hpp>

#include <array>
#include <random>
#include <vector>

namespace mochi::sim {

namespace detail {

/// A camera hovering mid-arena looking along +x, level.
inline CameraPose calibration_pose(const WorldConfig &cfg) {
    return {Vec3(0.3 * cfg.arena.x(), 0.5 * cfg.arena.y(), 2.0), Mat3::Identity()};
}

} // namespace detail

/// Cell-mean chroma of grid cells at least half covered by a balloon, over views at 0.8-4 m
/// under lighting from 0.5 to 1.5 times nominal.
inline std::vector<Vec2> balloon_cell_samples(const WorldConfig &cfg, int views, std::uint64_t seed) {
    Renderer renderer(cfg, seed);
    std::mt19937_64 rng(seed + 1);
    std::uniform_real_distribution<double> dist(0.8, 4.0);
    std::uniform_real_distribution<double> lateral(-0.25, 0.25);
    std::uniform_real_distribution<double> light(0.5, 1.5);
    const auto lit = [](Rgb c, double k) {
        const auto ch = [k](std::uint8_t v) {
            return static_cast<std::uint8_t>(std::min(255.0, std::round(v * k)));
        };
        return Rgb{ch(c.r), ch(c.g), ch(c.b)};
    };
    constexpr int kCellPixels = perception::kCellSize * perception::kCellSize;
    const CameraPose pose = detail::calibration_pose(cfg);
    std::vector<Vec2> samples;
    for (int v = 0; v < views; ++v) {
        const double d = dist(rng);
        const BalloonView b{pose.position + Vec3(d, lateral(rng) * d, lateral(rng) * d),
                            cfg.balloon.radius, lit(cfg.balloon.color, light(rng))};
        perception::Image<std::uint16_t> labels;
        RenderOptions opt;
        opt.labels = &labels;
        const Frame frame = renderer.render(pose, std::span(&b, 1), {}, false, rng, opt);
        const auto means = perception::cell_chroma(frame);
        std::array<int, perception::kCellCount> covered{};
        for (int y = 0; y < frame.height; ++y) {
            for (int x = 0; x < frame.width; ++x) {
                covered[perception::cell_index(y / perception::kCellSize, x / perception::kCellSize)] +=
                    labels.at(x, y) == 1;
            }
        }
        for (int i = 0; i < perception::kCellCount; ++i) {
            if (2 * covered[i] >= kCellPixels) {
                samples.push_back(means[i]);
            }
        }
    }
    return samples;
}

/// Per-pixel chroma of hoop tape seen at 1.5-4 m.
inline std::vector<Vec2> goal_pixel_samples(const WorldConfig &cfg, int views, std::uint64_t seed) {
    Renderer renderer(cfg, seed);
    std::mt19937_64 rng(seed + 1);
    std::uniform_real_distribution<double> dist(1.5, 4.0);
    const CameraPose pose = detail::calibration_pose(cfg);
    const perception::ChromaTable &table = perception::ChromaTable::instance();
    std::vector<Vec2> samples;
    for (int v = 0; v < views; ++v) {
        HoopSpec hoop;
        hoop.shape = static_cast<Shape>(v % 3);
        hoop.center = pose.position + Vec3(dist(rng), 0.0, 0.0);
        hoop.yaw = kPi;
        perception::Image<std::uint16_t> labels;
        RenderOptions opt;
        opt.labels = &labels;
        const Frame frame = renderer.render(pose, {}, std::span(&hoop, 1), false, rng, opt);
        for (std::size_t i = 0; i < frame.pixels.size(); i += 3) {
            if (labels.pixels[i] >= kHoopLabel) {
                samples.push_back(table.lookup(frame.pixels[i]));
            }
        }
    }
    return samples;
}

inline perception::ColorFamily default_balloon_family(const WorldConfig &cfg) {
    const auto s = balloon_cell_samples(cfg, 200, 0xba11);
    return perception::train_color_family(s, "balloon");
}

inline perception::ColorFamily default_goal_family(const WorldConfig &cfg) {
    const auto s = goal_pixel_samples(cfg, 30, 0x90a1);
    return perception::train_color_family(s, "goal");
}

} // namespace mochi::sim
