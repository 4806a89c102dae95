// Simulation configuration: arena, wind sources, objects, camera, per-blimp tuning
#pragma once

#include <mochi/autonomy/state_machine.hpp>
#include <mochi/comms/radio.hpp>
#include <mochi/control/controller.hpp>
#include <mochi/dynamics/types.hpp>
#include <mochi/perception/balloon.hpp>
#include <mochi/perception/goal.hpp>

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace mochi::sim {

using perception::Rgb;
using perception::Shape;

struct AcUnit {
    Vec3 position = Vec3::Zero();
    Vec3 direction = Vec3::UnitX(); ///< normalized on use
};

/// Ornstein-Uhlenbeck gust strength per AC unit.
struct WindParams {
    double reversion = 0.5; ///< [1/s]
    double mean = 0.9;      ///< [m/s] jet strength at the outlet
    double sigma = 0.4;     ///< [m/s/sqrt(s)]
    double cap = 1.0;       ///< [m/s] hard limit on the field magnitude
};

struct BalloonSpec {
    double radius = 0.15;
    double float_height = 1.5; ///< tether length; the anchor sits on the floor
    Rgb color{205, 35, 45};
    double drift_gain = 0.3;   ///< steady offset per m/s of wind
    double drift_time = 2.0;   ///< [s] time constant of the drift response
};

struct HoopSpec {
    Shape shape = Shape::Circle;
    Vec3 center = Vec3::Zero();
    double yaw = 0.0;        ///< heading of the hoop normal
    double aperture = 0.75;  ///< [m] circumradius of the opening
    double tube = 0.08;      ///< [m] visible tape width

    Vec3 normal() const { return {std::cos(yaw), std::sin(yaw), 0.0}; }
};

struct CaptureGeometry {
    double radius = 0.3;      ///< net cylinder radius
    double height = 0.5;      ///< net cylinder height
    double drop = 0.7;        ///< net center below the COM
    double min_speed = 0.1;   ///< forward speed needed to lift the weight
    double delivery_margin = 0.3;
};

/// Pinhole camera looking along x_B, u to the right, v downward.
struct CameraModel {
    double hfov = deg2rad(80.0);
    int width = perception::kFrameWidth;
    int height = perception::kFrameHeight;
    Vec3 mount = Vec3(0.25, 0.0, -0.7); ///< lens position in {B}

    double focal() const { return (width / 2.0) / std::tan(hfov / 2.0); }
    Vec2 center() const { return {width / 2.0, height / 2.0}; }
};

struct SceneLook {
    Rgb floor{95, 92, 88};
    Rgb ceiling{185, 185, 190};
    Rgb walls[4] = {{150, 148, 140}, {140, 140, 145}, {155, 150, 140}, {135, 138, 140}};
    Rgb goal{40, 200, 80};
    Rgb ir_glow{250, 250, 250};
    double noise_sigma = 6.0;   ///< per channel, 8-bit units
    double jitter = 0.2;        ///< +-brightness jitter per object per frame
    double ir_dim = 0.4;        ///< fraction everything but the tape loses with IR on
};

struct WorldConfig {
    Vec3 arena = Vec3(20.0, 15.0, 8.0);
    std::vector<AcUnit> ac_units = {
        {Vec3(0.5, 4.0, 3.0), Vec3(1.0, 0.3, 0.0)},
        {Vec3(19.5, 11.0, 3.0), Vec3(-1.0, -0.2, 0.0)},
    };
    WindParams wind;
    Vec2 balloon_region = Vec2(5.0, 5.0);
    Vec2 blimp_region = Vec2(10.0, 10.0);
    BalloonSpec balloon;
    std::vector<HoopSpec> hoops = {
        {Shape::Triangle, Vec3(4.0, 3.0, 5.5), deg2rad(35.0)},
        {Shape::Rectangle, Vec3(16.0, 3.0, 5.5), deg2rad(145.0)},
        {Shape::Circle, Vec3(10.0, 12.5, 5.5), deg2rad(-90.0)},
    };
    CaptureGeometry capture;
    CameraModel camera;
    SceneLook look;
    double redeploy_delay = 10.0; ///< [s]
    double spawn_height = 1.0;    ///< [m] COM height of a blimp resting on the ground
    double wall_margin = 0.6;     ///< [m] soft-wall zone
    double wall_stiffness = 0.4;  ///< [N/m]
    std::uint64_t seed = 1;
};

enum class GoalPath { Color, Infrared };

struct PerceptionParams {
    perception::FilterParams filter;
    double balloon_threshold = 3.0; ///< Mahalanobis gate for cells
    double goal_threshold = 3.0;    ///< Mahalanobis gate for goal pixels
    int ir_threshold = 180;         ///< luminance gate on ||F1 - F2||
    perception::GoalParams goal;
    GoalPath goal_path = GoalPath::Color;
};

/// Everything the parameter protocol can reach.
struct BlimpTuning {
    control::Gains gains;
    control::ManualLimits manual;
    PerceptionParams perception;
    autonomy::AutonomyParams autonomy;
};

enum class Scenario { Pickup, PickupAndDelivery };

struct ExperimentGrid {
    double duration = 300.0;
    std::vector<int> pickup_blimps = {1, 2, 3, 4};
    std::vector<int> pickup_balloons = {1, 2, 4, 8};
    struct Cell {
        int n_blimps = 4;
        int n_balloons = 8;
    };
    std::vector<Cell> delivery = {{4, 8}};
};

struct SimConfig {
    WorldConfig world;
    dynamics::BlimpParams blimp;
    std::map<int, dynamics::BlimpParams> blimp_overrides;
    BlimpTuning tuning;
    comms::RadioModel radio;
    ExperimentGrid experiment;
    std::optional<perception::ColorFamily> balloon_family;
    std::optional<perception::ColorFamily> goal_family;
    std::string state_dir; ///< empty: parameter stores stay in memory

    const dynamics::BlimpParams &params_for(int robot_id) const {
        const auto it = blimp_overrides.find(robot_id);
        return it == blimp_overrides.end() ? blimp : it->second;
    }
};

} // namespace mochi::sim
