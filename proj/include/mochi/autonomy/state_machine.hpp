// Per-blimp behavior state machine: Manual, RandomWalk, MoveToGoal, PassThroughGoal.
#pragma once

#include <mochi/control/controller.hpp>
#include <mochi/perception/balloon.hpp>
#include <mochi/perception/goal.hpp>

#include <optional>
#include <random>
#include <string_view>

namespace mochi::autonomy {

using control::ManualCommand;
using control::ServoTarget;
using control::TargetKind;

enum class Mode : std::uint8_t { Manual = 0, RandomWalk = 1, MoveToGoal = 2, PassThroughGoal = 3 };

inline constexpr std::string_view to_string(Mode m) {
    switch (m) {
    case Mode::Manual: return "Manual";
    case Mode::RandomWalk: return "RandomWalk";
    case Mode::MoveToGoal: return "MoveToGoal";
    case Mode::PassThroughGoal: return "PassThroughGoal";
    }
    return "?";
}

inline std::optional<Mode> parse_mode(std::string_view s) {
    for (Mode m : {Mode::Manual, Mode::RandomWalk, Mode::MoveToGoal, Mode::PassThroughGoal}) {
        if (s == to_string(m)) {
            return m;
        }
    }
    return std::nullopt;
}

/// Thresholds and timings; all reachable through the parameter protocol.
struct AutonomyParams {
    int persist_frames = 3;            ///< consecutive detections before MoveToGoal
    double loss_timeout = 2.0;         ///< [s] without detection before giving up
    double charge_timeout = 5.0;       ///< [s] maximum PassThroughGoal duration
    double walk_min = 4.0;             ///< [s]
    double walk_max = 8.0;             ///< [s]
    double balloon_charge_cells = 6;   ///< n_b that triggers a charge
    double goal_charge_pixels = 1500;  ///< n_g that triggers a charge
    double charge = 0.25;              ///< charge feedforward
    double cruise = 0.05;              ///< forward feedforward while walking/approaching
    double balloon_altitude = 2.2;     ///< [m] walk altitude while hunting balloons
    double goal_altitude = 6.2;        ///< [m] walk altitude while carrying
};

/// The current objective's detection, whichever detector produced it.
struct Observation {
    bool valid = false;
    Vec2 center = Vec2::Zero();
    double size = 0.0;
    TargetKind kind = TargetKind::Balloon;

    static Observation from(const perception::Detection &d) {
        return {d.valid, d.center, static_cast<double>(d.cells), TargetKind::Balloon};
    }
    static Observation from(const perception::GoalDetection &g) {
        return {g.valid, g.center, static_cast<double>(g.size), TargetKind::Goal};
    }
};

struct AutonomyState {
    Mode mode = Mode::RandomWalk;
    bool carrying = false;
    double rw_heading = 0.0;
    double rw_deadline = 0.0;
    int lost_frames = 0;
    int persist_frames = 0;
    double last_seen = 0.0;
    double charge_start = 0.0;
    std::optional<ManualCommand> manual;

    TargetKind objective() const { return carrying ? TargetKind::Goal : TargetKind::Balloon; }
};

/// Exactly one of target / manual / hold is active. Heading/altitude/feedforward refine it.
struct BehaviorCommand {
    std::optional<ServoTarget> target;
    std::optional<ManualCommand> manual;
    bool hold = false;
    std::optional<double> heading;
    std::optional<double> altitude;
    double cruise = 0.0; ///< forward feedforward that is not a charge
    double charge = 0.0; ///< charge feedforward (r''_x)
};

inline double charge_threshold(TargetKind kind, const AutonomyParams &p) {
    return kind == TargetKind::Balloon ? p.balloon_charge_cells : p.goal_charge_pixels;
}

inline Observation select_objective(const AutonomyState &s, const perception::Detection &balloon,
                                    const perception::GoalDetection &goal) {
    return s.carrying ? Observation::from(goal) : Observation::from(balloon);
}

namespace detail {
inline void enter(AutonomyState &s, Mode m, double now) {
    s.mode = m;
    s.persist_frames = 0;
    s.lost_frames = 0;
    if (m == Mode::RandomWalk) {
        s.rw_deadline = now; // draw a fresh walk on the next behavior call
    } else if (m == Mode::MoveToGoal) {
        s.last_seen = now;
    } else if (m == Mode::PassThroughGoal) {
        s.charge_start = now;
    } else {
        s.manual.reset();
    }
}
} // namespace detail

/// Advances the mode at the perception cadence. A central command overrides everything;
/// Manual is entered and left only that way.
inline AutonomyState transition(AutonomyState s, const perception::Detection &balloon,
                                const perception::GoalDetection &goal, double now,
                                std::optional<Mode> central, const AutonomyParams &p = {}) {
    if (central) {
        detail::enter(s, *central, now);
        return s;
    }
    const Observation obs = select_objective(s, balloon, goal);
    switch (s.mode) {
    case Mode::Manual:
        break;
    case Mode::RandomWalk:
        s.persist_frames = obs.valid ? s.persist_frames + 1 : 0;
        if (s.persist_frames >= p.persist_frames) {
            detail::enter(s, Mode::MoveToGoal, now);
        }
        break;
    case Mode::MoveToGoal:
        if (obs.valid) {
            s.last_seen = now;
            s.lost_frames = 0;
            if (obs.size >= charge_threshold(obs.kind, p)) {
                detail::enter(s, Mode::PassThroughGoal, now);
            }
        } else {
            ++s.lost_frames;
            if (now - s.last_seen >= p.loss_timeout) {
                detail::enter(s, Mode::RandomWalk, now);
            }
        }
        break;
    case Mode::PassThroughGoal:
        // The charge continues through momentary detection loss until the timeout.
        if (now - s.charge_start >= p.charge_timeout) {
            detail::enter(s, Mode::RandomWalk, now);
        }
        break;
    }
    return s;
}

/// Capture (carrying becomes true) or delivery (false) ends any charge.
inline AutonomyState on_carry_event(AutonomyState s, bool carrying, double now) {
    s.carrying = carrying;
    if (s.mode != Mode::Manual) {
        detail::enter(s, Mode::RandomWalk, now);
    }
    return s;
}

/// Draws a heading uniform in (-pi, pi].
template <typename Rng> double draw_heading(Rng &rng) {
    std::uniform_real_distribution<double> u(0.0, 2.0 * kPi);
    return kPi - u(rng);
}

/// Behavior of the current mode. RandomWalk redraws its heading/duration when due.
template <typename Rng>
BehaviorCommand behavior(AutonomyState &s, const Observation &obs, double now, Rng &rng,
                         const AutonomyParams &p = {}) {
    BehaviorCommand cmd;
    const double altitude =
        s.objective() == TargetKind::Balloon ? p.balloon_altitude : p.goal_altitude;
    switch (s.mode) {
    case Mode::Manual:
        if (s.manual) {
            cmd.manual = s.manual;
        } else {
            cmd.hold = true;
        }
        break;
    case Mode::RandomWalk:
        if (now >= s.rw_deadline) {
            s.rw_heading = draw_heading(rng);
            std::uniform_real_distribution<double> dur(p.walk_min, p.walk_max);
            s.rw_deadline = now + dur(rng);
        }
        cmd.hold = true;
        cmd.heading = s.rw_heading;
        cmd.altitude = altitude;
        cmd.cruise = p.cruise;
        break;
    case Mode::MoveToGoal:
        if (obs.valid && obs.kind == s.objective()) {
            cmd.target = ServoTarget{obs.center, obs.kind, obs.size};
        } else {
            cmd.hold = true;
        }
        cmd.cruise = p.cruise;
        break;
    case Mode::PassThroughGoal:
        if (obs.valid && obs.kind == s.objective()) {
            cmd.target = ServoTarget{obs.center, obs.kind, obs.size};
        } else {
            cmd.hold = true;
        }
        cmd.charge = p.charge;
        break;
    }
    return cmd;
}

} // namespace mochi::autonomy
