// Fixed-timestep world: blimps, balloons, hoops, wind, radio and the ground station
#pragma once

#include <mochi/autonomy/state_machine.hpp>
#include <mochi/comms/ground_station.hpp>
#include <mochi/comms/param_store.hpp>
#include <mochi/comms/radio.hpp>
#include <mochi/control/controller.hpp>
#include <mochi/core/error.hpp>
#include <mochi/dynamics/rigid_body.hpp>
#include <mochi/perception/balloon.hpp>
#include <mochi/perception/goal.hpp>
#include <mochi/sim/calibrate.hpp>
#include <mochi/sim/events.hpp>
#include <mochi/sim/render.hpp>
#include <mochi/sim/tuning.hpp>
#include <mochi/sim/wind.hpp>

#include <cstring>
#include <random>
#include <vector>

namespace mochi::sim {

inline constexpr double kTickDt = 0.005;
inline constexpr int kPerceptionDivider = 20;
inline constexpr double kBatteryPlaceholder = 3.7; ///< [V]

/// splitmix64 finalizer; derives independent stream seeds from one run seed.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

enum class BalloonState : std::uint8_t { Free, Captured, Delivered };

inline const char *to_string(BalloonState s) {
    switch (s) {
    case BalloonState::Free: return "free";
    case BalloonState::Captured: return "captured";
    case BalloonState::Delivered: return "delivered";
    }
    return "?";
}

struct Balloon {
    int id = 0;
    Vec3 anchor = Vec3::Zero();
    Vec2 drift = Vec2::Zero();
    Vec3 position = Vec3::Zero();
    BalloonState state = BalloonState::Free;
    int carrier = -1;
};

struct Blimp {
    int id = 0;
    dynamics::BlimpParams params;
    dynamics::RigidState state;
    control::FlightController controller;
    autonomy::AutonomyState autonomy;
    autonomy::BehaviorCommand behavior;
    perception::BalloonTracker tracker;
    perception::Detection balloon_detection;
    perception::GoalDetection goal_detection;
    perception::CellMask activation{};
    BlimpTuning tuning;
    comms::ParamStore store;
    std::mt19937_64 rng;
    std::mt19937_64 camera_rng;
    dynamics::ActuatorCommand command;
    bool saturated = false;
    int carried = -1;
    bool charging = false;
    double respawn_at = -1.0;
    int attempts = 0;
    int successes = 0;
    int deliveries = 0;

    autonomy::Observation observation() const {
        return autonomy::select_objective(autonomy, balloon_detection, goal_detection);
    }
};

enum class EventKind { Attempt, Capture, Delivery, Respawn };

struct WorldEvent {
    EventKind kind = EventKind::Attempt;
    double time = 0.0;
    int blimp = -1;
    int balloon = -1;
    int hoop = -1;
};

/// Counts traffic to check that blimps speak only when asked.
struct TrafficMonitor {
    std::size_t uplink_frames = 0;
    std::size_t requests_needing_reply = 0;
    std::size_t replies = 0;
    std::size_t rejected = 0;
};

class World {
  public:
    World(SimConfig cfg, int n_blimps, int n_balloons, std::uint64_t seed,
          Scenario scenario = Scenario::Pickup)
        : cfg_(std::move(cfg)), scenario_(scenario), seed_(seed),
          wind_(cfg_.world.ac_units, cfg_.world.wind, derive_seed(seed, 1), kTickDt),
          radio_(cfg_.radio, derive_seed(seed, 2)), spawn_rng_(derive_seed(seed, 3)),
          renderer_(cfg_.world, derive_seed(seed, 4)) {
        if (n_blimps < 0 || n_balloons < 0) {
            throw ConfigError("World: negative object count");
        }
        if (!cfg_.balloon_family) {
            cfg_.balloon_family = default_balloon_family(cfg_.world);
        }
        if (!cfg_.goal_family) {
            cfg_.goal_family = default_goal_family(cfg_.world);
        }
        station_position_ = Vec3(0.5 * cfg_.world.arena.x(), 0.5 * cfg_.world.arena.y(), 0.0);
        for (int i = 0; i < n_balloons; ++i) {
            Balloon b;
            b.id = i;
            place_balloon(b);
            balloons_.push_back(b);
        }
        for (int i = 0; i < n_blimps; ++i) {
            blimps_.push_back(make_blimp(i));
        }
    }

    // ---- scheduling ---------------------------------------------------------

    void tick() {
        const double t = time();
        if (ticks_ % kPerceptionDivider == 0) {
            for (Blimp &b : blimps_) {
                perceive(b, t);
            }
        }
        wind_.advance();
        for (Blimp &b : blimps_) {
            fly(b);
        }
        for (Blimp &b : blimps_) {
            check_events(b, t + kTickDt);
        }
        update_balloons();
        ++ticks_;
        handle_respawns(time());
        pump_radio(time());
    }

    void run_for(double seconds) {
        const auto n = static_cast<std::uint64_t>(std::llround(seconds / kTickDt));
        for (std::uint64_t i = 0; i < n; ++i) {
            tick();
        }
    }

    double time() const { return static_cast<double>(ticks_) * kTickDt; }
    std::uint64_t ticks() const { return ticks_; }
    std::uint64_t perception_passes() const { return perception_passes_; }

    // ---- access -------------------------------------------------------------

    const SimConfig &config() const { return cfg_; }
    Scenario scenario() const { return scenario_; }
    std::uint64_t seed() const { return seed_; }
    const std::vector<Blimp> &blimps() const { return blimps_; }
    std::vector<Blimp> &blimps() { return blimps_; }
    const std::vector<Balloon> &balloons() const { return balloons_; }
    std::vector<Balloon> &balloons() { return balloons_; }
    const std::vector<HoopSpec> &hoops() const { return cfg_.world.hoops; }
    const WindField &wind() const { return wind_; }
    comms::GroundStation &station() { return station_; }
    const comms::RadioChannel &radio() const { return radio_; }
    comms::RadioChannel &radio() { return radio_; }
    const TrafficMonitor &traffic() const { return traffic_; }
    const Vec3 &station_position() const { return station_position_; }
    const Renderer &renderer() const { return renderer_; }

    /// Records every uplink frame as a blimp receives it.
    void capture_uplink(bool on) { capture_uplink_ = on; }
    const std::vector<comms::Bytes> &captured_uplink() const { return captured_uplink_; }

    std::vector<WorldEvent> take_events() {
        std::vector<WorldEvent> out;
        out.swap(events_);
        return out;
    }

    int attempts() const { return sum(&Blimp::attempts); }
    int successes() const { return sum(&Blimp::successes); }
    int deliveries() const { return sum(&Blimp::deliveries); }

    /// Everything the blimp's camera would see right now.
    Frame render_view(const Blimp &b, bool ir, std::mt19937_64 &rng,
                      const RenderOptions &opt = {}) const {
        const auto views = balloon_views();
        return renderer_.render(camera_pose(b.state, cfg_.world.camera), views, cfg_.world.hoops, ir,
                                rng, opt);
    }

    /// FNV-1a over the full dynamic state.
    std::uint64_t hash() const {
        std::uint64_t h = 0xcbf29ce484222325ull;
        const auto mix = [&h](const void *p, std::size_t n) {
            const auto *c = static_cast<const unsigned char *>(p);
            for (std::size_t i = 0; i < n; ++i) {
                h ^= c[i];
                h *= 0x100000001b3ull;
            }
        };
        const auto vec = [&mix](const Vec3 &v) {
            for (int i = 0; i < 3; ++i) {
                const double d = v[i];
                mix(&d, sizeof d);
            }
        };
        mix(&ticks_, sizeof ticks_);
        for (const Blimp &b : blimps_) {
            vec(b.state.position);
            vec(b.state.euler);
            vec(b.state.velocity);
            vec(b.state.omega);
            const auto mode = static_cast<std::uint8_t>(b.autonomy.mode);
            mix(&mode, 1);
            const int counters[4] = {b.attempts, b.successes, b.deliveries, b.carried};
            mix(counters, sizeof counters);
        }
        for (const Balloon &b : balloons_) {
            vec(b.position);
            const auto st = static_cast<std::uint8_t>(b.state);
            mix(&st, 1);
            mix(&b.carrier, sizeof b.carrier);
        }
        return h;
    }

  private:
    template <typename M> int sum(M member) const {
        int s = 0;
        for (const Blimp &b : blimps_) {
            s += b.*member;
        }
        return s;
    }

    Vec2 region_sample(const Vec2 &size) {
        std::uniform_real_distribution<double> ux(-0.5 * size.x(), 0.5 * size.x());
        std::uniform_real_distribution<double> uy(-0.5 * size.y(), 0.5 * size.y());
        const double x = ux(spawn_rng_);
        const double y = uy(spawn_rng_);
        return {0.5 * cfg_.world.arena.x() + x, 0.5 * cfg_.world.arena.y() + y};
    }

    void place_balloon(Balloon &b) {
        const Vec2 xy = region_sample(cfg_.world.balloon_region);
        b.anchor = Vec3(xy.x(), xy.y(), 0.0);
        b.drift = Vec2::Zero();
        b.position = b.anchor + Vec3(0.0, 0.0, cfg_.world.balloon.float_height);
        b.state = BalloonState::Free;
        b.carrier = -1;
    }

    void place_blimp(Blimp &b) {
        const Vec2 xy = region_sample(cfg_.world.blimp_region);
        std::uniform_real_distribution<double> yaw(-kPi, kPi);
        b.state = dynamics::RigidState{};
        b.state.position = Vec3(xy.x(), xy.y(), cfg_.world.spawn_height);
        b.state.euler = Vec3(0.0, 0.0, yaw(spawn_rng_));
        b.controller = control::FlightController(b.tuning.autonomy.balloon_altitude, b.state.yaw());
        b.tracker = perception::BalloonTracker(b.tuning.perception.filter);
        b.balloon_detection = {};
        b.goal_detection = {};
        b.activation.fill(false);
        b.carried = -1;
        b.charging = false;
        b.respawn_at = -1.0;
        const bool manual = b.autonomy.mode == autonomy::Mode::Manual;
        autonomy::AutonomyState fresh;
        if (manual) {
            fresh.mode = autonomy::Mode::Manual;
        }
        b.autonomy = fresh;
        b.behavior = autonomy::behavior(b.autonomy, b.observation(), time(), b.rng, b.tuning.autonomy);
    }

    Blimp make_blimp(int id) {
        Blimp b;
        b.id = id;
        b.params = cfg_.params_for(id);
        b.params.validate();
        b.tuning = cfg_.tuning;
        if (!cfg_.state_dir.empty()) {
            b.store = comms::ParamStore(comms::ParamStore::robot_file(cfg_.state_dir, id));
            apply_store(b.tuning, b.store);
        }
        b.rng.seed(derive_seed(seed_, 100 + static_cast<std::uint64_t>(id)));
        b.camera_rng.seed(derive_seed(seed_, 10000 + static_cast<std::uint64_t>(id)));
        place_blimp(b);
        return b;
    }

    std::vector<BalloonView> balloon_views() const {
        std::vector<BalloonView> views;
        views.reserve(balloons_.size());
        for (const Balloon &b : balloons_) {
            if (b.state != BalloonState::Delivered) {
                views.push_back({b.position, cfg_.world.balloon.radius, cfg_.world.balloon.color});
            }
        }
        return views;
    }

    void perceive(Blimp &b, double t) {
        ++perception_passes_;
        const PerceptionParams &pp = b.tuning.perception;
        b.tracker.grid().set_params(pp.filter);
        if (!b.autonomy.carrying) {
            const Frame frame = render_view(b, false, b.camera_rng);
            b.balloon_detection = b.tracker.update(frame, *cfg_.balloon_family, pp.balloon_threshold);
            b.activation = b.tracker.last_activation();
            b.goal_detection = {};
        } else if (pp.goal_path == GoalPath::Infrared) {
            const Frame on = render_view(b, true, b.camera_rng);
            const Frame off = render_view(b, false, b.camera_rng);
            b.goal_detection = perception::detect_goal_ir(on, off, pp.ir_threshold, pp.goal);
            b.balloon_detection = {};
        } else {
            const Frame frame = render_view(b, false, b.camera_rng);
            b.goal_detection = perception::detect_goal_color(frame, *cfg_.goal_family,
                                                             pp.goal_threshold, pp.goal);
            b.balloon_detection = {};
        }
        b.autonomy = autonomy::transition(b.autonomy, b.balloon_detection, b.goal_detection, t,
                                          std::nullopt, b.tuning.autonomy);
        refresh_behavior(b, t);
    }

    void refresh_behavior(Blimp &b, double t) {
        b.behavior = autonomy::behavior(b.autonomy, b.observation(), t, b.rng, b.tuning.autonomy);
        if (b.behavior.target) {
            b.controller.retarget(control::sense(b.state), *b.behavior.target, cfg_.world.camera.center(),
                                  b.tuning.gains);
        }
        const bool charging = b.behavior.charge > 0.0 && !b.autonomy.carrying;
        if (charging && !b.charging) {
            ++b.attempts;
            events_.push_back({EventKind::Attempt, t, b.id, -1, -1});
        }
        b.charging = charging;
    }

    Vec3 wall_force(const Vec3 &p) const {
        const Vec3 lo(0.0, 0.0, cfg_.world.spawn_height);
        const Vec3 hi = cfg_.world.arena;
        const double m = cfg_.world.wall_margin;
        const double k = cfg_.world.wall_stiffness;
        Vec3 f = Vec3::Zero();
        for (int i = 0; i < 3; ++i) {
            if (p[i] < lo[i] + m) {
                f[i] += k * (lo[i] + m - p[i]);
            }
            if (p[i] > hi[i] - m) {
                f[i] -= k * (p[i] - (hi[i] - m));
            }
        }
        return f;
    }

    void contain(dynamics::RigidState &s) const {
        const Vec3 lo(0.1, 0.1, cfg_.world.spawn_height);
        const Vec3 hi = cfg_.world.arena - Vec3(0.1, 0.1, 0.3);
        for (int i = 0; i < 3; ++i) {
            if (s.position[i] < lo[i]) {
                s.position[i] = lo[i];
                s.velocity[i] = std::max(s.velocity[i], 0.0);
            } else if (s.position[i] > hi[i]) {
                s.position[i] = hi[i];
                s.velocity[i] = std::min(s.velocity[i], 0.0);
            }
        }
    }

    void fly(Blimp &b) {
        const control::SensorFeedback fb = control::sense(b.state);
        control::ControlRequest req;
        req.manual = b.behavior.manual;
        req.heading = b.behavior.heading;
        req.altitude = b.behavior.altitude;
        req.forward_ff = b.behavior.cruise + b.behavior.charge;
        const control::ControlOutput out =
            b.controller.step(fb, req, b.tuning.gains, b.params, b.tuning.manual);
        b.command = out.command;
        b.saturated = out.saturated;
        prev_positions_.resize(blimps_.size());
        prev_positions_[b.id] = b.state.position;
        const Vec3 w = wind_.at(b.state.position);
        try {
            b.state = dynamics::step(b.state, out.command, w, b.params, kTickDt,
                                     wall_force(b.state.position));
        } catch (const NonFiniteState &e) {
            throw NonFiniteState(e.what(), b.id);
        }
        contain(b.state);
    }

    void check_events(Blimp &b, double t) {
        if (!b.autonomy.carrying) {
            for (Balloon &ball : balloons_) {
                if (ball.state == BalloonState::Free &&
                    check_capture(b.state, ball.position, cfg_.world.capture)) {
                    ball.state = BalloonState::Captured;
                    ball.carrier = b.id;
                    b.carried = ball.id;
                    ++b.successes;
                    events_.push_back({EventKind::Capture, t, b.id, ball.id, -1});
                    b.autonomy = autonomy::on_carry_event(b.autonomy, true, t);
                    b.charging = false;
                    refresh_behavior(b, t);
                    if (scenario_ == Scenario::Pickup) {
                        b.respawn_at = t + cfg_.world.redeploy_delay;
                    }
                    break;
                }
            }
            return;
        }
        if (scenario_ != Scenario::PickupAndDelivery) {
            return;
        }
        for (std::size_t h = 0; h < cfg_.world.hoops.size(); ++h) {
            if (check_delivery(prev_positions_[b.id], b.state.position, true, cfg_.world.hoops[h],
                               cfg_.world.capture)) {
                Balloon &ball = balloons_[b.carried];
                ball.state = BalloonState::Delivered;
                ball.carrier = -1;
                ++b.deliveries;
                events_.push_back({EventKind::Delivery, t, b.id, ball.id, static_cast<int>(h)});
                b.autonomy = autonomy::on_carry_event(b.autonomy, false, t);
                place_blimp(b);
                events_.push_back({EventKind::Respawn, t, b.id, -1, -1});
                break;
            }
        }
    }

    void update_balloons() {
        const BalloonSpec &spec = cfg_.world.balloon;
        const double len = spec.float_height;
        for (Balloon &ball : balloons_) {
            if (ball.state == BalloonState::Captured) {
                ball.position = net_center(blimps_[ball.carrier].state, cfg_.world.capture);
            } else if (ball.state == BalloonState::Free) {
                const Vec2 w = wind_.at(ball.position).head<2>();
                ball.drift += (spec.drift_gain * w - ball.drift) * (kTickDt / spec.drift_time);
                const double n = ball.drift.norm();
                if (n > 0.9 * len) {
                    ball.drift *= 0.9 * len / n;
                }
                const double up = std::sqrt(len * len - ball.drift.squaredNorm());
                ball.position = ball.anchor + Vec3(ball.drift.x(), ball.drift.y(), up);
            }
        }
    }

    void handle_respawns(double t) {
        for (Blimp &b : blimps_) {
            if (b.respawn_at < 0.0 || t + 1e-9 < b.respawn_at) {
                continue;
            }
            if (b.carried >= 0) {
                place_balloon(balloons_[b.carried]);
            }
            place_blimp(b);
            events_.push_back({EventKind::Respawn, t, b.id, -1, -1});
        }
    }

    double distance_to(std::uint16_t robot_id) const {
        if (robot_id == comms::kBroadcast) {
            double d = 0.0;
            for (const Blimp &b : blimps_) {
                d = std::max(d, (b.state.position - station_position_).norm());
            }
            return d;
        }
        if (robot_id < blimps_.size()) {
            return (blimps_[robot_id].state.position - station_position_).norm();
        }
        return 0.0;
    }

    void pump_radio(double t) {
        for (comms::OutgoingFrame &f : station_.poll(t)) {
            radio_.send(comms::Direction::Uplink, f.robot_id, std::move(f.frame), distance_to(f.robot_id), t);
        }
        radio_.drain(t + 1e-9, [&](comms::InFlight &item) {
            if (item.direction == comms::Direction::Downlink) {
                station_.receive(item.frame, t);
                return;
            }
            for (Blimp &b : blimps_) {
                if (item.robot_id == comms::kBroadcast || item.robot_id == b.id) {
                    on_uplink(b, item.frame, t);
                }
            }
        });
    }

    void reply(comms::Message msg, double t) {
        ++traffic_.replies;
        radio_.send(comms::Direction::Downlink, msg.robot_id, comms::encode(msg),
                    distance_to(msg.robot_id), t);
    }

    void on_uplink(Blimp &b, const comms::Bytes &frame, double t) {
        ++traffic_.uplink_frames;
        if (capture_uplink_) {
            captured_uplink_.push_back(frame);
        }
        const comms::DecodeResult r = comms::try_decode(frame);
        if (!r.ok()) {
            ++traffic_.rejected;
            return;
        }
        const comms::Message &msg = r.message();
        const auto id = static_cast<std::uint16_t>(b.id);
        if (const auto *ps = std::get_if<comms::ParamSet>(&msg.payload)) {
            ++traffic_.requests_needing_reply;
            reply({id, msg.seq, apply_param(b, *ps)}, t);
        } else if (std::holds_alternative<comms::TelemetryReq>(msg.payload)) {
            ++traffic_.requests_needing_reply;
            reply({id, msg.seq, telemetry_response(b)}, t);
        } else if (const auto *mc = std::get_if<comms::ModeCmd>(&msg.payload)) {
            b.autonomy = autonomy::transition(b.autonomy, b.balloon_detection, b.goal_detection, t,
                                              mc->mode, b.tuning.autonomy);
            refresh_behavior(b, t);
        } else if (const auto *man = std::get_if<comms::ManualCmd>(&msg.payload)) {
            if (b.autonomy.mode == autonomy::Mode::Manual) {
                b.autonomy.manual = control::ManualCommand{man->forward, man->yaw_rate, man->climb};
                refresh_behavior(b, t);
            }
        }
    }

    comms::ParamAck apply_param(Blimp &b, const comms::ParamSet &ps) {
        comms::ParamAck ack{ps.key, ps.value, comms::AckStatus::Ok};
        BlimpTuning probe = b.tuning;
        if (!find_tuning_key(ps.key)) {
            ack.status = comms::AckStatus::UnknownKey;
            return ack;
        }
        if (!set_tuning(probe, ps.key, ps.value)) {
            ack.status = comms::AckStatus::OutOfRange;
            return ack;
        }
        try {
            b.store.set(ps.key, ps.value);
        } catch (const comms::StorageFailure &) {
            ack.status = comms::AckStatus::StorageFailure;
            return ack;
        }
        b.tuning = probe;
        return ack;
    }

  public:
    /// On-demand state report.
    static comms::TelemetryResp telemetry_response(const Blimp &b) {
        comms::TelemetryResp r;
        r.h = static_cast<float>(b.state.position.z());
        r.psi = static_cast<float>(b.state.yaw());
        r.phi = static_cast<float>(b.state.roll());
        r.theta = static_cast<float>(b.state.pitch());
        r.battery = static_cast<float>(kBatteryPlaceholder);
        r.mode = b.autonomy.mode;
        const autonomy::Observation obs = b.observation();
        r.det_x = static_cast<float>(obs.center.x());
        r.det_y = static_cast<float>(obs.center.y());
        r.det_n = static_cast<std::uint16_t>(std::clamp(obs.size, 0.0, 65535.0));
        r.det_valid = obs.valid;
        return r;
    }

  private:
    SimConfig cfg_;
    Scenario scenario_;
    std::uint64_t seed_;
    WindField wind_;
    comms::RadioChannel radio_;
    comms::GroundStation station_;
    std::mt19937_64 spawn_rng_;
    Renderer renderer_;
    std::vector<Blimp> blimps_;
    std::vector<Balloon> balloons_;
    std::vector<Vec3> prev_positions_;
    std::vector<WorldEvent> events_;
    TrafficMonitor traffic_;
    bool capture_uplink_ = false;
    std::vector<comms::Bytes> captured_uplink_;
    Vec3 station_position_ = Vec3::Zero();
    std::uint64_t ticks_ = 0;
    std::uint64_t perception_passes_ = 0;
};

} // namespace mochi::sim
