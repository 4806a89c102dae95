// SimConfig from JSON. Every object is closed: unknown keys are errors.
#pragma once

#include <mochi/core/error.hpp>
#include <mochi/io/family_json.hpp>
#include <mochi/sim/config.hpp>

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <set>
#include <string>

namespace mochi::io {

using nlohmann::json;

namespace detail {

/// Reads fields from one JSON object and remembers which keys were consumed.
class Reader {
  public:
    Reader(const json &j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) {
            fail("expected an object");
        }
    }

    [[noreturn]] void fail(const std::string &why) const {
        throw ConfigError((path_.empty() ? std::string("config") : path_) + ": " + why);
    }

    std::string child(const std::string &key) const { return path_.empty() ? key : path_ + "." + key; }

    const json *find(const std::string &key) {
        seen_.insert(key);
        const auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    void number(const std::string &key, double &out, double lo = -1e300, double hi = 1e300,
                bool open_lo = false) {
        const json *v = find(key);
        if (!v) {
            return;
        }
        if (!v->is_number()) {
            Reader(*v, child(key)).fail_scalar("expected a number");
        }
        const double d = v->get<double>();
        if (!(d >= lo && d <= hi) || (open_lo && d == lo)) {
            fail(key + " out of range");
        }
        out = d;
    }

    void positive(const std::string &key, double &out) { number(key, out, 0.0, 1e300, true); }

    void integer(const std::string &key, int &out, int lo, int hi) {
        const json *v = find(key);
        if (!v) {
            return;
        }
        if (!v->is_number_integer()) {
            fail(key + ": expected an integer");
        }
        const auto i = v->get<long long>();
        if (i < lo || i > hi) {
            fail(key + " out of range");
        }
        out = static_cast<int>(i);
    }

    void vec3(const std::string &key, Vec3 &out) {
        const json *v = find(key);
        if (!v) {
            return;
        }
        if (!v->is_array() || v->size() != 3 || !(*v)[0].is_number() || !(*v)[1].is_number() ||
            !(*v)[2].is_number()) {
            fail(key + ": expected [x, y, z]");
        }
        out = Vec3((*v)[0].get<double>(), (*v)[1].get<double>(), (*v)[2].get<double>());
    }

    void vec2(const std::string &key, Vec2 &out) {
        const json *v = find(key);
        if (!v) {
            return;
        }
        if (!v->is_array() || v->size() != 2 || !(*v)[0].is_number() || !(*v)[1].is_number()) {
            fail(key + ": expected [x, y]");
        }
        out = Vec2((*v)[0].get<double>(), (*v)[1].get<double>());
    }

    void rgb(const std::string &key, perception::Rgb &out) {
        const json *v = find(key);
        if (!v) {
            return;
        }
        if (!v->is_array() || v->size() != 3) {
            fail(key + ": expected [r, g, b]");
        }
        std::uint8_t c[3];
        for (int i = 0; i < 3; ++i) {
            if (!(*v)[i].is_number_integer() || (*v)[i].get<int>() < 0 || (*v)[i].get<int>() > 255) {
                fail(key + ": channels must be integers in [0, 255]");
            }
            c[i] = static_cast<std::uint8_t>((*v)[i].get<int>());
        }
        out = {c[0], c[1], c[2]};
    }

    void string(const std::string &key, std::string &out) {
        const json *v = find(key);
        if (!v) {
            return;
        }
        if (!v->is_string()) {
            fail(key + ": expected a string");
        }
        out = v->get<std::string>();
    }

    /// Throws on any key that no accessor asked for.
    void done() const {
        for (const auto &[key, _] : j_.items()) {
            if (!seen_.count(key)) {
                fail("unknown key '" + key + "'");
            }
        }
    }

  private:
    [[noreturn]] void fail_scalar(const std::string &why) const { fail(why); }

    const json &j_;
    std::string path_;
    std::set<std::string> seen_;
};

inline void read_blimp(const json &j, const std::string &path, dynamics::BlimpParams &p) {
    Reader r(j, path);
    r.positive("mass", p.mass);
    r.vec3("inertia", p.inertia);
    r.vec3("drag_linear", p.drag_linear);
    r.vec3("drag_angular", p.drag_angular);
    r.positive("gravity", p.gravity);
    r.number("buoyancy", p.buoyancy, 0.0);
    r.positive("arm_half_span", p.arm_half_span);
    r.number("arm_offset_z", p.arm_offset_z);
    r.positive("max_thrust", p.max_thrust);
    double lo = rad2deg(p.servo_min), hi = rad2deg(p.servo_max);
    r.number("servo_min_deg", lo, -90.0, 90.0);
    r.number("servo_max_deg", hi, -90.0, 90.0);
    p.servo_min = deg2rad(lo);
    p.servo_max = deg2rad(hi);
    bool neutral = false;
    if (const json *v = r.find("neutral_buoyancy")) {
        if (!v->is_boolean()) {
            r.fail("neutral_buoyancy: expected a boolean");
        }
        neutral = v->get<bool>();
    }
    r.done();
    if (neutral) {
        p.trim_neutral();
    }
    try {
        p.validate();
    } catch (const std::invalid_argument &e) {
        r.fail(e.what());
    }
}

inline sim::Shape parse_shape(const Reader &r, const std::string &s) {
    if (s == "triangle") return sim::Shape::Triangle;
    if (s == "rectangle") return sim::Shape::Rectangle;
    if (s == "circle") return sim::Shape::Circle;
    r.fail("shape must be triangle, rectangle or circle");
}

inline perception::ColorFamily read_family(const json &j, const std::string &path,
                                           const std::filesystem::path &base) {
    if (j.is_string()) {
        std::filesystem::path p = j.get<std::string>();
        if (p.is_relative()) {
            p = base / p;
        }
        return load_family(p);
    }
    try {
        return family_from_json(j);
    } catch (const ConfigError &e) {
        throw ConfigError(path + ": " + e.what());
    }
}

inline void read_world(const json &j, sim::WorldConfig &w) {
    Reader r(j, "world");
    r.vec3("arena", w.arena);
    if (const json *v = r.find("ac_units")) {
        if (!v->is_array()) {
            r.fail("ac_units: expected an array");
        }
        w.ac_units.clear();
        for (std::size_t i = 0; i < v->size(); ++i) {
            Reader u((*v)[i], "world.ac_units[" + std::to_string(i) + "]");
            sim::AcUnit unit;
            u.vec3("position", unit.position);
            u.vec3("direction", unit.direction);
            u.done();
            if (unit.direction.norm() == 0.0) {
                u.fail("direction must be nonzero");
            }
            w.ac_units.push_back(unit);
        }
    }
    if (const json *v = r.find("wind")) {
        Reader u(*v, "world.wind");
        u.number("reversion", w.wind.reversion, 0.0);
        u.number("mean", w.wind.mean);
        u.number("sigma", w.wind.sigma, 0.0);
        u.number("cap", w.wind.cap, 0.0, 1.0);
        u.done();
    }
    r.vec2("balloon_region", w.balloon_region);
    r.vec2("blimp_region", w.blimp_region);
    if (const json *v = r.find("balloon")) {
        Reader u(*v, "world.balloon");
        u.positive("radius", w.balloon.radius);
        u.positive("float_height", w.balloon.float_height);
        u.rgb("color", w.balloon.color);
        u.number("drift_gain", w.balloon.drift_gain, 0.0, 1.0);
        u.positive("drift_time", w.balloon.drift_time);
        u.done();
    }
    if (const json *v = r.find("hoops")) {
        if (!v->is_array()) {
            r.fail("hoops: expected an array");
        }
        w.hoops.clear();
        for (std::size_t i = 0; i < v->size(); ++i) {
            Reader u((*v)[i], "world.hoops[" + std::to_string(i) + "]");
            sim::HoopSpec h;
            std::string shape = "circle";
            u.string("shape", shape);
            h.shape = parse_shape(u, shape);
            u.vec3("center", h.center);
            double yaw = rad2deg(h.yaw);
            u.number("yaw_deg", yaw, -360.0, 360.0);
            h.yaw = deg2rad(yaw);
            u.positive("aperture", h.aperture);
            u.positive("tube", h.tube);
            u.done();
            w.hoops.push_back(h);
        }
    }
    if (const json *v = r.find("capture")) {
        Reader u(*v, "world.capture");
        u.positive("radius", w.capture.radius);
        u.positive("height", w.capture.height);
        u.number("drop", w.capture.drop, 0.0);
        u.number("min_speed", w.capture.min_speed, 0.0);
        u.number("delivery_margin", w.capture.delivery_margin, 0.0);
        u.done();
    }
    if (const json *v = r.find("camera")) {
        Reader u(*v, "world.camera");
        double fov = rad2deg(w.camera.hfov);
        u.number("hfov_deg", fov, 1.0, 170.0);
        w.camera.hfov = deg2rad(fov);
        u.vec3("mount", w.camera.mount);
        u.done();
    }
    if (const json *v = r.find("look")) {
        Reader u(*v, "world.look");
        u.rgb("floor", w.look.floor);
        u.rgb("ceiling", w.look.ceiling);
        u.rgb("goal", w.look.goal);
        u.number("noise_sigma", w.look.noise_sigma, 0.0, 64.0);
        u.number("jitter", w.look.jitter, 0.0, 0.9);
        u.number("ir_dim", w.look.ir_dim, 0.0, 1.0);
        u.done();
    }
    r.number("redeploy_delay", w.redeploy_delay, 0.0);
    r.positive("spawn_height", w.spawn_height);
    r.number("wall_margin", w.wall_margin, 0.0);
    r.number("wall_stiffness", w.wall_stiffness, 0.0);
    if (const json *v = r.find("seed")) {
        if (!v->is_number_unsigned()) {
            r.fail("seed: expected an unsigned integer");
        }
        w.seed = v->get<std::uint64_t>();
    }
    r.done();

    if ((w.arena.array() <= 0.0).any()) {
        r.fail("arena dimensions must be positive");
    }
    for (const Vec2 *region : {&w.balloon_region, &w.blimp_region}) {
        if ((region->array() < 0.0).any() || region->x() > w.arena.x() || region->y() > w.arena.y()) {
            r.fail("spawn regions must lie inside the arena");
        }
    }
    for (const sim::HoopSpec &h : w.hoops) {
        if ((h.center.array() < 0.0).any() || (h.center.array() > w.arena.array()).any()) {
            r.fail("hoop centers must lie inside the arena");
        }
    }
    if (w.spawn_height >= w.arena.z()) {
        r.fail("spawn_height must be below the ceiling");
    }
}

} // namespace detail

/// Parses a config document. `base` resolves relative family paths.
inline sim::SimConfig config_from_json(const json &doc, const std::filesystem::path &base = {}) {
    using detail::Reader;
    sim::SimConfig cfg;
    Reader r(doc, "");
    if (const json *v = r.find("world")) {
        detail::read_world(*v, cfg.world);
    }
    if (const json *v = r.find("blimp")) {
        detail::read_blimp(*v, "blimp", cfg.blimp);
    }
    if (const json *v = r.find("blimp_overrides")) {
        if (!v->is_object()) {
            r.fail("blimp_overrides: expected an object keyed by robot id");
        }
        for (const auto &[key, value] : v->items()) {
            int id = -1;
            try {
                std::size_t used = 0;
                id = std::stoi(key, &used);
                if (used != key.size() || id < 0 || id > 0xFFFE) {
                    id = -1;
                }
            } catch (const std::exception &) {
                id = -1;
            }
            if (id < 0) {
                r.fail("blimp_overrides: key '" + key + "' is not a robot id");
            }
            dynamics::BlimpParams p = cfg.blimp;
            detail::read_blimp(value, "blimp_overrides." + key, p);
            cfg.blimp_overrides[id] = p;
        }
    }
    if (const json *v = r.find("gains")) {
        Reader u(*v, "gains");
        auto &g = cfg.tuning.gains;
        u.number("k", g.k, 0.0);
        u.number("k_d", g.k_d, 0.0);
        u.number("k_R", g.k_R, 0.0);
        u.number("k_Rd", g.k_Rd, 0.0);
        u.number("pixel_to_yaw", g.pixel_to_yaw, 0.0);
        u.number("pixel_to_height", g.pixel_to_height, 0.0);
        u.done();
    }
    if (const json *v = r.find("manual_limits")) {
        Reader u(*v, "manual_limits");
        auto &m = cfg.tuning.manual;
        u.number("forward", m.forward, 0.0);
        u.number("yaw", m.yaw, 0.0);
        u.number("climb", m.climb, 0.0);
        u.done();
    }
    if (const json *v = r.find("perception")) {
        Reader u(*v, "perception");
        auto &p = cfg.tuning.perception;
        u.number("p_hit", p.filter.p_hit, 0.0, 1.0, true);
        u.number("p_miss", p.filter.p_miss, 0.0, 1.0, true);
        u.number("p_act", p.filter.p_act, 0.0, 1.0, true);
        u.number("l_min", p.filter.l_min);
        u.number("l_max", p.filter.l_max);
        u.number("balloon_threshold", p.balloon_threshold, 0.0);
        u.number("goal_threshold", p.goal_threshold, 0.0);
        u.integer("ir_threshold", p.ir_threshold, 0, 442);
        u.integer("min_blob_pixels", p.goal.min_blob_pixels, 1, 1 << 24);
        u.number("approx_tolerance", p.goal.approx_tolerance, 0.0, 1.0, true);
        u.integer("max_candidates", p.goal.max_candidates, 1, 1000);
        std::string path = p.goal_path == sim::GoalPath::Color ? "color" : "infrared";
        u.string("goal_path", path);
        if (path == "color") {
            p.goal_path = sim::GoalPath::Color;
        } else if (path == "infrared") {
            p.goal_path = sim::GoalPath::Infrared;
        } else {
            u.fail("goal_path must be color or infrared");
        }
        if (const json *f = u.find("balloon_family")) {
            cfg.balloon_family = detail::read_family(*f, "perception.balloon_family", base);
        }
        if (const json *f = u.find("goal_family")) {
            cfg.goal_family = detail::read_family(*f, "perception.goal_family", base);
        }
        u.done();
        if (!(p.filter.p_miss < p.filter.p_hit) || !(p.filter.l_min < p.filter.l_max)) {
            u.fail("need p_miss < p_hit and l_min < l_max");
        }
    }
    if (const json *v = r.find("autonomy")) {
        Reader u(*v, "autonomy");
        auto &a = cfg.tuning.autonomy;
        u.integer("persist_frames", a.persist_frames, 1, 1000);
        u.positive("loss_timeout", a.loss_timeout);
        u.positive("charge_timeout", a.charge_timeout);
        u.positive("walk_min", a.walk_min);
        u.positive("walk_max", a.walk_max);
        u.positive("balloon_charge_cells", a.balloon_charge_cells);
        u.positive("goal_charge_pixels", a.goal_charge_pixels);
        u.number("charge", a.charge, 0.0, 1.0);
        u.number("cruise", a.cruise, 0.0, 1.0);
        u.positive("balloon_altitude", a.balloon_altitude);
        u.positive("goal_altitude", a.goal_altitude);
        u.done();
        if (a.walk_min > a.walk_max) {
            u.fail("walk_min must not exceed walk_max");
        }
    }
    if (const json *v = r.find("radio")) {
        Reader u(*v, "radio");
        auto &m = cfg.radio;
        u.number("loss_onset", m.loss_onset, 0.0);
        u.positive("range", m.range);
        u.number("latency", m.latency, 0.0);
        u.positive("bandwidth_bps", m.bandwidth_bps);
        u.done();
        if (!(m.loss_onset < m.range)) {
            u.fail("loss_onset must be below range");
        }
    }
    if (const json *v = r.find("experiment")) {
        Reader u(*v, "experiment");
        auto &e = cfg.experiment;
        u.positive("duration", e.duration);
        const auto int_list = [&u](const char *key, std::vector<int> &out, int lo, int hi) {
            if (const json *l = u.find(key)) {
                if (!l->is_array() || l->empty()) {
                    u.fail(std::string(key) + ": expected a non-empty array");
                }
                out.clear();
                for (const json &x : *l) {
                    if (!x.is_number_integer() || x.get<int>() < lo || x.get<int>() > hi) {
                        u.fail(std::string(key) + ": entries must be integers in range");
                    }
                    out.push_back(x.get<int>());
                }
            }
        };
        int_list("pickup_blimps", e.pickup_blimps, 1, 4);
        int_list("pickup_balloons", e.pickup_balloons, 0, 8);
        if (const json *l = u.find("delivery")) {
            if (!l->is_array()) {
                u.fail("delivery: expected an array");
            }
            e.delivery.clear();
            for (std::size_t i = 0; i < l->size(); ++i) {
                Reader c((*l)[i], "experiment.delivery[" + std::to_string(i) + "]");
                sim::ExperimentGrid::Cell cell;
                c.integer("n_blimps", cell.n_blimps, 1, 8);
                c.integer("n_balloons", cell.n_balloons, 0, 12);
                c.done();
                e.delivery.push_back(cell);
            }
        }
        u.done();
    }
    r.string("state_dir", cfg.state_dir);
    r.done();
    if (!cfg.state_dir.empty() && std::filesystem::path(cfg.state_dir).is_relative() && !base.empty()) {
        cfg.state_dir = (base / cfg.state_dir).string();
    }
    return cfg;
}

inline sim::SimConfig load_config(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config " + path.string());
    }
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error &e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    return config_from_json(doc, path.parent_path());
}

} // namespace mochi::io
