// JSON shapes of the operator channel: world snapshots, commands, replies
#pragma once

#include <mochi/sim/world.hpp>

#include <nlohmann/json.hpp>

#include <string>

namespace mochi::service {

using nlohmann::json;

inline json vec_json(const Vec3 &v) { return json::array({v.x(), v.y(), v.z()}); }

inline json detection_json(const sim::Blimp &b) {
    const autonomy::Observation obs = b.observation();
    return {{"c", {obs.center.x(), obs.center.y()}},
            {"n", obs.size},
            {"valid", obs.valid},
            {"kind", obs.kind == control::TargetKind::Balloon ? "balloon" : "goal"}};
}

inline std::string activation_string(const perception::CellMask &m) {
    std::string s(m.size(), '0');
    for (std::size_t i = 0; i < m.size(); ++i) {
        s[i] = m[i] ? '1' : '0';
    }
    return s;
}

inline json snapshot_json(const sim::World &world) {
    json blimps = json::array();
    for (const sim::Blimp &b : world.blimps()) {
        blimps.push_back({{"id", b.id},
                          {"r", vec_json(b.state.position)},
                          {"euler", vec_json(b.state.euler)},
                          {"mode", std::string(autonomy::to_string(b.autonomy.mode))},
                          {"carrying", b.autonomy.carrying},
                          {"last_detection", detection_json(b)},
                          {"activation", activation_string(b.activation)}});
    }
    json balloons = json::array();
    for (const sim::Balloon &b : world.balloons()) {
        json j = {{"id", b.id}, {"r", vec_json(b.position)}, {"state", sim::to_string(b.state)}};
        if (b.carrier >= 0) {
            j["carrier"] = b.carrier;
        }
        balloons.push_back(j);
    }
    json hoops = json::array();
    for (std::size_t i = 0; i < world.hoops().size(); ++i) {
        const sim::HoopSpec &h = world.hoops()[i];
        hoops.push_back({{"id", i},
                         {"shape", perception::to_string(h.shape)},
                         {"r", vec_json(h.center)},
                         {"yaw", h.yaw},
                         {"aperture", h.aperture}});
    }
    return {{"t", world.time()}, {"blimps", blimps}, {"balloons", balloons}, {"hoops", hoops}};
}

inline json error_reply(const std::string &message) { return {{"error", message}}; }

/// Turns one UI command into a ground-station request. Returns the reply for the client.
inline json apply_command(sim::World &world, const std::string &text) {
    json cmd;
    try {
        cmd = json::parse(text);
    } catch (const json::parse_error &e) {
        return error_reply(std::string("malformed JSON: ") + e.what());
    }
    if (!cmd.is_object() || cmd.size() != 1) {
        return error_reply("command must be an object with exactly one of set_mode, manual, "
                           "param_set, telemetry_req");
    }
    const std::string name = cmd.begin().key();
    const json &body = cmd.begin().value();
    if (!body.is_object() || !body.contains("id") || !body["id"].is_number_unsigned()) {
        return error_reply(name + ": missing or invalid id");
    }
    const auto id64 = body["id"].get<std::uint64_t>();
    if (id64 != comms::kBroadcast && id64 >= world.blimps().size()) {
        return error_reply(name + ": no blimp with id " + std::to_string(id64));
    }
    const auto id = static_cast<std::uint16_t>(id64);
    const auto number = [&body](const char *key, double fallback) -> std::optional<double> {
        if (!body.contains(key)) {
            return fallback;
        }
        if (!body[key].is_number()) {
            return std::nullopt;
        }
        return body[key].get<double>();
    };
    comms::GroundStation &gs = world.station();
    std::uint32_t seq = 0;
    if (name == "set_mode") {
        if (!body.contains("mode") || !body["mode"].is_string()) {
            return error_reply("set_mode: missing mode");
        }
        const auto mode = autonomy::parse_mode(body["mode"].get<std::string>());
        if (!mode) {
            return error_reply("set_mode: unknown mode");
        }
        seq = gs.set_mode(id, *mode);
    } else if (name == "manual") {
        const auto f = number("forward", 0.0);
        const auto y = number("yaw_rate", 0.0);
        const auto c = number("climb", 0.0);
        if (!f || !y || !c) {
            return error_reply("manual: forward, yaw_rate and climb must be numbers");
        }
        seq = gs.manual(id, comms::ManualCmd{static_cast<float>(*f), static_cast<float>(*y),
                                             static_cast<float>(*c)});
    } else if (name == "param_set") {
        if (!body.contains("key") || !body["key"].is_string()) {
            return error_reply("param_set: missing key");
        }
        const auto v = number("value", std::numeric_limits<double>::quiet_NaN());
        if (!v || !std::isfinite(*v)) {
            return error_reply("param_set: value must be a finite number");
        }
        const std::string key = body["key"].get<std::string>();
        if (!comms::valid_key(key)) {
            return error_reply("param_set: key must be 1-16 printable ASCII characters");
        }
        seq = gs.param_set(id, key, static_cast<float>(*v));
    } else if (name == "telemetry_req") {
        seq = gs.telemetry_request(id);
    } else {
        return error_reply("unknown command '" + name + "'");
    }
    return {{"ok", name}, {"id", id}, {"seq", seq}};
}

inline const char *to_string(comms::AckStatus s) {
    switch (s) {
    case comms::AckStatus::Ok: return "ok";
    case comms::AckStatus::StorageFailure: return "storage_failure";
    case comms::AckStatus::UnknownKey: return "unknown_key";
    case comms::AckStatus::BadKey: return "bad_key";
    case comms::AckStatus::OutOfRange: return "out_of_range";
    }
    return "?";
}

/// Ground-station events as client messages.
inline json event_json(const comms::StationEvent &e) {
    switch (e.kind) {
    case comms::StationEventKind::ParamAcked:
        return {{"event", "param_ack"},
                {"id", e.robot_id},
                {"seq", e.seq},
                {"key", e.ack->key},
                {"value", e.ack->value},
                {"status", to_string(e.ack->status)}};
    case comms::StationEventKind::ParamTimedOut:
        return {{"event", "param_timeout"}, {"id", e.robot_id}, {"seq", e.seq}};
    case comms::StationEventKind::Telemetry: {
        const comms::TelemetryResp &t = *e.telemetry;
        return {{"event", "telemetry"},
                {"id", e.robot_id},
                {"seq", e.seq},
                {"h", t.h},
                {"psi", t.psi},
                {"phi", t.phi},
                {"theta", t.theta},
                {"battery", t.battery},
                {"mode", std::string(autonomy::to_string(t.mode))},
                {"last_detection", {{"c", {t.det_x, t.det_y}}, {"n", t.det_n}, {"valid", t.det_valid}}}};
    }
    }
    return {};
}

} // namespace mochi::service
