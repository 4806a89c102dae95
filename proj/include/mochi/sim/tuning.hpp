// Named parameters reachable over the radio. Keys follow "<module>.<name>".
#pragma once

#include <mochi/comms/param_store.hpp>
#include <mochi/sim/config.hpp>

#include <array>
#include <functional>
#include <optional>
#include <string_view>

namespace mochi::sim {

struct TuningKey {
    std::string_view key;
    double (*get)(const BlimpTuning &);
    void (*set)(BlimpTuning &, double);
    double lo;
    double hi;
};

#define MOCHI_KEY(name, field, lo, hi)                                                      \
    TuningKey {                                                                             \
        name, [](const BlimpTuning &t) -> double { return static_cast<double>(t.field); },   \
            [](BlimpTuning &t, double v) { t.field = static_cast<decltype(t.field)>(v); }, lo, hi \
    }

inline const std::array<TuningKey, 28> &tuning_keys() {
    static const std::array<TuningKey, 28> keys = {
        MOCHI_KEY("ctl.k", gains.k, 0.0, 100.0),
        MOCHI_KEY("ctl.kd", gains.k_d, 0.0, 100.0),
        MOCHI_KEY("ctl.kR", gains.k_R, 0.0, 100.0),
        MOCHI_KEY("ctl.kRd", gains.k_Rd, 0.0, 100.0),
        MOCHI_KEY("ctl.Kpsi", gains.pixel_to_yaw, 0.0, 1.0),
        MOCHI_KEY("ctl.Kh", gains.pixel_to_height, 0.0, 1.0),
        MOCHI_KEY("ctl.man_fwd", manual.forward, 0.0, 1.0),
        MOCHI_KEY("ctl.man_yaw", manual.yaw, 0.0, 10.0),
        MOCHI_KEY("ctl.man_climb", manual.climb, 0.0, 5.0),
        MOCHI_KEY("perc.p_hit", perception.filter.p_hit, 0.5, 0.999),
        MOCHI_KEY("perc.p_miss", perception.filter.p_miss, 0.001, 0.5),
        MOCHI_KEY("perc.p_act", perception.filter.p_act, 0.5, 0.999),
        MOCHI_KEY("perc.l_max", perception.filter.l_max, 0.1, 50.0),
        MOCHI_KEY("perc.d_ball", perception.balloon_threshold, 0.0, 100.0),
        MOCHI_KEY("perc.d_goal", perception.goal_threshold, 0.0, 100.0),
        MOCHI_KEY("perc.ir_thresh", perception.ir_threshold, 0.0, 441.0),
        MOCHI_KEY("perc.min_blob", perception.goal.min_blob_pixels, 1.0, 76800.0),
        MOCHI_KEY("auto.n_persist", autonomy.persist_frames, 1.0, 100.0),
        MOCHI_KEY("auto.loss_t", autonomy.loss_timeout, 0.1, 60.0),
        MOCHI_KEY("auto.charge_t", autonomy.charge_timeout, 0.1, 60.0),
        MOCHI_KEY("auto.walk_min", autonomy.walk_min, 0.1, 60.0),
        MOCHI_KEY("auto.walk_max", autonomy.walk_max, 0.1, 60.0),
        MOCHI_KEY("auto.n_charge_b", autonomy.balloon_charge_cells, 1.0, 300.0),
        MOCHI_KEY("auto.n_charge_g", autonomy.goal_charge_pixels, 1.0, 76800.0),
        MOCHI_KEY("auto.charge", autonomy.charge, 0.0, 1.0),
        MOCHI_KEY("auto.cruise", autonomy.cruise, 0.0, 1.0),
        MOCHI_KEY("auto.alt_ball", autonomy.balloon_altitude, 0.5, 20.0),
        MOCHI_KEY("auto.alt_goal", autonomy.goal_altitude, 0.5, 20.0),
    };
    return keys;
}

#undef MOCHI_KEY

inline const TuningKey *find_tuning_key(std::string_view key) {
    for (const TuningKey &k : tuning_keys()) {
        if (k.key == key) {
            return &k;
        }
    }
    return nullptr;
}

inline std::optional<double> get_tuning(const BlimpTuning &t, std::string_view key) {
    const TuningKey *k = find_tuning_key(key);
    return k ? std::optional<double>(k->get(t)) : std::nullopt;
}

/// Applies a value; false for an unknown key or an out-of-range value.
inline bool set_tuning(BlimpTuning &t, std::string_view key, double value) {
    const TuningKey *k = find_tuning_key(key);
    if (!k || !(value >= k->lo && value <= k->hi)) {
        return false;
    }
    k->set(t, value);
    return true;
}

/// Overlays every stored key the registry knows; unknown stored keys are left alone.
inline void apply_store(BlimpTuning &t, const comms::ParamStore &store) {
    for (const auto &[key, value] : store.values()) {
        set_tuning(t, key, value);
    }
}

} // namespace mochi::sim
