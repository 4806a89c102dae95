// Color family <-> JSON
#pragma once

#include <mochi/core/error.hpp>
#include <mochi/perception/color.hpp>

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>

namespace mochi::io {

inline nlohmann::json family_to_json(const perception::ColorFamily &f, std::size_t samples = 0) {
    nlohmann::json j;
    j["name"] = f.name;
    j["mu"] = {f.mu.x(), f.mu.y()};
    j["sigma"] = {{f.sigma(0, 0), f.sigma(0, 1)}, {f.sigma(1, 0), f.sigma(1, 1)}};
    if (samples > 0) {
        j["samples"] = samples;
    }
    return j;
}

inline perception::ColorFamily family_from_json(const nlohmann::json &j) {
    try {
        for (const auto &[key, _] : j.items()) {
            if (key != "name" && key != "mu" && key != "sigma" && key != "samples") {
                throw ConfigError("color family: unknown key '" + key + "'");
            }
        }
        perception::ColorFamily f;
        f.name = j.value("name", std::string{});
        const auto &mu = j.at("mu");
        const auto &s = j.at("sigma");
        if (mu.size() != 2 || s.size() != 2 || s[0].size() != 2 || s[1].size() != 2) {
            throw ConfigError("color family: mu must be [a, b] and sigma 2x2");
        }
        f.mu = Vec2(mu[0].get<double>(), mu[1].get<double>());
        f.sigma << s[0][0].get<double>(), s[0][1].get<double>(), s[1][0].get<double>(),
            s[1][1].get<double>();
        f.precision(); // rejects singular or asymmetric covariances
        return f;
    } catch (const nlohmann::json::exception &e) {
        throw ConfigError(std::string("color family: ") + e.what());
    } catch (const perception::SingularCovariance &e) {
        throw ConfigError(std::string("color family: ") + e.what());
    }
}

inline perception::ColorFamily load_family(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open color family " + path.string());
    }
    try {
        return family_from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::parse_error &e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

} // namespace mochi::io
