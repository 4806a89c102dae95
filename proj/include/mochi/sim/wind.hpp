// Gusty wind from AC outlets: one OU-driven jet per unit with 1/(1+r^2) falloff
#pragma once

#include <mochi/sim/config.hpp>

#include <random>
#include <stdexcept>
#include <vector>

namespace mochi::sim {

class WindField {
  public:
    WindField(std::vector<AcUnit> units, WindParams params, std::uint64_t seed, double dt = 0.005)
        : units_(std::move(units)), params_(params), dt_(dt), rng_(seed),
          strength_(units_.size(), 0.0) {
        for (AcUnit &u : units_) {
            const double n = u.direction.norm();
            u.direction = n > 0.0 ? Vec3(u.direction / n) : Vec3::UnitX();
        }
    }

    /// Advances every gust state by one fixed step.
    void advance() {
        std::normal_distribution<double> normal(0.0, 1.0);
        const double sq = std::sqrt(dt_);
        for (double &s : strength_) {
            s += params_.reversion * (params_.mean - s) * dt_ + params_.sigma * sq * normal(rng_);
        }
        ++steps_;
        time_ = steps_ * dt_;
    }

    /// Steps forward until the field reaches time `t` (monotone only).
    void advance_to(double t) {
        if (t + 1e-12 < time_) {
            throw std::invalid_argument("WindField: time must be monotone");
        }
        while (time_ + 0.5 * dt_ <= t) {
            advance();
        }
    }

    /// Field at `pos` for the current gust states, clamped to the cap.
    Vec3 at(const Vec3 &pos) const {
        Vec3 w = Vec3::Zero();
        for (std::size_t i = 0; i < units_.size(); ++i) {
            const double r2 = (pos - units_[i].position).squaredNorm();
            w += units_[i].direction * (strength_[i] / (1.0 + r2));
        }
        const double n = w.norm();
        if (n > params_.cap) {
            w *= params_.cap / n;
        }
        return w;
    }

    Vec3 wind_at(const Vec3 &pos, double t) {
        advance_to(t);
        return at(pos);
    }

    double time() const { return time_; }
    const std::vector<double> &strengths() const { return strength_; }

  private:
    std::vector<AcUnit> units_;
    WindParams params_;
    double dt_;
    std::mt19937_64 rng_;
    std::vector<double> strength_;
    std::uint64_t steps_ = 0;
    double time_ = 0.0;
};

} // namespace mochi::sim
