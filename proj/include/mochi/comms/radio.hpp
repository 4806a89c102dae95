// Simulated lossy peer-to-peer link between the ground station and the blimps.
#pragma once

#include <mochi/comms/protocol.hpp>

#include <algorithm>
#include <deque>
#include <random>
#include <variant>

namespace mochi::comms {

/// Distance-dependent loss, fixed latency, shared bandwidth.
struct RadioModel {
    double loss_onset = 100.0;        ///< [m] below this nothing is lost
    double range = 480.0;             ///< [m] at and beyond this everything is lost
    double latency = 0.005;           ///< [s]
    double bandwidth_bps = 512000.0;  ///< aggregate [bit/s]

    double loss_probability(double distance) const {
        if (distance <= loss_onset) {
            return 0.0;
        }
        if (distance >= range) {
            return 1.0;
        }
        return (distance - loss_onset) / (range - loss_onset);
    }
};

struct Delivered {
    double arrival = 0.0;
};
struct Dropped {};
using DeliveryOutcome = std::variant<Delivered, Dropped>;

/// One Bernoulli draw per message; arrival is `latency` after `now`.
template <typename Rng>
DeliveryOutcome deliver(const RadioModel &radio, double distance, double now, Rng &rng) {
    if (distance < 0.0) {
        throw std::invalid_argument("deliver: negative distance");
    }
    std::uniform_real_distribution<double> u(0.0, 1.0);
    if (u(rng) < radio.loss_probability(distance)) {
        return Dropped{};
    }
    return Delivered{now + radio.latency};
}

enum class Direction { Uplink, Downlink }; ///< Uplink: station -> blimp

struct InFlight {
    double arrival = 0.0;
    Direction direction = Direction::Uplink;
    std::uint16_t robot_id = 0;
    Bytes frame;
};

/// FIFO channel: frames serialize onto the shared medium and arrive `latency` after they
/// leave it, so delivery order equals send order. Delivery is at most once.
class RadioChannel {
  public:
    explicit RadioChannel(RadioModel model = {}, std::uint64_t seed = 0)
        : model_(model), rng_(seed) {}

    /// Queues a frame; returns false if the link dropped it.
    bool send(Direction dir, std::uint16_t robot_id, Bytes frame, double distance, double now) {
        ++sent_;
        const double departure = std::max(now, medium_free_);
        medium_free_ = departure + 8.0 * static_cast<double>(frame.size()) / model_.bandwidth_bps;
        const DeliveryOutcome outcome = deliver(model_, distance, departure, rng_);
        if (std::holds_alternative<Dropped>(outcome)) {
            ++dropped_;
            return false;
        }
        queue_.push_back({std::get<Delivered>(outcome).arrival, dir, robot_id, std::move(frame)});
        return true;
    }

    /// Pops every frame that has arrived by `now`, in send order.
    template <typename Fn> void drain(double now, Fn &&on_arrival) {
        while (!queue_.empty() && queue_.front().arrival <= now) {
            InFlight item = std::move(queue_.front());
            queue_.pop_front();
            on_arrival(item);
        }
    }

    const RadioModel &model() const { return model_; }
    void set_model(const RadioModel &m) { model_ = m; }
    std::size_t sent() const { return sent_; }
    std::size_t dropped() const { return dropped_; }
    std::size_t in_flight() const { return queue_.size(); }

  private:
    RadioModel model_;
    std::mt19937_64 rng_;
    std::deque<InFlight> queue_;
    double medium_free_ = 0.0;
    std::size_t sent_ = 0;
    std::size_t dropped_ = 0;
};

} // namespace mochi::comms
