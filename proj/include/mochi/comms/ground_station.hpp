// Central device: numbers requests, retries ParamSet until acked, collects replies.
#pragma once

#include <mochi/comms/protocol.hpp>

#include <map>
#include <optional>
#include <vector>

namespace mochi::comms {

struct StationOptions {
    int max_tries = 5;
    double retry_interval = 0.1; ///< [s]
};

struct OutgoingFrame {
    std::uint16_t robot_id = 0;
    std::uint32_t seq = 0;
    Bytes frame;
};

enum class StationEventKind { ParamAcked, ParamTimedOut, Telemetry };

struct StationEvent {
    StationEventKind kind = StationEventKind::ParamAcked;
    std::uint16_t robot_id = 0;
    std::uint32_t seq = 0;
    double time = 0.0;
    std::optional<ParamAck> ack;
    std::optional<TelemetryResp> telemetry;
};

class GroundStation {
  public:
    explicit GroundStation(StationOptions options = {}) : options_(options) {}

    /// Queues a request; the frame leaves on the next poll(). Returns its sequence number.
    std::uint32_t submit(std::uint16_t robot_id, Payload payload) {
        Message msg{robot_id, next_seq_++, std::move(payload)};
        Bytes frame = encode(msg);
        if (msg.kind() == Kind::ParamSet) {
            pending_[msg.seq] = Pending{msg.robot_id, frame, 0, -1.0};
        } else {
            outbox_.push_back({msg.robot_id, msg.seq, std::move(frame)});
        }
        return msg.seq;
    }

    std::uint32_t param_set(std::uint16_t robot_id, std::string key, float value) {
        return submit(robot_id, ParamSet{std::move(key), value});
    }
    std::uint32_t telemetry_request(std::uint16_t robot_id) { return submit(robot_id, TelemetryReq{}); }
    std::uint32_t set_mode(std::uint16_t robot_id, autonomy::Mode mode) {
        return submit(robot_id, ModeCmd{mode});
    }
    std::uint32_t manual(std::uint16_t robot_id, ManualCmd cmd) { return submit(robot_id, cmd); }

    /// Frames due for transmission at `now`, in submission order, plus ParamSet retries.
    std::vector<OutgoingFrame> poll(double now) {
        std::vector<OutgoingFrame> out;
        out.swap(outbox_);
        for (auto it = pending_.begin(); it != pending_.end();) {
            Pending &p = it->second;
            const bool due = p.tries == 0 || now + 1e-9 >= p.last_sent + options_.retry_interval;
            if (!due) {
                ++it;
                continue;
            }
            if (p.tries >= options_.max_tries) {
                events_.push_back({StationEventKind::ParamTimedOut, p.robot_id, it->first, now, {}, {}});
                it = pending_.erase(it);
                continue;
            }
            ++p.tries;
            p.last_sent = now;
            out.push_back({p.robot_id, it->first, p.frame});
            ++it;
        }
        sent_frames_ += out.size();
        return out;
    }

    /// Handles a downlink frame. Corrupt or unsolicited frames are ignored.
    void receive(std::span<const std::uint8_t> frame, double now) {
        const DecodeResult r = try_decode(frame);
        if (!r.ok()) {
            ++rejected_;
            return;
        }
        const Message &msg = r.message();
        if (const auto *ack = std::get_if<ParamAck>(&msg.payload)) {
            const auto it = pending_.find(msg.seq);
            if (it == pending_.end() || it->second.robot_id != msg.robot_id) {
                return;
            }
            pending_.erase(it);
            events_.push_back({StationEventKind::ParamAcked, msg.robot_id, msg.seq, now, *ack, {}});
        } else if (const auto *t = std::get_if<TelemetryResp>(&msg.payload)) {
            events_.push_back({StationEventKind::Telemetry, msg.robot_id, msg.seq, now, {}, *t});
        }
    }

    std::vector<StationEvent> take_events() {
        std::vector<StationEvent> out;
        out.swap(events_);
        return out;
    }

    bool pending(std::uint32_t seq) const { return pending_.count(seq) != 0; }
    std::size_t pending_count() const { return pending_.size(); }
    std::size_t frames_sent() const { return sent_frames_; }
    std::size_t frames_rejected() const { return rejected_; }
    const StationOptions &options() const { return options_; }

  private:
    struct Pending {
        std::uint16_t robot_id = 0;
        Bytes frame;
        int tries = 0;
        double last_sent = -1.0;
    };

    StationOptions options_;
    std::uint32_t next_seq_ = 1;
    std::vector<OutgoingFrame> outbox_;
    std::map<std::uint32_t, Pending> pending_;
    std::vector<StationEvent> events_;
    std::size_t sent_frames_ = 0;
    std::size_t rejected_ = 0;
};

} // namespace mochi::comms
