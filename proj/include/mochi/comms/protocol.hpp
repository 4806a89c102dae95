// Ground-station <-> blimp radio frames and their binary codec.
//
// Frame layout (little-endian):
//   0xB1 0x1D | version u8 | kind u8 | robot_id u16 | seq u32 | payload_len u8 | payload | crc32
// The CRC-32 (IEEE) covers every byte before it. Encoded frames never exceed 250 bytes.
#pragma once

#include <mochi/autonomy/state_machine.hpp>

#include <zlib.h>

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace mochi::comms {

inline constexpr std::uint8_t kMagic0 = 0xB1;
inline constexpr std::uint8_t kMagic1 = 0x1D;
inline constexpr std::uint8_t kProtocolVersion = 1;
inline constexpr std::size_t kHeaderSize = 11;
inline constexpr std::size_t kCrcSize = 4;
inline constexpr std::size_t kMaxFrameSize = 250;
inline constexpr std::size_t kMaxPayload = kMaxFrameSize - kHeaderSize - kCrcSize;
inline constexpr std::size_t kMaxKeyLength = 16;
inline constexpr std::uint16_t kBroadcast = 0xFFFF;

enum class Kind : std::uint8_t {
    ParamSet = 1,
    ParamAck = 2,
    TelemetryReq = 3,
    TelemetryResp = 4,
    ModeCmd = 5,
    ManualCmd = 6,
};

enum class AckStatus : std::uint8_t { Ok = 0, StorageFailure = 1, UnknownKey = 2, BadKey = 3, OutOfRange = 4 };

struct ParamSet {
    std::string key;
    float value = 0.0f;
    bool operator==(const ParamSet &) const = default;
};

struct ParamAck {
    std::string key;
    float value = 0.0f;
    AckStatus status = AckStatus::Ok;
    bool operator==(const ParamAck &) const = default;
};

struct TelemetryReq {
    bool operator==(const TelemetryReq &) const = default;
};

struct TelemetryResp {
    float h = 0.0f;
    float psi = 0.0f;
    float phi = 0.0f;
    float theta = 0.0f;
    float battery = 0.0f;
    autonomy::Mode mode = autonomy::Mode::RandomWalk;
    float det_x = 0.0f;
    float det_y = 0.0f;
    std::uint16_t det_n = 0;
    bool det_valid = false;
    bool operator==(const TelemetryResp &) const = default;
};

struct ModeCmd {
    autonomy::Mode mode = autonomy::Mode::RandomWalk;
    bool operator==(const ModeCmd &) const = default;
};

struct ManualCmd {
    float forward = 0.0f;
    float yaw_rate = 0.0f;
    float climb = 0.0f;
    bool operator==(const ManualCmd &) const = default;
};

/// Variant order matches Kind values 1..6.
using Payload = std::variant<ParamSet, ParamAck, TelemetryReq, TelemetryResp, ModeCmd, ManualCmd>;

struct Message {
    std::uint16_t robot_id = 0;
    std::uint32_t seq = 0;
    Payload payload;

    Kind kind() const { return static_cast<Kind>(payload.index() + 1); }
    bool operator==(const Message &) const = default;
};

class MalformedFrame : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class UnsupportedVersion : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

using Bytes = std::vector<std::uint8_t>;

inline std::uint32_t crc32_ieee(std::span<const std::uint8_t> data) {
    return static_cast<std::uint32_t>(
        ::crc32(0L, data.data(), static_cast<uInt>(data.size())));
}

namespace detail {

class Writer {
  public:
    explicit Writer(Bytes &out) : out_(out) {}
    void u8(std::uint8_t v) { out_.push_back(v); }
    void u16(std::uint16_t v) {
        u8(static_cast<std::uint8_t>(v));
        u8(static_cast<std::uint8_t>(v >> 8));
    }
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) {
            u8(static_cast<std::uint8_t>(v >> (8 * i)));
        }
    }
    void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
    void key(const std::string &k) {
        u8(static_cast<std::uint8_t>(k.size()));
        out_.insert(out_.end(), k.begin(), k.end());
    }

  private:
    Bytes &out_;
};

class Reader {
  public:
    explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}
    std::uint8_t u8() {
        need(1);
        return in_[pos_++];
    }
    std::uint16_t u16() {
        need(2);
        const std::uint16_t v = static_cast<std::uint16_t>(in_[pos_] | (in_[pos_ + 1] << 8));
        pos_ += 2;
        return v;
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) {
            v |= static_cast<std::uint32_t>(in_[pos_ + i]) << (8 * i);
        }
        pos_ += 4;
        return v;
    }
    float f32() { return std::bit_cast<float>(u32()); }
    std::string key() {
        const std::size_t n = u8();
        if (n == 0 || n > kMaxKeyLength) {
            throw MalformedFrame("parameter key length out of range");
        }
        need(n);
        std::string k(in_.begin() + static_cast<std::ptrdiff_t>(pos_),
                      in_.begin() + static_cast<std::ptrdiff_t>(pos_ + n));
        pos_ += n;
        for (char c : k) {
            if (c < 0x21 || c > 0x7E) {
                throw MalformedFrame("parameter key is not printable ASCII");
            }
        }
        return k;
    }
    bool done() const { return pos_ == in_.size(); }

  private:
    void need(std::size_t n) const {
        if (pos_ + n > in_.size()) {
            throw MalformedFrame("payload truncated");
        }
    }
    std::span<const std::uint8_t> in_;
    std::size_t pos_ = 0;
};

inline autonomy::Mode mode_from(std::uint8_t v) {
    if (v > 3) {
        throw MalformedFrame("mode out of range");
    }
    return static_cast<autonomy::Mode>(v);
}

inline bool flag_from(std::uint8_t v) {
    if (v > 1) {
        throw MalformedFrame("flag out of range");
    }
    return v == 1;
}

inline void write_payload(Writer &w, const Payload &p) {
    std::visit(
        [&](const auto &m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, ParamSet>) {
                w.key(m.key);
                w.f32(m.value);
            } else if constexpr (std::is_same_v<T, ParamAck>) {
                w.key(m.key);
                w.f32(m.value);
                w.u8(static_cast<std::uint8_t>(m.status));
            } else if constexpr (std::is_same_v<T, TelemetryResp>) {
                w.f32(m.h);
                w.f32(m.psi);
                w.f32(m.phi);
                w.f32(m.theta);
                w.f32(m.battery);
                w.u8(static_cast<std::uint8_t>(m.mode));
                w.f32(m.det_x);
                w.f32(m.det_y);
                w.u16(m.det_n);
                w.u8(m.det_valid ? 1 : 0);
            } else if constexpr (std::is_same_v<T, ModeCmd>) {
                w.u8(static_cast<std::uint8_t>(m.mode));
            } else if constexpr (std::is_same_v<T, ManualCmd>) {
                w.f32(m.forward);
                w.f32(m.yaw_rate);
                w.f32(m.climb);
            }
        },
        p);
}

inline Payload read_payload(Kind kind, Reader &r) {
    switch (kind) {
    case Kind::ParamSet: {
        ParamSet m;
        m.key = r.key();
        m.value = r.f32();
        return m;
    }
    case Kind::ParamAck: {
        ParamAck m;
        m.key = r.key();
        m.value = r.f32();
        const std::uint8_t status = r.u8();
        if (status > 4) {
            throw MalformedFrame("ack status out of range");
        }
        m.status = static_cast<AckStatus>(status);
        return m;
    }
    case Kind::TelemetryReq:
        return TelemetryReq{};
    case Kind::TelemetryResp: {
        TelemetryResp m;
        m.h = r.f32();
        m.psi = r.f32();
        m.phi = r.f32();
        m.theta = r.f32();
        m.battery = r.f32();
        m.mode = mode_from(r.u8());
        m.det_x = r.f32();
        m.det_y = r.f32();
        m.det_n = r.u16();
        m.det_valid = flag_from(r.u8());
        return m;
    }
    case Kind::ModeCmd:
        return ModeCmd{mode_from(r.u8())};
    case Kind::ManualCmd: {
        ManualCmd m;
        m.forward = r.f32();
        m.yaw_rate = r.f32();
        m.climb = r.f32();
        return m;
    }
    }
    throw MalformedFrame("unknown message kind");
}

} // namespace detail

inline bool valid_key(const std::string &key) {
    if (key.empty() || key.size() > kMaxKeyLength) {
        return false;
    }
    for (char c : key) {
        if (c < 0x21 || c > 0x7E) {
            return false;
        }
    }
    return true;
}

inline Bytes encode(const Message &msg) {
    Bytes payload;
    detail::Writer pw(payload);
    if (const auto *ps = std::get_if<ParamSet>(&msg.payload); ps && !valid_key(ps->key)) {
        throw std::invalid_argument("encode: invalid parameter key");
    }
    if (const auto *pa = std::get_if<ParamAck>(&msg.payload); pa && !valid_key(pa->key)) {
        throw std::invalid_argument("encode: invalid parameter key");
    }
    detail::write_payload(pw, msg.payload);

    Bytes out;
    out.reserve(kHeaderSize + payload.size() + kCrcSize);
    detail::Writer w(out);
    w.u8(kMagic0);
    w.u8(kMagic1);
    w.u8(kProtocolVersion);
    w.u8(static_cast<std::uint8_t>(msg.kind()));
    w.u16(msg.robot_id);
    w.u32(msg.seq);
    w.u8(static_cast<std::uint8_t>(payload.size()));
    out.insert(out.end(), payload.begin(), payload.end());
    w.u32(crc32_ieee(out));
    return out;
}

enum class DecodeError { Malformed, UnsupportedVersion };

struct DecodeResult {
    std::variant<Message, DecodeError> value;
    std::string reason;

    bool ok() const { return std::holds_alternative<Message>(value); }
    const Message &message() const { return std::get<Message>(value); }
};

/// Non-throwing decode. Integrity (size, magic, CRC) is checked before the version.
inline DecodeResult try_decode(std::span<const std::uint8_t> bytes) {
    const auto fail = [](DecodeError e, std::string why) { return DecodeResult{e, std::move(why)}; };
    if (bytes.size() < kHeaderSize + kCrcSize || bytes.size() > kMaxFrameSize) {
        return fail(DecodeError::Malformed, "frame size out of range");
    }
    if (bytes[0] != kMagic0 || bytes[1] != kMagic1) {
        return fail(DecodeError::Malformed, "bad magic");
    }
    const std::size_t payload_len = bytes[10];
    if (kHeaderSize + payload_len + kCrcSize != bytes.size()) {
        return fail(DecodeError::Malformed, "length mismatch");
    }
    const std::size_t body = bytes.size() - kCrcSize;
    detail::Reader crc_reader(bytes.subspan(body));
    if (crc_reader.u32() != crc32_ieee(bytes.first(body))) {
        return fail(DecodeError::Malformed, "crc mismatch");
    }
    if (bytes[2] != kProtocolVersion) {
        return fail(DecodeError::UnsupportedVersion, "unsupported version");
    }
    const std::uint8_t kind = bytes[3];
    if (kind < 1 || kind > 6) {
        return fail(DecodeError::Malformed, "unknown kind");
    }
    try {
        detail::Reader header(bytes.subspan(4, 6));
        Message msg;
        msg.robot_id = header.u16();
        msg.seq = header.u32();
        detail::Reader r(bytes.subspan(kHeaderSize, payload_len));
        msg.payload = detail::read_payload(static_cast<Kind>(kind), r);
        if (!r.done()) {
            return fail(DecodeError::Malformed, "trailing payload bytes");
        }
        return {std::move(msg), {}};
    } catch (const MalformedFrame &e) {
        return fail(DecodeError::Malformed, e.what());
    }
}

inline Message decode(std::span<const std::uint8_t> bytes) {
    DecodeResult r = try_decode(bytes);
    if (r.ok()) {
        return std::get<Message>(std::move(r.value));
    }
    if (std::get<DecodeError>(r.value) == DecodeError::UnsupportedVersion) {
        throw UnsupportedVersion(r.reason);
    }
    throw MalformedFrame(r.reason);
}

} // namespace mochi::comms
