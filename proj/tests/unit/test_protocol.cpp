#include <mochi/comms/protocol.hpp>

#include <gtest/gtest.h>

#include <random>

using namespace mochi;
using namespace mochi::comms;

namespace {

// Reflected CRC-32 (poly 0xEDB88320), bit at a time.
std::uint32_t crc_oracle(const std::vector<std::uint8_t> &data) {
    std::uint32_t crc = 0xFFFFFFFFu;
    for (std::uint8_t byte : data) {
        crc ^= byte;
        for (int k = 0; k < 8; ++k) {
            crc = (crc >> 1) ^ (0xEDB88320u & (0u - (crc & 1u)));
        }
    }
    return ~crc;
}

std::string random_key(std::mt19937_64 &rng) {
    static const std::string alphabet = "abcdefghijklmnopqrstuvwxyz._0123456789";
    std::uniform_int_distribution<int> len(1, 16), ch(0, int(alphabet.size()) - 1);
    std::string k(len(rng), 'a');
    for (char &c : k) {
        c = alphabet[ch(rng)];
    }
    return k;
}

Message random_message(std::mt19937_64 &rng) {
    std::uniform_int_distribution<int> kind(0, 5), mode(0, 3);
    std::uniform_int_distribution<std::uint32_t> u32;
    std::uniform_int_distribution<int> u16(0, 0xFFFF);
    std::uniform_real_distribution<float> f(-1e3f, 1e3f);
    std::bernoulli_distribution coin;
    Message m;
    m.robot_id = static_cast<std::uint16_t>(u16(rng));
    m.seq = u32(rng);
    switch (kind(rng)) {
    case 0: m.payload = ParamSet{random_key(rng), f(rng)}; break;
    case 1: m.payload = ParamAck{random_key(rng), f(rng), static_cast<AckStatus>(mode(rng))}; break;
    case 2: m.payload = TelemetryReq{}; break;
    case 3:
        m.payload = TelemetryResp{f(rng), f(rng), f(rng), f(rng), f(rng),
                                  static_cast<autonomy::Mode>(mode(rng)), f(rng), f(rng),
                                  static_cast<std::uint16_t>(u16(rng)), coin(rng)};
        break;
    case 4: m.payload = ModeCmd{static_cast<autonomy::Mode>(mode(rng))}; break;
    default: m.payload = ManualCmd{f(rng), f(rng), f(rng)}; break;
    }
    return m;
}

} // namespace

TEST(Crc32, CheckValue) {
    const std::string s = "123456789";
    const std::vector<std::uint8_t> bytes(s.begin(), s.end());
    EXPECT_EQ(crc32_ieee(bytes), 0xCBF43926u);
    EXPECT_EQ(crc_oracle(bytes), 0xCBF43926u);
}

TEST(Codec, TelemetryRequestLayout) {
    const Bytes f = encode(Message{3, 0x01020304, TelemetryReq{}});
    ASSERT_EQ(f.size(), 2u + 1 + 1 + 2 + 4 + 1 + 0 + 4);
    const std::vector<std::uint8_t> header = {0xB1, 0x1D, 0x01, 0x03, 0x03, 0x00,
                                              0x04, 0x03, 0x02, 0x01, 0x00};
    EXPECT_TRUE(std::equal(header.begin(), header.end(), f.begin()));
    const std::uint32_t crc = crc_oracle(header);
    EXPECT_EQ(f[11], crc & 0xFF);
    EXPECT_EQ(f[12], (crc >> 8) & 0xFF);
    EXPECT_EQ(f[13], (crc >> 16) & 0xFF);
    EXPECT_EQ(f[14], crc >> 24);
}

TEST(Codec, FloatIsLittleEndianIeee) {
    TelemetryResp t;
    t.h = 10.5f;
    const Bytes f = encode(Message{1, 7, t});
    EXPECT_EQ(f[11], 0x00);
    EXPECT_EQ(f[12], 0x00);
    EXPECT_EQ(f[13], 0x28);
    EXPECT_EQ(f[14], 0x41);
}

TEST(Codec, ModesRoundTrip) {
    for (auto m : {autonomy::Mode::Manual, autonomy::Mode::RandomWalk, autonomy::Mode::MoveToGoal,
                   autonomy::Mode::PassThroughGoal}) {
        TelemetryResp t;
        t.mode = m;
        const Message msg{2, 9, t};
        EXPECT_EQ(decode(encode(msg)), msg);
        const Message cmd{2, 10, ModeCmd{m}};
        EXPECT_EQ(decode(encode(cmd)), cmd);
    }
}

TEST(Codec, RoundTripRandom) {
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        std::mt19937_64 rng(seed);
        const Message m = random_message(rng);
        const Bytes f = encode(m);
        ASSERT_LE(f.size(), kMaxFrameSize);
        ASSERT_EQ(decode(f), m) << seed;
    }
}

TEST(Codec, SingleBitFlipsAreCaught) {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 50; ++trial) {
        const Bytes f = encode(random_message(rng));
        for (std::size_t bit = 0; bit < f.size() * 8; ++bit) {
            Bytes g = f;
            g[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
            ASSERT_THROW(decode(g), MalformedFrame) << "bit " << bit;
        }
    }
}

TEST(Codec, RejectsBadFrames) {
    Bytes f = encode(Message{1, 1, ModeCmd{}});
    EXPECT_THROW(decode(Bytes(f.begin(), f.end() - 1)), MalformedFrame);
    EXPECT_THROW(decode(Bytes{}), MalformedFrame);
    Bytes v = f;
    v[2] = 2;
    // Recompute the CRC so only the version is wrong.
    const std::uint32_t crc = crc_oracle(Bytes(v.begin(), v.end() - 4));
    for (int k = 0; k < 4; ++k) {
        v[v.size() - 4 + k] = static_cast<std::uint8_t>(crc >> (8 * k));
    }
    EXPECT_THROW(decode(v), UnsupportedVersion);
    Bytes bad_kind = f;
    bad_kind[3] = 9;
    const std::uint32_t crc2 = crc_oracle(Bytes(bad_kind.begin(), bad_kind.end() - 4));
    for (int k = 0; k < 4; ++k) {
        bad_kind[bad_kind.size() - 4 + k] = static_cast<std::uint8_t>(crc2 >> (8 * k));
    }
    EXPECT_THROW(decode(bad_kind), MalformedFrame);
    EXPECT_THROW(decode(Bytes(251, 0)), MalformedFrame);
}

TEST(Codec, RejectsBadKeys) {
    EXPECT_THROW(encode(Message{1, 1, ParamSet{"", 1.0f}}), std::invalid_argument);
    EXPECT_THROW(encode(Message{1, 1, ParamSet{std::string(17, 'a'), 1.0f}}), std::invalid_argument);
    EXPECT_NO_THROW(encode(Message{1, 1, ParamSet{std::string(16, 'a'), 1.0f}}));
}

TEST(Codec, DecodeIsTotal) {
    std::mt19937_64 rng(2718);
    std::uniform_int_distribution<int> len(0, 250), byte(0, 255);
    int messages = 0;
    for (int i = 0; i < 1000000; ++i) {
        Bytes b(len(rng));
        for (auto &x : b) {
            x = static_cast<std::uint8_t>(byte(rng));
        }
        if (i % 4 == 0 && b.size() >= 15) {
            // Plausible header so the fuzz reaches the CRC and payload parsers.
            b[0] = 0xB1;
            b[1] = 0x1D;
            b[2] = 1;
            b[3] = static_cast<std::uint8_t>(1 + i % 6);
            b[10] = static_cast<std::uint8_t>(b.size() - 15);
            const std::uint32_t crc = crc_oracle(Bytes(b.begin(), b.end() - 4));
            for (int k = 0; k < 4; ++k) {
                b[b.size() - 4 + k] = static_cast<std::uint8_t>(crc >> (8 * k));
            }
        }
        const DecodeResult r = try_decode(b);
        if (r.ok()) {
            ++messages;
            ASSERT_EQ(decode(encode(r.message())), r.message());
        }
    }
    EXPECT_GT(messages, 0);
}
