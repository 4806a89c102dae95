#include <mochi/io/config.hpp>
#include <mochi/io/family_json.hpp>
#include <mochi/io/png.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

namespace {

using namespace mochi;
using nlohmann::json;
namespace fs = std::filesystem;

int run(const std::string &cmd) {
    const int status = std::system((cmd + " >/dev/null 2>&1").c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path &p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

class Cli : public ::testing::Test {
  protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("mochi_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    fs::path write(const std::string &name, const std::string &text) {
        std::ofstream(dir_ / name) << text;
        return dir_ / name;
    }

    fs::path dir_;
};

// sRGB (D65) to CIELAB chroma, written out independently of the library.
Vec2 lab_chroma(int r8, int g8, int b8) {
    const auto lin = [](int c) {
        const double s = c / 255.0;
        return s <= 0.04045 ? s / 12.92 : std::pow((s + 0.055) / 1.055, 2.4);
    };
    const double r = lin(r8), g = lin(g8), b = lin(b8);
    const double x = (0.4124564 * r + 0.3575761 * g + 0.1804375 * b) / 0.95047;
    const double y = 0.2126729 * r + 0.7151522 * g + 0.0721750 * b;
    const double z = (0.0193339 * r + 0.1191920 * g + 0.9503041 * b) / 1.08883;
    const auto f = [](double t) {
        return t > 216.0 / 24389.0 ? std::cbrt(t) : (24389.0 / 27.0 * t + 16.0) / 116.0;
    };
    return {500.0 * (f(x) - f(y)), 200.0 * (f(y) - f(z))};
}

TEST_F(Cli, ExperimentRowsAndDeterminism) {
    const fs::path cfg = write("cfg.json", json{{"experiment",
                                                 {{"duration", 20.0},
                                                  {"pickup_blimps", {1}},
                                                  {"pickup_balloons", {1}},
                                                  {"delivery", json::array()}}}}
                                               .dump());
    const std::string base = std::string(MOCHI_SIM_BIN) + " experiment --config " + cfg.string() + " --seeds 3";
    ASSERT_EQ(run(base + " --out " + (dir_ / "a.csv").string()), 0);
    ASSERT_EQ(run(base + " --out " + (dir_ / "b.csv").string()), 0);
    const std::string a = slurp(dir_ / "a.csv");
    EXPECT_EQ(a, slurp(dir_ / "b.csv"));
    std::istringstream in(a);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "seed,n_blimps,n_balloons,attempts,successes,deliveries");
    int rows = 0;
    while (std::getline(in, line)) {
        EXPECT_EQ(line.rfind(std::to_string(rows + 1) + ",1,1,", 0), 0u) << line;
        ++rows;
    }
    EXPECT_EQ(rows, 3);
    EXPECT_FALSE(fs::exists(dir_ / "a_delivery.csv"));
}

TEST_F(Cli, ExperimentWritesDeliverySibling) {
    const fs::path cfg = write("cfg.json", json{{"experiment",
                                                 {{"duration", 10.0},
                                                  {"pickup_blimps", {2}},
                                                  {"pickup_balloons", {2}},
                                                  {"delivery", {{{"n_blimps", 4}, {"n_balloons", 8}}}}}}}
                                               .dump());
    ASSERT_EQ(run(std::string(MOCHI_SIM_BIN) + " experiment --config " + cfg.string() + " --seeds 2 --out " +
                  (dir_ / "m.csv").string()),
              0);
    const std::string d = slurp(dir_ / "m_delivery.csv");
    EXPECT_EQ(d.rfind("seed,n_blimps,n_balloons,attempts,successes,deliveries\n1,4,8,", 0), 0u) << d;
}

TEST_F(Cli, ExperimentRejectsBadConfig) {
    const std::string sim = std::string(MOCHI_SIM_BIN) + " experiment --seeds 1 --out " + (dir_ / "x.csv").string();
    EXPECT_EQ(run(sim + " --config " + write("bad.json", R"({"wrld": {}})").string()), 2);
    EXPECT_EQ(run(sim + " --config " + write("range.json", R"({"gains": {"k": -1}})").string()), 2);
    EXPECT_EQ(run(sim + " --config " + write("syntax.json", R"({"world": )").string()), 2);
    EXPECT_EQ(run(sim + " --config " + (dir_ / "missing.json").string()), 2);
    EXPECT_FALSE(fs::exists(dir_ / "x.csv"));
}

TEST_F(Cli, TrainColorsRecoversKnownColor) {
    fs::create_directories(dir_ / "img");
    json labels = json::array();
    Vec2 oracle = Vec2::Zero();
    for (int i = 0; i < 20; ++i) {
        const perception::Rgb red{static_cast<std::uint8_t>(196 + i % 5), 30, static_cast<std::uint8_t>(40 + i % 3)};
        const perception::Rgb grey{110, 110, 110};
        perception::Frame frame;
        for (int y = 0; y < perception::kFrameHeight; ++y) {
            for (int x = 0; x < perception::kFrameWidth; ++x) {
                const double dx = x + 0.5 - 160.0, dy = y + 0.5 - 120.0;
                frame.at(x, y) = dx * dx + dy * dy <= 80.0 * 80.0 ? red : grey;
            }
        }
        const std::string name = "f" + std::to_string(i) + ".png";
        io::write_png(dir_ / "img" / name, frame);
        labels.push_back({{"image", name}, {"rects", {{8, 6, 4, 3}}}});
        oracle += lab_chroma(red.r, red.g, red.b);
    }
    oracle /= 20.0;
    const fs::path lab = write("labels.json", json{{"name", "red"}, {"labels", labels}}.dump());
    ASSERT_EQ(run(std::string(MOCHI_TRAIN_BIN) + " --images " + (dir_ / "img").string() + " --labels " +
                  lab.string() + " --out " + (dir_ / "red.json").string()),
              0);
    const perception::ColorFamily f = io::load_family(dir_ / "red.json");
    EXPECT_EQ(f.name, "red");
    EXPECT_GT(f.mu.x(), 40.0);
    EXPECT_NEAR(f.mu.x(), oracle.x(), 2.0);
    EXPECT_NEAR(f.mu.y(), oracle.y(), 2.0);

    // The output is accepted by the simulator config loader.
    const fs::path cfg = write("cfg.json", json{{"perception", {{"balloon_family", "red.json"}}}}.dump());
    const sim::SimConfig c = io::load_config(cfg);
    ASSERT_TRUE(c.balloon_family);
    EXPECT_EQ(c.balloon_family->mu, f.mu);
}

TEST_F(Cli, TrainColorsExitCodes) {
    fs::create_directories(dir_ / "img");
    const std::string train = std::string(MOCHI_TRAIN_BIN) + " --images " + (dir_ / "img").string() + " --out " +
                              (dir_ / "o.json").string() + " --labels ";
    EXPECT_EQ(run(train + write("empty.json", "").string()), 3);
    EXPECT_EQ(run(train + write("none.json", "[]").string()), 3);
    EXPECT_EQ(run(train + (dir_ / "absent.json").string()), 2);
    EXPECT_EQ(run(train + write("missing_img.json", R"([{"image": "nope.png", "rects": [[0,0,1,1]]}])").string()), 2);
    write("img/junk.png", "not a png");
    EXPECT_EQ(run(train + write("junk.json", R"([{"image": "junk.png", "rects": [[0,0,1,1]]}])").string()), 2);
    EXPECT_EQ(run(train + write("garbled.json", "{[").string()), 2);
    EXPECT_FALSE(fs::exists(dir_ / "o.json"));
}

} // namespace
