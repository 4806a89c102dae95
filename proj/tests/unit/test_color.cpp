#include <mochi/perception/color.hpp>

#include <gtest/gtest.h>

#include <random>

using namespace mochi;
using namespace mochi::perception;

namespace {

// Textbook sRGB -> XYZ -> LAB, written out without the library helpers.
Lab lab_oracle(int r8, int g8, int b8) {
    auto lin = [](int c) {
        const double v = c / 255.0;
        return v <= 0.04045 ? v / 12.92 : std::pow((v + 0.055) / 1.055, 2.4);
    };
    const double r = lin(r8), g = lin(g8), b = lin(b8);
    const double X = (0.4124 * r + 0.3576 * g + 0.1805 * b) / 0.9505;
    const double Y = (0.2126 * r + 0.7152 * g + 0.0722 * b) / 1.0;
    const double Z = (0.0193 * r + 0.1192 * g + 0.9505 * b) / 1.0890;
    auto f = [](double t) { return t > 216.0 / 24389.0 ? std::cbrt(t) : (24389.0 / 27.0 * t + 16.0) / 116.0; };
    return {116.0 * f(Y) - 16.0, 500.0 * (f(X) - f(Y)), 200.0 * (f(Y) - f(Z))};
}

} // namespace

TEST(RgbToLab, ReferenceColors) {
    const Lab black = rgb_to_lab(Rgb{0, 0, 0});
    EXPECT_NEAR(black.L, 0.0, 1e-9);
    EXPECT_NEAR(black.A, 0.0, 1e-9);
    EXPECT_NEAR(black.B, 0.0, 1e-9);
    const Lab white = rgb_to_lab(Rgb{255, 255, 255});
    EXPECT_NEAR(white.L, 100.0, 1e-3);
    EXPECT_NEAR(white.A, 0.0, 1e-2);
    EXPECT_NEAR(white.B, 0.0, 1e-2);
    const Lab red = rgb_to_lab(Rgb{255, 0, 0});
    EXPECT_NEAR(red.L, 53.2, 0.05);
    EXPECT_NEAR(red.A, 80.1, 0.05);
    EXPECT_NEAR(red.B, 67.2, 0.05);
}

TEST(RgbToLab, MatchesIndependentOracle) {
    std::mt19937 rng(2);
    std::uniform_int_distribution<int> c(0, 255);
    for (int i = 0; i < 2000; ++i) {
        const int r = c(rng), g = c(rng), b = c(rng);
        const Lab got = rgb_to_lab(Rgb{std::uint8_t(r), std::uint8_t(g), std::uint8_t(b)});
        const Lab want = lab_oracle(r, g, b);
        ASSERT_NEAR(got.L, want.L, 0.05);
        ASSERT_NEAR(got.A, want.A, 0.1);
        ASSERT_NEAR(got.B, want.B, 0.1);
    }
}

TEST(RgbToLab, ChromaTableTracksExactConversion) {
    const ChromaTable &t = ChromaTable::instance();
    std::mt19937 rng(3);
    std::uniform_int_distribution<int> c(0, 255);
    double worst = 0.0;
    for (int i = 0; i < 20000; ++i) {
        const Rgb px{std::uint8_t(c(rng)), std::uint8_t(c(rng)), std::uint8_t(c(rng))};
        worst = std::max(worst, (t.lookup(px) - chroma(rgb_to_lab(px))).norm());
    }
    EXPECT_LT(worst, 6.0);
}

TEST(TrainColorFamily, IdenticalSamplesGiveRegularizer) {
    const std::vector<Vec2> s(10, Vec2(12.0, -4.0));
    const ColorFamily f = train_color_family(s, "x");
    EXPECT_EQ(f.mu, Vec2(12.0, -4.0));
    EXPECT_EQ(f.sigma, kCovarianceRegularizer * Mat2::Identity());
    EXPECT_EQ(f.name, "x");
}

TEST(TrainColorFamily, HandCovariance) {
    std::vector<Vec2> s = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
    s.insert(s.end(), s.begin(), s.end()); // eight samples, same moments
    const ColorFamily f = train_color_family(s);
    EXPECT_NEAR(f.mu.norm(), 0.0, 1e-15);
    // Population covariance of the four points is (1/2) I.
    const Mat2 want = 0.5 * Mat2::Identity() + 1e-3 * Mat2::Identity();
    EXPECT_LT((f.sigma - want).norm(), 1e-15);
}

TEST(TrainColorFamily, DisjointClustersSeparate) {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> n(0.0, 1.0);
    std::vector<Vec2> a, b;
    for (int i = 0; i < 400; ++i) {
        a.emplace_back(n(rng), n(rng));
        b.emplace_back(10.0 + n(rng), n(rng));
    }
    const ColorFamily fa = train_color_family(a), fb = train_color_family(b);
    EXPECT_GT(mahalanobis(fb.mu, fa), 6.0);
    EXPECT_GT(mahalanobis(fa.mu, fb), 6.0);
    for (const Vec2 &p : b) {
        if (mahalanobis(p, fb) < 3.0) {
            ASSERT_GE(mahalanobis(p, fa), 3.0);
        }
    }
}

TEST(TrainColorFamily, TooFewSamples) {
    const std::vector<Vec2> s(7, Vec2::Zero());
    EXPECT_THROW(train_color_family(s), InsufficientSamples);
}

TEST(Mahalanobis, Examples) {
    ColorFamily f;
    f.mu = Vec2(3.0, -1.0);
    EXPECT_EQ(mahalanobis(f.mu, f), 0.0);
    f.sigma = Eigen::Vector2d(4.0, 1.0).asDiagonal();
    EXPECT_NEAR(mahalanobis(f.mu + Vec2(4.0, 0.0), f), 2.0, 1e-15);
    f.sigma = Mat2::Identity();
    EXPECT_NEAR(mahalanobis(f.mu + Vec2(3.0, 4.0), f), 5.0, 1e-15);
}

TEST(Mahalanobis, SingularCovarianceThrows) {
    ColorFamily f;
    f.sigma << 1.0, 1.0, 1.0, 1.0;
    EXPECT_THROW(mahalanobis(Vec2::Zero(), f), SingularCovariance);
    f.sigma << -1.0, 0.0, 0.0, 1.0;
    EXPECT_THROW(mahalanobis(Vec2::Zero(), f), SingularCovariance);
}

TEST(ColorGate, AgreesWithDistance) {
    ColorFamily f;
    f.mu = Vec2(50, 30);
    f.sigma << 30, 10, 10, 20;
    const ColorGate gate(f, 3.0);
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(0, 100);
    for (int i = 0; i < 5000; ++i) {
        const Vec2 p(u(rng), u(rng) - 30);
        ASSERT_EQ(gate.accepts(p), mahalanobis(p, f) < 3.0);
    }
    EXPECT_FALSE(ColorGate(f, 0.0).accepts(f.mu));
}
