// Color families: CIELAB conversion, Gaussian training over (A, B), Mahalanobis gating
#pragma once

#include <mochi/core/math.hpp>
#include <mochi/perception/frame.hpp>

#include <array>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mochi::perception {

struct Lab {
    double L = 0.0, A = 0.0, B = 0.0;
};

namespace detail {

inline double srgb_to_linear(double c) {
    return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

inline const std::array<double, 256> &linear_table() {
    static const std::array<double, 256> table = [] {
        std::array<double, 256> t{};
        for (int i = 0; i < 256; ++i) {
            t[i] = srgb_to_linear(i / 255.0);
        }
        return t;
    }();
    return table;
}

inline double lab_f(double t) {
    constexpr double delta = 6.0 / 29.0;
    return t > delta * delta * delta ? std::cbrt(t) : t / (3.0 * delta * delta) + 4.0 / 29.0;
}

inline Lab linear_rgb_to_lab(double r, double g, double b) {
    // sRGB primaries, D65 white.
    const double X = 0.4124564 * r + 0.3575761 * g + 0.1804375 * b;
    const double Y = 0.2126729 * r + 0.7151522 * g + 0.0721750 * b;
    const double Z = 0.0193339 * r + 0.1191920 * g + 0.9503041 * b;
    const double fx = lab_f(X / 0.95047);
    const double fy = lab_f(Y / 1.00000);
    const double fz = lab_f(Z / 1.08883);
    return {116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

} // namespace detail

/// 8-bit sRGB to CIELAB (D65).
inline Lab rgb_to_lab(Rgb px) {
    const auto &lin = detail::linear_table();
    return detail::linear_rgb_to_lab(lin[px.r], lin[px.g], lin[px.b]);
}

/// sRGB with fractional channels in [0, 255] (e.g. a cell mean) to CIELAB.
inline Lab rgb_to_lab(double r, double g, double b) {
    return detail::linear_rgb_to_lab(detail::srgb_to_linear(r / 255.0),
                                     detail::srgb_to_linear(g / 255.0),
                                     detail::srgb_to_linear(b / 255.0));
}

inline Vec2 chroma(const Lab &lab) { return {lab.A, lab.B}; }

class InsufficientSamples : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

class SingularCovariance : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// 2-D Gaussian over the (A, B) chroma plane.
struct ColorFamily {
    std::string name;
    Vec2 mu = Vec2::Zero();
    Mat2 sigma = Mat2::Identity();

    /// Sigma^{-1}; throws SingularCovariance if sigma is not positive definite.
    Mat2 precision() const {
        const double det = sigma.determinant();
        if (!std::isfinite(det) || !(det > 0.0) || !(sigma(0, 0) > 0.0) ||
            std::abs(sigma(0, 1) - sigma(1, 0)) > 1e-9 * (1.0 + std::abs(sigma(0, 1)))) {
            throw SingularCovariance("color family '" + name +
                                     "' has a non positive-definite covariance");
        }
        return sigma.inverse();
    }
};

inline constexpr std::size_t kMinTrainingSamples = 8;
inline constexpr double kCovarianceRegularizer = 1e-3;

/// Fits mean and population covariance (divide by n) plus eps*I to (A, B) cell means.
inline ColorFamily train_color_family(std::span<const Vec2> samples, std::string name = {}) {
    if (samples.size() < kMinTrainingSamples) {
        throw InsufficientSamples("need at least 8 samples to train a color family, got " +
                                  std::to_string(samples.size()));
    }
    const double n = static_cast<double>(samples.size());
    Vec2 mu = Vec2::Zero();
    for (const Vec2 &s : samples) {
        mu += s;
    }
    mu /= n;
    Mat2 cov = Mat2::Zero();
    for (const Vec2 &s : samples) {
        const Vec2 d = s - mu;
        cov += d * d.transpose();
    }
    cov /= n;
    cov += kCovarianceRegularizer * Mat2::Identity();
    return {std::move(name), mu, cov};
}

/// sqrt((mu_c - mu_k)^T Sigma_k^{-1} (mu_c - mu_k)).
inline double mahalanobis(const Vec2 &mu_c, const ColorFamily &family) {
    const Vec2 d = mu_c - family.mu;
    return std::sqrt(d.dot(family.precision() * d));
}

/// Precomputed Mahalanobis acceptance test for hot loops.
class ColorGate {
  public:
    ColorGate(const ColorFamily &family, double threshold)
        : mu_(family.mu), precision_(family.precision()), thresh_sq_(threshold * threshold),
          open_(threshold > 0.0) {}

    /// True iff the Mahalanobis distance is strictly below the threshold.
    bool accepts(const Vec2 &ab) const {
        if (!open_) {
            return false;
        }
        const Vec2 d = ab - mu_;
        return d.dot(precision_ * d) < thresh_sq_;
    }

  private:
    Vec2 mu_;
    Mat2 precision_;
    double thresh_sq_;
    bool open_;
};

/// Chroma lookup on 6-bit-per-channel quantized RGB, for per-pixel masks.
class ChromaTable {
  public:
    static const ChromaTable &instance() {
        static const ChromaTable table;
        return table;
    }
    Vec2 lookup(Rgb px) const {
        const std::size_t idx = (static_cast<std::size_t>(px.r >> 2) << 12) |
                                (static_cast<std::size_t>(px.g >> 2) << 6) | (px.b >> 2);
        return {ab_[2 * idx], ab_[2 * idx + 1]};
    }

  private:
    ChromaTable() : ab_(2u << 18) {
        for (int r = 0; r < 64; ++r) {
            for (int g = 0; g < 64; ++g) {
                for (int b = 0; b < 64; ++b) {
                    const Lab lab = rgb_to_lab(r * 4 + 1.5, g * 4 + 1.5, b * 4 + 1.5);
                    const std::size_t idx = (r << 12) | (g << 6) | b;
                    ab_[2 * idx] = static_cast<float>(lab.A);
                    ab_[2 * idx + 1] = static_cast<float>(lab.B);
                }
            }
        }
    }
    std::vector<float> ab_;
};

} // namespace mochi::perception
