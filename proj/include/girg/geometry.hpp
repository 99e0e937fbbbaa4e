#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>

#include "girg/errors.hpp"

namespace girg {

enum class GeometryKind { EuclideanInf, MinComponent };

using Point = Eigen::VectorXd;

[[nodiscard]] inline std::string_view to_string(GeometryKind g) noexcept {
    return g == GeometryKind::EuclideanInf ? "inf" : "min";
}

[[nodiscard]] inline GeometryKind parse_geometry(std::string_view s) {
    if (s == "inf") return GeometryKind::EuclideanInf;
    if (s == "min") return GeometryKind::MinComponent;
    throw UsageError("unknown geometry '" + std::string(s) + "' (expected inf|min)");
}

/// Generator knobs. `n` is the Poisson intensity; `fixed_count` replaces the
/// Poisson draw with an exact vertex count.
struct ModelParams {
    double n = 1024.0;
    int d = 1;
    double tau = 2.5;
    double alpha = 2.0;
    double theta = 1.0;
    GeometryKind geometry = GeometryKind::EuclideanInf;
    std::uint64_t seed = 1;
    std::optional<std::int64_t> fixed_count;

    void validate() const {
        if (!(n > 0.0) || !std::isfinite(n)) throw UsageError("n must be a positive finite intensity");
        if (d < 1) throw UsageError("d must be at least 1");
        if (!(tau > 2.0) || !std::isfinite(tau)) throw UsageError("tau must be > 2");
        if (!(alpha > 1.0) || !std::isfinite(alpha)) throw UsageError("alpha must be > 1 and finite");
        if (!(theta > 0.0 && theta <= 1.0)) throw UsageError("theta must lie in (0, 1]");
        if (fixed_count && *fixed_count < 0) throw UsageError("fixed_count must be non-negative");
    }

    friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

/// |a - b|_T = min(|a - b|, 1 - |a - b|) on the unit circle.
template <typename Scalar>
[[nodiscard]] constexpr Scalar torus_coord_dist(Scalar a, Scalar b) noexcept {
    const Scalar diff = a > b ? a - b : b - a;
    return std::min(diff, Scalar(1) - diff);
}

/// Torus distance between two points: the max (EuclideanInf) or the min
/// (MinComponent) of the coordinate-wise torus distances.
template <typename DerivedA, typename DerivedB>
[[nodiscard]] typename DerivedA::Scalar dist(const Eigen::MatrixBase<DerivedA>& x,
                                             const Eigen::MatrixBase<DerivedB>& y, GeometryKind g) {
    using Scalar = typename DerivedA::Scalar;
    if (x.size() != y.size()) throw UsageError("dist: dimension mismatch");
    if (x.size() == 0) return Scalar(0);
    Scalar acc = torus_coord_dist(x(0), y(0));
    for (Eigen::Index k = 1; k < x.size(); ++k) {
        const Scalar c = torus_coord_dist(x(k), y(k));
        acc = g == GeometryKind::EuclideanInf ? std::max(acc, c) : std::min(acc, c);
    }
    return acc;
}

/// Exact torus volume of {x : |x| <= r}.
template <typename Scalar>
[[nodiscard]] Scalar volume(Scalar r, int d, GeometryKind g) noexcept {
    if (g == GeometryKind::EuclideanInf) {
        return std::min(Scalar(1), std::pow(Scalar(2) * r, Scalar(d)));
    }
    const Scalar base = std::max(Scalar(0), Scalar(1) - Scalar(2) * r);
    return std::clamp(Scalar(1) - std::pow(base, Scalar(d)), Scalar(0), Scalar(1));
}

/// theta * min(1, (wu*wv / (n*vol))^alpha); vol == 0 saturates the minimum.
[[nodiscard]] inline double kernel_from_volume(double wu, double wv, double vol, double n, double alpha,
                                               double theta) noexcept {
    const double denom = n * vol;
    const double ratio = wu * wv;
    if (!(denom > 0.0) || ratio >= denom) return theta;
    return theta * std::pow(ratio / denom, alpha);
}

[[nodiscard]] inline double connection_prob(double wu, double wv, double r, const ModelParams& params) noexcept {
    return kernel_from_volume(wu, wv, volume(r, params.d, params.geometry), params.n, params.alpha,
                              params.theta);
}

} // namespace girg
