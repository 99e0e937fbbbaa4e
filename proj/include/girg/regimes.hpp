#pragma once

#include <numbers>
#include <optional>
#include <string_view>
#include <vector>

namespace girg {

inline constexpr double kPhi = std::numbers::phi;
inline constexpr double kSqrt2Plus1 = std::numbers::sqrt2 + 1.0;

enum class Regime { UltraFast, Fast, Slow, Boundary, McdUltraFast, McdFast };

[[nodiscard]] std::string_view to_string(Regime r) noexcept;

enum class Mechanism { Weak, Strong3Hop, KHop, Mcd };

[[nodiscard]] std::string_view to_string(Mechanism m) noexcept;

struct RegimeReport {
    double tau = 0;
    double alpha = 0;
    Regime label = Regime::Fast;
    double gamma_weak = 0;
    double gamma_strong = 0;
    std::optional<double> delta_weak;    // only when gamma_weak lies in (0, 1)
    std::optional<double> delta_strong;
    bool weak_precondition = false;      // alpha < (tau-1)/(tau-2)
    bool strong_precondition = false;    // tau < phi + 1
    std::optional<double> ultrafast_constant;
    std::optional<Mechanism> mechanism;
    std::optional<int> min_k;
    std::optional<double> sup_beta;
    std::optional<double> fitted_slow_exponent;
};

/// Raw region predicates, without any boundary band.
[[nodiscard]] bool is_ultrafast(double tau, double alpha) noexcept;
[[nodiscard]] bool is_slow(double tau, double alpha) noexcept;

/// Phase label of (tau, alpha) plus every closed-form quantity that applies.
/// Points within `tol` (relative) of a curve separating two labels are Boundary.
[[nodiscard]] RegimeReport classify(double tau, double alpha, double tol = 1e-9);

/// Label for the min-component geometry: ultra-fast for 2 < tau < 3 and d >= 2.
[[nodiscard]] RegimeReport classify_mcd(double tau, double alpha, int d);

/// 1 / log2(1 / gamma).
[[nodiscard]] double delta_exponent(double gamma);

[[nodiscard]] double gamma_weak(double tau, double alpha) noexcept;
[[nodiscard]] double gamma_strong(double tau) noexcept;

struct UltrafastConstant {
    double constant;
    Mechanism mechanism;
    std::optional<int> k;  // khop only
    std::optional<double> beta;
};

/// Smallest leading constant among the ultra-fast mechanisms that apply.
[[nodiscard]] UltrafastConstant ultrafast_constant(double tau, double alpha);

/// Leading constant of every applicable mechanism, in Mechanism order.
[[nodiscard]] std::vector<UltrafastConstant> ultrafast_mechanisms(double tau, double alpha);

/// f^(2) = tau, f^(j+1) = tau - 1/f^(j).
[[nodiscard]] double f_k(double tau, int k);
[[nodiscard]] double f_limit(double tau);

struct MinK {
    int k;
    double sup_beta;
};

/// Smallest k >= 2 with (tau-2) < 1/(tau - 1/f^(k)) and the open supremum of
/// feasible beta at that k.
[[nodiscard]] MinK min_k_for_tau(double tau);

/// Supremum of beta with (1+beta)(tau-2) < 1/(tau - 1/f^(k)); may be <= 0.
[[nodiscard]] double sup_beta(double tau, int k);

enum class BlockKind { Gap, Edge };

struct Timeblock {
    BlockKind kind;
    std::size_t rank;
    long long lo;
    long long hi;
};

[[nodiscard]] Timeblock gap_block(long long z, std::size_t rank);
[[nodiscard]] Timeblock edge_block(long long z, std::size_t rank);

/// 2^(R-1) gap blocks and 2^(R-1)-1 edge blocks, ordered by start.
[[nodiscard]] std::vector<Timeblock> timeblocks(long long z, int r);

} // namespace girg
