#include "girg/regimes.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "girg/errors.hpp"

namespace girg {

std::string_view to_string(Regime r) noexcept {
    switch (r) {
    case Regime::UltraFast: return "ultrafast";
    case Regime::Fast: return "fast";
    case Regime::Slow: return "slow";
    case Regime::Boundary: return "boundary";
    case Regime::McdUltraFast: return "mcd-ultrafast";
    case Regime::McdFast: return "mcd-fast";
    }
    return "unknown";
}

std::string_view to_string(Mechanism m) noexcept {
    switch (m) {
    case Mechanism::Weak: return "weak";
    case Mechanism::Strong3Hop: return "strong3hop";
    case Mechanism::KHop: return "khop";
    case Mechanism::Mcd: return "mcd";
    }
    return "unknown";
}

bool is_ultrafast(double tau, double alpha) noexcept {
    return tau < 2.5 || alpha < 1.0 / (tau - 2.0);
}

bool is_slow(double tau, double alpha) noexcept {
    return !is_ultrafast(tau, alpha) && tau > kPhi + 1.0 && alpha > (tau - 1.0) / (tau - 2.0);
}

double gamma_weak(double tau, double alpha) noexcept {
    return alpha * (tau - 1.0) / (alpha + tau - 1.0);
}

double gamma_strong(double tau) noexcept {
    return tau * (tau - 1.0) / (2.0 * tau - 1.0);
}

double delta_exponent(double gamma) {
    if (!(gamma > 0.0 && gamma < 1.0)) throw UsageError("delta_exponent needs gamma in (0, 1)");
    return 1.0 / std::log2(1.0 / gamma);
}

double f_k(double tau, int k) {
    if (k < 2) throw UsageError("f_k needs k >= 2");
    double f = tau;
    for (int j = 2; j < k; ++j) f = tau - 1.0 / f;
    return f;
}

double f_limit(double tau) {
    if (tau < 2.0) throw UsageError("f_limit needs tau >= 2");
    return (tau + std::sqrt(tau * tau - 4.0)) / 2.0;
}

double sup_beta(double tau, int k) {
    return 1.0 / ((tau - 2.0) * (tau - 1.0 / f_k(tau, k))) - 1.0;
}

MinK min_k_for_tau(double tau) {
    if (!(tau > 2.0 && tau < 2.5)) {
        throw UsageError("min_k_for_tau needs 2 < tau < 2.5; no finite k exists at or beyond 2.5");
    }
    // tau - 1/f^(k) = f^(k+1) decreases to f_limit, and (tau-2) f_limit < 1 below 2.5
    double f = tau;
    for (int k = 2;; ++k) {
        const double next = tau - 1.0 / f;
        if ((tau - 2.0) * next < 1.0) return {k, 1.0 / ((tau - 2.0) * next) - 1.0};
        f = next;
    }
}

namespace {

constexpr int kMaxK = 64;

bool near(double x, double c, double tol) {
    return std::abs(x - c) <= tol * std::max(1.0, std::abs(c));
}

// Within tol of a curve segment where the label actually changes.
bool on_boundary(double tau, double alpha, double tol) {
    const double golden = kPhi + 1.0;
    const double uf_alpha = 1.0 / (tau - 2.0);
    const double slow_alpha = (tau - 1.0) / (tau - 2.0);
    if (near(tau, 2.5, tol) && alpha >= 2.0 * (1.0 - tol)) return true;
    if (near(alpha, uf_alpha, tol) && tau >= 2.5 * (1.0 - tol)) return true;
    if (near(tau, golden, tol) && alpha >= golden * (1.0 - tol)) return true;
    if (near(alpha, slow_alpha, tol) && tau >= golden * (1.0 - tol)) return true;
    return false;
}

} // namespace

std::vector<UltrafastConstant> ultrafast_mechanisms(double tau, double alpha) {
    if (!(tau > 2.0) || !(alpha > 1.0)) throw UsageError("need tau > 2 and alpha > 1");
    if (!is_ultrafast(tau, alpha)) throw UsageError("(tau, alpha) is not in the ultra-fast region");
    std::vector<UltrafastConstant> out;
    const double weak = alpha * (tau - 2.0);
    if (weak < 1.0) out.push_back({4.0 / std::abs(std::log(weak)), Mechanism::Weak, std::nullopt, std::nullopt});
    if (tau < kSqrt2Plus1) {
        out.push_back({6.0 / std::abs(std::log(tau * (tau - 2.0))), Mechanism::Strong3Hop, std::nullopt, std::nullopt});
    } else if (tau < 2.5) {
        // the k-hop construction starts where the 3-hop relay stops working
        const MinK first = min_k_for_tau(tau);
        std::optional<UltrafastConstant> best;
        for (int k = first.k; k <= std::max(kMaxK, first.k); ++k) {
            const double beta = sup_beta(tau, k);
            if (!(beta > 0.0)) continue;
            const double c = 2.0 * (k + 1) / std::log1p(beta);
            if (!best || c < best->constant) best = UltrafastConstant{c, Mechanism::KHop, k, beta};
        }
        if (best) out.push_back(*best);
    }
    return out;
}

UltrafastConstant ultrafast_constant(double tau, double alpha) {
    const auto all = ultrafast_mechanisms(tau, alpha);
    if (all.empty()) throw UsageError("no ultra-fast mechanism applies");
    return *std::min_element(all.begin(), all.end(),
                             [](const auto& a, const auto& b) { return a.constant < b.constant; });
}

RegimeReport classify(double tau, double alpha, double tol) {
    if (!(tau > 2.0) || !std::isfinite(tau)) throw UsageError("tau must be > 2");
    if (!(alpha > 1.0) || !std::isfinite(alpha)) throw UsageError("alpha must be > 1");
    if (!(tol >= 0.0)) throw UsageError("tol must be non-negative");
    RegimeReport r;
    r.tau = tau;
    r.alpha = alpha;
    r.gamma_weak = gamma_weak(tau, alpha);
    r.gamma_strong = gamma_strong(tau);
    if (r.gamma_weak > 0.0 && r.gamma_weak < 1.0) r.delta_weak = delta_exponent(r.gamma_weak);
    if (r.gamma_strong > 0.0 && r.gamma_strong < 1.0) r.delta_strong = delta_exponent(r.gamma_strong);
    r.weak_precondition = alpha < (tau - 1.0) / (tau - 2.0);
    r.strong_precondition = tau < kPhi + 1.0;

    if (on_boundary(tau, alpha, tol)) {
        r.label = Regime::Boundary;
    } else if (is_ultrafast(tau, alpha)) {
        r.label = Regime::UltraFast;
    } else if (is_slow(tau, alpha)) {
        r.label = Regime::Slow;
    } else {
        r.label = Regime::Fast;
    }
    if (is_ultrafast(tau, alpha)) {
        const auto uc = ultrafast_constant(tau, alpha);
        r.ultrafast_constant = uc.constant;
        r.mechanism = uc.mechanism;
    }
    if (tau < 2.5) {
        const auto mk = min_k_for_tau(tau);
        r.min_k = mk.k;
        r.sup_beta = mk.sup_beta;
    }
    return r;
}

RegimeReport classify_mcd(double tau, double alpha, int d) {
    if (!(tau > 2.0) || !std::isfinite(tau)) throw UsageError("tau must be > 2");
    if (!(alpha > 1.0)) throw UsageError("alpha must be > 1");
    if (d < 1) throw UsageError("d must be at least 1");
    RegimeReport r;
    r.tau = tau;
    r.alpha = alpha;
    r.gamma_weak = gamma_weak(tau, alpha);
    r.gamma_strong = gamma_strong(tau);
    r.weak_precondition = alpha < (tau - 1.0) / (tau - 2.0);
    r.strong_precondition = tau < kPhi + 1.0;
    if (tau < 3.0 && d >= 2) {
        r.label = Regime::McdUltraFast;
        r.ultrafast_constant = 4.0 / std::abs(std::log(tau - 2.0));
        r.mechanism = Mechanism::Mcd;
    } else {
        r.label = Regime::McdFast;
    }
    return r;
}

Timeblock gap_block(long long z, std::size_t rank) {
    const auto i = static_cast<long long>(rank);
    return {BlockKind::Gap, rank, 4 * i * z, (4 * i + 1) * z};
}

Timeblock edge_block(long long z, std::size_t rank) {
    const auto j = static_cast<long long>(rank);
    return {BlockKind::Edge, rank, (4 * j + 2) * z, (4 * j + 3) * z};
}

std::vector<Timeblock> timeblocks(long long z, int r) {
    if (z < 2 || r < 2) throw UsageError("timeblocks needs Z >= 2 and R >= 2");
    if (r > 40) throw UsageError("timeblocks: depth too large");
    const std::size_t gaps = std::size_t{1} << (r - 1);
    std::vector<Timeblock> out;
    out.reserve(2 * gaps - 1);
    for (std::size_t i = 0; i < gaps; ++i) {
        out.push_back(gap_block(z, i));
        if (i + 1 < gaps) out.push_back(edge_block(z, i));
    }
    return out;
}

} // namespace girg
