#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "expklms/error.hpp"
#include "expklms/oped.hpp"
#include "expklms/random.hpp"
#include "expklms/simulator.hpp"

namespace expklms {

struct BoundTerm {
    std::string label;
    double value;
};

struct BoundReport {
    std::string bound_name;
    std::string instance;
    std::size_t horizon = 0;
    double delta = 0.0;
    double c = 0.0;
    double value = 0.0;
    std::vector<BoundTerm> terms;
};

namespace detail {

inline double log_or_one(double x) { return x > std::numbers::e ? std::log(x) : 1.0; }

inline void require_tuning(double delta, double c) {
    if (!(delta >= 0.0) || !std::isfinite(delta)) throw DomainError("bound tuning needs delta >= 0");
    if (!(c > 0.0 && c <= 0.25)) throw DomainError("bound tuning needs c in (0, 1/4]");
}

}  // namespace detail

// Finite-time regret bound of Exp-KL-MS (L(k) = k - 1) with
// eps_1 = eps_2 = c * Delta_a. Terms, each summed over arms with Delta_a > delta:
//   horizon_slack   T * delta
//   leading         Delta_a (ln(T kl_mid v e) / kl_mid + 1)
//   middle          Delta_a (1/kl_mid + 1/kl(mu_a + c Delta_a, mu_a))
//   tail            min( sum Delta_a (1/kl_top + 1/kl_top^2),
//                        sum Delta_a 16 ln(T kl_top v e) / kl_top )
// with kl_mid = kl(mu_a + c Delta_a, mu_max - c Delta_a) and
// kl_top = kl(mu_max - c Delta_a, mu_max).
inline BoundReport theorem1_bound(const BanditInstance& instance, std::size_t horizon, double delta, double c) {
    detail::require_tuning(delta, c);
    const auto& family = instance.family();
    const auto space = family.mean_space();
    const double T = static_cast<double>(horizon);
    const double mu_max = instance.mu_max();

    double leading = 0.0, middle = 0.0, tail_asymptotic = 0.0, tail_minimax = 0.0;
    for (std::size_t a = 0; a < instance.arms(); ++a) {
        const double gap = instance.gaps()[a];
        if (!(gap > delta)) continue;
        const double low = instance.means()[a] + c * gap;
        const double high = mu_max - c * gap;
        if (!space.interior(low) || !space.interior(high)) {
            throw DomainError("theorem1_bound: shifted means of arm " + std::to_string(a) +
                              " leave the mean space");
        }
        const double kl_mid = family.kl(low, high);
        const double kl_low = family.kl(low, instance.means()[a]);
        const double kl_top = family.kl(high, mu_max);
        leading += gap * (detail::log_or_one(T * kl_mid) / kl_mid) + gap;
        middle += gap * (1.0 / kl_mid + 1.0 / kl_low);
        tail_asymptotic += gap * (1.0 / kl_top + 1.0 / (kl_top * kl_top));
        tail_minimax += gap * (16.0 * detail::log_or_one(T * kl_top) / kl_top);
    }

    BoundReport report;
    report.bound_name = "theorem1";
    report.instance = instance.describe();
    report.horizon = horizon;
    report.delta = delta;
    report.c = c;
    report.terms = {{"horizon_slack", T * delta},
                    {"leading", leading},
                    {"middle", middle},
                    {"tail", std::min(tail_asymptotic, tail_minimax)}};
    report.value = 0.0;
    for (const auto& term : report.terms) report.value += term.value;
    return report;
}

// 0 plus 40 log-spaced values from 1e-3 * (smallest positive gap) to the largest gap.
inline std::vector<double> delta_grid(const BanditInstance& instance) {
    double smallest = std::numeric_limits<double>::infinity();
    double largest = 0.0;
    for (double g : instance.gaps()) {
        if (g > 0.0) smallest = std::min(smallest, g);
        largest = std::max(largest, g);
    }
    std::vector<double> grid{0.0};
    if (largest == 0.0) return grid;
    const double lo = std::log(1e-3 * smallest);
    const double hi = std::log(largest);
    constexpr int points = 40;
    for (int i = 0; i < points; ++i) grid.push_back(std::exp(lo + (hi - lo) * i / (points - 1)));
    // exp(log(x)) can miss x by an ulp; the top point must drop every arm.
    grid[1] = 1e-3 * smallest;
    grid.back() = largest;
    return grid;
}

// theorem1_bound minimised over delta_grid(). Grid points whose shifted means
// leave the mean space are skipped.
inline BoundReport theorem1_bound_best(const BanditInstance& instance, std::size_t horizon, double c = 0.25) {
    std::optional<BoundReport> best;
    for (double delta : delta_grid(instance)) {
        try {
            auto report = theorem1_bound(instance, horizon, delta, c);
            if (!best || report.value < best->value) best = std::move(report);
        } catch (const DomainError&) {
        }
    }
    if (!best) throw DomainError("theorem1_bound_best: no admissible delta on the grid");
    best->bound_name = "theorem1_best";
    return *best;
}

// Lai-Robbins constant sum_{Delta_a > 0} Delta_a / kl(mu_a, mu_max).
inline double asymptotic_constant(const BanditInstance& instance) {
    double total = 0.0;
    for (std::size_t a = 0; a < instance.arms(); ++a) {
        const double gap = instance.gaps()[a];
        if (gap <= 0.0) continue;
        const double div = instance.family().kl_extended(instance.means()[a], instance.mu_max());
        if (std::isinf(div)) return std::numeric_limits<double>::infinity();
        total += gap / div;
    }
    return total;
}

enum class MinimaxFlavor { max_variance, adaptive };

// Leading term sqrt(V K T ln K) of the worst-case bounds, with V = V-bar
// (max_variance) or V(mu_max) (adaptive). Order-level yardstick, constant 1.
inline double minimax_bound(const OpedFamily& family, std::size_t arms, double mu_max, std::size_t horizon,
                            MinimaxFlavor flavor) {
    double v;
    if (flavor == MinimaxFlavor::max_variance) {
        const auto vmax = family.variance_max();
        if (!vmax) throw DomainError(family.describe() + ": no finite variance cap for the max_variance flavour");
        v = *vmax;
    } else {
        v = family.variance(mu_max);
    }
    const double k = static_cast<double>(arms);
    return std::sqrt(v * k * static_cast<double>(horizon) * std::log(k));
}

inline double minimax_bound(const BanditInstance& instance, std::size_t horizon, MinimaxFlavor flavor) {
    return minimax_bound(instance.family(), instance.arms(), instance.mu_max(), horizon, flavor);
}

// sum_{Delta_a>0} ln(T)/Delta_a + sum Delta_a, with unit constants.
inline double sub_ucb_yardstick(const BanditInstance& instance, std::size_t horizon) {
    double total = 0.0;
    for (double g : instance.gaps()) {
        if (g > 0.0) total += std::log(static_cast<double>(horizon)) / g + g;
    }
    return total;
}

struct GeoLogCheck {
    double lhs;
    double rhs;
};

// lhs = sum_{k=1}^T exp(-k a) ln(T/k), rhs = 5 ln(T a v e) / a.
inline GeoLogCheck geo_log_sum_check(std::size_t T, double a) {
    if (T == 0) throw PreconditionError("geo_log_sum_check needs T >= 1");
    const double t = static_cast<double>(T);
    if (!(a > 1.0 / t)) throw PreconditionError("geo_log_sum_check needs a > 1/T");
    double lhs = 0.0;
    for (std::size_t k = 1; k <= T; ++k) {
        lhs += std::exp(-static_cast<double>(k) * a) * std::log(t / static_cast<double>(k));
    }
    return {lhs, 5.0 * detail::log_or_one(t * a) / a};
}

enum class Tail { lower, upper };

struct ChernoffCheck {
    double epsilon;
    Tail tail;
    double frequency;
    double bound;
    double standard_error;

    bool holds(double se_multiple = 3.0) const { return frequency <= bound + se_multiple * standard_error; }
};

// Monte Carlo frequency of {mean of N draws < mu - eps} (lower) and
// {> mu + eps} (upper) against exp(-N kl(mu -/+ eps, mu)). One batch of
// n_mc sample means is shared by every (epsilon, tail) pair.
inline std::vector<ChernoffCheck> chernoff_sweep(const OpedFamily& family, double mu, std::span<const double> epsilons,
                                                 std::size_t N, std::size_t n_mc, std::uint64_t seed,
                                                 bool lower = true, bool upper = true) {
    if (N == 0) throw PreconditionError("chernoff check needs N >= 1");
    if (n_mc < 10'000) throw PreconditionError("chernoff check needs n_mc >= 10000");
    struct Case {
        double eps, threshold, bound;
        Tail tail;
        std::size_t hits = 0;
    };
    std::vector<Case> cases;
    const auto space = family.mean_space();
    if (!space.interior(mu)) throw DomainError(family.describe() + ": chernoff check needs an interior mean");
    for (double eps : epsilons) {
        if (!(eps >= 0.0)) throw DomainError("chernoff check needs epsilon >= 0");
        if (lower) {
            const double shifted = mu - eps;
            if (!space.closure_contains(shifted)) throw DomainError("chernoff check: mu - eps outside the mean space");
            cases.push_back({eps, shifted, std::exp(-static_cast<double>(N) * family.kl(shifted, mu)), Tail::lower});
        }
        if (upper) {
            const double shifted = mu + eps;
            if (!space.closure_contains(shifted)) throw DomainError("chernoff check: mu + eps outside the mean space");
            cases.push_back({eps, shifted, std::exp(-static_cast<double>(N) * family.kl(shifted, mu)), Tail::upper});
        }
    }
    RandomStream rng(seed);
    const double n = static_cast<double>(N);
    for (std::size_t r = 0; r < n_mc; ++r) {
        double sum = 0.0;
        for (std::size_t i = 0; i < N; ++i) sum += family.sample_unchecked(mu, rng);
        const double mean = sum / n;
        for (auto& cs : cases) {
            if (cs.tail == Tail::lower ? mean < cs.threshold : mean > cs.threshold) ++cs.hits;
        }
    }

    std::vector<ChernoffCheck> out;
    out.reserve(cases.size());
    for (const auto& cs : cases) {
        const double freq = static_cast<double>(cs.hits) / static_cast<double>(n_mc);
        out.push_back({cs.eps, cs.tail, freq, cs.bound, std::sqrt(freq * (1.0 - freq) / static_cast<double>(n_mc))});
    }
    return out;
}

inline ChernoffCheck chernoff_check(const OpedFamily& family, double mu, double epsilon, std::size_t N,
                                    std::size_t n_mc, std::uint64_t seed, Tail tail = Tail::lower) {
    const double eps[] = {epsilon};
    return chernoff_sweep(family, mu, eps, N, n_mc, seed, tail == Tail::lower, tail == Tail::upper).front();
}

}  // namespace expklms
