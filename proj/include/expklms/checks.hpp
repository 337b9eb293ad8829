#pragma once

// Grid checks for the divergence identities and inequalities. Each suite
// returns one row per case; a suite passes when every row passes.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "expklms/analysis.hpp"
#include "expklms/error.hpp"
#include "expklms/oped.hpp"
#include "expklms/random.hpp"

namespace expklms {

struct CheckRow {
    std::string label;
    double measured;
    double reference;
    bool pass;
};

struct CheckSettings {
    std::uint64_t seed = 20240601;
    std::size_t chernoff_reps = 100'000;
    std::size_t bregman_triples = 1'000;
};

// Reference families and interior grids used by the suites.
struct CheckFamily {
    OpedFamily family;
    std::vector<double> grid;  // interior means, >= 8 points so >= 56 ordered pairs
    double box_lo, box_hi;     // sampling box for random triples
    double chernoff_mu;
    std::vector<double> chernoff_eps;
};

inline std::vector<CheckFamily> reference_families() {
    return {
        {OpedFamily::bernoulli(), {0.02, 0.1, 0.25, 0.4, 0.5, 0.6, 0.75, 0.9, 0.98}, 0.01, 0.99, 0.5, {0.05, 0.1, 0.2}},
        {OpedFamily::poisson(20.0), {0.3, 1.0, 2.0, 4.0, 7.0, 10.0, 15.0, 19.5}, 0.1, 19.9, 4.0, {0.5, 1.0, 2.0}},
        {OpedFamily::gaussian(1.5), {-6.0, -3.0, -1.0, -0.2, 0.0, 0.5, 2.0, 5.0}, -10.0, 10.0, 0.0, {0.1, 0.3, 0.6}},
        {OpedFamily::gamma(2.0, 10.0), {0.2, 0.5, 1.0, 2.0, 3.5, 5.0, 7.5, 9.8}, 0.1, 9.9, 2.0, {0.2, 0.5, 1.0}},
        {OpedFamily::inverse_gaussian(2.0, 5.0), {0.15, 0.4, 0.8, 1.0, 1.6, 2.5, 3.5, 4.9}, 0.2, 4.8, 1.0, {0.1, 0.3, 0.5}},
    };
}

namespace detail {

inline std::string pair_label(const OpedFamily& f, std::string_view what, std::initializer_list<double> xs) {
    std::ostringstream os;
    os.precision(6);
    os << f.describe() << " " << what << "(";
    bool first = true;
    for (double x : xs) {
        os << (first ? "" : ";") << x;
        first = false;
    }
    os << ")";
    return os.str();
}

}  // namespace detail

// Closed-form kl against the quadrature oracle: |kl - quad| <= 1e-8 max(1, kl).
inline std::vector<CheckRow> check_kl_oracle(const CheckSettings& = {}) {
    std::vector<CheckRow> rows;
    for (const auto& ref : reference_families()) {
        for (double a : ref.grid) {
            for (double b : ref.grid) {
                if (a == b) continue;
                const double closed = ref.family.kl(a, b);
                const double quad = ref.family.kl_quadrature(a, b);
                const bool ok = std::abs(closed - quad) <= 1e-8 * std::max(1.0, closed);
                rows.push_back({detail::pair_label(ref.family, "kl", {a, b}), closed, quad, ok});
            }
        }
    }
    return rows;
}

// |kl(a,b) + kl(b,c) - kl(a,c) + (mu_b - mu_a)(theta_c - theta_b)| <= 1e-10 on random triples.
inline std::vector<CheckRow> check_bregman(const CheckSettings& settings = {}) {
    std::vector<CheckRow> rows;
    RandomStream rng(settings.seed);
    for (const auto& ref : reference_families()) {
        const double width = ref.box_hi - ref.box_lo;
        for (std::size_t i = 0; i < settings.bregman_triples; ++i) {
            const double a = ref.box_lo + width * rng.uniform();
            const double b = ref.box_lo + width * rng.uniform();
            const double c = ref.box_lo + width * rng.uniform();
            const double residual = ref.family.bregman_residual(a, b, c);
            rows.push_back({detail::pair_label(ref.family, "bregman", {a, b, c}), std::abs(residual), 1e-10,
                            std::abs(residual) <= 1e-10});
        }
    }
    return rows;
}

// Both lower-bound modes must not exceed kl on the grid. Where the bound is
// exact (gaussian, lipschitz mode) equality is allowed up to rounding.
inline std::vector<CheckRow> check_pinsker(const CheckSettings& = {}) {
    std::vector<CheckRow> rows;
    for (const auto& ref : reference_families()) {
        for (double a : ref.grid) {
            for (double b : ref.grid) {
                const double div = ref.family.kl(a, b);
                for (auto mode : {LowerBoundMode::lipschitz, LowerBoundMode::max_variance}) {
                    const double lower = ref.family.kl_lower_bound(a, b, mode);
                    const bool ok = lower <= div * (1.0 + 1e-12);
                    rows.push_back({detail::pair_label(ref.family,
                                                       mode == LowerBoundMode::lipschitz ? "pinsker_lip" : "pinsker_vmax",
                                                       {a, b}),
                                    lower, div, ok});
                }
            }
        }
    }
    return rows;
}

// Monte Carlo tail frequencies against the Chernoff bound with 3 SE slack,
// N in {5, 20, 100}, three epsilons, both tails.
inline std::vector<CheckRow> check_chernoff(const CheckSettings& settings = {}) {
    std::vector<CheckRow> rows;
    std::uint64_t seed = settings.seed;
    for (const auto& ref : reference_families()) {
        for (std::size_t n : {std::size_t{5}, std::size_t{20}, std::size_t{100}}) {
            const auto results =
                chernoff_sweep(ref.family, ref.chernoff_mu, ref.chernoff_eps, n, settings.chernoff_reps, seed++);
            for (const auto& r : results) {
                std::ostringstream label;
                label.precision(6);
                label << ref.family.describe() << " chernoff_" << (r.tail == Tail::lower ? "lower" : "upper")
                      << "(mu=" << ref.chernoff_mu << ";eps=" << r.epsilon << ";N=" << n << ")";
                rows.push_back({label.str(), r.frequency, r.bound + 3.0 * r.standard_error, r.holds(3.0)});
            }
        }
    }
    return rows;
}

// Geometric-log series against 5 ln(T a v e) / a.
inline std::vector<CheckRow> check_geolog(const CheckSettings& = {}) {
    std::vector<CheckRow> rows;
    for (std::size_t T : {std::size_t{10}, std::size_t{100}, std::size_t{1000}, std::size_t{10000}}) {
        const double t = static_cast<double>(T);
        for (double a : {2.0 / t, 0.01, 0.1, 1.0, 5.0}) {
            if (!(a > 1.0 / t)) continue;
            const auto r = geo_log_sum_check(T, a);
            std::ostringstream label;
            label.precision(6);
            label << "geolog(T=" << T << ";a=" << a << ")";
            rows.push_back({label.str(), r.lhs, r.rhs, r.lhs <= r.rhs});
        }
    }
    return rows;
}

inline const std::vector<std::string>& check_suite_names() {
    static const std::vector<std::string> names{"kl_oracle", "bregman", "pinsker", "chernoff", "geolog"};
    return names;
}

// Unknown names yield std::nullopt.
inline std::optional<std::vector<CheckRow>> run_check_suite(std::string_view suite, const CheckSettings& settings = {}) {
    if (suite == "kl_oracle") return check_kl_oracle(settings);
    if (suite == "bregman") return check_bregman(settings);
    if (suite == "pinsker") return check_pinsker(settings);
    if (suite == "chernoff") return check_chernoff(settings);
    if (suite == "geolog") return check_geolog(settings);
    return std::nullopt;
}

inline bool all_pass(const std::vector<CheckRow>& rows) {
    return std::all_of(rows.begin(), rows.end(), [](const CheckRow& r) { return r.pass; });
}

}  // namespace expklms
