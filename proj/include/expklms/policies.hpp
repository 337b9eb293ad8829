#pragma once

// Arm-selection rules. Arms are indexed 0..K-1.
//
// Exp-KL-MS family: after one forced pull per arm (in index order), arm a is
// drawn with probability proportional to
//
//     exp(-L(N_a) * kl(mu_hat_a, mu_hat_max))
//
// where L is the inverse-temperature function. L(k) = k - 1 is Exp-KL-MS,
// L(k) = k/d the attenuated variant, and L(k) = k reduces to KL-MS / MS.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <sstream>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "expklms/error.hpp"
#include "expklms/oped.hpp"
#include "expklms/random.hpp"

namespace expklms {

class TemperatureFn {
public:
    enum class Kind { shift_by_one, scaled, identity };

    static TemperatureFn shift_by_one() { return TemperatureFn(Kind::shift_by_one, 1.0); }
    static TemperatureFn identity() { return TemperatureFn(Kind::identity, 1.0); }
    static TemperatureFn scaled(double d) {
        if (!(d > 1.0) || !std::isfinite(d)) {
            throw DomainError("scaled temperature needs d > 1, got " + std::to_string(d));
        }
        return TemperatureFn(Kind::scaled, d);
    }

    Kind kind() const noexcept { return kind_; }
    double divisor() const noexcept { return d_; }

    double operator()(std::uint64_t pulls) const noexcept {
        const auto k = static_cast<double>(pulls);
        switch (kind_) {
            case Kind::shift_by_one: return pulls == 0 ? 0.0 : k - 1.0;
            case Kind::scaled: return k / d_;
            case Kind::identity: return k;
        }
        return k;
    }

    std::string describe() const {
        switch (kind_) {
            case Kind::shift_by_one: return "L(k)=k-1";
            case Kind::identity: return "L(k)=k";
            case Kind::scaled: {
                std::ostringstream os;
                os.precision(17);
                os << "L(k)=k/" << d_;
                return os.str();
            }
        }
        return "?";
    }

    bool operator==(const TemperatureFn&) const = default;

private:
    TemperatureFn(Kind kind, double d) : kind_(kind), d_(d) {}
    Kind kind_;
    double d_;
};

// Sufficient statistics of one episode: pull counts and reward sums per arm.
class PolicyState {
public:
    PolicyState(OpedFamily family, std::size_t arms)
        : family_(family), counts_(arms, 0), sums_(arms, 0.0) {
        if (arms == 0) throw DomainError("policy state needs at least one arm");
    }

    const OpedFamily& family() const noexcept { return family_; }
    std::size_t arms() const noexcept { return counts_.size(); }
    std::uint64_t t() const noexcept { return t_; }
    std::span<const std::uint64_t> counts() const noexcept { return counts_; }
    std::span<const double> reward_sums() const noexcept { return sums_; }

    bool all_pulled() const noexcept { return t_ >= counts_.size() &&
        std::all_of(counts_.begin(), counts_.end(), [](auto c) { return c > 0; }); }

    double empirical_mean(std::size_t arm) const {
        check_arm(arm);
        if (counts_[arm] == 0) {
            throw PreconditionError("empirical mean of arm " + std::to_string(arm) + " before its first pull");
        }
        return sums_[arm] / static_cast<double>(counts_[arm]);
    }

    void update(std::size_t arm, double reward) {
        check_arm(arm);
        ++counts_[arm];
        sums_[arm] += reward;
        ++t_;
    }

private:
    void check_arm(std::size_t arm) const {
        if (arm >= counts_.size()) {
            throw DomainError("arm index " + std::to_string(arm) + " out of range [0, " +
                              std::to_string(counts_.size()) + ")");
        }
    }

    OpedFamily family_;
    std::vector<std::uint64_t> counts_;
    std::vector<double> sums_;
    std::uint64_t t_ = 0;
};

// Weights below this are flushed to zero before normalisation.
inline constexpr double weight_floor = 1e-300;

// Unnormalised sampling weights exp(-L(N_a) kl(mu_hat_a, mu_hat_max)); returns
// their sum M_t, which is >= 1 because every empirically best arm has weight 1.
// L(N_a) = 0 yields weight 1 even when the kl term is +inf.
inline double sampling_weights(const PolicyState& state, const TemperatureFn& temperature,
                               std::span<double> out) {
    const std::size_t k = state.arms();
    if (!state.all_pulled()) {
        throw PreconditionError("action distribution requires every arm to be pulled at least once");
    }
    if (out.size() != k) throw DomainError("weight buffer size does not match arm count");

    const auto counts = state.counts();
    const auto sums = state.reward_sums();
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < k; ++a) {
        out[a] = sums[a] / static_cast<double>(counts[a]);
        best = std::max(best, out[a]);
    }
    double total = 0.0;
    for (std::size_t a = 0; a < k; ++a) {
        const double mean = out[a];
        double w = 1.0;
        if (mean != best) {
            const double inv_temp = temperature(counts[a]);
            if (inv_temp > 0.0) {
                const double div = state.family().kl_extended(mean, best);
                w = std::isinf(div) ? 0.0 : std::exp(-inv_temp * div);
                if (w < weight_floor) w = 0.0;
            }
        }
        out[a] = w;
        total += w;
    }
    return total;
}

inline std::vector<double> action_distribution(const PolicyState& state, const TemperatureFn& temperature) {
    std::vector<double> p(state.arms());
    const double total = sampling_weights(state, temperature, p);
    for (auto& x : p) x /= total;
    return p;
}

// Inverse-CDF draw on unnormalised weights with a single uniform u in [0, 1):
// the first index whose cumulative weight exceeds u * sum(weights).
inline std::size_t inverse_cdf_pick(std::span<const double> weights, double total, double u) {
    const double target = u * total;
    double cumulative = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t a = 0; a < weights.size(); ++a) {
        if (weights[a] <= 0.0) continue;
        cumulative += weights[a];
        last_positive = a;
        if (cumulative > target) return a;
    }
    return last_positive;
}

// Exp-KL-MS family selection. Round-robin while t < K.
inline std::size_t select_arm(const PolicyState& state, const TemperatureFn& temperature,
                              RandomStream& rng, std::span<double> scratch) {
    if (state.t() < state.arms()) return static_cast<std::size_t>(state.t());
    const double total = sampling_weights(state, temperature, scratch);
    return inverse_cdf_pick(scratch, total, rng.uniform());
}

inline std::size_t select_arm(const PolicyState& state, const TemperatureFn& temperature, RandomStream& rng) {
    std::vector<double> scratch(state.arms());
    return select_arm(state, temperature, rng, scratch);
}

// sup{q in mean space : kl(mean, q) <= budget}, by bisection to 1e-9.
inline double klucb_upper(const OpedFamily& family, double mean, double budget) {
    if (!(budget >= 0.0)) throw DomainError("kl-UCB budget must be nonnegative");
    if (budget == 0.0) return mean;
    const auto space = family.mean_space();
    if (mean >= space.upper) return mean;

    double lo = mean;
    double hi;
    if (std::isfinite(space.upper)) {
        hi = space.upper;
        if (family.kl_extended(mean, hi) <= budget) return hi;
    } else {
        double step = 1.0;
        hi = mean + step;
        int expansions = 0;
        while (family.kl_extended(mean, hi) <= budget) {
            lo = hi;
            step *= 2.0;
            hi = mean + step;
            if (++expansions > 200) throw NumericalError("kl-UCB: could not bracket the index");
        }
    }
    constexpr double tol = 1e-9;
    for (int iter = 0; iter < 200; ++iter) {
        if (hi - lo <= tol) return lo;
        const double mid = 0.5 * (lo + hi);
        if (family.kl_extended(mean, mid) <= budget) lo = mid; else hi = mid;
    }
    throw NumericalError("kl-UCB bisection did not converge within 200 iterations");
}

// kl-UCB index with exploration budget ln(t) / N_arm.
inline double klucb_index(const PolicyState& state, std::size_t arm) {
    const double mean = state.empirical_mean(arm);
    const double t = static_cast<double>(std::max<std::uint64_t>(state.t(), 1));
    return klucb_upper(state.family(), mean, std::log(t) / static_cast<double>(state.counts()[arm]));
}

inline std::size_t select_arm_klucb(const PolicyState& state) {
    if (state.t() < state.arms()) return static_cast<std::size_t>(state.t());
    std::size_t best = 0;
    double best_index = -std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < state.arms(); ++a) {
        const double idx = klucb_index(state, a);
        if (idx > best_index) {
            best_index = idx;
            best = a;
        }
    }
    return best;
}

// Uniform baseline; keeps the same forced round-robin start as the others.
inline std::size_t select_arm_uniform(const PolicyState& state, RandomStream& rng) {
    if (state.t() < state.arms()) return static_cast<std::size_t>(state.t());
    return rng.uniform_index(state.arms());
}

struct ExpKlMs {
    TemperatureFn temperature = TemperatureFn::shift_by_one();
    bool operator==(const ExpKlMs&) const = default;
};
struct KlUcb {
    bool operator==(const KlUcb&) const = default;
};
struct UniformPolicy {
    bool operator==(const UniformPolicy&) const = default;
};

using PolicyKind = std::variant<ExpKlMs, KlUcb, UniformPolicy>;

struct PolicySpec {
    std::string name;
    PolicyKind kind;
};

inline std::string describe(const PolicyKind& kind) {
    struct {
        std::string operator()(const ExpKlMs& p) const { return "exp_kl_ms[" + p.temperature.describe() + "]"; }
        std::string operator()(const KlUcb&) const { return "kl_ucb"; }
        std::string operator()(const UniformPolicy&) const { return "uniform"; }
    } visitor;
    return std::visit(visitor, kind);
}

// An episode's learner: a policy rule plus its state and scratch space.
class Agent {
public:
    Agent(PolicyKind kind, OpedFamily family, std::size_t arms)
        : kind_(std::move(kind)), state_(family, arms), scratch_(arms) {}

    std::size_t select(RandomStream& rng) {
        return std::visit(
            [&](const auto& policy) -> std::size_t {
                using P = std::decay_t<decltype(policy)>;
                if constexpr (std::is_same_v<P, ExpKlMs>) {
                    return select_arm(state_, policy.temperature, rng, scratch_);
                } else if constexpr (std::is_same_v<P, KlUcb>) {
                    return select_arm_klucb(state_);
                } else {
                    return select_arm_uniform(state_, rng);
                }
            },
            kind_);
    }

    void observe(std::size_t arm, double reward) { state_.update(arm, reward); }

    const PolicyState& state() const noexcept { return state_; }

private:
    PolicyKind kind_;
    PolicyState state_;
    std::vector<double> scratch_;
};

}  // namespace expklms
