#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "expklms/error.hpp"
#include "expklms/oped.hpp"
#include "expklms/policies.hpp"
#include "expklms/random.hpp"

namespace expklms {

// A single-family K-armed instance. All means are strictly inside the mean
// space so rewards and kl terms are finite.
class BanditInstance {
public:
    BanditInstance(OpedFamily family, std::vector<double> means)
        : family_(family), means_(std::move(means)) {
        if (means_.size() < 2) throw DomainError("a bandit instance needs at least two arms");
        const auto space = family_.mean_space();
        for (std::size_t a = 0; a < means_.size(); ++a) {
            if (!space.interior(means_[a])) {
                std::ostringstream os;
                os.precision(17);
                os << family_.describe() << ": arm " << a << " mean " << means_[a]
                   << " is not strictly inside the mean space";
                throw DomainError(os.str());
            }
        }
        mu_max_ = *std::max_element(means_.begin(), means_.end());
        gaps_.reserve(means_.size());
        for (double m : means_) gaps_.push_back(mu_max_ - m);
    }

    const OpedFamily& family() const noexcept { return family_; }
    std::size_t arms() const noexcept { return means_.size(); }
    const std::vector<double>& means() const noexcept { return means_; }
    const std::vector<double>& gaps() const noexcept { return gaps_; }
    double mu_max() const noexcept { return mu_max_; }

    std::string describe() const {
        std::ostringstream os;
        os.precision(17);
        os << family_.describe() << "[";
        for (std::size_t a = 0; a < means_.size(); ++a) os << (a ? "," : "") << means_[a];
        os << "]";
        return os.str();
    }

private:
    OpedFamily family_;
    std::vector<double> means_;
    std::vector<double> gaps_;
    double mu_max_;
};

struct RegretTrace {
    std::size_t horizon = 0;
    std::vector<double> cumulative_regret;  // entry t-1 is the pseudo-regret after t rounds
    std::vector<std::uint64_t> final_counts;
    std::uint64_t seed = 0;
    std::vector<std::uint32_t> actions;  // filled only when requested
};

// Pseudo-regret of an arm sequence against the instance's true means.
inline std::vector<double> replay_regret(const BanditInstance& instance, const std::vector<std::uint32_t>& actions) {
    std::vector<double> out;
    out.reserve(actions.size());
    double cumulative = 0.0;
    for (auto a : actions) {
        cumulative += instance.gaps().at(a);
        out.push_back(cumulative);
    }
    return out;
}

inline RegretTrace run_episode(const BanditInstance& instance, const PolicyKind& policy,
                               std::size_t horizon, std::uint64_t seed, bool record_actions = false) {
    if (horizon < instance.arms()) {
        throw ConfigError("horizon " + std::to_string(horizon) + " is shorter than the number of arms " +
                          std::to_string(instance.arms()));
    }
    RandomStream rng(seed);
    Agent agent(policy, instance.family(), instance.arms());
    const auto& family = instance.family();
    const auto& means = instance.means();
    const auto& gaps = instance.gaps();

    RegretTrace trace;
    trace.horizon = horizon;
    trace.seed = seed;
    trace.cumulative_regret.resize(horizon);
    if (record_actions) trace.actions.reserve(horizon);

    double cumulative = 0.0;
    for (std::size_t t = 0; t < horizon; ++t) {
        const std::size_t arm = agent.select(rng);
        const double reward = family.sample_unchecked(means[arm], rng);
        agent.observe(arm, reward);
        cumulative += gaps[arm];
        trace.cumulative_regret[t] = cumulative;
        if (record_actions) trace.actions.push_back(static_cast<std::uint32_t>(arm));
    }
    const auto counts = agent.state().counts();
    trace.final_counts.assign(counts.begin(), counts.end());
    return trace;
}

struct SweepResult {
    std::vector<std::size_t> times;  // 1-based rounds at which statistics are kept
    std::vector<double> mean;
    std::vector<double> std;  // sample standard deviation across replications
    std::size_t n_reps = 0;
    std::uint64_t base_seed = 0;
    std::string instance;
    std::string policy;

    double final_mean() const { return mean.back(); }
    double final_std() const { return std.back(); }
    double final_std_of_mean() const { return std.back() / std::sqrt(static_cast<double>(n_reps)); }
};

struct SweepOptions {
    // Rounds (1-based, strictly increasing, each <= horizon) to keep; empty keeps every round.
    std::vector<std::size_t> times;
    // 0 picks std::thread::hardware_concurrency().
    unsigned threads = 0;
    // Replications run concurrently between two reductions.
    std::size_t block = 64;
};

// Runs n_reps episodes with seeds base_seed + r and reduces them in
// replication order, so the result does not depend on the thread count or on
// the order in which workers finish.
inline SweepResult run_sweep(const BanditInstance& instance, const PolicySpec& policy, std::size_t horizon,
                             std::size_t n_reps, std::uint64_t base_seed, SweepOptions options = {}) {
    if (n_reps == 0) throw ConfigError("n_reps must be at least 1");
    if (horizon < instance.arms()) {
        throw ConfigError("horizon " + std::to_string(horizon) + " is shorter than the number of arms " +
                          std::to_string(instance.arms()));
    }
    SweepResult result;
    result.n_reps = n_reps;
    result.base_seed = base_seed;
    result.instance = instance.describe();
    result.policy = policy.name;
    if (options.times.empty()) {
        result.times.resize(horizon);
        for (std::size_t t = 0; t < horizon; ++t) result.times[t] = t + 1;
    } else {
        result.times = options.times;
        for (std::size_t i = 0; i < result.times.size(); ++i) {
            const auto t = result.times[i];
            if (t == 0 || t > horizon || (i > 0 && t <= result.times[i - 1])) {
                throw ConfigError("sweep time grid must be strictly increasing within [1, horizon]");
            }
        }
    }
    const std::size_t points = result.times.size();
    unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
    const std::size_t block = std::max<std::size_t>(1, options.block);

    // Welford accumulators, updated strictly in replication order.
    std::vector<double> mean(points, 0.0);
    std::vector<double> m2(points, 0.0);
    std::vector<std::vector<double>> slots(std::min(block, n_reps), std::vector<double>(points));

    for (std::size_t start = 0; start < n_reps; start += block) {
        const std::size_t count = std::min(block, n_reps - start);
        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        auto worker = [&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    const auto trace = run_episode(instance, policy.kind, horizon, base_seed + start + i);
                    for (std::size_t j = 0; j < points; ++j) {
                        slots[i][j] = trace.cumulative_regret[result.times[j] - 1];
                    }
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        };
        const unsigned n_workers = static_cast<unsigned>(std::min<std::size_t>(threads, count));
        if (n_workers <= 1) {
            worker();
        } else {
            std::vector<std::jthread> pool;
            pool.reserve(n_workers);
            for (unsigned w = 0; w < n_workers; ++w) pool.emplace_back(worker);
        }
        if (failure) std::rethrow_exception(failure);

        for (std::size_t i = 0; i < count; ++i) {
            const double n = static_cast<double>(start + i + 1);
            for (std::size_t j = 0; j < points; ++j) {
                const double x = slots[i][j];
                const double delta = x - mean[j];
                mean[j] += delta / n;
                m2[j] += delta * (x - mean[j]);
            }
        }
    }

    result.mean = std::move(mean);
    result.std.resize(points);
    for (std::size_t j = 0; j < points; ++j) {
        result.std[j] = n_reps > 1 ? std::sqrt(std::max(0.0, m2[j]) / static_cast<double>(n_reps - 1)) : 0.0;
    }
    return result;
}

}  // namespace expklms
