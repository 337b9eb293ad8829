#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "expklms/policies.hpp"

using namespace expklms;

namespace {

// Drives a state to the given per-arm (count, mean) pairs.
PolicyState make_state(const OpedFamily& family, const std::vector<std::pair<int, double>>& arms) {
    PolicyState s(family, arms.size());
    for (std::size_t a = 0; a < arms.size(); ++a) {
        for (int i = 0; i < arms[a].first; ++i) s.update(a, arms[a].second);
    }
    return s;
}

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

}  // namespace

TEST(Temperature, ValuesAndInvariants) {
    const auto shift = TemperatureFn::shift_by_one();
    const auto half = TemperatureFn::scaled(2.0);
    const auto id = TemperatureFn::identity();
    EXPECT_EQ(shift(1), 0.0);
    EXPECT_EQ(shift(5), 4.0);
    EXPECT_EQ(half(5), 2.5);
    EXPECT_EQ(id(5), 5.0);
    EXPECT_THROW(TemperatureFn::scaled(1.0), DomainError);
    for (const auto& L : {shift, half, id, TemperatureFn::scaled(7.5)}) {
        for (std::uint64_t k = 1; k < 200; ++k) {
            EXPECT_GE(L(k), 0.0);
            EXPECT_LE(L(k), static_cast<double>(k));
            EXPECT_LE(L(k), L(k + 1));
        }
    }
}

TEST(PolicyState, UpdateBookkeeping) {
    PolicyState s(OpedFamily::bernoulli(), 2);
    s.update(0, 0.5);
    s.update(1, 0.2);
    s.update(0, 1.0);
    EXPECT_EQ(s.counts()[0], 2u);
    EXPECT_EQ(s.counts()[1], 1u);
    EXPECT_DOUBLE_EQ(s.reward_sums()[0], 1.5);
    EXPECT_DOUBLE_EQ(s.reward_sums()[1], 0.2);
    EXPECT_EQ(s.t(), 3u);
    EXPECT_EQ(s.counts()[0] + s.counts()[1], s.t());
    EXPECT_THROW(s.update(2, 1.0), DomainError);
    EXPECT_EQ(s.t(), 3u);

    PolicyState c(OpedFamily::bernoulli(), 3);
    for (int i = 0; i < 10; ++i) c.update(1, 0.7);
    EXPECT_DOUBLE_EQ(c.empirical_mean(1), 0.7);
    EXPECT_THROW(c.empirical_mean(0), PreconditionError);
}

TEST(ActionDistribution, Examples) {
    const auto b = OpedFamily::bernoulli();
    auto p = action_distribution(make_state(b, {{4, 0.5}, {9, 0.5}}), TemperatureFn::shift_by_one());
    EXPECT_NEAR(p[0], 0.5, 1e-12);
    EXPECT_NEAR(p[1], 0.5, 1e-12);

    p = action_distribution(make_state(b, {{1, 0.0}, {1, 1.0}, {1, 0.3}}), TemperatureFn::shift_by_one());
    for (double x : p) EXPECT_NEAR(x, 1.0 / 3.0, 1e-12);

    // exp(-2 kl(0.4, 0.8)) / (1 + exp(-2 kl(0.4, 0.8))), evaluated with mpmath.
    p = action_distribution(make_state(b, {{5, 0.8}, {3, 0.4}}), TemperatureFn::shift_by_one());
    EXPECT_NEAR(p[1], 0.31781812804000418, 1e-9);
    EXPECT_NEAR(p[0] + p[1], 1.0, 1e-12);
}

TEST(ActionDistribution, RequiresEveryArmPulled) {
    auto s = make_state(OpedFamily::bernoulli(), {{2, 0.5}, {0, 0.0}});
    EXPECT_THROW(action_distribution(s, TemperatureFn::shift_by_one()), PreconditionError);
}

TEST(ActionDistribution, KlMsReduction) {
    const auto b = OpedFamily::bernoulli();
    const auto s = make_state(b, {{7, 0.6}, {12, 0.75}, {3, 0.2}});
    const auto p = action_distribution(s, TemperatureFn::identity());
    std::vector<double> w{std::exp(-7 * b.kl(0.6, 0.75)), 1.0, std::exp(-3 * b.kl(0.2, 0.75))};
    const double m = sum(w);
    for (std::size_t a = 0; a < 3; ++a) EXPECT_NEAR(p[a], w[a] / m, 1e-12);
}

TEST(ActionDistribution, InfiniteKlGetsZeroMass) {
    const auto b = OpedFamily::bernoulli();
    // Best empirical mean 1.0 makes kl(p, 1) infinite for every p < 1.
    const auto p = action_distribution(make_state(b, {{3, 1.0}, {4, 0.5}, {2, 1.0}}), TemperatureFn::shift_by_one());
    EXPECT_EQ(p[1], 0.0);
    EXPECT_NEAR(p[0], 0.5, 1e-15);
    EXPECT_NEAR(p[2], 0.5, 1e-15);
    // With L(N) = 0 the weight is 1 regardless of the kl term.
    const auto q = action_distribution(make_state(b, {{3, 1.0}, {1, 0.0}}), TemperatureFn::shift_by_one());
    EXPECT_NEAR(q[1], 0.5, 1e-15);
}

TEST(ActionDistribution, UnderflowFlushesToZero) {
    const auto g = OpedFamily::gaussian(0.01);
    const auto p = action_distribution(make_state(g, {{50, 1.0}, {50, 0.0}}), TemperatureFn::shift_by_one());
    EXPECT_EQ(p[1], 0.0);
    EXPECT_EQ(p[0], 1.0);
}

TEST(ActionDistribution, PropertiesOnRandomStates) {
    RandomStream rng(31);
    const std::vector<OpedFamily> families{OpedFamily::bernoulli(), OpedFamily::poisson(20.0), OpedFamily::gaussian(1.0),
                                           OpedFamily::gamma(2.0, 10.0), OpedFamily::inverse_gaussian(1.0, 5.0)};
    const std::vector<TemperatureFn> temps{TemperatureFn::shift_by_one(), TemperatureFn::scaled(3.0),
                                           TemperatureFn::identity()};
    for (int iter = 0; iter < 400; ++iter) {
        const auto& family = families[iter % families.size()];
        const auto& temp = temps[iter % temps.size()];
        const std::size_t k = 2 + rng.uniform_index(6);
        PolicyState s(family, k);
        for (std::size_t a = 0; a < k; ++a) s.update(a, family.sample(family.kind() == FamilyKind::gaussian ? 0.0 : 0.5, rng));
        const std::size_t extra = rng.uniform_index(60);
        for (std::size_t i = 0; i < extra; ++i) {
            const auto a = rng.uniform_index(k);
            s.update(a, family.sample(family.kind() == FamilyKind::gaussian ? 0.1 * a : 0.3 + 0.02 * a, rng));
        }
        const auto p = action_distribution(s, temp);
        EXPECT_NEAR(sum(p), 1.0, 1e-12);
        double best_mean = -1e300;
        for (std::size_t a = 0; a < k; ++a) best_mean = std::max(best_mean, s.empirical_mean(a));
        const double pmax = *std::max_element(p.begin(), p.end());
        for (std::size_t a = 0; a < k; ++a) {
            EXPECT_GE(p[a], 0.0);
            EXPECT_LE(p[a], 1.0);
            if (s.empirical_mean(a) == best_mean) {
                EXPECT_EQ(p[a], pmax);
            }
        }
    }
}

TEST(ActionDistribution, MonotoneSuppressionInPullCount) {
    // Weight of an empirically worse arm, with its mean fixed, as its count grows.
    const auto b = OpedFamily::bernoulli();
    for (const auto& temp : {TemperatureFn::shift_by_one(), TemperatureFn::scaled(2.0), TemperatureFn::identity()}) {
        double previous = 1.0;
        for (int n = 1; n <= 40; ++n) {
            const auto p = action_distribution(make_state(b, {{10, 0.7}, {n, 0.5}}), temp);
            EXPECT_LE(p[1], previous + 1e-15);
            previous = p[1];
        }
    }
}

TEST(SelectArm, RoundRobinThenSampling) {
    RandomStream rng(4);
    PolicyState s(OpedFamily::bernoulli(), 5);
    const auto temp = TemperatureFn::shift_by_one();
    EXPECT_EQ(select_arm(s, temp, rng), 0u);
    for (std::size_t a = 0; a < 3; ++a) s.update(a, 0.5);
    EXPECT_EQ(select_arm(s, temp, rng), 3u);
}

TEST(SelectArm, InverseCdfEdges) {
    const std::vector<double> w{0.0, 0.5, 1.0};
    EXPECT_EQ(inverse_cdf_pick(w, 1.5, 0.0), 1u);
    EXPECT_EQ(inverse_cdf_pick(w, 1.5, 0.33), 1u);
    EXPECT_EQ(inverse_cdf_pick(w, 1.5, 0.34), 2u);
    EXPECT_EQ(inverse_cdf_pick(w, 1.5, std::nextafter(1.0, 0.0)), 2u);
}

TEST(SelectArm, EmpiricalFrequenciesFollowDistribution) {
    const auto b = OpedFamily::bernoulli();
    const auto s = make_state(b, {{5, 0.8}, {3, 0.4}, {2, 0.6}});
    const auto temp = TemperatureFn::shift_by_one();
    const auto p = action_distribution(s, temp);
    RandomStream rng(8);
    constexpr int n = 200'000;
    std::vector<int> hits(3, 0);
    std::vector<double> scratch(3);
    for (int i = 0; i < n; ++i) ++hits[select_arm(s, temp, rng, scratch)];
    for (std::size_t a = 0; a < 3; ++a) {
        EXPECT_LE(std::abs(hits[a] / double(n) - p[a]), 5.0 * std::sqrt(p[a] * (1 - p[a]) / n));
    }
}

TEST(KlUcb, IndexExamples) {
    const auto b = OpedFamily::bernoulli();
    EXPECT_EQ(klucb_upper(b, 0.37, 0.0), 0.37);
    EXPECT_NEAR(klucb_upper(b, 0.5, b.kl(0.5, 0.9)), 0.9, 1e-6);
    EXPECT_NEAR(klucb_upper(OpedFamily::gaussian(1.0), 0.0, 0.5), 1.0, 1e-9);
    EXPECT_EQ(klucb_upper(b, 1.0, 0.3), 1.0);
    // Poisson index is capped at M when the budget reaches past it.
    EXPECT_EQ(klucb_upper(OpedFamily::poisson(5.0), 4.0, 100.0), 5.0);
    const double q = klucb_upper(OpedFamily::poisson(50.0), 4.0, 0.7);
    EXPECT_NEAR(OpedFamily::poisson(50.0).kl(4.0, q), 0.7, 1e-8);
}

TEST(KlUcb, StateIndexUsesLogT) {
    const auto b = OpedFamily::bernoulli();
    const auto s = make_state(b, {{1, 0.5}});
    // t = 1: ln(1) = 0, index equals the mean.
    EXPECT_EQ(klucb_index(s, 0), 0.5);
    const auto s2 = make_state(b, {{4, 0.5}, {6, 0.2}});
    EXPECT_NEAR(b.kl(0.5, klucb_index(s2, 0)), std::log(10.0) / 4.0, 1e-8);
}

TEST(KlUcb, ArgmaxBreaksTiesLow) {
    const auto b = OpedFamily::bernoulli();
    const auto s = make_state(b, {{3, 0.5}, {3, 0.5}, {3, 0.1}});
    EXPECT_EQ(select_arm_klucb(s), 0u);
    PolicyState fresh(b, 3);
    EXPECT_EQ(select_arm_klucb(fresh), 0u);
}

TEST(Uniform, SingleArmAndFrequencies) {
    RandomStream rng(12);
    PolicyState one(OpedFamily::bernoulli(), 1);
    EXPECT_EQ(select_arm_uniform(one, rng), 0u);
    one.update(0, 1.0);
    EXPECT_EQ(select_arm_uniform(one, rng), 0u);

    auto s = make_state(OpedFamily::bernoulli(), {{1, 0.5}, {1, 0.5}, {1, 0.5}, {1, 0.5}});
    constexpr int n = 100'000;
    std::vector<int> hits(4, 0);
    for (int i = 0; i < n; ++i) ++hits[select_arm_uniform(s, rng)];
    const double se = std::sqrt(0.25 * 0.75 / n);
    for (int h : hits) EXPECT_LE(std::abs(h / double(n) - 0.25), 5 * se);
}

TEST(Determinism, SameSeedSameActions) {
    const auto b = OpedFamily::bernoulli();
    const auto s = make_state(b, {{5, 0.8}, {3, 0.4}, {2, 0.6}});
    for (const PolicyKind& kind : {PolicyKind{ExpKlMs{}}, PolicyKind{UniformPolicy{}}}) {
        RandomStream r1(42), r2(42);
        Agent a1(kind, b, 3), a2(kind, b, 3);
        for (int i = 0; i < 500; ++i) {
            const auto x = a1.select(r1);
            const auto y = a2.select(r2);
            ASSERT_EQ(x, y);
            a1.observe(x, b.sample(0.5, r1));
            a2.observe(y, b.sample(0.5, r2));
        }
    }
}
