#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "expklms/analysis.hpp"

using namespace expklms;

// Regression values below were evaluated term by term with mpmath at 30 digits.
TEST(Theorem1Bound, TwoArmBernoulliRegression) {
    const BanditInstance inst(OpedFamily::bernoulli(), {0.9, 0.8});
    const auto r = theorem1_bound(inst, 100'000, 0.0, 0.25);
    ASSERT_EQ(r.terms.size(), 4u);
    EXPECT_EQ(r.terms[0].value, 0.0);
    EXPECT_NEAR(r.terms[1].value, 67.233782904110827, 1e-9);
    EXPECT_NEAR(r.terms[2].value, 59.210579884025282, 1e-9);
    EXPECT_NEAR(r.terms[3].value, 2852.1937119666919, 1e-8);
    EXPECT_NEAR(r.value, 2978.6380747548280, 1e-8);
    double total = 0.0;
    for (const auto& t : r.terms) total += t.value;
    EXPECT_EQ(total, r.value);
}

TEST(Theorem1Bound, EmptySumsAndZeroGapArms) {
    const BanditInstance inst(OpedFamily::bernoulli(), {0.9, 0.8});
    const auto r = theorem1_bound(inst, 100'000, 0.2, 0.25);
    EXPECT_DOUBLE_EQ(r.value, 100'000 * 0.2);

    const BanditInstance with_twin(OpedFamily::bernoulli(), {0.9, 0.9, 0.8});
    EXPECT_DOUBLE_EQ(theorem1_bound(with_twin, 5000, 0.0, 0.1).value, theorem1_bound(inst, 5000, 0.0, 0.1).value);
}

TEST(Theorem1Bound, RejectsBadTuning) {
    const BanditInstance inst(OpedFamily::bernoulli(), {0.9, 0.8});
    EXPECT_THROW(theorem1_bound(inst, 100, -0.1, 0.25), DomainError);
    EXPECT_THROW(theorem1_bound(inst, 100, 0.0, 0.0), DomainError);
    EXPECT_THROW(theorem1_bound(inst, 100, 0.0, 0.3), DomainError);
}

TEST(Theorem1Bound, NondecreasingInHorizon) {
    const std::vector<BanditInstance> instances{
        BanditInstance(OpedFamily::bernoulli(), {0.9, 0.8}),
        BanditInstance(OpedFamily::bernoulli(), {0.5, 0.45, 0.4, 0.35}),
        BanditInstance(OpedFamily::gaussian(1.0), {1.0, 0.5, 0.0}),
        BanditInstance(OpedFamily::poisson(20.0), {5.0, 4.0}),
        BanditInstance(OpedFamily::inverse_gaussian(2.0, 5.0), {1.0, 2.0, 0.4}),
    };
    for (const auto& inst : instances) {
        for (double delta : {0.0, 0.01, 0.07}) {
            for (double c : {0.05, 0.25}) {
                double previous = 0.0;
                for (std::size_t T = 10; T <= 10'000'000; T *= 3) {
                    const double v = theorem1_bound(inst, T, delta, c).value;
                    EXPECT_GE(v, previous) << inst.describe();
                    previous = v;
                }
            }
        }
    }
}

TEST(Theorem1Bound, BestOverGridIsNoWorseThanDeltaZero) {
    const BanditInstance inst(OpedFamily::bernoulli(), {0.5, 0.45, 0.4, 0.35});
    const auto grid = delta_grid(inst);
    EXPECT_EQ(grid.size(), 41u);
    EXPECT_EQ(grid.front(), 0.0);
    EXPECT_NEAR(grid[1], 1e-3 * 0.05, 1e-15);
    EXPECT_NEAR(grid.back(), 0.15, 1e-12);
    const auto best = theorem1_bound_best(inst, 10'000);
    EXPECT_LE(best.value, theorem1_bound(inst, 10'000, 0.0, 0.25).value);
    EXPECT_LE(best.value, 10'000 * grid.back());
}

TEST(AsymptoticConstant, Examples) {
    EXPECT_NEAR(asymptotic_constant(BanditInstance(OpedFamily::bernoulli(), {0.9, 0.8})), 2.2520996985245290, 1e-12);
    EXPECT_DOUBLE_EQ(asymptotic_constant(BanditInstance(OpedFamily::gaussian(1.0), {1.0, 0.0})), 2.0);
    EXPECT_EQ(asymptotic_constant(BanditInstance(OpedFamily::gaussian(1.0), {0.3, 0.3})), 0.0);
}

TEST(MinimaxBound, Examples) {
    EXPECT_EQ(minimax_bound(OpedFamily::bernoulli(), 1, 0.9, 10'000, MinimaxFlavor::adaptive), 0.0);
    const BanditInstance inst(OpedFamily::bernoulli(), {0.9, 0.5});
    EXPECT_NEAR(minimax_bound(inst, 10'000, MinimaxFlavor::adaptive), 35.322300675464241, 1e-10);
    const BanditInstance edge(OpedFamily::bernoulli(), {0.99, 0.5, 0.3});
    const double ratio = minimax_bound(edge, 1000, MinimaxFlavor::max_variance) /
                         minimax_bound(edge, 1000, MinimaxFlavor::adaptive);
    EXPECT_NEAR(ratio, 5.0251890762960604, 1e-10);
}

TEST(SubUcbYardstick, SumsOverSuboptimalArms) {
    const BanditInstance inst(OpedFamily::gaussian(1.0), {1.0, 0.5, 0.0});
    EXPECT_DOUBLE_EQ(sub_ucb_yardstick(inst, 100), std::log(100.0) / 0.5 + 0.5 + std::log(100.0) + 1.0);
}

TEST(GeoLogSum, Examples) {
    auto r = geo_log_sum_check(1, 2.0);
    EXPECT_EQ(r.lhs, 0.0);
    EXPECT_GT(r.rhs, 0.0);
    r = geo_log_sum_check(100, 1.0);
    EXPECT_NEAR(r.lhs, 2.4880089738949105, 1e-12);
    EXPECT_NEAR(r.rhs, 5.0 * std::log(100.0), 1e-12);
    r = geo_log_sum_check(10'000, 0.01);
    EXPECT_NEAR(r.lhs, 512.72380432874190, 1e-9);
    EXPECT_NEAR(r.rhs, 5.0 * std::log(100.0) / 0.01, 1e-9);
    EXPECT_LE(r.lhs, r.rhs);
    EXPECT_THROW(geo_log_sum_check(100, 0.01), PreconditionError);
    EXPECT_THROW(geo_log_sum_check(0, 1.0), PreconditionError);
}

TEST(Chernoff, Examples) {
    const auto zero = chernoff_check(OpedFamily::bernoulli(), 0.5, 0.0, 10, 10'000, 1);
    EXPECT_EQ(zero.bound, 1.0);
    EXPECT_TRUE(zero.holds());

    const auto b = OpedFamily::bernoulli();
    const auto r = chernoff_check(b, 0.5, 0.2, 10, 100'000, 2);
    EXPECT_DOUBLE_EQ(r.bound, std::exp(-10 * b.kl(0.3, 0.5)));
    EXPECT_TRUE(r.holds());

    // Exact normal tail Phi(-2) as the oracle for the frequency.
    const auto g = chernoff_check(OpedFamily::gaussian(1.0), 0.0, 1.0, 4, 200'000, 3);
    EXPECT_DOUBLE_EQ(g.bound, std::exp(-2.0));
    const double phi = 0.5 * std::erfc(2.0 / std::numbers::sqrt2);
    EXPECT_NEAR(phi, 0.022750131948179195, 1e-15);
    EXPECT_LE(std::abs(g.frequency - phi), 5.0 * std::sqrt(phi * (1 - phi) / 200'000));
    EXPECT_TRUE(g.holds());

    const auto up = chernoff_check(OpedFamily::gaussian(1.0), 0.0, 1.0, 4, 200'000, 3, Tail::upper);
    EXPECT_EQ(up.tail, Tail::upper);
    EXPECT_LE(std::abs(up.frequency - phi), 5.0 * std::sqrt(phi * (1 - phi) / 200'000));
}

TEST(Chernoff, Preconditions) {
    EXPECT_THROW(chernoff_check(OpedFamily::bernoulli(), 0.5, 0.6, 10, 10'000, 1), DomainError);
    EXPECT_THROW(chernoff_check(OpedFamily::bernoulli(), 0.5, 0.1, 0, 10'000, 1), PreconditionError);
    EXPECT_THROW(chernoff_check(OpedFamily::bernoulli(), 0.5, 0.1, 10, 100, 1), PreconditionError);
}
