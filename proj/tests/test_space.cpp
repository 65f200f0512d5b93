#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include <bqd/space.hpp>

using namespace bqd;

TEST(MixedSpace, RejectsInvalidDefinitions)
{
    EXPECT_THROW(MixedSpace({{1., 1.}}), std::invalid_argument);
    EXPECT_THROW(MixedSpace({{0., 1.}}, {{}}), std::invalid_argument);
    EXPECT_THROW(MixedSpace({{0., 1.}}, {{1., 0.5}}), std::invalid_argument);
    EXPECT_THROW(MixedSpace({{0., 1.}}, {}, {0}), std::invalid_argument);
    MixedSpace s({{0., 1.}, {-2., 3.}}, {{0.1, 0.2, 0.7}}, {4, 2});
    EXPECT_EQ(s.dim_continuous(), 2u);
    EXPECT_EQ(s.dim_discrete(), 1u);
    EXPECT_EQ(s.dim_categorical(), 2u);
    EXPECT_EQ(s.level_count(0), 3);
    EXPECT_EQ(s.level_count(1), 4);
    EXPECT_EQ(s.level_count(2), 2);
}

TEST(MixedSpace, Contains)
{
    MixedSpace s({{0., 1.}}, {{1., 2.}}, {3});
    EXPECT_TRUE(s.contains({{0.5}, {1}, {2}}));
    EXPECT_FALSE(s.contains({{1.5}, {1}, {2}}));
    EXPECT_FALSE(s.contains({{0.5}, {2}, {2}}));
    EXPECT_FALSE(s.contains({{0.5}, {1}, {3}}));
    EXPECT_FALSE(s.contains({{0.5, 0.5}, {1}, {2}}));
}

TEST(Normalize, Examples)
{
    MixedSpace s({{-5., 5.}, {3.5, 6.}}, {}, {2});
    MixedPoint p{{0., 6.}, {}, {1}};
    auto u = normalize(s, p);
    EXPECT_EQ(u.continuous[0], 0.5);
    EXPECT_EQ(u.continuous[1], 1.0);
    EXPECT_EQ(u.categorical, p.categorical);
    EXPECT_EQ(normalize(s, MixedPoint{{-5., 3.5}, {}, {0}}).continuous[0], 0.0);
}

TEST(Normalize, RoundTrip)
{
    MixedSpace s({{-5., 5.}, {3.5, 6.}, {-1e-3, 2e-3}});
    std::mt19937_64 rng(3);
    for (const auto& p : lhs_sample(s, 200, 11)) {
        auto back = denormalize(s, normalize(s, p));
        for (std::size_t i = 0; i < 3; ++i)
            EXPECT_NEAR(back.continuous[i], p.continuous[i], 1e-12 * (1. + std::abs(p.continuous[i])));
    }
    auto hi = denormalize(s, MixedPoint{{1., 1., 1.}, {}, {}});
    EXPECT_EQ(hi.continuous[1], 6.);
}

TEST(LhsSample, OnePointPerStratum)
{
    MixedSpace s({{0., 1.}});
    auto pts = lhs_sample(s, 4, 7);
    std::vector<int> strata;
    for (const auto& p : pts)
        strata.push_back(static_cast<int>(p.continuous[0] * 4));
    std::sort(strata.begin(), strata.end());
    EXPECT_EQ(strata, (std::vector<int>{0, 1, 2, 3}));
}

TEST(LhsSample, MarginalStratificationOnRandomSpaces)
{
    std::mt19937_64 rng(123);
    std::uniform_real_distribution<double> u(-10., 10.);
    std::uniform_int_distribution<int> m_dist(1, 40), lv(1, 6);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<Bounds> b;
        for (int d = 0; d < 3; ++d) {
            double lo = u(rng);
            b.push_back({lo, lo + 0.1 + std::abs(u(rng))});
        }
        MixedSpace s(b, {{0., 1., 2.}}, {lv(rng), lv(rng)});
        const auto m = static_cast<std::size_t>(m_dist(rng));
        auto pts = lhs_sample(s, m, rng());
        ASSERT_EQ(pts.size(), m);
        for (const auto& p : pts)
            EXPECT_TRUE(s.contains(p));
        for (std::size_t d = 0; d < 3; ++d) {
            std::vector<std::size_t> count(m, 0);
            for (const auto& p : pts) {
                double t = (p.continuous[d] - b[d].lower) / (b[d].upper - b[d].lower);
                ++count[std::min(m - 1, static_cast<std::size_t>(t * static_cast<double>(m)))];
            }
            for (auto c : count)
                EXPECT_EQ(c, 1u);
        }
    }
}

TEST(LhsSample, CategoricalFrequenciesAreBalanced)
{
    MixedSpace s({}, {}, {2});
    auto pts = lhs_sample(s, 1000, 2024);
    int ones = 0;
    for (const auto& p : pts)
        ones += p.categorical[0];
    EXPECT_GE(ones, 400);
    EXPECT_LE(ones, 600);
}

TEST(LhsSample, DeterministicAndSeedSensitive)
{
    MixedSpace s({{0., 1.}, {0., 2.}}, {}, {3});
    EXPECT_EQ(lhs_sample(s, 10, 5), lhs_sample(s, 10, 5));
    EXPECT_NE(lhs_sample(s, 10, 5), lhs_sample(s, 10, 6));
    EXPECT_THROW(lhs_sample(s, 0, 5), std::invalid_argument);
}
