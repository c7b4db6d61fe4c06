#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "nad/distmath/distribution.hpp"
#include "nad/distmath/identity_suite.hpp"
#include "support/gradcheck.hpp"

using namespace nad;
using namespace nad::dist;
using nad::testing::error_code_of;

namespace {

constexpr double kLn2 = std::numbers::ln2;

DiscreteDistribution make_dist(std::vector<double> m) { return DiscreteDistribution(std::move(m)); }

DiscreteDistribution random_dist(std::mt19937_64& rng, std::size_t k, double floor = 0.0) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> m(k);
    double total = 0.0;
    for (double& v : m) {
        v = floor + u(rng);
        total += v;
    }
    for (double& v : m) v /= total;
    return make_dist(std::move(m));
}

// Test-side evaluation of the objective at the closed-form optimum, written
// against the raw masses rather than through the library.
double brute_value(const std::vector<double>& a, const std::vector<double>& b) {
    double total = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] / (a[i] + b[i]);
        if (a[i] > 0) total += a[i] * std::log(d);
        if (b[i] > 0) total += b[i] * std::log(1.0 - d);
    }
    return total;
}

}  // namespace

TEST(DiscreteDistribution, ValidatesMass) {
    EXPECT_EQ(error_code_of([] { make_dist({0.5, 0.6}); }), Errc::invalid_distribution);
    EXPECT_EQ(error_code_of([] { make_dist({-0.1, 1.1}); }), Errc::invalid_distribution);
    EXPECT_EQ(error_code_of([] { make_dist({}); }), Errc::invalid_distribution);
    EXPECT_EQ(error_code_of([] { make_dist({NAN, 1.0}); }), Errc::invalid_distribution);
    EXPECT_NO_THROW(make_dist({0.5, 0.5 + 1e-13}));
}

TEST(KlDivergence, Examples) {
    const auto p = make_dist({0.2, 0.3, 0.5});
    EXPECT_EQ(kl_divergence(p, p), 0.0);
    EXPECT_DOUBLE_EQ(kl_divergence(make_dist({1, 0}), make_dist({0.5, 0.5})), kLn2);
    const double oracle = 0.5 * std::log(0.5 / 0.25) + 0.5 * std::log(0.5 / 0.75);
    EXPECT_NEAR(kl_divergence(make_dist({0.5, 0.5}), make_dist({0.25, 0.75})), oracle, 1e-15);
}

TEST(KlDivergence, Errors) {
    EXPECT_EQ(error_code_of([] { kl_divergence(make_dist({1}), make_dist({0.5, 0.5})); }),
              Errc::support_mismatch);
    EXPECT_EQ(error_code_of([] { kl_divergence(make_dist({0.5, 0.5}), make_dist({1, 0})); }),
              Errc::absolute_continuity_violation);
}

TEST(Jsd, Examples) {
    const auto p = make_dist({0.1, 0.9});
    EXPECT_EQ(jsd(p, p), 0.0);
    EXPECT_DOUBLE_EQ(jsd(make_dist({1, 0}), make_dist({0, 1})), kLn2);
    // Direct summation with the midpoint (0.7, 0.3).
    const double oracle = 0.5 * (0.5 * std::log(0.5 / 0.7) + 0.5 * std::log(0.5 / 0.3) +
                                 0.9 * std::log(0.9 / 0.7) + 0.1 * std::log(0.1 / 0.3));
    EXPECT_NEAR(jsd(make_dist({0.5, 0.5}), make_dist({0.9, 0.1})), oracle, 1e-15);
    EXPECT_EQ(error_code_of([] { jsd(make_dist({1}), make_dist({0.5, 0.5})); }), Errc::support_mismatch);
}

TEST(Jsd, SymmetricAndBounded) {
    std::mt19937_64 rng(17);
    for (int n = 0; n < 1000; ++n) {
        const std::size_t k = 2 + n % 15;
        const auto p = random_dist(rng, k);
        const auto q = random_dist(rng, k);
        const double a = jsd(p, q);
        EXPECT_LT(std::fabs(a - jsd(q, p)), 1e-12);
        EXPECT_GE(a, 0.0);
        EXPECT_LE(a, kLn2 + 1e-12);
    }
}

TEST(OptimalDiscriminator, Examples) {
    const auto p = make_dist({0.3, 0.7});
    for (double d : optimal_discriminator(p, p)) EXPECT_EQ(d, 0.5);
    const auto d = optimal_discriminator(make_dist({1, 0}), make_dist({0, 1}));
    EXPECT_EQ(d[0], 1.0);
    EXPECT_EQ(d[1], 0.0);
    const auto z = optimal_discriminator(make_dist({0, 1}), make_dist({0, 1}));
    EXPECT_EQ(z[0], 0.5);
}

TEST(OptimalDiscriminator, MatchesGridSearchOfPointwiseObjective) {
    std::mt19937_64 rng(23);
    for (int n = 0; n < 50; ++n) {
        const auto p_d = random_dist(rng, 6, 0.01);
        const auto p_g = random_dist(rng, 6, 0.01);
        const auto d = optimal_discriminator(p_d, p_g);
        for (std::size_t i = 0; i < 6; ++i) {
            // Test-local grid over (0, 1) at resolution 1e-3.
            double best_y = 0.0, best_h = -INFINITY;
            for (int j = 1; j < 1000; ++j) {
                const double y = j * 1e-3;
                const double h = p_d[i] * std::log(y) + p_g[i] * std::log(1 - y);
                if (h > best_h) {
                    best_h = h;
                    best_y = y;
                }
            }
            EXPECT_LE(std::fabs(d[i] - best_y), 1e-3);
        }
    }
}

TEST(ValueAtOptimum, Examples) {
    const auto p = make_dist({0.25, 0.25, 0.5});
    EXPECT_NEAR(value_at_optimum(p, p), -2 * kLn2, 1e-15);
    EXPECT_NEAR(-2 * kLn2, -1.3862944, 1e-7);
    EXPECT_EQ(value_at_optimum(make_dist({1, 0}), make_dist({0, 1})), 0.0);
}

TEST(ValueAtOptimum, EqualsJsdIdentityOnRandomPairs) {
    std::mt19937_64 rng(29);
    double worst = 0.0;
    for (int n = 0; n < 1000; ++n) {
        const std::size_t k = 2 + n % 15;
        const auto p_d = random_dist(rng, k);
        const auto p_g = random_dist(rng, k);
        const double lhs = brute_value({p_d.mass().begin(), p_d.mass().end()},
                                       {p_g.mass().begin(), p_g.mass().end()});
        ASSERT_NEAR(value_at_optimum(p_d, p_g), lhs, 1e-12);
        worst = std::max(worst, std::fabs(lhs - (2 * jsd(p_d, p_g) - 2 * kLn2)));
    }
    EXPECT_LT(worst, 1e-9);
}

TEST(DistortedMixture, Examples) {
    const auto p_g = make_dist({0.2, 0.8});
    const auto same = distorted_mixture(p_g, make_dist({1, 0}), 1.0);
    EXPECT_EQ(same[0], 0.2);
    EXPECT_EQ(same[1], 0.8);
    const auto half = distorted_mixture(make_dist({1, 0}), make_dist({0, 1}), 0.5);
    EXPECT_EQ(half[0], 0.5);
    EXPECT_EQ(half[1], 0.5);
    const auto mixture = distorted_mixture(make_dist({0.5, 0.5}), make_dist({1, 0}), 0.1);
    EXPECT_NEAR(mixture[0], 0.95, 1e-15);
    EXPECT_NEAR(mixture[1], 0.05, 1e-15);
}

TEST(DistortedMixture, GammaRange) {
    const auto p = make_dist({0.5, 0.5});
    for (double g : {0.0, -0.1, 1.0000001, std::nan("")}) {
        EXPECT_EQ(error_code_of([&] { distorted_mixture(p, p, g); }), Errc::gamma_out_of_range);
    }
    EXPECT_EQ(error_code_of([&] { distorted_mixture(p, make_dist({1}), 0.5); }), Errc::support_mismatch);
}

TEST(PenalizedValue, Examples) {
    // p_d chosen equal to the mixture: p_N = 0.5 (0.2, 0.8) + 0.5 (0.6, 0.4) = (0.4, 0.6).
    const auto p_g = make_dist({0.2, 0.8});
    const auto p_an = make_dist({0.6, 0.4});
    EXPECT_NEAR(penalized_value_at_optimum(make_dist({0.4, 0.6}), p_g, p_an, 0.5), -2 * kLn2, 1e-15);

    std::mt19937_64 rng(31);
    const auto p_d = random_dist(rng, 5);
    const auto g5 = random_dist(rng, 5);
    const auto a5 = random_dist(rng, 5);
    EXPECT_EQ(penalized_value_at_optimum(p_d, g5, a5, 1.0), value_at_optimum(p_d, g5));
}

TEST(PenalizedValue, EqualsMixtureJsdIdentityOnRandomTriples) {
    std::mt19937_64 rng(37);
    std::uniform_real_distribution<double> ug(0.01, 1.0);
    double worst = 0.0;
    for (int n = 0; n < 1000; ++n) {
        const std::size_t k = 2 + n % 15;
        const auto p_d = random_dist(rng, k);
        const auto p_g = random_dist(rng, k);
        const auto p_an = random_dist(rng, k);
        const double gamma = ug(rng);
        // Independent route: build p_N by hand and evaluate the objective directly.
        std::vector<double> a(p_d.mass().begin(), p_d.mass().end()), b(k);
        for (std::size_t i = 0; i < k; ++i) b[i] = gamma * p_g[i] + (1 - gamma) * p_an[i];
        const double direct = brute_value(a, b);
        ASSERT_NEAR(penalized_value_at_optimum(p_d, p_g, p_an, gamma), direct, 1e-12);
        const double closed = 2 * jsd(p_d, distorted_mixture(p_g, p_an, gamma)) - 2 * kLn2;
        worst = std::max(worst, std::fabs(direct - closed));
    }
    EXPECT_LT(worst, 1e-9);
}

TEST(OptimalGenerator, Examples) {
    const auto a = optimal_generator_distribution(make_dist({0.5, 0.5}), make_dist({1, 0}), 0.5);
    EXPECT_NEAR(a.mass[0], 0.0, 1e-15);
    EXPECT_NEAR(a.mass[1], 1.0, 1e-15);
    EXPECT_TRUE(a.feasible);

    const auto b = optimal_generator_distribution(make_dist({0.5, 0.5}), make_dist({1, 0}), 0.1);
    EXPECT_NEAR(b.mass[0], -4.0, 1e-12);
    EXPECT_NEAR(b.mass[1], 5.0, 1e-12);
    EXPECT_FALSE(b.feasible);

    const auto p_d = make_dist({0.1, 0.2, 0.7});
    const auto c = optimal_generator_distribution(p_d, make_dist({0.3, 0.3, 0.4}), 1.0);
    EXPECT_EQ(c.mass, std::vector<double>(p_d.mass().begin(), p_d.mass().end()));
    EXPECT_TRUE(c.feasible);
}

TEST(OptimalGenerator, ReconstructsDataDistribution) {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> ug(0.01, 1.0);
    for (int n = 0; n < 1000; ++n) {
        const std::size_t k = 2 + n % 15;
        const auto p_d = random_dist(rng, k);
        const auto p_an = random_dist(rng, k);
        const double gamma = ug(rng);
        const auto star = optimal_generator_distribution(p_d, p_an, gamma);
        double sum = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            ASSERT_LT(std::fabs(gamma * star.mass[i] + (1 - gamma) * p_an[i] - p_d[i]), 1e-12);
            sum += star.mass[i];
        }
        EXPECT_NEAR(sum, 1.0, 1e-10);
    }
}

// feasible <=> p_d >= (1 - gamma) p_an everywhere; both sides built with margins.
TEST(OptimalGenerator, FeasibleIffDataDominatesScaledAbnormal) {
    std::mt19937_64 rng(43);
    std::uniform_real_distribution<double> ug(0.05, 0.95);
    for (int n = 0; n < 500; ++n) {
        const std::size_t k = 2 + n % 10;
        const double gamma = ug(rng);
        const auto p_an = random_dist(rng, k, 0.05);
        const auto q = random_dist(rng, k, 0.05);
        // Feasible by construction: p_d = gamma q + (1 - gamma) p_an with q > 0.
        const auto p_d = distorted_mixture(q, p_an, gamma);
        bool dominated = true;
        for (std::size_t i = 0; i < k; ++i) dominated &= p_d[i] >= (1 - gamma) * p_an[i];
        ASSERT_TRUE(dominated);
        EXPECT_TRUE(optimal_generator_distribution(p_d, p_an, gamma).feasible);

        // Infeasible by construction: move mass away from the most abnormal point.
        std::vector<double> m(p_d.mass().begin(), p_d.mass().end());
        std::size_t j = 0;
        for (std::size_t i = 1; i < k; ++i) {
            if (p_an[i] > p_an[j]) j = i;
        }
        const double target = 0.5 * (1 - gamma) * p_an[j];
        const double moved = m[j] - target;
        m[j] = target;
        m[(j + 1) % k] += moved;
        const auto bad = make_dist(m);
        EXPECT_LT(bad[j], (1 - gamma) * p_an[j]);
        EXPECT_FALSE(optimal_generator_distribution(bad, p_an, gamma).feasible);
    }
}

TEST(IdentitySuite, AllChecksPass) {
    const auto checks = run_identity_suite({.instances = 1000, .seed = 0});
    ASSERT_EQ(checks.size(), 6u);
    for (const auto& c : checks) {
        EXPECT_TRUE(c.pass) << c.name << " max error " << c.max_abs_error;
        EXPECT_EQ(c.instances, 1000u);
    }
}

TEST(IdentitySuite, DeterministicAndSmallestSupport) {
    const auto a = run_identity_suite({.instances = 10, .seed = 1});
    const auto b = run_identity_suite({.instances = 10, .seed = 1});
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].max_abs_error, b[i].max_abs_error);
    for (const auto& c : run_identity_suite({.instances = 200, .seed = 2, .min_support = 2, .max_support = 2})) {
        EXPECT_TRUE(c.pass) << c.name;
    }
}

TEST(IdentitySuite, GridArgmaxIsWithinOneStep) {
    EXPECT_NEAR(grid_argmax_objective(0.3, 0.7), 0.3, 1e-3);
    EXPECT_NEAR(grid_argmax_objective(1.0, 1.0), 0.5, 1e-12);
}
