#include "nad/distmath/identity_suite.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "nad/distmath/distribution.hpp"
#include "nad/error.hpp"
#include "nad/util/random.hpp"

namespace nad::dist {
namespace {

constexpr double kLn2 = std::numbers::ln2;

struct Accumulator {
    IdentityCheck check;

    Accumulator(std::string name, double tolerance) {
        check.name = std::move(name);
        check.tolerance = tolerance;
    }
    void observe(double err) {
        // NaN must register as a failure, so compare negatively.
        if (!(err <= check.max_abs_error)) check.max_abs_error = std::isnan(err) ? INFINITY : err;
    }
    IdentityCheck finish(std::size_t instances, bool inclusive) {
        check.instances = instances;
        check.pass = inclusive ? check.max_abs_error <= check.tolerance
                               : check.max_abs_error < check.tolerance;
        return check;
    }
};

// Random distribution; a quarter of draws zero out some entries to exercise the
// zero-mass conventions.
DiscreteDistribution random_distribution(Rng& rng, std::size_t k) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> m(k);
    for (double& v : m) v = u(rng);
    if (u(rng) < 0.25) {
        for (double& v : m) {
            if (u(rng) < 0.3) v = 0.0;
        }
    }
    if (std::all_of(m.begin(), m.end(), [](double v) { return v == 0.0; })) m[0] = 1.0;
    double total = 0.0;
    for (double v : m) total += v;
    for (double& v : m) v /= total;
    return DiscreteDistribution(std::move(m));
}

double random_gamma(Rng& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    if (u(rng) < 0.05) return 1.0;
    return 0.01 + 0.99 * u(rng);
}

}  // namespace

double grid_argmax_objective(double a, double b, double resolution) {
    const auto steps = static_cast<std::size_t>(std::llround(1.0 / resolution));
    double best_y = resolution;
    double best_h = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < steps; ++i) {
        const double y = static_cast<double>(i) * resolution;
        const double h = a * std::log(y) + b * std::log(1.0 - y);
        if (h > best_h) {
            best_h = h;
            best_y = y;
        }
    }
    return best_y;
}

std::vector<IdentityCheck> run_identity_suite(const IdentitySuiteOptions& options) {
    if (options.instances == 0 || options.min_support < 1 ||
        options.min_support > options.max_support) {
        throw Error(Errc::invalid_argument, "identity suite needs instances >= 1 and a valid support range");
    }
    Rng rng(derive_seed(options.seed, 0x0a11ce));
    std::uniform_int_distribution<std::size_t> support(options.min_support, options.max_support);

    Accumulator grid("optimal_discriminator_grid", kGridResolution);
    Accumulator value("value_identity", 1e-9);
    Accumulator mixture("mixture_identity", 1e-9);
    Accumulator recon("mixture_reconstruction", 1e-12);
    Accumulator symmetry("jsd_symmetry", 1e-12);
    Accumulator bounds("jsd_bounds", 1e-12);

    for (std::size_t n = 0; n < options.instances; ++n) {
        const std::size_t k = support(rng);
        const DiscreteDistribution p_d = random_distribution(rng, k);
        const DiscreteDistribution p_g = random_distribution(rng, k);
        const DiscreteDistribution p_an = random_distribution(rng, k);
        const double gamma = random_gamma(rng);

        const auto d_star = optimal_discriminator(p_d, p_g);
        for (std::size_t i = 0; i < k; ++i) {
            // The grid spans the open interval, so only interior optima are comparable.
            if (p_d[i] == 0.0 || p_g[i] == 0.0) continue;
            grid.observe(std::fabs(d_star[i] - grid_argmax_objective(p_d[i], p_g[i])));
        }

        const double js = jsd(p_d, p_g);
        value.observe(std::fabs(value_at_optimum(p_d, p_g) - (2.0 * js - 2.0 * kLn2)));

        const DiscreteDistribution p_n = distorted_mixture(p_g, p_an, gamma);
        mixture.observe(std::fabs(penalized_value_at_optimum(p_d, p_g, p_an, gamma) -
                                  (2.0 * jsd(p_d, p_n) - 2.0 * kLn2)));

        const SignedMassFunction p_star = optimal_generator_distribution(p_d, p_an, gamma);
        for (std::size_t i = 0; i < k; ++i) {
            recon.observe(std::fabs(gamma * p_star.mass[i] + (1.0 - gamma) * p_an[i] - p_d[i]));
        }

        symmetry.observe(std::fabs(js - jsd(p_g, p_d)));
        bounds.observe(std::max({0.0, -js, js - kLn2}));
    }

    const std::size_t count = options.instances;
    return {grid.finish(count, true),     value.finish(count, false),
            mixture.finish(count, false), recon.finish(count, false),
            symmetry.finish(count, false), bounds.finish(count, false)};
}

}  // namespace nad::dist
