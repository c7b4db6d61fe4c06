#include "nad/distmath/distribution.hpp"

#include <cmath>
#include <string>

#include "nad/error.hpp"

namespace nad::dist {
namespace {

void require_same_support(std::size_t a, std::size_t b) {
    if (a != b) {
        throw Error(Errc::support_mismatch,
                    "support sizes " + std::to_string(a) + " and " + std::to_string(b));
    }
}

void require_gamma(double gamma) {
    if (!(gamma > 0.0 && gamma <= 1.0)) {
        throw Error(Errc::gamma_out_of_range, "gamma must lie in (0, 1], got " + std::to_string(gamma));
    }
}

double sum_of(std::span<const double> xs) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s;
}

// sum a ln D + b ln(1 - D) at D = a / (a + b), skipping zero-mass terms.
double direct_optimum_value(std::span<const double> a, std::span<const double> b) {
    double total = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double denom = a[i] + b[i];
        if (denom <= 0.0) continue;
        if (a[i] > 0.0) total += a[i] * std::log(a[i] / denom);
        if (b[i] > 0.0) total += b[i] * std::log(b[i] / denom);
    }
    return total;
}

}  // namespace

DiscreteDistribution::DiscreteDistribution(std::vector<double> mass) : mass_(std::move(mass)) {
    if (mass_.empty()) throw Error(Errc::invalid_distribution, "empty support");
    for (double m : mass_) {
        if (!std::isfinite(m) || m < 0.0) {
            throw Error(Errc::invalid_distribution, "mass entry " + std::to_string(m));
        }
    }
    const double total = sum_of(mass_);
    if (std::fabs(total - 1.0) > kMassTolerance) {
        throw Error(Errc::invalid_distribution, "mass sums to " + std::to_string(total));
    }
}

DiscreteDistribution DiscreteDistribution::uniform(std::size_t k) {
    if (k == 0) throw Error(Errc::invalid_distribution, "empty support");
    return DiscreteDistribution(std::vector<double>(k, 1.0 / static_cast<double>(k)));
}

double kl_divergence(const DiscreteDistribution& p, const DiscreteDistribution& q) {
    require_same_support(p.size(), q.size());
    double total = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] == 0.0) continue;
        if (q[i] == 0.0) {
            throw Error(Errc::absolute_continuity_violation,
                        "q vanishes at index " + std::to_string(i) + " where p does not");
        }
        total += p[i] * std::log(p[i] / q[i]);
    }
    return total;
}

double jsd(const DiscreteDistribution& p, const DiscreteDistribution& q) {
    require_same_support(p.size(), q.size());
    std::vector<double> mid(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) mid[i] = 0.5 * (p[i] + q[i]);
    // mid may drift from unit mass by an ulp or two; KL only needs it pointwise.
    double total = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] > 0.0) total += p[i] * std::log(p[i] / mid[i]);
        if (q[i] > 0.0) total += q[i] * std::log(q[i] / mid[i]);
    }
    return 0.5 * total;
}

std::vector<double> optimal_discriminator(const DiscreteDistribution& p_d,
                                          const DiscreteDistribution& p_g) {
    require_same_support(p_d.size(), p_g.size());
    std::vector<double> d(p_d.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        const double denom = p_d[i] + p_g[i];
        d[i] = denom > 0.0 ? p_d[i] / denom : 0.5;
    }
    return d;
}

double value_at_optimum(const DiscreteDistribution& p_d, const DiscreteDistribution& p_g) {
    require_same_support(p_d.size(), p_g.size());
    return direct_optimum_value(p_d.mass(), p_g.mass());
}

DiscreteDistribution distorted_mixture(const DiscreteDistribution& p_g,
                                       const DiscreteDistribution& p_an, double gamma) {
    require_gamma(gamma);
    require_same_support(p_g.size(), p_an.size());
    std::vector<double> mix(p_g.size());
    for (std::size_t i = 0; i < mix.size(); ++i) {
        mix[i] = gamma * p_g[i] + (1.0 - gamma) * p_an[i];
    }
    return DiscreteDistribution(std::move(mix));
}

double penalized_value_at_optimum(const DiscreteDistribution& p_d,
                                  const DiscreteDistribution& p_g,
                                  const DiscreteDistribution& p_an, double gamma) {
    require_same_support(p_d.size(), p_g.size());
    const DiscreteDistribution p_n = distorted_mixture(p_g, p_an, gamma);
    return direct_optimum_value(p_d.mass(), p_n.mass());
}

SignedMassFunction optimal_generator_distribution(const DiscreteDistribution& p_d,
                                                  const DiscreteDistribution& p_an,
                                                  double gamma) {
    require_gamma(gamma);
    require_same_support(p_d.size(), p_an.size());
    SignedMassFunction out;
    out.mass.resize(p_d.size());
    const double data_weight = 1.0 / gamma;
    const double abnormal_weight = (1.0 - gamma) / gamma;
    bool nonnegative = true;
    for (std::size_t i = 0; i < p_d.size(); ++i) {
        out.mass[i] = data_weight * p_d[i] - abnormal_weight * p_an[i];
        nonnegative = nonnegative && out.mass[i] >= 0.0;
    }
    out.feasible = nonnegative && std::fabs(sum_of(out.mass) - 1.0) <= kMassTolerance;
    return out;
}

}  // namespace nad::dist
