#pragma once

#include <cstddef>
#include <span>
#include <vector>

// Exact discrete-distribution counterparts of the adversarial objectives. Supports
// are abstract indices 0..k-1 and every logarithm is natural.
namespace nad::dist {

inline constexpr double kMassTolerance = 1e-12;

class DiscreteDistribution {
public:
    // Throws Error(invalid_distribution) unless entries are finite, >= 0 and sum
    // to 1 within kMassTolerance.
    explicit DiscreteDistribution(std::vector<double> mass);

    static DiscreteDistribution uniform(std::size_t k);

    std::size_t size() const noexcept { return mass_.size(); }
    std::span<const double> mass() const noexcept { return mass_; }
    double operator[](std::size_t i) const { return mass_[i]; }

private:
    std::vector<double> mass_;
};

// Possibly negative mass produced by the closed-form optimal generator.
struct SignedMassFunction {
    std::vector<double> mass;
    bool feasible = false;
};

// sum p ln(p/q); zero-mass terms of p contribute 0.
double kl_divergence(const DiscreteDistribution& p, const DiscreteDistribution& q);

// 0.5 * (KL(p || m) + KL(q || m)) with m = (p + q) / 2. Lies in [0, ln 2].
double jsd(const DiscreteDistribution& p, const DiscreteDistribution& q);

// D*(x) = p_d(x) / (p_d(x) + p_g(x)); 0.5 where both masses vanish.
std::vector<double> optimal_discriminator(const DiscreteDistribution& p_d,
                                          const DiscreteDistribution& p_g);

// sum_x p_d ln D* + p_g ln(1 - D*), evaluated directly at the optimal discriminator.
double value_at_optimum(const DiscreteDistribution& p_d, const DiscreteDistribution& p_g);

// p_N = gamma p_g + (1 - gamma) p_an, for 0 < gamma <= 1.
DiscreteDistribution distorted_mixture(const DiscreteDistribution& p_g,
                                       const DiscreteDistribution& p_an, double gamma);

// Mixture objective sum p_d ln D + p_N ln(1 - D) at its optimum D = p_d / (p_d + p_N).
double penalized_value_at_optimum(const DiscreteDistribution& p_d,
                                  const DiscreteDistribution& p_g,
                                  const DiscreteDistribution& p_an, double gamma);

// p_g* = p_d / gamma - (1 - gamma) / gamma * p_an. Not clamped; see `feasible`.
SignedMassFunction optimal_generator_distribution(const DiscreteDistribution& p_d,
                                                  const DiscreteDistribution& p_an,
                                                  double gamma);

}  // namespace nad::dist
