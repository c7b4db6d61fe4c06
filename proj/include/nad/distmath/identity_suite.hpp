#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace nad::dist {

struct IdentityCheck {
    std::string name;
    std::size_t instances = 0;
    double max_abs_error = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

struct IdentitySuiteOptions {
    std::size_t instances = 1000;
    std::uint64_t seed = 0;
    std::size_t min_support = 2;
    std::size_t max_support = 16;
};

inline constexpr double kGridResolution = 1e-3;

// Randomized verification of the closed forms against independent evaluations:
//   optimal_discriminator_grid  closed-form D* vs argmax of a ln y + b ln(1-y) on a grid
//   value_identity              direct sum at D* vs 2 JSD(p_d, p_g) - 2 ln 2
//   mixture_identity            mixture objective at optimum vs 2 JSD(p_d, p_N) - 2 ln 2
//   mixture_reconstruction      gamma p_g* + (1 - gamma) p_an vs p_d, pointwise
//   jsd_symmetry, jsd_bounds    JSD(p,q) = JSD(q,p) and 0 <= JSD <= ln 2
std::vector<IdentityCheck> run_identity_suite(const IdentitySuiteOptions& options);

// argmax over y in {r, 2r, ..., 1 - r} of a ln y + b ln(1 - y).
double grid_argmax_objective(double a, double b, double resolution = kGridResolution);

}  // namespace nad::dist
