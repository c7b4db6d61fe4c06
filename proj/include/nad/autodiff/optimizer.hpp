#pragma once

#include <cstddef>
#include <vector>

#include "nad/autodiff/tensor.hpp"

namespace nad::ad {

struct AdamOptions {
    double lr = 2e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

// Adam over a fixed list of parameter tensors. The optimizer keeps non-owning
// pointers; the parameters must outlive it and keep their shapes.
class Adam {
public:
    Adam(std::vector<Tensor*> params, AdamOptions options);

    // Applies one update from each parameter's grad, then zeroes the grads.
    // Throws Error(missing_grad) if any parameter has no gradient buffer.
    void step();

    std::size_t steps() const noexcept { return t_; }
    const AdamOptions& options() const noexcept { return options_; }
    const std::vector<double>& first_moment(std::size_t i) const { return m_.at(i); }
    const std::vector<double>& second_moment(std::size_t i) const { return v_.at(i); }

private:
    std::vector<Tensor*> params_;
    AdamOptions options_;
    std::vector<std::vector<double>> m_;
    std::vector<std::vector<double>> v_;
    std::size_t t_ = 0;
};

// Plain gradient descent: p -= lr * grad, then grads are zeroed.
class GradientDescent {
public:
    GradientDescent(std::vector<Tensor*> params, double lr);
    void step();

private:
    std::vector<Tensor*> params_;
    double lr_;
};

}  // namespace nad::ad
