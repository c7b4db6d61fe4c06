#include "nad/autodiff/optimizer.hpp"

#include <cmath>

#include "nad/error.hpp"

namespace nad::ad {
namespace {

void require_grads(const std::vector<Tensor*>& params) {
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (!params[i]->has_grad()) {
            throw Error(Errc::missing_grad, "parameter " + std::to_string(i) + " has no gradient");
        }
    }
}

}  // namespace

Adam::Adam(std::vector<Tensor*> params, AdamOptions options)
    : params_(std::move(params)), options_(options) {
    m_.reserve(params_.size());
    v_.reserve(params_.size());
    for (const Tensor* p : params_) {
        m_.emplace_back(p->numel(), 0.0);
        v_.emplace_back(p->numel(), 0.0);
    }
}

void Adam::step() {
    require_grads(params_);
    ++t_;
    const double b1 = options_.beta1, b2 = options_.beta2;
    const double bias1 = 1.0 - std::pow(b1, static_cast<double>(t_));
    const double bias2 = 1.0 - std::pow(b2, static_cast<double>(t_));
    for (std::size_t i = 0; i < params_.size(); ++i) {
        auto data = params_[i]->data();
        auto grad = params_[i]->grad();
        auto& m = m_[i];
        auto& v = v_[i];
        for (std::size_t j = 0; j < data.size(); ++j) {
            const double g = grad[j];
            m[j] = b1 * m[j] + (1.0 - b1) * g;
            v[j] = b2 * v[j] + (1.0 - b2) * g * g;
            const double m_hat = m[j] / bias1;
            const double v_hat = v[j] / bias2;
            data[j] -= options_.lr * m_hat / (std::sqrt(v_hat) + options_.eps);
        }
        params_[i]->zero_grad();
    }
}

GradientDescent::GradientDescent(std::vector<Tensor*> params, double lr)
    : params_(std::move(params)), lr_(lr) {}

void GradientDescent::step() {
    require_grads(params_);
    for (Tensor* p : params_) {
        auto data = p->data();
        auto grad = p->grad();
        for (std::size_t j = 0; j < data.size(); ++j) data[j] -= lr_ * grad[j];
        p->zero_grad();
    }
}

}  // namespace nad::ad
