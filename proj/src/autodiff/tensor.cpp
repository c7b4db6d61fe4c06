#include "nad/autodiff/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "nad/error.hpp"

namespace nad::ad {

std::size_t shape_numel(const Shape& shape) noexcept {
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

std::string shape_string(const Shape& shape) {
    std::string s = "(";
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) s += ", ";
        s += std::to_string(shape[i]);
    }
    return s + ")";
}

Tensor::Tensor(Shape shape, std::vector<double> data, bool requires_grad)
    : shape_(std::move(shape)), data_(std::move(data)), requires_grad_(requires_grad) {
    if (shape_numel(shape_) != data_.size()) {
        throw Error(Errc::shape_mismatch, "shape " + shape_string(shape_) + " does not hold " +
                                              std::to_string(data_.size()) + " values");
    }
}

Tensor Tensor::zeros(Shape shape, bool requires_grad) {
    const std::size_t n = shape_numel(shape);
    return Tensor(std::move(shape), std::vector<double>(n, 0.0), requires_grad);
}

Tensor Tensor::full(Shape shape, double value) {
    const std::size_t n = shape_numel(shape);
    return Tensor(std::move(shape), std::vector<double>(n, value));
}

Tensor Tensor::scalar(double value) { return Tensor({}, {value}); }

Tensor Tensor::matrix(std::size_t rows, std::size_t cols, std::vector<double> data) {
    return Tensor({rows, cols}, std::move(data));
}

std::size_t Tensor::rows() const noexcept {
    if (shape_.size() == 2) return shape_[0];
    return 1;
}

std::size_t Tensor::cols() const noexcept {
    if (shape_.empty()) return 1;
    return shape_.back();
}

double Tensor::item() const {
    if (data_.size() != 1) {
        throw Error(Errc::shape_mismatch, "item() on tensor of shape " + shape_string(shape_));
    }
    return data_[0];
}

std::span<const double> Tensor::row(std::size_t r) const {
    const std::size_t c = cols();
    return std::span<const double>(data_).subspan(r * c, c);
}

std::span<double> Tensor::ensure_grad() {
    if (grad_.size() != data_.size()) grad_.assign(data_.size(), 0.0);
    return grad_;
}

void Tensor::zero_grad() {
    if (grad_.size() != data_.size()) {
        grad_.assign(data_.size(), 0.0);
    } else {
        std::fill(grad_.begin(), grad_.end(), 0.0);
    }
}

bool Tensor::all_finite() const noexcept {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace nad::ad
