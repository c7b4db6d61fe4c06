#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace nad::ad {

using Shape = std::vector<std::size_t>;

std::size_t shape_numel(const Shape& shape) noexcept;
std::string shape_string(const Shape& shape);

// Dense row-major f64 array. Rank 0 denotes a scalar.
class Tensor {
public:
    Tensor() = default;
    Tensor(Shape shape, std::vector<double> data, bool requires_grad = false);

    static Tensor zeros(Shape shape, bool requires_grad = false);
    static Tensor full(Shape shape, double value);
    static Tensor scalar(double value);
    static Tensor matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

    const Shape& shape() const noexcept { return shape_; }
    std::size_t rank() const noexcept { return shape_.size(); }
    std::size_t numel() const noexcept { return data_.size(); }
    // Matrix helpers; a rank-1 tensor is treated as a single row.
    std::size_t rows() const noexcept;
    std::size_t cols() const noexcept;

    std::span<const double> data() const noexcept { return data_; }
    std::span<double> data() noexcept { return data_; }
    double item() const;
    double operator[](std::size_t i) const { return data_[i]; }

    std::span<const double> row(std::size_t r) const;

    bool requires_grad() const noexcept { return requires_grad_; }
    void set_requires_grad(bool on) noexcept { requires_grad_ = on; }

    bool has_grad() const noexcept { return grad_.size() == data_.size(); }
    std::span<const double> grad() const noexcept { return grad_; }
    std::span<double> grad() noexcept { return grad_; }
    // Allocates a zero gradient if absent and returns it.
    std::span<double> ensure_grad();
    void zero_grad();
    void clear_grad() noexcept { grad_.clear(); }

    bool all_finite() const noexcept;

private:
    Shape shape_;
    std::vector<double> data_;
    bool requires_grad_ = false;
    std::vector<double> grad_;
};

}  // namespace nad::ad
