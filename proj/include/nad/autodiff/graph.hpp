#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "nad/autodiff/tensor.hpp"

namespace nad::ad {

enum class OpKind : std::uint8_t {
    leaf,
    add,
    sub,
    mul,
    matmul,
    sum,
    mean,
    abs,
    log,
    sigmoid,
    tanh,
    leaky_relu,
    broadcast_add_row,
};

std::string_view op_name(OpKind kind) noexcept;

inline constexpr double kLeakyReluSlope = 0.2;
// log() clamps inputs in [0, kLogFloor) up to kLogFloor; negative inputs are a DomainError.
inline constexpr double kLogFloor = 1e-12;

// Handle to a node of one Graph.
struct Var {
    std::uint32_t id = 0;
};

// Define-by-run reverse-mode tape. Nodes are appended in evaluation order, so the
// append order is a topological order and backward() simply walks it in reverse.
//
// Leaves created by watch()/input() refer to tensors owned elsewhere; those tensors
// must outlive the graph and must not be mutated while it is in use.
class Graph {
public:
    Graph() = default;
    Graph(const Graph&) = delete;
    Graph& operator=(const Graph&) = delete;
    Graph(Graph&&) = default;
    Graph& operator=(Graph&&) = default;

    // Leaf bound to an external tensor. If it requires grad, backward() accumulates
    // into its grad buffer.
    Var watch(Tensor& t);
    // Leaf bound to an external tensor that is read but never differentiated.
    Var input(const Tensor& t);
    // Leaf owning its value; never differentiated.
    Var constant(Tensor t);
    Var constant_like(Var shape_of, double value);

    Var apply(OpKind kind, std::span<const Var> inputs);

    Var add(Var a, Var b) { return binary(OpKind::add, a, b); }
    Var sub(Var a, Var b) { return binary(OpKind::sub, a, b); }
    Var mul(Var a, Var b) { return binary(OpKind::mul, a, b); }
    Var matmul(Var a, Var b) { return binary(OpKind::matmul, a, b); }
    Var broadcast_add_row(Var m, Var row) { return binary(OpKind::broadcast_add_row, m, row); }
    Var sum(Var a) { return unary(OpKind::sum, a); }
    Var mean(Var a) { return unary(OpKind::mean, a); }
    Var abs(Var a) { return unary(OpKind::abs, a); }
    Var log(Var a) { return unary(OpKind::log, a); }
    Var sigmoid(Var a) { return unary(OpKind::sigmoid, a); }
    Var tanh(Var a) { return unary(OpKind::tanh, a); }
    Var leaky_relu(Var a) { return unary(OpKind::leaky_relu, a); }

    // c * a, composed from a constant and mul.
    Var scale(Var a, double c);
    // c - a, composed from a constant and sub.
    Var rsub(double c, Var a);

    const Tensor& value(Var v) const;
    double scalar(Var v) const { return value(v).item(); }
    OpKind kind(Var v) const;
    std::span<const Var> inputs(Var v) const;

    // Populates d(root)/d(node) for every node on a path to the root, then
    // accumulates leaf gradients into watched tensors. Watched tensors that the
    // root does not depend on receive a zero gradient buffer.
    void backward(Var root);
    // Gradient of the last backward() root with respect to v; zeros if unreached.
    std::span<const double> grad(Var v) const;

    std::size_t size() const noexcept { return nodes_.size(); }

private:
    struct Node {
        OpKind kind = OpKind::leaf;
        std::array<Var, 2> in{};
        std::uint8_t arity = 0;
        bool needs_grad = false;
        const Tensor* external = nullptr;
        Tensor* grad_target = nullptr;
        Tensor owned;
        std::vector<double> grad;
    };

    Var unary(OpKind kind, Var a);
    Var binary(OpKind kind, Var a, Var b);
    Var push(Node node);
    const Node& node(Var v) const;

    void backprop_node(const Node& n, std::span<const double> g_out);

    std::vector<Node> nodes_;
    mutable std::vector<double> zeros_;
};

}  // namespace nad::ad
