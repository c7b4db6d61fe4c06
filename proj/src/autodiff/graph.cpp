#include "nad/autodiff/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nad/error.hpp"

namespace nad::ad {
namespace {

void require_same_shape(OpKind kind, const Tensor& a, const Tensor& b) {
    if (a.shape() != b.shape()) {
        throw Error(Errc::shape_mismatch, std::string(op_name(kind)) + ": " +
                                              shape_string(a.shape()) + " vs " +
                                              shape_string(b.shape()));
    }
}

double stable_sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

// C(m x n) += A(m x k) * B(k x n)
void gemm_nn(std::size_t m, std::size_t k, std::size_t n, const double* a, const double* b,
             double* c) {
    for (std::size_t i = 0; i < m; ++i) {
        double* ci = c + i * n;
        const double* ai = a + i * k;
        for (std::size_t p = 0; p < k; ++p) {
            const double aip = ai[p];
            const double* bp = b + p * n;
            for (std::size_t j = 0; j < n; ++j) ci[j] += aip * bp[j];
        }
    }
}

// dA(m x k) += G(m x n) * B(k x n)^T
void gemm_nt(std::size_t m, std::size_t k, std::size_t n, const double* g, const double* b,
             double* da) {
    for (std::size_t i = 0; i < m; ++i) {
        const double* gi = g + i * n;
        double* dai = da + i * k;
        for (std::size_t p = 0; p < k; ++p) {
            const double* bp = b + p * n;
            double acc = 0.0;
            for (std::size_t j = 0; j < n; ++j) acc += gi[j] * bp[j];
            dai[p] += acc;
        }
    }
}

// dB(k x n) += A(m x k)^T * G(m x n)
void gemm_tn(std::size_t m, std::size_t k, std::size_t n, const double* a, const double* g,
             double* db) {
    for (std::size_t i = 0; i < m; ++i) {
        const double* ai = a + i * k;
        const double* gi = g + i * n;
        for (std::size_t p = 0; p < k; ++p) {
            const double aip = ai[p];
            double* dbp = db + p * n;
            for (std::size_t j = 0; j < n; ++j) dbp[j] += aip * gi[j];
        }
    }
}

}  // namespace

std::string_view op_name(OpKind kind) noexcept {
    switch (kind) {
        case OpKind::leaf: return "leaf";
        case OpKind::add: return "add";
        case OpKind::sub: return "sub";
        case OpKind::mul: return "mul";
        case OpKind::matmul: return "matmul";
        case OpKind::sum: return "sum";
        case OpKind::mean: return "mean";
        case OpKind::abs: return "abs";
        case OpKind::log: return "log";
        case OpKind::sigmoid: return "sigmoid";
        case OpKind::tanh: return "tanh";
        case OpKind::leaky_relu: return "leaky_relu";
        case OpKind::broadcast_add_row: return "broadcast_add_row";
    }
    return "unknown";
}

Var Graph::push(Node node) {
    if (nodes_.size() >= std::numeric_limits<std::uint32_t>::max()) {
        throw Error(Errc::invalid_argument, "graph node limit reached");
    }
    nodes_.push_back(std::move(node));
    return Var{static_cast<std::uint32_t>(nodes_.size() - 1)};
}

const Graph::Node& Graph::node(Var v) const {
    if (v.id >= nodes_.size()) {
        throw Error(Errc::invalid_argument, "variable does not belong to this graph");
    }
    return nodes_[v.id];
}

const Tensor& Graph::value(Var v) const {
    const Node& n = node(v);
    return n.external ? *n.external : n.owned;
}

OpKind Graph::kind(Var v) const { return node(v).kind; }

std::span<const Var> Graph::inputs(Var v) const {
    const Node& n = node(v);
    return std::span<const Var>(n.in.data(), n.arity);
}

Var Graph::watch(Tensor& t) {
    Node n;
    n.external = &t;
    if (t.requires_grad()) {
        n.grad_target = &t;
        n.needs_grad = true;
    }
    return push(std::move(n));
}

Var Graph::input(const Tensor& t) {
    Node n;
    n.external = &t;
    return push(std::move(n));
}

Var Graph::constant(Tensor t) {
    Node n;
    t.set_requires_grad(false);
    t.clear_grad();
    n.owned = std::move(t);
    return push(std::move(n));
}

Var Graph::constant_like(Var shape_of, double value) {
    return constant(Tensor::full(this->value(shape_of).shape(), value));
}

Var Graph::scale(Var a, double c) { return mul(constant_like(a, c), a); }

Var Graph::rsub(double c, Var a) { return sub(constant_like(a, c), a); }

Var Graph::apply(OpKind kind, std::span<const Var> in) {
    switch (kind) {
        case OpKind::add:
        case OpKind::sub:
        case OpKind::mul:
        case OpKind::matmul:
        case OpKind::broadcast_add_row:
            if (in.size() != 2) break;
            return binary(kind, in[0], in[1]);
        case OpKind::sum:
        case OpKind::mean:
        case OpKind::abs:
        case OpKind::log:
        case OpKind::sigmoid:
        case OpKind::tanh:
        case OpKind::leaky_relu:
            if (in.size() != 1) break;
            return unary(kind, in[0]);
        case OpKind::leaf:
            throw Error(Errc::invalid_argument, "leaves are created with watch/input/constant");
    }
    throw Error(Errc::shape_mismatch, std::string(op_name(kind)) + ": wrong number of inputs (" +
                                          std::to_string(in.size()) + ")");
}

Var Graph::unary(OpKind kind, Var a) {
    const Tensor& x = value(a);
    const auto xs = x.data();
    Node n;
    n.kind = kind;
    n.in[0] = a;
    n.arity = 1;
    n.needs_grad = node(a).needs_grad;

    std::vector<double> out;
    Shape shape = x.shape();
    switch (kind) {
        case OpKind::sum:
        case OpKind::mean: {
            if (xs.empty()) throw Error(Errc::shape_mismatch, "reduction over an empty tensor");
            double acc = 0.0;
            for (double v : xs) acc += v;
            if (kind == OpKind::mean) acc /= static_cast<double>(xs.size());
            out = {acc};
            shape = {};
            break;
        }
        case OpKind::abs:
            out.resize(xs.size());
            std::transform(xs.begin(), xs.end(), out.begin(), [](double v) { return std::fabs(v); });
            break;
        case OpKind::log:
            out.resize(xs.size());
            for (std::size_t i = 0; i < xs.size(); ++i) {
                const double v = xs[i];
                if (!(v >= 0.0)) {
                    throw Error(Errc::domain_error,
                                "log of negative value " + std::to_string(v));
                }
                out[i] = std::log(std::max(v, kLogFloor));
            }
            break;
        case OpKind::sigmoid:
            out.resize(xs.size());
            std::transform(xs.begin(), xs.end(), out.begin(), stable_sigmoid);
            break;
        case OpKind::tanh:
            out.resize(xs.size());
            std::transform(xs.begin(), xs.end(), out.begin(), [](double v) { return std::tanh(v); });
            break;
        case OpKind::leaky_relu:
            out.resize(xs.size());
            std::transform(xs.begin(), xs.end(), out.begin(),
                           [](double v) { return v > 0.0 ? v : kLeakyReluSlope * v; });
            break;
        default:
            throw Error(Errc::invalid_argument, std::string(op_name(kind)) + " is not unary");
    }
    n.owned = Tensor(std::move(shape), std::move(out));
    if (!n.owned.all_finite()) {
        throw Error(Errc::non_finite, std::string(op_name(kind)) + " produced a non-finite value");
    }
    return push(std::move(n));
}

Var Graph::binary(OpKind kind, Var a, Var b) {
    const Tensor& x = value(a);
    const Tensor& y = value(b);
    Node n;
    n.kind = kind;
    n.in = {a, b};
    n.arity = 2;
    n.needs_grad = node(a).needs_grad || node(b).needs_grad;

    const auto xs = x.data();
    const auto ys = y.data();
    switch (kind) {
        case OpKind::add:
        case OpKind::sub:
        case OpKind::mul: {
            require_same_shape(kind, x, y);
            std::vector<double> out(xs.size());
            for (std::size_t i = 0; i < xs.size(); ++i) {
                out[i] = kind == OpKind::add   ? xs[i] + ys[i]
                         : kind == OpKind::sub ? xs[i] - ys[i]
                                               : xs[i] * ys[i];
            }
            n.owned = Tensor(x.shape(), std::move(out));
            break;
        }
        case OpKind::matmul: {
            if (x.rank() != 2 || y.rank() != 2 || x.shape()[1] != y.shape()[0]) {
                throw Error(Errc::shape_mismatch, "matmul: " + shape_string(x.shape()) + " x " +
                                                      shape_string(y.shape()));
            }
            const std::size_t m = x.shape()[0], k = x.shape()[1], cols = y.shape()[1];
            std::vector<double> out(m * cols, 0.0);
            gemm_nn(m, k, cols, xs.data(), ys.data(), out.data());
            n.owned = Tensor({m, cols}, std::move(out));
            break;
        }
        case OpKind::broadcast_add_row: {
            const bool row_ok = (y.rank() == 1 || (y.rank() == 2 && y.shape()[0] == 1));
            if (x.rank() != 2 || !row_ok || y.cols() != x.shape()[1]) {
                throw Error(Errc::shape_mismatch, "broadcast_add_row: " + shape_string(x.shape()) +
                                                      " + " + shape_string(y.shape()));
            }
            const std::size_t rows = x.shape()[0], cols = x.shape()[1];
            std::vector<double> out(xs.begin(), xs.end());
            for (std::size_t r = 0; r < rows; ++r) {
                for (std::size_t c = 0; c < cols; ++c) out[r * cols + c] += ys[c];
            }
            n.owned = Tensor(x.shape(), std::move(out));
            break;
        }
        default:
            throw Error(Errc::invalid_argument, std::string(op_name(kind)) + " is not binary");
    }
    if (!n.owned.all_finite()) {
        throw Error(Errc::non_finite, std::string(op_name(kind)) + " produced a non-finite value");
    }
    return push(std::move(n));
}

void Graph::backward(Var root) {
    const Tensor& r = value(root);
    if (r.numel() != 1) {
        throw Error(Errc::non_scalar_root, "backward root has shape " + shape_string(r.shape()));
    }
    for (Node& n : nodes_) n.grad.clear();

    Node& rn = nodes_[root.id];
    if (rn.needs_grad) rn.grad.assign(1, 1.0);

    for (std::size_t i = root.id + 1; i-- > 0;) {
        Node& n = nodes_[i];
        if (n.grad.empty() || n.arity == 0) continue;
        backprop_node(n, n.grad);
    }

    for (Node& n : nodes_) {
        if (!n.grad_target) continue;
        auto target = n.grad_target->ensure_grad();
        if (n.grad.empty()) continue;
        for (std::size_t j = 0; j < target.size(); ++j) target[j] += n.grad[j];
    }
}

void Graph::backprop_node(const Node& n, std::span<const double> g) {
    auto grad_of = [this](Var v) -> double* {
        Node& in = nodes_[v.id];
        if (!in.needs_grad) return nullptr;
        if (in.grad.empty()) {
            const Tensor& t = in.external ? *in.external : in.owned;
            in.grad.assign(t.numel(), 0.0);
        }
        return in.grad.data();
    };
    const Tensor& x = value(n.in[0]);
    const auto xs = x.data();
    const auto out = n.owned.data();

    switch (n.kind) {
        case OpKind::add:
        case OpKind::sub:
        case OpKind::mul: {
            const auto ys = value(n.in[1]).data();
            if (double* ga = grad_of(n.in[0])) {
                if (n.kind == OpKind::mul) {
                    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * ys[i];
                } else {
                    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
                }
            }
            if (double* gb = grad_of(n.in[1])) {
                if (n.kind == OpKind::mul) {
                    for (std::size_t i = 0; i < g.size(); ++i) gb[i] += g[i] * xs[i];
                } else if (n.kind == OpKind::sub) {
                    for (std::size_t i = 0; i < g.size(); ++i) gb[i] -= g[i];
                } else {
                    for (std::size_t i = 0; i < g.size(); ++i) gb[i] += g[i];
                }
            }
            break;
        }
        case OpKind::matmul: {
            const Tensor& y = value(n.in[1]);
            const std::size_t m = x.shape()[0], k = x.shape()[1], cols = y.shape()[1];
            if (double* ga = grad_of(n.in[0])) gemm_nt(m, k, cols, g.data(), y.data().data(), ga);
            if (double* gb = grad_of(n.in[1])) gemm_tn(m, k, cols, xs.data(), g.data(), gb);
            break;
        }
        case OpKind::broadcast_add_row: {
            const std::size_t rows = x.shape()[0], cols = x.shape()[1];
            if (double* ga = grad_of(n.in[0])) {
                for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
            }
            if (double* gb = grad_of(n.in[1])) {
                for (std::size_t r = 0; r < rows; ++r) {
                    for (std::size_t c = 0; c < cols; ++c) gb[c] += g[r * cols + c];
                }
            }
            break;
        }
        case OpKind::sum:
        case OpKind::mean: {
            if (double* ga = grad_of(n.in[0])) {
                const double s =
                    n.kind == OpKind::mean ? g[0] / static_cast<double>(xs.size()) : g[0];
                for (std::size_t i = 0; i < xs.size(); ++i) ga[i] += s;
            }
            break;
        }
        case OpKind::abs:
            if (double* ga = grad_of(n.in[0])) {
                for (std::size_t i = 0; i < g.size(); ++i) {
                    const double sign = xs[i] > 0.0 ? 1.0 : (xs[i] < 0.0 ? -1.0 : 0.0);
                    ga[i] += g[i] * sign;
                }
            }
            break;
        case OpKind::log:
            if (double* ga = grad_of(n.in[0])) {
                for (std::size_t i = 0; i < g.size(); ++i) {
                    if (xs[i] >= kLogFloor) ga[i] += g[i] / xs[i];
                }
            }
            break;
        case OpKind::sigmoid:
            if (double* ga = grad_of(n.in[0])) {
                for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * out[i] * (1.0 - out[i]);
            }
            break;
        case OpKind::tanh:
            if (double* ga = grad_of(n.in[0])) {
                for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * (1.0 - out[i] * out[i]);
            }
            break;
        case OpKind::leaky_relu:
            if (double* ga = grad_of(n.in[0])) {
                for (std::size_t i = 0; i < g.size(); ++i) {
                    ga[i] += xs[i] > 0.0 ? g[i] : kLeakyReluSlope * g[i];
                }
            }
            break;
        case OpKind::leaf:
            break;
    }
}

std::span<const double> Graph::grad(Var v) const {
    const Node& n = node(v);
    if (!n.grad.empty()) return n.grad;
    const std::size_t numel = value(v).numel();
    if (zeros_.size() < numel) zeros_.assign(numel, 0.0);
    return std::span<const double>(zeros_.data(), numel);
}

}  // namespace nad::ad
