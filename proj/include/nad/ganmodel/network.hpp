#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "nad/autodiff/checkpoint.hpp"
#include "nad/autodiff/graph.hpp"
#include "nad/autodiff/tensor.hpp"
#include "nad/util/random.hpp"

namespace nad::gan {

// Fully-connected layer computing x * weight + bias; weight is (in, out), bias (1, out).
struct Linear {
    ad::Tensor weight;
    ad::Tensor bias;

    std::size_t in_features() const { return weight.shape()[0]; }
    std::size_t out_features() const { return weight.shape()[1]; }
};

// Layer parameters bound into one graph, so every forward pass in that graph
// shares a single leaf per parameter.
struct BoundLayers {
    std::vector<ad::Var> weights;
    std::vector<ad::Var> biases;
};

struct ModelConfig {
    std::size_t z_dim = 32;
    std::vector<std::size_t> generator_hidden = {128, 256};
    std::vector<std::size_t> discriminator_hidden = {256, 128};
    std::size_t height = 28;
    std::size_t width = 28;

    std::size_t image_size() const { return height * width; }
};

// Stack of Linear layers; hidden layers use leaky_relu.
class Mlp {
public:
    Mlp() = default;
    Mlp(const std::vector<std::size_t>& widths, Rng& rng);
    explicit Mlp(std::vector<Linear> layers);

    BoundLayers bind_frozen(ad::Graph& g) const;
    BoundLayers bind_trainable(ad::Graph& g);
    std::vector<ad::Tensor*> parameters();

    std::size_t input_size() const { return layers_.front().in_features(); }
    std::size_t output_size() const { return layers_.back().out_features(); }
    const std::vector<Linear>& layers() const { return layers_; }
    std::vector<Linear>& layers() { return layers_; }

private:
    std::vector<Linear> layers_;
};

// Maps latents (batch, z_dim) to images (batch, H*W) in [-1, 1] via a tanh output.
class Generator {
public:
    Generator() = default;
    explicit Generator(Mlp net) : net_(std::move(net)) {}

    ad::Var forward(ad::Graph& g, const BoundLayers& params, ad::Var z) const;
    ad::Var forward(ad::Graph& g, ad::Var z) const { return forward(g, net_.bind_frozen(g), z); }

    Mlp& net() { return net_; }
    const Mlp& net() const { return net_; }
    std::size_t z_dim() const { return net_.input_size(); }
    std::size_t image_size() const { return net_.output_size(); }

private:
    Mlp net_;
};

struct DiscriminatorOutput {
    ad::Var score;     // (batch, 1), sigmoid
    ad::Var features;  // (batch, F), last hidden activation
};

// Scores images (batch, H*W) in (0, 1); 1 means real/normal.
class Discriminator {
public:
    Discriminator() = default;
    explicit Discriminator(Mlp net) : net_(std::move(net)) {}

    DiscriminatorOutput forward(ad::Graph& g, const BoundLayers& params, ad::Var x) const;
    DiscriminatorOutput forward(ad::Graph& g, ad::Var x) const {
        return forward(g, net_.bind_frozen(g), x);
    }

    Mlp& net() { return net_; }
    const Mlp& net() const { return net_; }
    std::size_t image_size() const { return net_.input_size(); }
    std::size_t feature_size() const;

private:
    Mlp net_;
};

// Uniform prior on [-1, 1]^z_dim.
class LatentPrior {
public:
    explicit LatentPrior(std::size_t z_dim) : z_dim_(z_dim) {}
    ad::Tensor sample(Rng& rng, std::size_t batch) const;
    std::size_t z_dim() const { return z_dim_; }

private:
    std::size_t z_dim_;
};

class GanModel {
public:
    GanModel() = default;
    GanModel(Generator g, Discriminator d, std::size_t height, std::size_t width);

    // Glorot-uniform weights and zero biases drawn from `seed`.
    static GanModel create(const ModelConfig& config, std::uint64_t seed);

    std::vector<ad::NamedTensor> to_named_tensors() const;
    static GanModel from_named_tensors(const std::vector<ad::NamedTensor>& tensors);
    void save(const std::filesystem::path& path) const;
    static GanModel load(const std::filesystem::path& path);

    Generator generator;
    Discriminator discriminator;

    std::size_t z_dim() const { return generator.z_dim(); }
    std::size_t height() const { return height_; }
    std::size_t width() const { return width_; }
    std::size_t image_size() const { return height_ * width_; }
    bool all_finite() const;

private:
    std::size_t height_ = 0;
    std::size_t width_ = 0;
};

// Convenience evaluation outside any caller-managed graph.
ad::Tensor generate(const Generator& g, const ad::Tensor& z);

struct Discrimination {
    ad::Tensor scores;
    ad::Tensor features;
};
Discrimination discriminate(const Discriminator& d, const ad::Tensor& x);

// Rows `indices` of a (N, P) matrix as a (len, P) matrix.
ad::Tensor gather_rows(const ad::Tensor& m, const std::vector<std::size_t>& indices);

}  // namespace nad::gan
