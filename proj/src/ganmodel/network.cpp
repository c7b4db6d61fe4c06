#include "nad/ganmodel/network.hpp"

#include <cmath>
#include <map>
#include <string>

#include "nad/error.hpp"

namespace nad::gan {

using ad::Graph;
using ad::Tensor;
using ad::Var;

namespace {

Var affine(Graph& g, Var x, Var weight, Var bias) {
    return g.broadcast_add_row(g.matmul(x, weight), bias);
}

void require_input(const Graph& g, Var x, std::size_t width, const char* who) {
    const Tensor& t = g.value(x);
    if (t.rank() != 2 || t.shape()[1] != width) {
        throw Error(Errc::shape_mismatch, std::string(who) + " expects (batch, " +
                                              std::to_string(width) + "), got " +
                                              ad::shape_string(t.shape()));
    }
}

std::vector<std::size_t> chain(std::size_t in, const std::vector<std::size_t>& hidden,
                               std::size_t out) {
    std::vector<std::size_t> widths{in};
    widths.insert(widths.end(), hidden.begin(), hidden.end());
    widths.push_back(out);
    return widths;
}

}  // namespace

Mlp::Mlp(const std::vector<std::size_t>& widths, Rng& rng) {
    if (widths.size() < 2) throw Error(Errc::invalid_argument, "an MLP needs at least one layer");
    for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
        const std::size_t in = widths[i], out = widths[i + 1];
        if (in == 0 || out == 0) throw Error(Errc::invalid_argument, "zero-width layer");
        const double bound = std::sqrt(6.0 / static_cast<double>(in + out));
        std::uniform_real_distribution<double> u(-bound, bound);
        Linear layer{Tensor::zeros({in, out}, true), Tensor::zeros({1, out}, true)};
        for (double& w : layer.weight.data()) w = u(rng);
        layers_.push_back(std::move(layer));
    }
}

Mlp::Mlp(std::vector<Linear> layers) : layers_(std::move(layers)) {
    if (layers_.empty()) throw Error(Errc::invalid_argument, "an MLP needs at least one layer");
    for (std::size_t i = 0; i < layers_.size(); ++i) {
        const Linear& l = layers_[i];
        if (l.weight.rank() != 2 || l.bias.numel() != l.weight.shape()[1] ||
            (i > 0 && layers_[i - 1].out_features() != l.in_features())) {
            throw Error(Errc::shape_mismatch, "layer " + std::to_string(i) + " does not chain");
        }
        layers_[i].weight.set_requires_grad(true);
        layers_[i].bias.set_requires_grad(true);
    }
}

BoundLayers Mlp::bind_frozen(Graph& g) const {
    BoundLayers b;
    for (const Linear& l : layers_) {
        b.weights.push_back(g.input(l.weight));
        b.biases.push_back(g.input(l.bias));
    }
    return b;
}

BoundLayers Mlp::bind_trainable(Graph& g) {
    BoundLayers b;
    for (Linear& l : layers_) {
        b.weights.push_back(g.watch(l.weight));
        b.biases.push_back(g.watch(l.bias));
    }
    return b;
}

std::vector<Tensor*> Mlp::parameters() {
    std::vector<Tensor*> out;
    for (Linear& l : layers_) {
        out.push_back(&l.weight);
        out.push_back(&l.bias);
    }
    return out;
}

Var Generator::forward(Graph& g, const BoundLayers& params, Var z) const {
    require_input(g, z, z_dim(), "generator");
    Var h = z;
    const std::size_t n = params.weights.size();
    for (std::size_t i = 0; i < n; ++i) {
        h = affine(g, h, params.weights[i], params.biases[i]);
        h = i + 1 < n ? g.leaky_relu(h) : g.tanh(h);
    }
    return h;
}

DiscriminatorOutput Discriminator::forward(Graph& g, const BoundLayers& params, Var x) const {
    require_input(g, x, image_size(), "discriminator");
    const std::size_t n = params.weights.size();
    Var h = x;
    Var features = x;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        h = g.leaky_relu(affine(g, h, params.weights[i], params.biases[i]));
        features = h;
    }
    const Var score = g.sigmoid(affine(g, h, params.weights[n - 1], params.biases[n - 1]));
    return {score, features};
}

std::size_t Discriminator::feature_size() const {
    const auto& layers = net_.layers();
    return layers.size() > 1 ? layers[layers.size() - 2].out_features() : image_size();
}

Tensor LatentPrior::sample(Rng& rng, std::size_t batch) const {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Tensor z = Tensor::zeros({batch, z_dim_});
    for (double& v : z.data()) v = u(rng);
    return z;
}

GanModel::GanModel(Generator g, Discriminator d, std::size_t height, std::size_t width)
    : generator(std::move(g)), discriminator(std::move(d)), height_(height), width_(width) {
    if (generator.image_size() != height * width || discriminator.image_size() != height * width) {
        throw Error(Errc::shape_mismatch, "generator/discriminator widths do not match " +
                                              std::to_string(height) + "x" + std::to_string(width));
    }
    if (discriminator.net().output_size() != 1) {
        throw Error(Errc::shape_mismatch, "discriminator must output one score");
    }
}

GanModel GanModel::create(const ModelConfig& config, std::uint64_t seed) {
    if (config.z_dim == 0 || config.height == 0 || config.width == 0) {
        throw Error(Errc::invalid_argument, "z_dim and image dims must be positive");
    }
    Rng rng(derive_seed(seed, streams::init));
    Mlp g(chain(config.z_dim, config.generator_hidden, config.image_size()), rng);
    Mlp d(chain(config.image_size(), config.discriminator_hidden, 1), rng);
    return GanModel(Generator(std::move(g)), Discriminator(std::move(d)), config.height,
                    config.width);
}

std::vector<ad::NamedTensor> GanModel::to_named_tensors() const {
    std::vector<ad::NamedTensor> out;
    out.push_back({"meta.image_shape", Tensor({2}, {static_cast<double>(height_),
                                                   static_cast<double>(width_)})});
    auto emit = [&out](const std::string& prefix, const Mlp& net) {
        for (std::size_t i = 0; i < net.layers().size(); ++i) {
            Tensor w = net.layers()[i].weight;
            Tensor b = net.layers()[i].bias;
            w.clear_grad();
            b.clear_grad();
            out.push_back({prefix + "." + std::to_string(i) + ".weight", std::move(w)});
            out.push_back({prefix + "." + std::to_string(i) + ".bias", std::move(b)});
        }
    };
    emit("generator", generator.net());
    emit("discriminator", discriminator.net());
    return out;
}

GanModel GanModel::from_named_tensors(const std::vector<ad::NamedTensor>& tensors) {
    std::map<std::string, const Tensor*> by_name;
    for (const auto& t : tensors) by_name[t.name] = &t.tensor;
    auto find = [&](const std::string& name) -> const Tensor* {
        auto it = by_name.find(name);
        return it == by_name.end() ? nullptr : it->second;
    };
    const Tensor* meta = find("meta.image_shape");
    if (!meta || meta->numel() != 2) {
        throw Error(Errc::validation_failed, "checkpoint lacks meta.image_shape");
    }
    auto load_net = [&](const std::string& prefix) {
        std::vector<Linear> layers;
        for (std::size_t i = 0;; ++i) {
            const Tensor* w = find(prefix + "." + std::to_string(i) + ".weight");
            const Tensor* b = find(prefix + "." + std::to_string(i) + ".bias");
            if (!w || !b) break;
            layers.push_back({*w, *b});
        }
        if (layers.empty()) throw Error(Errc::validation_failed, "checkpoint lacks " + prefix);
        return Mlp(std::move(layers));
    };
    const auto height = static_cast<std::size_t>((*meta)[0]);
    const auto width = static_cast<std::size_t>((*meta)[1]);
    return GanModel(Generator(load_net("generator")), Discriminator(load_net("discriminator")),
                    height, width);
}

void GanModel::save(const std::filesystem::path& path) const {
    ad::write_checkpoint(path, to_named_tensors());
}

GanModel GanModel::load(const std::filesystem::path& path) {
    return from_named_tensors(ad::read_checkpoint(path));
}

bool GanModel::all_finite() const {
    for (const Mlp* net : {&generator.net(), &discriminator.net()}) {
        for (const Linear& l : net->layers()) {
            if (!l.weight.all_finite() || !l.bias.all_finite()) return false;
        }
    }
    return true;
}

Tensor generate(const Generator& gen, const Tensor& z) {
    Graph g;
    return g.value(gen.forward(g, g.input(z)));
}

Discrimination discriminate(const Discriminator& d, const Tensor& x) {
    Graph g;
    const auto out = d.forward(g, g.input(x));
    return {g.value(out.score), g.value(out.features)};
}

Tensor gather_rows(const Tensor& m, const std::vector<std::size_t>& indices) {
    const std::size_t cols = m.cols();
    std::vector<double> out;
    out.reserve(indices.size() * cols);
    for (std::size_t i : indices) {
        if (i >= m.rows()) throw Error(Errc::invalid_argument, "row index out of range");
        const auto r = m.row(i);
        out.insert(out.end(), r.begin(), r.end());
    }
    return Tensor({indices.size(), cols}, std::move(out));
}

}  // namespace nad::gan
