#include "nad/ganmodel/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <utility>

#include "nad/autodiff/optimizer.hpp"
#include "nad/error.hpp"
#include "nad/util/hash.hpp"
#include "nad/util/random.hpp"

namespace nad::gan {

using ad::Graph;
using ad::Tensor;
using ad::Var;

namespace {

const char* loss_name(GeneratorLoss kind) {
    return kind == GeneratorLoss::minimax ? "minimax" : "non_saturating";
}

nlohmann::json to_json(const LossRecord& r) {
    return {{"loss_d_adv", r.loss_d_adv},
            {"loss_an", r.loss_an},
            {"loss_d_total", r.loss_d_total},
            {"loss_g", r.loss_g}};
}

bool finite(const LossRecord& r) {
    return std::isfinite(r.loss_d_adv) && std::isfinite(r.loss_an) &&
           std::isfinite(r.loss_d_total) && std::isfinite(r.loss_g);
}

void require_images(const Tensor& t, std::size_t width, const char* what) {
    if (t.rank() != 2 || t.shape()[1] != width) {
        throw Error(Errc::shape_mismatch, std::string(what) + " must be (count, " +
                                              std::to_string(width) + "), got " +
                                              ad::shape_string(t.shape()));
    }
}

std::vector<Tensor> snapshot(const GanModel& model) {
    std::vector<Tensor> out;
    for (const Mlp* net : {&model.generator.net(), &model.discriminator.net()}) {
        for (const Linear& l : net->layers()) {
            out.push_back(l.weight);
            out.push_back(l.bias);
        }
    }
    return out;
}

void restore(GanModel& model, const std::vector<Tensor>& saved) {
    std::size_t k = 0;
    for (Mlp* net : {&model.generator.net(), &model.discriminator.net()}) {
        for (Linear& l : net->layers()) {
            std::ranges::copy(saved[k++].data(), l.weight.data().begin());
            std::ranges::copy(saved[k++].data(), l.bias.data().begin());
            l.weight.clear_grad();
            l.bias.clear_grad();
        }
    }
}

}  // namespace

nlohmann::json to_json(const TrainConfig& cfg) {
    return {{"epochs", cfg.epochs},     {"batch_size", cfg.batch_size},
            {"lr_g", cfg.lr_g},         {"lr_d", cfg.lr_d},
            {"gamma", cfg.gamma},       {"seed", cfg.seed},
            {"generator_loss", loss_name(cfg.generator_loss)}};
}

std::string config_hash(const TrainConfig& cfg) { return sha256_hex(to_json(cfg).dump()); }

nlohmann::json to_json(const TrainReport& report) {
    nlohmann::json epochs = nlohmann::json::array();
    for (const EpochRecord& e : report.per_epoch) {
        nlohmann::json j = to_json(e.losses);
        j["epoch"] = e.epoch;
        epochs.push_back(std::move(j));
    }
    return {{"config_hash", report.config_hash},
            {"per_epoch", std::move(epochs)},
            {"checkpoint_path", report.checkpoint_path},
            {"seed", report.seed}};
}

LossRecord discriminator_backward(GanModel& model, const Tensor& real, const Tensor& z,
                                  const Tensor* abnormal, double gamma) {
    require_gamma(gamma);
    Graph g;
    const BoundLayers d = model.discriminator.net().bind_trainable(g);
    const BoundLayers gen = std::as_const(model.generator.net()).bind_frozen(g);

    const Var fake = model.generator.forward(g, gen, g.input(z));
    const Var d_real = model.discriminator.forward(g, d, g.input(real)).score;
    const Var d_fake = model.discriminator.forward(g, d, fake).score;
    const Var adv = discriminator_adversarial_loss(g, d_real, d_fake);

    LossRecord r;
    r.loss_d_adv = g.scalar(adv);
    if (abnormal == nullptr) {
        r.loss_d_total = r.loss_d_adv;
        g.backward(adv);
        return r;
    }
    const Var d_abn = model.discriminator.forward(g, d, g.input(*abnormal)).score;
    const Var an = anomaly_penalty_loss(g, d_abn);
    const Var total = discriminator_total_loss(g, adv, an, gamma);
    r.loss_an = g.scalar(an);
    r.loss_d_total = g.scalar(total);
    g.backward(total);
    return r;
}

double generator_backward(GanModel& model, const Tensor& z, GeneratorLoss kind) {
    Graph g;
    const BoundLayers gen = model.generator.net().bind_trainable(g);
    const BoundLayers d = std::as_const(model.discriminator.net()).bind_frozen(g);
    const Var fake = model.generator.forward(g, gen, g.input(z));
    const Var loss = generator_loss(g, model.discriminator.forward(g, d, fake).score, kind);
    g.backward(loss);
    return g.scalar(loss);
}

TrainReport train(GanModel& model, const Tensor& normals, const Tensor& abnormals,
                  const TrainConfig& cfg, const TrainOptions& options) {
    require_gamma(cfg.gamma);
    if (cfg.batch_size == 0) throw Error(Errc::invalid_argument, "batch_size must be positive");
    if (normals.numel() == 0) throw Error(Errc::empty_normal_set, "no normal training images");
    require_images(normals, model.image_size(), "normal set");
    const bool use_abnormal = abnormals.numel() > 0;
    if (use_abnormal) require_images(abnormals, model.image_size(), "abnormal set");

    TrainReport report;
    report.config_hash = config_hash(cfg);
    report.seed = cfg.seed;

    ad::Adam opt_d(model.discriminator.net().parameters(), {.lr = cfg.lr_d});
    ad::Adam opt_g(model.generator.net().parameters(), {.lr = cfg.lr_g});
    Rng batch_rng(derive_seed(cfg.seed, streams::batches));
    Rng abnormal_rng(derive_seed(cfg.seed, streams::abnormal));
    const LatentPrior prior(model.generator.z_dim());

    const std::size_t n = normals.rows();
    std::vector<std::size_t> order(n);
    std::vector<Tensor> last_good = snapshot(model);

    auto diverge = [&](std::size_t epoch, std::size_t iteration, const std::string& why) {
        restore(model, last_good);
        if (!options.checkpoint_path.empty()) model.save(options.checkpoint_path);
        throw Error(Errc::divergence_detected, "epoch " + std::to_string(epoch) + " iteration " +
                                                   std::to_string(iteration) + ": " + why);
    };

    std::size_t iteration = 0;
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::shuffle(order.begin(), order.end(), batch_rng);
        LossRecord sum;
        std::size_t batches = 0;
        for (std::size_t start = 0; start < n; start += cfg.batch_size, ++iteration) {
            const std::size_t b = std::min(cfg.batch_size, n - start);
            const std::vector<std::size_t> idx(order.begin() + static_cast<std::ptrdiff_t>(start),
                                               order.begin() + static_cast<std::ptrdiff_t>(start + b));
            const Tensor real = gather_rows(normals, idx);
            const Tensor z_d = prior.sample(batch_rng, b);
            const Tensor z_g = prior.sample(batch_rng, b);
            Tensor abnormal;
            if (use_abnormal) {
                std::uniform_int_distribution<std::size_t> pick(0, abnormals.rows() - 1);
                std::vector<std::size_t> aidx(b);
                for (auto& i : aidx) i = pick(abnormal_rng);
                abnormal = gather_rows(abnormals, aidx);
            }

            LossRecord r;
            try {
                r = discriminator_backward(model, real, z_d, use_abnormal ? &abnormal : nullptr,
                                           cfg.gamma);
                opt_d.step();
                r.loss_g = generator_backward(model, z_g, cfg.generator_loss);
                opt_g.step();
            } catch (const Error& e) {
                if (e.code() != Errc::non_finite) throw;
                diverge(epoch, iteration, e.what());
            }
            if (!finite(r) || !model.all_finite()) diverge(epoch, iteration, "non-finite loss or parameter");

            report.iterations.push_back({epoch, iteration, r});
            sum.loss_d_adv += r.loss_d_adv;
            sum.loss_an += r.loss_an;
            sum.loss_d_total += r.loss_d_total;
            sum.loss_g += r.loss_g;
            ++batches;
        }
        const double k = static_cast<double>(batches);
        report.per_epoch.push_back(
            {epoch, {sum.loss_d_adv / k, sum.loss_an / k, sum.loss_d_total / k, sum.loss_g / k}});
        last_good = snapshot(model);
        if (options.on_epoch_end) options.on_epoch_end(epoch, model);
    }

    if (!options.checkpoint_path.empty()) {
        model.save(options.checkpoint_path);
        report.checkpoint_path = options.checkpoint_path.string();
    }
    return report;
}

}  // namespace nad::gan
