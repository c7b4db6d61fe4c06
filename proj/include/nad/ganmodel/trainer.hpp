#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nad/autodiff/tensor.hpp"
#include "nad/ganmodel/losses.hpp"
#include "nad/ganmodel/network.hpp"

namespace nad::gan {

struct TrainConfig {
    std::size_t epochs = 20;
    std::size_t batch_size = 32;
    double lr_g = 2e-4;
    double lr_d = 2e-4;
    double gamma = 0.1;
    std::uint64_t seed = 0;
    GeneratorLoss generator_loss = GeneratorLoss::non_saturating;
};

struct LossRecord {
    double loss_d_adv = 0.0;
    // Zero when no abnormal images were supplied.
    double loss_an = 0.0;
    double loss_d_total = 0.0;
    double loss_g = 0.0;
};

struct IterationRecord {
    std::size_t epoch = 0;
    std::size_t iteration = 0;
    LossRecord losses;
};

struct EpochRecord {
    std::size_t epoch = 0;
    // Means over the epoch's iterations.
    LossRecord losses;
};

struct TrainReport {
    std::string config_hash;
    std::vector<EpochRecord> per_epoch;
    std::vector<IterationRecord> iterations;
    std::string checkpoint_path;
    std::uint64_t seed = 0;
};

struct TrainOptions {
    // Written after training, and with the last good parameters on divergence.
    // Empty means no checkpoint file.
    std::filesystem::path checkpoint_path;
    std::function<void(std::size_t epoch, const GanModel&)> on_epoch_end;
};

nlohmann::json to_json(const TrainConfig& cfg);
nlohmann::json to_json(const TrainReport& report);
std::string config_hash(const TrainConfig& cfg);

// One discriminator update's loss and gradients. Gradients are accumulated into the
// discriminator parameters; the generator is read only. `abnormal` may be null,
// in which case the adversarial loss alone is used.
LossRecord discriminator_backward(GanModel& model, const ad::Tensor& real, const ad::Tensor& z,
                                  const ad::Tensor* abnormal, double gamma);

// One generator update's loss and gradients, accumulated into the generator parameters.
double generator_backward(GanModel& model, const ad::Tensor& z, GeneratorLoss kind);

// Trains in place. normals and abnormals are (count, H*W) matrices; abnormals may
// have zero rows. Throws EmptyNormalSet, GammaOutOfRange, or DivergenceDetected
// (the model is restored to the last completed epoch before throwing).
TrainReport train(GanModel& model, const ad::Tensor& normals, const ad::Tensor& abnormals,
                  const TrainConfig& cfg, const TrainOptions& options = {});

}  // namespace nad::gan
