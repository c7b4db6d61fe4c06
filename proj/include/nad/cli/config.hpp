#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "nad/ganmodel/trainer.hpp"
#include "nad/latentsearch/search.hpp"

namespace nad::cli {

struct DatasetSpec {
    std::string kind = "mnist";  // mnist | synthetic | ir_mnist
    std::string images;
    std::string labels;
    int normal_class = 0;
    double contamination = 0.0;
    // synthetic
    std::size_t n = 512;
    double defect_rate = 0.1;
    // ir_mnist
    int excluded_digit = 3;
    std::size_t n_train = 200;
    std::size_t n_test = 50;
};

struct SearchOptions {
    std::size_t restarts = 1;
    std::string step_rule = "adam";  // adam | gd
    double lr = 0.05;
    std::string selection = "best";  // best | last
};

struct ExperimentConfig {
    double gamma = 0.1;
    double lambda = 0.1;
    std::size_t n_iters = 500;
    std::size_t z_dim = 32;
    std::size_t epochs = 20;
    std::size_t batch_size = 32;
    double lr_g = 2e-4;
    double lr_d = 2e-4;
    std::uint64_t seed = 0;
    std::string generator_loss = "non_saturating";  // non_saturating | minimax
    DatasetSpec dataset;
    SearchOptions search;

    // Throws InvalidArgument, GammaOutOfRange, LambdaOutOfRange or FractionOutOfRange.
    void validate() const;
    gan::TrainConfig train_config() const;
    latent::SearchConfig search_config() const;
    gan::ModelConfig model_config(std::size_t height, std::size_t width) const;
};

nlohmann::json to_json(const ExperimentConfig& c);
// Missing fields keep their defaults; unknown fields are an InvalidArgument.
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);
std::string config_hash(const ExperimentConfig& c);

}  // namespace nad::cli
