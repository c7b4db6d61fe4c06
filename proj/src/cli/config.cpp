#include "nad/cli/config.hpp"

#include <fstream>
#include <set>

#include "nad/error.hpp"
#include "nad/latentsearch/losses.hpp"
#include "nad/util/hash.hpp"

namespace nad::cli {

namespace {

void check_keys(const nlohmann::json& j, const std::set<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) throw Error(Errc::invalid_argument, where + " must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        if (!allowed.contains(key)) throw Error(Errc::invalid_argument, "unknown config field " + where + "." + key);
    }
}

template <class T>
void read(const nlohmann::json& j, const char* key, T& out) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw Error(Errc::invalid_argument, std::string("config field ") + key + " has the wrong type");
    }
}

}  // namespace

void ExperimentConfig::validate() const {
    gan::require_gamma(gamma);
    latent::require_lambda(lambda);
    if (n_iters == 0) throw Error(Errc::invalid_argument, "n_iters must be at least 1");
    if (z_dim == 0) throw Error(Errc::invalid_argument, "z_dim must be at least 1");
    if (batch_size == 0) throw Error(Errc::invalid_argument, "batch_size must be at least 1");
    if (!(lr_g > 0.0) || !(lr_d > 0.0)) throw Error(Errc::invalid_argument, "learning rates must be positive");
    if (generator_loss != "non_saturating" && generator_loss != "minimax") {
        throw Error(Errc::invalid_argument, "generator_loss must be non_saturating or minimax");
    }
    const auto& d = dataset;
    if (d.kind != "mnist" && d.kind != "synthetic" && d.kind != "ir_mnist") {
        throw Error(Errc::invalid_argument, "dataset.kind must be mnist, synthetic or ir_mnist");
    }
    if (!(d.contamination >= 0.0 && d.contamination <= 0.5)) {
        throw Error(Errc::fraction_out_of_range, "dataset.contamination must lie in [0, 0.5]");
    }
    if (!(d.defect_rate >= 0.0 && d.defect_rate <= 1.0)) {
        throw Error(Errc::invalid_argument, "dataset.defect_rate must lie in [0, 1]");
    }
    if (d.kind == "mnist" && (d.normal_class < 0 || d.normal_class > 9)) {
        throw Error(Errc::invalid_argument, "dataset.normal_class must be a digit");
    }
    if (search.step_rule != "adam" && search.step_rule != "gd") {
        throw Error(Errc::invalid_argument, "search.step_rule must be adam or gd");
    }
    if (search.selection != "best" && search.selection != "last") {
        throw Error(Errc::invalid_argument, "search.selection must be best or last");
    }
    search_config().validate();
}

gan::TrainConfig ExperimentConfig::train_config() const {
    gan::TrainConfig t;
    t.epochs = epochs;
    t.batch_size = batch_size;
    t.lr_g = lr_g;
    t.lr_d = lr_d;
    t.gamma = gamma;
    t.seed = seed;
    t.generator_loss = generator_loss == "minimax" ? gan::GeneratorLoss::minimax
                                                   : gan::GeneratorLoss::non_saturating;
    return t;
}

latent::SearchConfig ExperimentConfig::search_config() const {
    latent::SearchConfig s;
    s.n_iters = n_iters;
    s.gamma = gamma;
    s.lambda = lambda;
    s.step_rule = search.step_rule == "gd" ? latent::StepRule::gradient_descent : latent::StepRule::adam;
    s.lr = search.lr;
    s.restarts = search.restarts;
    s.selection = search.selection == "last" ? latent::Selection::last : latent::Selection::best;
    return s;
}

gan::ModelConfig ExperimentConfig::model_config(std::size_t height, std::size_t width) const {
    gan::ModelConfig m;
    m.z_dim = z_dim;
    m.height = height;
    m.width = width;
    return m;
}

nlohmann::json to_json(const ExperimentConfig& c) {
    const auto& d = c.dataset;
    return {{"gamma", c.gamma},
            {"lambda", c.lambda},
            {"n_iters", c.n_iters},
            {"z_dim", c.z_dim},
            {"epochs", c.epochs},
            {"batch_size", c.batch_size},
            {"lr_g", c.lr_g},
            {"lr_d", c.lr_d},
            {"seed", c.seed},
            {"generator_loss", c.generator_loss},
            {"dataset",
             {{"kind", d.kind},
              {"images", d.images},
              {"labels", d.labels},
              {"normal_class", d.normal_class},
              {"contamination", d.contamination},
              {"n", d.n},
              {"defect_rate", d.defect_rate},
              {"excluded_digit", d.excluded_digit},
              {"n_train", d.n_train},
              {"n_test", d.n_test}}},
            {"search",
             {{"restarts", c.search.restarts},
              {"step_rule", c.search.step_rule},
              {"lr", c.search.lr},
              {"selection", c.search.selection}}}};
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
    ExperimentConfig c;
    check_keys(j,
               {"gamma", "lambda", "n_iters", "z_dim", "epochs", "batch_size", "lr_g", "lr_d", "seed",
                "generator_loss", "dataset", "search"},
               "config");
    read(j, "gamma", c.gamma);
    read(j, "lambda", c.lambda);
    read(j, "n_iters", c.n_iters);
    read(j, "z_dim", c.z_dim);
    read(j, "epochs", c.epochs);
    read(j, "batch_size", c.batch_size);
    read(j, "lr_g", c.lr_g);
    read(j, "lr_d", c.lr_d);
    read(j, "seed", c.seed);
    read(j, "generator_loss", c.generator_loss);
    if (j.contains("dataset")) {
        const auto& d = j.at("dataset");
        check_keys(d,
                   {"kind", "images", "labels", "normal_class", "contamination", "n", "defect_rate",
                    "excluded_digit", "n_train", "n_test"},
                   "dataset");
        read(d, "kind", c.dataset.kind);
        read(d, "images", c.dataset.images);
        read(d, "labels", c.dataset.labels);
        read(d, "normal_class", c.dataset.normal_class);
        read(d, "contamination", c.dataset.contamination);
        read(d, "n", c.dataset.n);
        read(d, "defect_rate", c.dataset.defect_rate);
        read(d, "excluded_digit", c.dataset.excluded_digit);
        read(d, "n_train", c.dataset.n_train);
        read(d, "n_test", c.dataset.n_test);
    }
    if (j.contains("search")) {
        const auto& s = j.at("search");
        check_keys(s, {"restarts", "step_rule", "lr", "selection"}, "search");
        read(s, "restarts", c.search.restarts);
        read(s, "step_rule", c.search.step_rule);
        read(s, "lr", c.search.lr);
        read(s, "selection", c.search.selection);
    }
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::io_error, "cannot open config " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::invalid_argument, "config " + path.string() + " is not valid JSON: " + e.what());
    }
    return config_from_json(j);
}

std::string config_hash(const ExperimentConfig& c) { return sha256_hex(to_json(c).dump()); }

}  // namespace nad::cli
