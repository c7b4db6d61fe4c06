#include "nad/cli/app.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "nad/cli/config.hpp"
#include "nad/cli/manifest.hpp"
#include "nad/dataio/dataset.hpp"
#include "nad/dataio/idx.hpp"
#include "nad/dataio/split.hpp"
#include "nad/distmath/identity_suite.hpp"
#include "nad/evalharness/metrics.hpp"
#include "nad/ganmodel/trainer.hpp"
#include "nad/latentsearch/report.hpp"
#include "nad/latentsearch/search.hpp"
#include "nad/util/hash.hpp"
#include "nad/util/random.hpp"

namespace nad::cli {

namespace fs = std::filesystem;
using nlohmann::json;

int exit_code_for(Errc code) {
    switch (code) {
        case Errc::invalid_argument:
        case Errc::gamma_out_of_range:
        case Errc::lambda_out_of_range:
        case Errc::fraction_out_of_range:
            return kExitArgument;
        case Errc::io_error:
            return kExitIo;
        case Errc::domain_error:
        case Errc::non_finite:
        case Errc::divergence_detected:
        case Errc::non_finite_loss:
            return kExitNumerical;
        default:
            return kExitValidation;
    }
}

namespace {

constexpr const char* kSplitFormat = "nad-split/1";

void log_line(json j) {
    j["level"] = j.value("level", "info");
    std::cerr << j.dump() << '\n';
}

int report_error(int code, const std::string& error, const std::string& message, json extra = json::object()) {
    extra["level"] = "error";
    extra["error"] = error;
    extra["exit_code"] = code;
    extra["message"] = message;
    log_line(std::move(extra));
    return code;
}

struct CommandFailure {
    int code;
    std::string error;
    std::string message;
    json extra;
};

// Output bookkeeping shared by every command that writes files.
class Outputs {
public:
    explicit Outputs(fs::path root) : root_(std::move(root)) {}
    const fs::path& root() const { return root_; }
    fs::path add(const fs::path& relative) {
        files_.push_back(relative);
        return root_ / relative;
    }
    std::map<std::string, std::string> hashes() const {
        std::map<std::string, std::string> out;
        for (const auto& f : files_) out[f.generic_string()] = sha256_file(root_ / f);
        return out;
    }

private:
    fs::path root_;
    std::vector<fs::path> files_;
};

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Errc::io_error, "cannot write " + path.string());
    out << text;
    if (!out) throw Error(Errc::io_error, "failed writing " + path.string());
}

json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::io_error, "cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw Error(Errc::validation_failed, path.string() + " is not valid JSON: " + e.what());
    }
}

void make_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(Errc::io_error, "cannot create " + dir.string() + ": " + ec.message());
}

// Flags that override ExperimentConfig fields; only flags given on the command line apply.
struct ConfigFlags {
    std::string config_path;
    ExperimentConfig v;
    std::vector<std::pair<CLI::Option*, std::function<void(ExperimentConfig&)>>> setters;

    template <class T>
    void flag(CLI::App* app, const std::string& name, T ExperimentConfig::*field, T& storage,
              const std::string& help) {
        auto* opt = app->add_option(name, storage, help);
        setters.emplace_back(opt, [field, &storage](ExperimentConfig& c) { c.*field = storage; });
    }
    template <class T, class F>
    void nested(CLI::App* app, const std::string& name, T& storage, F assign, const std::string& help) {
        auto* opt = app->add_option(name, storage, help);
        setters.emplace_back(opt, [assign, &storage](ExperimentConfig& c) { assign(c, storage); });
    }

    void add_config(CLI::App* app) { app->add_option("--config", config_path, "ExperimentConfig JSON file"); }

    ExperimentConfig resolve() const {
        ExperimentConfig c = config_path.empty() ? ExperimentConfig{} : load_config(config_path);
        for (const auto& [opt, set] : setters) {
            if (opt->count() > 0) set(c);
        }
        c.validate();
        return c;
    }
};

struct FlagStorage {
    double gamma = 0, lambda = 0, lr_g = 0, lr_d = 0, contamination = 0, defect_rate = 0, search_lr = 0;
    std::size_t n_iters = 0, z_dim = 0, epochs = 0, batch_size = 0, n = 0, restarts = 0, n_train = 0, n_test = 0;
    std::uint64_t seed = 0;
    int normal_class = 0, excluded_digit = 0;
    std::string generator_loss, kind, images, labels, step_rule, selection;
};

void add_seed_flag(ConfigFlags& f, FlagStorage& s, CLI::App* app) {
    f.flag(app, "--seed", &ExperimentConfig::seed, s.seed, "base seed");
}

void add_dataset_flags(ConfigFlags& f, FlagStorage& s, CLI::App* app) {
    f.nested(app, "--dataset", s.kind, [](ExperimentConfig& c, const std::string& v) {
        c.dataset.kind = v == "ir-mnist" ? "ir_mnist" : v;
    }, "mnist | synthetic | ir-mnist");
    f.nested(app, "--images", s.images, [](ExperimentConfig& c, const std::string& v) { c.dataset.images = v; },
             "IDX image file");
    f.nested(app, "--labels", s.labels, [](ExperimentConfig& c, const std::string& v) { c.dataset.labels = v; },
             "IDX label file");
    f.nested(app, "--normal-class", s.normal_class,
             [](ExperimentConfig& c, int v) { c.dataset.normal_class = v; }, "normal digit");
    f.nested(app, "--contamination", s.contamination,
             [](ExperimentConfig& c, double v) { c.dataset.contamination = v; },
             "fraction of normal_train replaced by abnormal images");
    f.nested(app, "--n", s.n, [](ExperimentConfig& c, std::size_t v) { c.dataset.n = v; },
             "synthetic corpus size");
    f.nested(app, "--defect-rate", s.defect_rate,
             [](ExperimentConfig& c, double v) { c.dataset.defect_rate = v; }, "synthetic defect rate");
    f.nested(app, "--excluded-digit", s.excluded_digit,
             [](ExperimentConfig& c, int v) { c.dataset.excluded_digit = v; }, "IR-MNIST excluded digit");
    f.nested(app, "--n-train", s.n_train, [](ExperimentConfig& c, std::size_t v) { c.dataset.n_train = v; },
             "IR-MNIST training puzzles");
    f.nested(app, "--n-test", s.n_test, [](ExperimentConfig& c, std::size_t v) { c.dataset.n_test = v; },
             "IR-MNIST test puzzles");
}

void add_train_flags(ConfigFlags& f, FlagStorage& s, CLI::App* app) {
    f.flag(app, "--gamma", &ExperimentConfig::gamma, s.gamma, "adversarial weight in (0, 1]");
    f.flag(app, "--z-dim", &ExperimentConfig::z_dim, s.z_dim, "latent dimension");
    f.flag(app, "--epochs", &ExperimentConfig::epochs, s.epochs, "training epochs");
    f.flag(app, "--batch-size", &ExperimentConfig::batch_size, s.batch_size, "batch size");
    f.flag(app, "--lr-g", &ExperimentConfig::lr_g, s.lr_g, "generator learning rate");
    f.flag(app, "--lr-d", &ExperimentConfig::lr_d, s.lr_d, "discriminator learning rate");
    f.flag(app, "--generator-loss", &ExperimentConfig::generator_loss, s.generator_loss,
           "non_saturating | minimax");
}

void add_search_flags(ConfigFlags& f, FlagStorage& s, CLI::App* app) {
    f.flag(app, "--gamma", &ExperimentConfig::gamma, s.gamma, "L_Ano weight in (0, 1]");
    f.flag(app, "--lambda", &ExperimentConfig::lambda, s.lambda, "feature-matching weight in [0, 1]");
    f.flag(app, "--n-iters", &ExperimentConfig::n_iters, s.n_iters, "latent updates per restart");
    f.nested(app, "--restarts", s.restarts, [](ExperimentConfig& c, std::size_t v) { c.search.restarts = v; },
             "independent initial latents");
    f.nested(app, "--step-rule", s.step_rule,
             [](ExperimentConfig& c, const std::string& v) { c.search.step_rule = v; }, "adam | gd");
    f.nested(app, "--search-lr", s.search_lr, [](ExperimentConfig& c, double v) { c.search.lr = v; },
             "latent step size");
    f.nested(app, "--selection", s.selection,
             [](ExperimentConfig& c, const std::string& v) { c.search.selection = v; }, "best | last");
}

// Dataset and split reconstructed from a split file.
struct Prepared {
    json dataset;
    data::LabeledImageSet images;
    data::ExperimentSplit split;
};

data::LabeledImageSet build_images(const json& ds) {
    const std::string kind = ds.at("kind").get<std::string>();
    if (kind == "synthetic") {
        return data::generate_synthetic_corpus({ds.at("n").get<std::size_t>(), ds.at("defect_rate").get<double>(),
                                                ds.at("seed").get<std::uint64_t>()});
    }
    const fs::path images = ds.at("images").get<std::string>();
    const fs::path labels = ds.at("labels").get<std::string>();
    for (const auto& [path, key] : {std::pair{images, "images_sha256"}, std::pair{labels, "labels_sha256"}}) {
        if (ds.contains(key) && sha256_file(path) != ds.at(key).get<std::string>()) {
            throw Error(Errc::validation_failed, path.string() + " does not match the recorded hash");
        }
    }
    auto mnist = data::load_mnist(images, labels);
    if (kind == "mnist") return mnist;
    if (kind != "ir_mnist") throw Error(Errc::validation_failed, "unknown dataset kind " + kind);

    data::IrMnistConfig cfg;
    cfg.excluded_digit = ds.at("excluded_digit").get<int>();
    cfg.seed = ds.at("seed").get<std::uint64_t>();
    cfg.n_samples = ds.at("n_train").get<std::size_t>();
    auto train = data::build_ir_mnist(mnist, cfg);
    cfg.variant = data::PuzzleVariant::test;
    cfg.n_samples = ds.at("n_test").get<std::size_t>();
    cfg.seed = derive_seed(cfg.seed, 1);
    auto test = data::build_ir_mnist(mnist, cfg);
    auto out = std::move(train.images);
    out.pixels.insert(out.pixels.end(), test.images.pixels.begin(), test.images.pixels.end());
    out.labels.insert(out.labels.end(), test.images.labels.begin(), test.images.labels.end());
    return out;
}

data::ExperimentSplit build_split_for(const json& ds, const data::LabeledImageSet& images) {
    const std::string kind = ds.at("kind").get<std::string>();
    const auto seed = ds.at("seed").get<std::uint64_t>();
    if (kind == "mnist") return data::build_mnist_split(images, ds.at("normal_class").get<int>(), seed);
    if (kind == "synthetic") return data::build_split(images, 0, {0, 1}, seed);
    data::ExperimentSplit s;
    s.seed = seed;
    const auto n_train = ds.at("n_train").get<std::size_t>();
    for (std::size_t i = 0; i < images.size(); ++i) {
        if (i < n_train) {
            s.normal_train.push_back(i);
        } else {
            s.test.push_back(i);
            s.test_labels.push_back(images.labels[i]);
        }
    }
    return s;
}

Prepared load_prepared(const fs::path& split_path) {
    const json j = read_json(split_path);
    try {
        if (j.at("format").get<std::string>() != kSplitFormat) {
            throw Error(Errc::validation_failed, split_path.string() + " is not a split file");
        }
        Prepared p;
        p.dataset = j.at("dataset");
        p.images = build_images(p.dataset);
        p.split = data::split_from_json(j.at("split"));
        data::validate_split(p.split, p.images.size());
        return p;
    } catch (const json::exception& e) {
        throw Error(Errc::validation_failed, "malformed split file: " + std::string(e.what()));
    }
}

RunManifest start_manifest(const std::string& command, const std::vector<std::string>& args,
                           const ExperimentConfig& cfg) {
    RunManifest m;
    m.command = command;
    m.argv = args;
    m.cwd = fs::current_path().string();
    m.config = to_json(cfg);
    m.config_hash = config_hash(cfg);
    m.seed = cfg.seed;
    m.started_at = utc_timestamp();
    return m;
}

void finish_manifest(RunManifest& m, const Outputs& outputs, const fs::path& manifest_path) {
    m.outputs = outputs.hashes();
    m.finished_at = utc_timestamp();
    write_manifest(manifest_path, m);
}

std::string absolute_string(const std::string& p) { return p.empty() ? p : fs::absolute(p).lexically_normal().string(); }

int cmd_prepare(const ExperimentConfig& cfg, const fs::path& out_dir, const std::vector<std::string>& args) {
    RunManifest manifest = start_manifest("prepare", args, cfg);
    const auto& d = cfg.dataset;
    json ds = {{"kind", d.kind}, {"seed", cfg.seed}};
    if (d.kind == "synthetic") {
        ds["n"] = d.n;
        ds["defect_rate"] = d.defect_rate;
    } else {
        if (d.images.empty() || d.labels.empty()) {
            throw Error(Errc::invalid_argument, "--images and --labels are required for " + d.kind);
        }
        ds["images"] = absolute_string(d.images);
        ds["labels"] = absolute_string(d.labels);
        ds["images_sha256"] = sha256_file(d.images);
        ds["labels_sha256"] = sha256_file(d.labels);
        manifest.inputs[ds["images"]] = ds["images_sha256"];
        manifest.inputs[ds["labels"]] = ds["labels_sha256"];
        if (d.kind == "mnist") {
            ds["normal_class"] = d.normal_class;
        } else {
            ds["excluded_digit"] = d.excluded_digit;
            ds["n_train"] = d.n_train;
            ds["n_test"] = d.n_test;
        }
    }
    const auto images = build_images(ds);
    auto split = build_split_for(ds, images);
    split = data::inject_contamination(split, d.contamination, cfg.seed);
    data::validate_split(split, images.size());

    make_dir(out_dir);
    Outputs outputs(out_dir);
    const json file = {{"format", kSplitFormat}, {"dataset", ds}, {"split", data::to_json(split)}};
    write_text(outputs.add("split.json"), file.dump(2) + "\n");
    finish_manifest(manifest, outputs, out_dir / "prepare.manifest.json");
    log_line({{"event", "prepared"},
              {"normal_train", split.normal_train.size()},
              {"abnormal_train", split.abnormal_train.size()},
              {"test", split.test.size()},
              {"contamination_injected", split.contamination_injected},
              {"out", (out_dir / "split.json").string()}});
    return kExitOk;
}

int cmd_train(const ExperimentConfig& cfg, const fs::path& split_path, const fs::path& out_dir, bool no_abnormal,
              const std::vector<std::string>& args) {
    RunManifest manifest = start_manifest("train", args, cfg);
    manifest.inputs[absolute_string(split_path.string())] = sha256_file(split_path);
    const Prepared p = load_prepared(split_path);
    const ad::Tensor normals = p.images.gather(p.split.normal_train);
    const ad::Tensor abnormals = no_abnormal ? ad::Tensor::zeros({0, p.images.image_size()})
                                             : p.images.gather(p.split.abnormal_train);
    gan::GanModel model = gan::GanModel::create(cfg.model_config(p.images.height, p.images.width), cfg.seed);

    make_dir(out_dir);
    Outputs outputs(out_dir);
    gan::TrainOptions options;
    options.checkpoint_path = outputs.add("model.nadt");
    options.on_epoch_end = [&](std::size_t epoch, const gan::GanModel&) {
        log_line({{"event", "epoch"}, {"epoch", epoch}});
    };
    gan::TrainReport report;
    try {
        report = gan::train(model, normals, abnormals, cfg.train_config(), options);
    } catch (const Error& e) {
        if (e.code() == Errc::divergence_detected) {
            throw CommandFailure{kExitNumerical, std::string(errc_name(e.code())), e.what(),
                                 {{"checkpoint", options.checkpoint_path.string()}}};
        }
        throw;
    }
    report.checkpoint_path = "model.nadt";
    json rj = gan::to_json(report);
    rj["experiment_config_hash"] = config_hash(cfg);
    write_text(outputs.add("train_report.json"), rj.dump(2) + "\n");
    manifest.checkpoint_sha256 = sha256_file(options.checkpoint_path);
    finish_manifest(manifest, outputs, out_dir / "train.manifest.json");
    log_line({{"event", "trained"},
              {"epochs", report.per_epoch.size()},
              {"iterations", report.iterations.size()},
              {"checkpoint", options.checkpoint_path.string()}});
    return kExitOk;
}

struct ScoreArgs {
    std::string ckpt, split, out, residual_dir;
    std::size_t workers = 1;
    std::size_t sample_normal = 0, sample_abnormal = 0;
};

std::vector<std::size_t> sample_positions(const data::ExperimentSplit& s, const ScoreArgs& a, std::uint64_t seed) {
    std::vector<std::size_t> normal, abnormal;
    for (std::size_t t = 0; t < s.test.size(); ++t) (s.test_labels[t] == 1 ? abnormal : normal).push_back(t);
    Rng rng(derive_seed(seed, streams::sample));
    auto take = [&](std::vector<std::size_t>& v, std::size_t k) {
        if (k == 0 || k >= v.size()) return;
        std::shuffle(v.begin(), v.end(), rng);
        v.resize(k);
    };
    take(normal, a.sample_normal);
    take(abnormal, a.sample_abnormal);
    std::vector<std::size_t> out = normal;
    out.insert(out.end(), abnormal.begin(), abnormal.end());
    std::ranges::sort(out);
    return out;
}

int cmd_score(const ExperimentConfig& cfg, const ScoreArgs& a, const std::vector<std::string>& args) {
    RunManifest manifest = start_manifest("score", args, cfg);
    manifest.inputs[absolute_string(a.split)] = sha256_file(a.split);
    manifest.checkpoint_sha256 = sha256_file(a.ckpt);
    manifest.inputs[absolute_string(a.ckpt)] = manifest.checkpoint_sha256;
    const gan::GanModel model = gan::GanModel::load(a.ckpt);
    const Prepared p = load_prepared(a.split);
    if (model.image_size() != p.images.image_size()) {
        throw Error(Errc::validation_failed, "checkpoint image size does not match the dataset");
    }

    const auto positions = sample_positions(p.split, a, cfg.seed);
    std::vector<std::size_t> sources;
    for (auto t : positions) sources.push_back(p.split.test[t]);
    log_line({{"event", "scoring"}, {"items", sources.size()}, {"workers", a.workers}});
    const auto outcomes =
        latent::score_batch_outcomes(model, p.images.gather(sources), cfg.search_config(), cfg.seed, a.workers);

    json failed = json::array();
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        if (outcomes[i].error) failed.push_back({{"item_id", std::to_string(sources[i])}, {"message", outcomes[i].message}});
    }
    if (!failed.empty()) {
        throw CommandFailure{kExitNumerical, std::string(errc_name(*std::ranges::find_if(outcomes, [](const auto& o) {
                                                                         return o.error.has_value();
                                                                     })->error)),
                             std::to_string(failed.size()) + " item(s) failed", {{"items", failed}}};
    }

    const fs::path out_path = a.out;
    const fs::path root = out_path.has_parent_path() ? out_path.parent_path() : fs::path(".");
    make_dir(root);
    Outputs outputs(root);
    std::vector<latent::ScoreRow> rows;
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        rows.push_back(latent::make_score_row(std::to_string(sources[i]), p.split.test_labels[positions[i]],
                                              *outcomes[i].result));
    }
    latent::write_scores_csv(outputs.add(out_path.filename()), rows);
    if (!a.residual_dir.empty()) {
        const fs::path rel = fs::path(a.residual_dir).lexically_proximate(root);
        make_dir(root / rel);
        for (std::size_t i = 0; i < outcomes.size(); ++i) {
            latent::write_residual_pgm(outputs.add(rel / (std::to_string(sources[i]) + ".pgm")),
                                       outcomes[i].result->residual_map, model.height(), model.width());
        }
    }
    finish_manifest(manifest, outputs, root / (out_path.filename().string() + ".manifest.json"));
    log_line({{"event", "scored"}, {"items", rows.size()}, {"out", out_path.string()}});
    return kExitOk;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_real(const std::string& s, const std::string& what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw Error(Errc::validation_failed, "cannot parse " + what + " value '" + s + "'");
    }
}

int cmd_eval(const std::string& scores_path, const fs::path& out_dir, std::size_t bins, std::size_t pixels,
             const std::vector<std::string>& args) {
    ExperimentConfig cfg;
    RunManifest manifest = start_manifest("eval", args, cfg);
    manifest.config = {{"bins", bins}, {"pixels", pixels}};
    manifest.config_hash = sha256_hex(manifest.config.dump());
    manifest.inputs[absolute_string(scores_path)] = sha256_file(scores_path);
    if (bins < 2) throw Error(Errc::invalid_argument, "--bins must be at least 2");
    if (pixels == 0) throw Error(Errc::invalid_argument, "--pixels must be positive");

    std::ifstream in(scores_path);
    if (!in) throw Error(Errc::io_error, "cannot open " + scores_path);
    std::string line;
    std::getline(in, line);
    if (line != "item_id,label,score,l_r,l_d,d_gz,n_iters_used,seed") {
        throw Error(Errc::validation_failed, scores_path + " does not have the scores header");
    }
    std::vector<eval::ScoredItem> items;
    std::vector<double> residuals;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != 8) throw Error(Errc::validation_failed, "malformed scores row: " + line);
        if (cells[1] != "0" && cells[1] != "1") {
            throw Error(Errc::validation_failed, "item " + cells[0] + " has no binary label");
        }
        items.push_back({cells[0], cells[1] == "1" ? 1 : 0, parse_real(cells[2], "score")});
        residuals.push_back(parse_real(cells[3], "l_r") / static_cast<double>(pixels));
    }

    eval::EvalReport report;
    report.n_items = items.size();
    for (const auto& it : items) report.n_abnormal += it.label == 1;
    report.auc = eval::roc_auc(items);
    report.best = eval::best_f1_sweep(items);
    std::vector<double> scores;
    std::vector<int> labels;
    for (const auto& it : items) {
        scores.push_back(it.score);
        labels.push_back(it.label);
    }
    report.score_histogram = eval::histogram(scores, labels, bins);
    report.residual_histogram = eval::histogram(residuals, labels, bins);

    make_dir(out_dir);
    Outputs outputs(out_dir);
    write_text(outputs.add("eval_report.json"), eval::to_json(report).dump(2) + "\n");
    write_text(outputs.add("histogram.csv"), eval::histogram_csv(report.score_histogram));
    write_text(outputs.add("residual_histogram.csv"), eval::histogram_csv(report.residual_histogram));
    finish_manifest(manifest, outputs, out_dir / "eval.manifest.json");
    log_line({{"event", "evaluated"}, {"auc", report.auc}, {"best_f1", report.best.f1},
              {"best_threshold", report.best.threshold}});
    return kExitOk;
}

int cmd_oracle(const dist::IdentitySuiteOptions& opts, const fs::path& out_path, const std::vector<std::string>& args) {
    ExperimentConfig cfg;
    cfg.seed = opts.seed;
    RunManifest manifest = start_manifest("oracle", args, cfg);
    manifest.config = {{"instances", opts.instances},
                       {"seed", opts.seed},
                       {"min_support", opts.min_support},
                       {"max_support", opts.max_support}};
    manifest.config_hash = sha256_hex(manifest.config.dump());
    if (opts.instances == 0) throw Error(Errc::invalid_argument, "--instances must be positive");
    if (opts.min_support < 1 || opts.min_support > opts.max_support) {
        throw Error(Errc::invalid_argument, "support sizes must satisfy 1 <= min <= max");
    }
    const auto checks = dist::run_identity_suite(opts);
    json jc = json::array();
    bool pass = true;
    for (const auto& c : checks) {
        jc.push_back({{"name", c.name},
                      {"instances", c.instances},
                      {"max_abs_error", c.max_abs_error},
                      {"tolerance", c.tolerance},
                      {"pass", c.pass}});
        pass = pass && c.pass;
    }
    const fs::path root = out_path.has_parent_path() ? out_path.parent_path() : fs::path(".");
    make_dir(root);
    Outputs outputs(root);
    write_text(outputs.add(out_path.filename()), json{{"checks", jc}, {"pass", pass}}.dump(2) + "\n");
    finish_manifest(manifest, outputs, root / (out_path.filename().string() + ".manifest.json"));
    if (!pass) return report_error(kExitOracle, "OracleFailure", "identity check failed", {{"checks", jc}});
    log_line({{"event", "oracle"}, {"pass", true}, {"checks", checks.size()}});
    return kExitOk;
}

int cmd_replay(const fs::path& manifest_path, const fs::path& out) {
    const RunManifest original = read_manifest(manifest_path);
    std::vector<std::string> argv = original.argv;
    const auto it = std::ranges::find(argv, "--out");
    if (it == argv.end() || it + 1 == argv.end()) {
        throw Error(Errc::validation_failed, "manifest argv has no --out to redirect");
    }
    const fs::path new_out = fs::absolute(out);
    const fs::path old_out = *(it + 1);
    const bool file_output = original.command == "score" || original.command == "oracle";
    *(it + 1) = (file_output ? new_out / old_out.filename() : new_out).string();
    const auto res = std::ranges::find(argv, "--residual-dir");
    if (res != argv.end() && res + 1 != argv.end()) {
        const fs::path old_root = old_out.has_parent_path() ? old_out.parent_path() : fs::path(".");
        *(res + 1) = (new_out / fs::path(*(res + 1)).lexically_proximate(old_root)).string();
    }

    const fs::path replay_manifest = file_output ? new_out / (old_out.filename().string() + ".manifest.json")
                                                 : new_out / (original.command + ".manifest.json");
    const fs::path saved_cwd = fs::current_path();
    fs::current_path(original.cwd);
    int code = kExitOk;
    try {
        code = run(argv);
    } catch (...) {
        fs::current_path(saved_cwd);
        throw;
    }
    fs::current_path(saved_cwd);
    if (code != kExitOk) return code;

    const RunManifest replayed = read_manifest(replay_manifest);
    json diff = json::array();
    for (const auto& [name, hash] : original.outputs) {
        const auto found = replayed.outputs.find(name);
        if (found == replayed.outputs.end() || found->second != hash) diff.push_back(name);
    }
    for (const auto& [name, hash] : replayed.outputs) {
        if (!original.outputs.contains(name)) diff.push_back(name);
    }
    if (!diff.empty()) {
        return report_error(kExitValidation, "ReplayMismatch", "replayed outputs differ", {{"files", diff}});
    }
    log_line({{"event", "replayed"}, {"command", original.command}, {"identical", true},
              {"outputs", original.outputs.size()}});
    return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args) {
    CLI::App app{"Noise-tolerant GAN anomaly detection", "nad"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);

    FlagStorage store;

    auto* prepare = app.add_subcommand("prepare", "build a split manifest");
    ConfigFlags prepare_flags;
    prepare_flags.add_config(prepare);
    add_dataset_flags(prepare_flags, store, prepare);
    add_seed_flag(prepare_flags, store, prepare);
    std::string prepare_out;
    prepare->add_option("--out", prepare_out, "output directory")->required();

    auto* train = app.add_subcommand("train", "train a model on a split");
    ConfigFlags train_flags;
    train_flags.add_config(train);
    add_train_flags(train_flags, store, train);
    add_seed_flag(train_flags, store, train);
    std::string train_split, train_out;
    bool no_abnormal = false;
    train->add_option("--split", train_split, "split.json from prepare")->required();
    train->add_option("--out", train_out, "output directory")->required();
    train->add_flag("--no-abnormal", no_abnormal, "ignore the abnormal training pool");

    auto* score = app.add_subcommand("score", "score test items by latent search");
    ConfigFlags score_flags;
    score_flags.add_config(score);
    add_search_flags(score_flags, store, score);
    add_seed_flag(score_flags, store, score);
    ScoreArgs score_args;
    score->add_option("--ckpt", score_args.ckpt, "model checkpoint")->required();
    score->add_option("--split", score_args.split, "split.json from prepare")->required();
    score->add_option("--out", score_args.out, "scores CSV path")->required();
    score->add_option("--workers", score_args.workers, "worker threads")->check(CLI::PositiveNumber);
    score->add_option("--residual-dir", score_args.residual_dir, "directory for PGM residual maps");
    score->add_option("--sample-normal", score_args.sample_normal, "seeded subsample of normal test items");
    score->add_option("--sample-abnormal", score_args.sample_abnormal, "seeded subsample of abnormal test items");

    auto* evalc = app.add_subcommand("eval", "metrics from a scores CSV");
    std::string eval_scores, eval_out;
    std::size_t bins = 20, pixels = 784;
    evalc->add_option("--scores", eval_scores, "scores CSV")->required();
    evalc->add_option("--out", eval_out, "output directory")->required();
    evalc->add_option("--bins", bins, "histogram bins");
    evalc->add_option("--pixels", pixels, "pixels per image, to turn l_r into a mean residual");

    auto* oracle = app.add_subcommand("oracle", "run the discrete identity suite");
    dist::IdentitySuiteOptions oracle_opts;
    std::size_t support_size = 0;
    std::string oracle_out = "oracle_report.json";
    oracle->add_option("--instances", oracle_opts.instances, "random instances per identity");
    oracle->add_option("--seed", oracle_opts.seed, "seed");
    oracle->add_option("--support-size", support_size, "fix the support size");
    oracle->add_option("--min-support", oracle_opts.min_support, "smallest support size");
    oracle->add_option("--max-support", oracle_opts.max_support, "largest support size");
    oracle->add_option("--out", oracle_out, "report path");

    auto* replay = app.add_subcommand("replay", "rerun a manifest and compare outputs");
    std::string replay_manifest, replay_out;
    replay->add_option("--manifest", replay_manifest, "run manifest")->required();
    replay->add_option("--out", replay_out, "fresh output directory")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        std::cerr << app.help();
        return kExitOk;
    } catch (const CLI::CallForVersion&) {
        std::cerr << kToolVersion << '\n';
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        return report_error(kExitArgument, "ArgumentError", e.what());
    }

    try {
        if (prepare->parsed()) return cmd_prepare(prepare_flags.resolve(), prepare_out, args);
        if (train->parsed()) return cmd_train(train_flags.resolve(), train_split, train_out, no_abnormal, args);
        if (score->parsed()) return cmd_score(score_flags.resolve(), score_args, args);
        if (evalc->parsed()) return cmd_eval(eval_scores, eval_out, bins, pixels, args);
        if (oracle->parsed()) {
            if (support_size > 0) oracle_opts.min_support = oracle_opts.max_support = support_size;
            return cmd_oracle(oracle_opts, oracle_out, args);
        }
        if (replay->parsed()) return cmd_replay(replay_manifest, replay_out);
    } catch (const CommandFailure& f) {
        return report_error(f.code, f.error, f.message, f.extra);
    } catch (const Error& e) {
        return report_error(exit_code_for(e.code()), std::string(errc_name(e.code())), e.what());
    } catch (const fs::filesystem_error& e) {
        return report_error(kExitIo, "IoError", e.what());
    } catch (const json::exception& e) {
        return report_error(kExitValidation, "ValidationFailed", e.what());
    }
    return report_error(kExitArgument, "ArgumentError", "no subcommand");
}

}  // namespace nad::cli
