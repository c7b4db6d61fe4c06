#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nad/autodiff/graph.hpp"
#include "nad/error.hpp"
#include "nad/ganmodel/network.hpp"

namespace nad::latent {

enum class StepRule { adam, gradient_descent };
enum class Selection { best, last };

struct SearchConfig {
    std::size_t n_iters = 500;
    double gamma = 0.1;
    double lambda = 0.1;
    StepRule step_rule = StepRule::adam;
    double lr = 0.05;
    std::size_t restarts = 1;
    Selection selection = Selection::best;

    // Throws InvalidArgument, GammaOutOfRange, or LambdaOutOfRange.
    void validate() const;
};

struct AnomalyResult {
    std::vector<double> z_hat;
    double score = 0.0;  // L'(z_hat)
    double l_r = 0.0;
    double l_d = 0.0;
    double d_gz = 0.0;
    std::vector<double> residual_map;  // |x - G(z_hat)|
    // L' and L_Ano before each update, for the restart that produced z_hat.
    std::vector<double> loss_trace;
    std::vector<double> ano_trace;
    std::size_t n_iters_used = 0;
    std::uint64_t seed = 0;
};

// The inference loss terms for one image, built into a graph.
struct InferenceTerms {
    ad::Var l_r;
    ad::Var l_d;
    ad::Var d_gz;
    ad::Var l_ano;
    ad::Var loss;
};

// x is (1, H*W); f_x are x's discriminator features (1, F). The model is read only.
InferenceTerms build_inference_loss(ad::Graph& g, const gan::GanModel& model, ad::Var x,
                                    ad::Var f_x, ad::Var z, double gamma, double lambda);

// Runs cfg.n_iters updates of z per restart with G and D frozen. x holds H*W pixels.
// Throws NonFiniteLoss with the failing iteration.
AnomalyResult search(const gan::GanModel& model, std::span<const double> x, const SearchConfig& cfg,
                     std::uint64_t seed);

// Seed used for row i of a batch scored with `seed`.
std::uint64_t item_seed(std::uint64_t seed, std::size_t i);

struct ItemOutcome {
    std::optional<AnomalyResult> result;
    std::optional<Errc> error;
    std::string message;
};

// Scores each row of xs (count, H*W) with item_seed(seed, i). Output order and
// values do not depend on `workers`.
std::vector<ItemOutcome> score_batch_outcomes(const gan::GanModel& model, const ad::Tensor& xs,
                                              const SearchConfig& cfg, std::uint64_t seed,
                                              std::size_t workers = 1);

// As score_batch_outcomes, but throws ItemError for the lowest failing index.
std::vector<AnomalyResult> score_batch(const gan::GanModel& model, const ad::Tensor& xs,
                                       const SearchConfig& cfg, std::uint64_t seed,
                                       std::size_t workers = 1);

}  // namespace nad::latent
