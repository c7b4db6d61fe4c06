#include "nad/latentsearch/search.hpp"

#include <atomic>
#include <cmath>
#include <memory>
#include <thread>

#include "nad/autodiff/optimizer.hpp"
#include "nad/ganmodel/losses.hpp"
#include "nad/latentsearch/losses.hpp"
#include "nad/util/random.hpp"

namespace nad::latent {

using ad::Graph;
using ad::Tensor;
using ad::Var;

void SearchConfig::validate() const {
    if (n_iters == 0) throw Error(Errc::invalid_argument, "n_iters must be at least 1");
    if (restarts == 0) throw Error(Errc::invalid_argument, "restarts must be at least 1");
    if (!(lr > 0.0) || !std::isfinite(lr)) throw Error(Errc::invalid_argument, "lr must be positive");
    gan::require_gamma(gamma);
    require_lambda(lambda);
}

InferenceTerms build_inference_loss(Graph& g, const gan::GanModel& model, Var x, Var f_x, Var z,
                                    double gamma, double lambda) {
    gan::require_gamma(gamma);
    require_lambda(lambda);
    const Var g_z = model.generator.forward(g, z);
    const auto d = model.discriminator.forward(g, g_z);
    InferenceTerms t;
    t.l_r = g.sum(g.abs(g.sub(x, g_z)));
    t.l_d = g.sum(g.abs(g.sub(f_x, d.features)));
    t.d_gz = d.score;
    t.l_ano = g.add(g.scale(t.l_r, 1.0 - lambda), g.scale(t.l_d, lambda));
    const Var penalty = g.sum(g.abs(g.rsub(1.0, d.score)));
    t.loss = g.add(g.scale(t.l_ano, gamma), g.scale(penalty, 1.0 - gamma));
    return t;
}

namespace {

struct Evaluated {
    double loss = 0.0;
    double l_ano = 0.0;
    double l_r = 0.0;
    double l_d = 0.0;
    double d_gz = 0.0;
};

struct Candidate {
    std::vector<double> z;
    Evaluated at;
    std::vector<double> loss_trace;
    std::vector<double> ano_trace;
};

Candidate run_restart(const gan::GanModel& model, const Tensor& x, const Tensor& f_x,
                      const SearchConfig& cfg, Rng& rng) {
    Tensor z = gan::LatentPrior(model.z_dim()).sample(rng, 1);
    z.set_requires_grad(true);
    std::unique_ptr<ad::Adam> adam;
    std::unique_ptr<ad::GradientDescent> gd;
    if (cfg.step_rule == StepRule::adam) {
        adam = std::make_unique<ad::Adam>(std::vector<Tensor*>{&z}, ad::AdamOptions{.lr = cfg.lr});
    } else {
        gd = std::make_unique<ad::GradientDescent>(std::vector<Tensor*>{&z}, cfg.lr);
    }

    auto evaluate = [&](std::size_t iteration, bool differentiate) {
        try {
            Graph g;
            const Var zv = differentiate ? g.watch(z) : g.input(z);
            const InferenceTerms t =
                build_inference_loss(g, model, g.input(x), g.input(f_x), zv, cfg.gamma, cfg.lambda);
            Evaluated e{g.scalar(t.loss), g.scalar(t.l_ano), g.scalar(t.l_r), g.scalar(t.l_d),
                        g.value(t.d_gz).item()};
            if (differentiate) g.backward(t.loss);
            return e;
        } catch (const Error& err) {
            if (err.code() != Errc::non_finite) throw;
            throw NonFiniteLoss(iteration, err.what());
        }
    };

    Candidate c;
    c.loss_trace.reserve(cfg.n_iters);
    c.ano_trace.reserve(cfg.n_iters);
    bool have_best = false;
    for (std::size_t i = 0; i < cfg.n_iters; ++i) {
        const Evaluated e = evaluate(i, true);
        c.loss_trace.push_back(e.loss);
        c.ano_trace.push_back(e.l_ano);
        if (cfg.selection == Selection::best && (!have_best || e.loss < c.at.loss)) {
            c.at = e;
            c.z.assign(z.data().begin(), z.data().end());
            have_best = true;
        }
        if (adam) adam->step(); else gd->step();
        if (!z.all_finite()) throw NonFiniteLoss(i, "latent update produced a non-finite value");
    }
    if (cfg.selection == Selection::last) {
        z.clear_grad();
        c.at = evaluate(cfg.n_iters, false);
        c.z.assign(z.data().begin(), z.data().end());
    }
    return c;
}

}  // namespace

AnomalyResult search(const gan::GanModel& model, std::span<const double> x,
                     const SearchConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    if (x.size() != model.image_size()) {
        throw Error(Errc::shape_mismatch, "image has " + std::to_string(x.size()) +
                                              " pixels, model expects " +
                                              std::to_string(model.image_size()));
    }
    const Tensor x_t({1, x.size()}, std::vector<double>(x.begin(), x.end()));
    if (!x_t.all_finite()) throw NonFiniteLoss(0, "image contains non-finite pixels");
    const Tensor f_x = gan::discriminate(model.discriminator, x_t).features;

    std::optional<Candidate> best;
    for (std::size_t r = 0; r < cfg.restarts; ++r) {
        Rng rng(derive_seed(seed, r));
        Candidate c = run_restart(model, x_t, f_x, cfg, rng);
        if (!best || c.at.loss < best->at.loss) best = std::move(c);
    }

    AnomalyResult out;
    out.score = best->at.loss;
    out.l_r = best->at.l_r;
    out.l_d = best->at.l_d;
    out.d_gz = best->at.d_gz;
    out.z_hat = std::move(best->z);
    out.loss_trace = std::move(best->loss_trace);
    out.ano_trace = std::move(best->ano_trace);
    out.n_iters_used = cfg.n_iters;
    out.seed = seed;

    const Tensor g_z = gan::generate(model.generator, Tensor({1, out.z_hat.size()}, out.z_hat));
    out.residual_map.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out.residual_map[i] = std::fabs(x[i] - g_z[i]);
    return out;
}

std::uint64_t item_seed(std::uint64_t seed, std::size_t i) {
    return derive_seed(derive_seed(seed, streams::search), i);
}

std::vector<ItemOutcome> score_batch_outcomes(const gan::GanModel& model, const Tensor& xs,
                                              const SearchConfig& cfg, std::uint64_t seed,
                                              std::size_t workers) {
    cfg.validate();
    const std::size_t n = xs.numel() == 0 ? 0 : xs.rows();
    std::vector<ItemOutcome> out(n);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                out[i].result = search(model, xs.row(i), cfg, item_seed(seed, i));
            } catch (const Error& e) {
                out[i].error = e.code();
                out[i].message = e.what();
            }
        }
    };
    const std::size_t threads = std::min(std::max<std::size_t>(workers, 1), std::max<std::size_t>(n, 1));
    if (threads == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work);
    }
    return out;
}

std::vector<AnomalyResult> score_batch(const gan::GanModel& model, const Tensor& xs,
                                       const SearchConfig& cfg, std::uint64_t seed,
                                       std::size_t workers) {
    auto outcomes = score_batch_outcomes(model, xs, cfg, seed, workers);
    std::vector<AnomalyResult> out;
    out.reserve(outcomes.size());
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        if (outcomes[i].error) {
            throw ItemError(i, *outcomes[i].error, outcomes[i].message);
        }
        out.push_back(std::move(*outcomes[i].result));
    }
    return out;
}

}  // namespace nad::latent
