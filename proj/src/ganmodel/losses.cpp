#include "nad/ganmodel/losses.hpp"

#include <string>

#include "nad/error.hpp"

namespace nad::gan {

using ad::Graph;
using ad::Tensor;
using ad::Var;

namespace {

void require_batch(const Graph& g, Var v, const char* what) {
    if (g.value(v).numel() == 0) throw Error(Errc::empty_batch, std::string(what) + " is empty");
}

void require_batch(std::span<const double> s, const char* what) {
    if (s.empty()) throw Error(Errc::empty_batch, std::string(what) + " is empty");
}

Var column(Graph& g, std::span<const double> s) {
    return g.constant(Tensor({s.size(), 1}, std::vector<double>(s.begin(), s.end())));
}

}  // namespace

void require_gamma(double gamma) {
    if (!(gamma > 0.0 && gamma <= 1.0)) {
        throw Error(Errc::gamma_out_of_range, "gamma must lie in (0, 1], got " + std::to_string(gamma));
    }
}

Var discriminator_adversarial_loss(Graph& g, Var d_real, Var d_fake) {
    require_batch(g, d_real, "real score batch");
    require_batch(g, d_fake, "fake score batch");
    const Var real_term = g.mean(g.log(d_real));
    const Var fake_term = g.mean(g.log(g.rsub(1.0, d_fake)));
    return g.scale(g.add(real_term, fake_term), -1.0);
}

Var generator_loss(Graph& g, Var d_fake, GeneratorLoss kind) {
    require_batch(g, d_fake, "fake score batch");
    if (kind == GeneratorLoss::minimax) return g.mean(g.log(g.rsub(1.0, d_fake)));
    return g.scale(g.mean(g.log(d_fake)), -1.0);
}

Var anomaly_penalty_loss(Graph& g, Var d_abnormal) {
    require_batch(g, d_abnormal, "abnormal score batch");
    return g.scale(g.mean(g.log(g.rsub(1.0, d_abnormal))), -1.0);
}

Var discriminator_total_loss(Graph& g, Var adversarial, Var penalty, double gamma) {
    require_gamma(gamma);
    return g.add(g.scale(adversarial, gamma), g.scale(penalty, 1.0 - gamma));
}

AdversarialLosses adversarial_losses(std::span<const double> d_real,
                                     std::span<const double> d_fake, GeneratorLoss kind) {
    require_batch(d_real, "real score batch");
    require_batch(d_fake, "fake score batch");
    Graph g;
    const Var fake = column(g, d_fake);
    return {g.scalar(discriminator_adversarial_loss(g, column(g, d_real), fake)),
            g.scalar(generator_loss(g, fake, kind))};
}

double anomaly_penalty_loss(std::span<const double> d_abnormal) {
    require_batch(d_abnormal, "abnormal score batch");
    Graph g;
    return g.scalar(anomaly_penalty_loss(g, column(g, d_abnormal)));
}

double discriminator_total_loss(double loss_d_adv, double loss_an, double gamma) {
    require_gamma(gamma);
    return gamma * loss_d_adv + (1.0 - gamma) * loss_an;
}

}  // namespace nad::gan
