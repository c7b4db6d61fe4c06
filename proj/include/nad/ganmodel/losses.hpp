#pragma once

#include <span>

#include "nad/autodiff/graph.hpp"

namespace nad::gan {

// non_saturating: minimize -E[ln D(G(z))].
// minimax: minimize E[ln(1 - D(G(z)))], the literal minimax generator term.
enum class GeneratorLoss { non_saturating, minimax };

// Throws Error(gamma_out_of_range) unless 0 < gamma <= 1.
void require_gamma(double gamma);

// Graph builders. Scores are discriminator outputs in (0, 1); all losses are
// written for minimization.
ad::Var discriminator_adversarial_loss(ad::Graph& g, ad::Var d_real, ad::Var d_fake);
ad::Var generator_loss(ad::Graph& g, ad::Var d_fake, GeneratorLoss kind);
ad::Var anomaly_penalty_loss(ad::Graph& g, ad::Var d_abnormal);
ad::Var discriminator_total_loss(ad::Graph& g, ad::Var adversarial, ad::Var penalty, double gamma);

struct AdversarialLosses {
    double loss_d_adv = 0.0;
    double loss_g = 0.0;
};

// loss_d_adv = -mean ln d_real - mean ln(1 - d_fake); loss_g per `kind`.
AdversarialLosses adversarial_losses(std::span<const double> d_real,
                                     std::span<const double> d_fake,
                                     GeneratorLoss kind = GeneratorLoss::non_saturating);

// -mean ln(1 - d_abnormal): small when abnormal images are scored as fake.
double anomaly_penalty_loss(std::span<const double> d_abnormal);

// gamma * loss_d_adv + (1 - gamma) * loss_an.
double discriminator_total_loss(double loss_d_adv, double loss_an, double gamma);

}  // namespace nad::gan
