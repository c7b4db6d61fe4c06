#pragma once

#include <span>

namespace nad::latent {

// Sum of |x - g_z|.
double residual_loss(std::span<const double> x, std::span<const double> g_z);
// Sum of |f_x - f_gz| over discriminator features.
double discrimination_loss(std::span<const double> f_x, std::span<const double> f_gz);
// (1 - lambda) * l_r + lambda * l_d; lambda in [0, 1].
double anogan_loss(double l_r, double l_d, double lambda);
// gamma * l_ano + (1 - gamma) * |1 - d_gz|; gamma in (0, 1].
double anomaly_inference_loss(double l_ano, double d_gz, double gamma);

void require_lambda(double lambda);

}  // namespace nad::latent
