#include "nad/latentsearch/losses.hpp"

#include <cmath>
#include <string>

#include "nad/error.hpp"
#include "nad/ganmodel/losses.hpp"

namespace nad::latent {

namespace {

double abs_diff_sum(std::span<const double> a, std::span<const double> b, const char* what) {
    if (a.size() != b.size()) {
        throw Error(Errc::shape_mismatch, std::string(what) + ": sizes " + std::to_string(a.size()) +
                                              " and " + std::to_string(b.size()));
    }
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::fabs(a[i] - b[i]);
    return s;
}

}  // namespace

void require_lambda(double lambda) {
    if (!(lambda >= 0.0 && lambda <= 1.0)) {
        throw Error(Errc::lambda_out_of_range, "lambda must lie in [0, 1], got " + std::to_string(lambda));
    }
}

double residual_loss(std::span<const double> x, std::span<const double> g_z) {
    return abs_diff_sum(x, g_z, "residual_loss");
}

double discrimination_loss(std::span<const double> f_x, std::span<const double> f_gz) {
    return abs_diff_sum(f_x, f_gz, "discrimination_loss");
}

double anogan_loss(double l_r, double l_d, double lambda) {
    require_lambda(lambda);
    return (1.0 - lambda) * l_r + lambda * l_d;
}

double anomaly_inference_loss(double l_ano, double d_gz, double gamma) {
    gan::require_gamma(gamma);
    return gamma * l_ano + (1.0 - gamma) * std::fabs(1.0 - d_gz);
}

}  // namespace nad::latent
