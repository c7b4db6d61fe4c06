#include "nad/error.hpp"

namespace nad {

std::string_view errc_name(Errc code) noexcept {
    switch (code) {
        case Errc::invalid_argument: return "InvalidArgument";
        case Errc::shape_mismatch: return "ShapeMismatch";
        case Errc::domain_error: return "DomainError";
        case Errc::non_finite: return "NonFinite";
        case Errc::non_scalar_root: return "NonScalarRoot";
        case Errc::missing_grad: return "MissingGrad";
        case Errc::invalid_distribution: return "InvalidDistribution";
        case Errc::support_mismatch: return "SupportMismatch";
        case Errc::absolute_continuity_violation: return "AbsoluteContinuityViolation";
        case Errc::gamma_out_of_range: return "GammaOutOfRange";
        case Errc::lambda_out_of_range: return "LambdaOutOfRange";
        case Errc::empty_batch: return "EmptyBatch";
        case Errc::empty_normal_set: return "EmptyNormalSet";
        case Errc::divergence_detected: return "DivergenceDetected";
        case Errc::non_finite_loss: return "NonFiniteLoss";
        case Errc::bad_magic: return "BadMagic";
        case Errc::truncated_file: return "TruncatedFile";
        case Errc::dimension_overflow: return "DimensionOverflow";
        case Errc::io_error: return "IoError";
        case Errc::missing_class: return "MissingClass";
        case Errc::fraction_out_of_range: return "FractionOutOfRange";
        case Errc::pool_exhausted: return "PoolExhausted";
        case Errc::single_class: return "SingleClass";
        case Errc::empty_input: return "EmptyInput";
        case Errc::empty_mask: return "EmptyMask";
        case Errc::validation_failed: return "ValidationFailed";
    }
    return "Unknown";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

NonFiniteLoss::NonFiniteLoss(std::size_t iteration, const std::string& message)
    : Error(Errc::non_finite_loss, message + " (iteration " + std::to_string(iteration) + ")"),
      iteration_(iteration) {}

ItemError::ItemError(std::size_t index, const Error& cause)
    : ItemError(index, cause.code(), cause.what()) {}

ItemError::ItemError(std::size_t index, Errc cause, const std::string& cause_message)
    : Error(cause, "item " + std::to_string(index) + ": " + cause_message),
      index_(index),
      cause_(cause) {}

}  // namespace nad
