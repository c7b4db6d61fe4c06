#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace nad {

// Every failure raised by the library carries one of these codes so callers
// (the CLI in particular) can map them onto stable exit codes.
enum class Errc {
    invalid_argument,
    shape_mismatch,
    domain_error,
    non_finite,
    non_scalar_root,
    missing_grad,
    invalid_distribution,
    support_mismatch,
    absolute_continuity_violation,
    gamma_out_of_range,
    lambda_out_of_range,
    empty_batch,
    empty_normal_set,
    divergence_detected,
    non_finite_loss,
    bad_magic,
    truncated_file,
    dimension_overflow,
    io_error,
    missing_class,
    fraction_out_of_range,
    pool_exhausted,
    single_class,
    empty_input,
    empty_mask,
    validation_failed,
};

std::string_view errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message);

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

// Raised by the latent search when L'(z) stops being finite.
class NonFiniteLoss : public Error {
public:
    NonFiniteLoss(std::size_t iteration, const std::string& message);

    std::size_t iteration() const noexcept { return iteration_; }

private:
    std::size_t iteration_;
};

// Wraps a failure from one element of a batched operation.
class ItemError : public Error {
public:
    ItemError(std::size_t index, const Error& cause);
    ItemError(std::size_t index, Errc cause, const std::string& cause_message);

    std::size_t index() const noexcept { return index_; }
    Errc cause() const noexcept { return cause_; }

private:
    std::size_t index_;
    Errc cause_;
};

}  // namespace nad
