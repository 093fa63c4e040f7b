#pragma once

// Error probabilities, mutual informations and post-selection statistics for
// the symmetric Gaussian outcome model x ~ N(+-alpha_eff, sigma2).

#include <cstddef>
#include <cstdint>
#include <optional>

#include "cvqkd/exec.hpp"

namespace cvqkd::info {

struct InfoParams {
    double alpha = 0.6;  // Alice's amplitude
    double eta = 1.0;    // channel transmission
    double sigma2 = 0.5; // outcome variance
    /// Variance of Eve's outcomes; defaults to sigma2. Bob's excess noise is
    /// not Eve's, so sessions set this to the vacuum variance.
    std::optional<double> eve_sigma2;

    void validate() const;
    double eve_variance() const noexcept { return eve_sigma2.value_or(sigma2); }
    double bob_amplitude() const;
    double eve_amplitude() const;
};

enum class AdvantageEstimator { per_event, bulk };

struct SelectionResult {
    double threshold = 0.0;
    double yield = 1.0;
    double post_error = 0.5;
    double eve_info = 0.0;
    double advantage_per_event = 0.0; // E[1 - h(p(x)) | |x| >= t] - I_AE
    double advantage_bulk = 0.0;      // 1 - h(post_error) - I_AE

    double advantage(AdvantageEstimator e) const noexcept {
        return e == AdvantageEstimator::per_event ? advantage_per_event : advantage_bulk;
    }
};

/// Standard normal CDF.
double normal_cdf(double z) noexcept;

double binary_entropy(double p);
/// 1 - h(p_e). Throws DomainError outside [0, 1].
double binary_mutual_info(double p_e);

double mean_error(double alpha_eff, double sigma2);
double posterior_error(double x, double alpha_eff, double sigma2);

double eve_info(const InfoParams& params);

/// Smallest t with binary_mutual_info(posterior_error(t)) > I_AE, to 1e-9.
double solve_threshold(const InfoParams& params);

SelectionResult selection_stats(const InfoParams& params, double threshold);

/// Threshold whose closed-form yield equals `target_yield` in (0, 1].
double threshold_for_yield(const InfoParams& params, double target_yield);

/// Monte Carlo counterpart of selection_stats' yield and post_error.
struct SelectionEstimate {
    double yield;
    double yield_stderr;
    double post_error;
    double post_error_stderr;
    double pre_error;
    double pre_error_stderr;
};

SelectionEstimate simulate_selection(const InfoParams& params, double threshold, std::size_t n,
                                     std::uint64_t seed, Exec exec = Exec::parallel);

} // namespace cvqkd::info
