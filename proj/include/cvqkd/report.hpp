#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "cvqkd/info.hpp"

namespace cvqkd {

/// One row of key-generation figures for a session. Counts are exact; rates
/// are counts / (n_events * event_period).
struct SessionReport {
    // inputs
    double alpha = 0.0;
    double eta = 1.0;
    double excess_noise = 0.0;
    std::uint64_t n_events = 0;
    double event_duration = 5e-4;
    double dead_time_fraction = 0.0;

    // threshold, in outcome units and in units of sent / received amplitude
    bool threshold_auto = false;
    double threshold = 0.0;
    double threshold_sent_alpha = 0.0;
    double threshold_received_alpha = 0.0;

    // empirical counts
    std::uint64_t raw_count = 0;
    std::uint64_t pre_errors = 0;
    std::uint64_t selected_count = 0;
    std::uint64_t post_errors = 0;
    std::optional<double> eve_pre_error; // only with the Eve observer

    // closed-form model at the chosen threshold
    double model_pre_error = 0.0;
    double model_yield = 0.0;
    double model_post_error = 0.0;
    double eve_info = 0.0;
    double advantage_per_event = 0.0;
    double advantage_bulk = 0.0;
    info::AdvantageEstimator estimator = info::AdvantageEstimator::per_event;

    // reconciliation and amplification
    bool reconciled = false;
    bool verified = false;
    std::uint32_t cascade_initial_block = 0;
    std::uint64_t leakage_bits = 0;
    std::uint64_t ec_count = 0;
    std::uint64_t final_count = 0;

    double event_period() const noexcept { return event_duration / (1.0 - dead_time_fraction); }
    double rate(std::uint64_t count) const noexcept;
    double pre_error() const noexcept;
    double post_error() const noexcept;
    double advantage() const noexcept;

    double raw_rate() const noexcept { return rate(raw_count); }
    double post_rate() const noexcept { return rate(selected_count); }
    double ec_rate() const noexcept { return rate(ec_count); }
    double final_rate() const noexcept { return rate(final_count); }
};

const char* estimator_name(info::AdvantageEstimator e) noexcept;

/// Experimental key-generation figures this model is compared against.
struct ReferenceRow {
    const char* label;
    double eta;
    double raw_rate;
    double pre_error;
    double post_rate;
    double post_error;
    double threshold;
    double advantage;
    double ec_rate;
    double final_rate;
};

/// The reference row for (alpha, eta), if one exists.
std::optional<ReferenceRow> reference_row(double alpha, double eta);

std::string to_json(const SessionReport& r);
std::string to_text(const SessionReport& r);

} // namespace cvqkd
