#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "cvqkd/info.hpp"
#include "cvqkd/protocol.hpp"

namespace cvqkd::app {

inline constexpr const char* kSeedEnvVar = "CVQKD_SEED";

struct CascadeSettings {
    int passes = 5;
    std::optional<std::uint32_t> initial_block; // nullopt: auto

    friend bool operator==(const CascadeSettings&, const CascadeSettings&) = default;
};

struct OutputPaths {
    std::string dir = "cvqkd-out";
    std::string report_json = "report.json";
    std::string report_text = "report.txt";
    std::string transcript = "transcript.bin";
    std::string events_csv = "events.csv"; // empty: not written

    friend bool operator==(const OutputPaths&, const OutputPaths&) = default;
};

struct ExperimentConfig {
    double alpha = 0.6;
    double eta = 0.79;
    double excess_noise = 0.0;
    protocol::ThresholdSpec threshold;
    std::uint64_t n_events = 1'000'000;
    double event_duration = 5e-4;
    double dead_time_fraction = 0.0;
    std::uint64_t seed = 1;
    bool eve_observer = true;
    info::AdvantageEstimator estimator = info::AdvantageEstimator::per_event;
    CascadeSettings cascade;
    std::uint64_t safety_margin = 0;
    OutputPaths output;

    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Seed from CVQKD_SEED, else `fallback`. Throws ConfigError on a malformed value.
std::uint64_t default_seed(std::uint64_t fallback = 1);

/// Dead-time fraction that makes the effective event rate 1069 events/s.
double reference_dead_time_fraction(double event_duration);

/// Throws ConfigError naming the first invalid field.
void validate(const ExperimentConfig& cfg);

/// Parses JSON; keys that are absent keep their value from `defaults`.
/// Syntax errors report line and column; unknown keys and bad values report
/// the field.
ExperimentConfig parse_config(std::string_view text, const ExperimentConfig& defaults = {});
std::string emit_config(const ExperimentConfig& cfg);

ExperimentConfig load_config(const std::string& path, const ExperimentConfig& defaults = {});

} // namespace cvqkd::app
