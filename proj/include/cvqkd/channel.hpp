#pragma once

// Gaussian model of state preparation, lossy channel with a beam-splitting
// tap, and dark-mode Stokes detection. Amplitudes are in units where the
// vacuum variance of an outcome is 1/2.

#include <cstddef>
#include <cstdint>

#include "cvqkd/exec.hpp"
#include "cvqkd/rng.hpp"

namespace cvqkd::channel {

inline constexpr double kVacuumVariance = 0.5;

enum class Basis : std::uint8_t { S2 = 0, S3 = 1 };

struct Signal {
    double s2_amp = 0.0;
    double s3_amp = 0.0;

    double along(Basis b) const noexcept { return b == Basis::S2 ? s2_amp : s3_amp; }
};

struct ChannelParams {
    double eta = 1.0;
    double excess_noise = 0.0;

    /// Throws DomainError unless 0 < eta <= 1 and excess_noise >= 0.
    void validate() const;
    double outcome_variance() const noexcept { return kVacuumVariance + excess_noise; }
};

struct MeasurementOutcome {
    Basis basis;
    double x;
};

/// Sign bit 1 -> +alpha, 0 -> -alpha on each axis.
Signal signal_from_bits(double alpha, bool s2_bit, bool s3_bit) noexcept;

Signal apply_loss(const Signal& sig, const ChannelParams& ch);
Signal eve_tap(const Signal& sig, const ChannelParams& ch);

MeasurementOutcome measure(const Signal& sig, Basis basis, double excess_noise, RngStream& rng);

/// Two S2 detectors behind a 50:50 splitter. Returns the Pearson correlation
/// of their outcomes. Event i draws from RngStream::derive(seed, i).
double dual_detector_experiment(const Signal& sig, std::size_t n_events, bool modulated,
                                std::uint64_t seed, Exec exec = Exec::parallel);

/// Asymptotic correlation mu^2 / (mu^2 + sigma0^2) with mu = alpha / sqrt(2).
double dual_detector_correlation_limit(double alpha) noexcept;

struct PairedOutcome {
    double first;
    double second;
};

/// The per-event draw used by dual_detector_experiment; exposed for scatter output.
PairedOutcome dual_detector_event(const Signal& sig, bool modulated, RngStream& rng);

} // namespace cvqkd::channel
