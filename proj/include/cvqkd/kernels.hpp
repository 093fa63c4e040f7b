#pragma once

// Data-parallel Monte Carlo and hashing kernels. Each kernel has a serial
// reference loop and an OpenMP version; event i always draws from
// RngStream::derive(seed, i), so integer results are identical across the two
// and across thread counts.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "cvqkd/channel.hpp"
#include "cvqkd/exec.hpp"

namespace cvqkd::kernels {

struct SelectionCounts {
    std::size_t events = 0;
    std::size_t kept = 0;
    std::size_t kept_errors = 0;
    std::size_t errors = 0; // sign errors over all events, before selection

    friend bool operator==(const SelectionCounts&, const SelectionCounts&) = default;
};

/// Symmetric binary source: sign s uniform, x = s*mean + sqrt(variance)*N(0,1).
/// An event is kept when x != 0 and |x| >= threshold.
struct SelectionParams {
    double mean = 0.0;
    double variance = 0.5;
    double threshold = 0.0;
};

struct Moments {
    double n = 0, sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;

    double correlation() const noexcept;
};

struct DualDetectorParams {
    double amplitude = 0.0; // per-detector amplitude after the split
    bool modulated = false;
};

/// Event draws for the protocol session. Alice, Bob and Eve use independent
/// streams derived from their own seeds.
struct EventStageParams {
    double alpha = 0.6;
    double eta = 1.0;
    double excess_noise = 0.0;
    std::uint64_t alice_seed = 0;
    std::uint64_t bob_seed = 0;
    std::uint64_t eve_seed = 0;
    bool eve_observer = false;
};

struct EventArrays {
    std::vector<std::uint8_t> s2_bit, s3_bit, basis; // basis: 0 = S2, 1 = S3
    std::vector<double> bob_x, eve_x;

    void resize(std::size_t n);
    std::size_t size() const noexcept { return bob_x.size(); }
    friend bool operator==(const EventArrays&, const EventArrays&) = default;
};

namespace serial {
SelectionCounts selection(const SelectionParams& p, std::size_t n, std::uint64_t seed);
Moments dual_detector(const DualDetectorParams& p, std::size_t n, std::uint64_t seed);
void events(const EventStageParams& p, std::size_t n, EventArrays& out);
std::vector<std::uint8_t> toeplitz(std::span<const std::uint8_t> input, std::size_t out_len,
                                   std::uint64_t seed);
} // namespace serial

namespace omp {
SelectionCounts selection(const SelectionParams& p, std::size_t n, std::uint64_t seed);
Moments dual_detector(const DualDetectorParams& p, std::size_t n, std::uint64_t seed);
void events(const EventStageParams& p, std::size_t n, EventArrays& out);
std::vector<std::uint8_t> toeplitz(std::span<const std::uint8_t> input, std::size_t out_len,
                                   std::uint64_t seed);
} // namespace omp

SelectionCounts selection(const SelectionParams& p, std::size_t n, std::uint64_t seed, Exec exec);
Moments dual_detector(const DualDetectorParams& p, std::size_t n, std::uint64_t seed, Exec exec);
void events(const EventStageParams& p, std::size_t n, EventArrays& out, Exec exec);
std::vector<std::uint8_t> toeplitz(std::span<const std::uint8_t> input, std::size_t out_len,
                                   std::uint64_t seed, Exec exec);

// Per-event draws shared by the session peers and the event kernel.
struct AliceBits {
    bool s2;
    bool s3;
};
AliceBits alice_bits(std::uint64_t seed, std::uint64_t event_id);
channel::MeasurementOutcome bob_outcome(std::uint64_t seed, std::uint64_t event_id,
                                        const channel::Signal& received, double excess_noise);
double eve_outcome(std::uint64_t seed, std::uint64_t event_id, const channel::Signal& tapped,
                   channel::Basis basis);

/// The n + m - 1 diagonal bits defining an m x n Toeplitz matrix.
std::vector<std::uint8_t> toeplitz_diagonals(std::size_t n_in, std::size_t m_out, std::uint64_t seed);

} // namespace cvqkd::kernels
