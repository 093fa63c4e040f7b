#pragma once

// Two-peer prepare-and-measure protocol: Alice sends one of four states per
// event, Bob measures S2 or S3 at random, post-selects on |x|, and announces
// his bases for the kept events.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cvqkd/cascade.hpp"
#include "cvqkd/channel.hpp"
#include "cvqkd/exec.hpp"
#include "cvqkd/info.hpp"
#include "cvqkd/kernels.hpp"
#include "cvqkd/report.hpp"
#include "cvqkd/transport.hpp"

namespace cvqkd::protocol {

struct SentEvent {
    std::uint32_t event_id;
    std::uint8_t s2_bit;
    std::uint8_t s3_bit;

    std::uint8_t bit_in(channel::Basis b) const noexcept { return b == channel::Basis::S2 ? s2_bit : s3_bit; }
};

struct EventRecord {
    std::uint32_t event_id = 0;
    channel::Basis basis = channel::Basis::S2;
    double x = 0.0;
    bool selected = false;
    std::optional<std::uint8_t> bit; // empty when x == 0
};

/// Sign of the outcome: positive -> 1, negative -> 0, zero -> none.
std::optional<std::uint8_t> bit_from_outcome(double x) noexcept;
/// |x| >= threshold, never for x == 0.
bool passes_threshold(double x, double threshold) noexcept;

struct RawKeyPair {
    Bits alice_bits;
    Bits bob_bits;
    std::vector<std::uint32_t> event_ids;
};

class AlicePeer : public transport::Responder {
public:
    AlicePeer(double alpha, std::uint64_t seed);

    /// Draws the two sign bits for the next event and returns the state.
    channel::Signal prepare();
    /// Adopts events drawn in bulk by the event kernel from this peer's seed.
    void adopt(const kernels::EventArrays& events);

    transport::Frame respond(const transport::Frame& request) override;

    double alpha() const noexcept { return alpha_; }
    std::uint64_t seed() const noexcept { return seed_; }
    const std::vector<SentEvent>& sent_events() const noexcept { return sent_; }
    const Bits& key() const noexcept { return key_; }
    const std::vector<std::uint32_t>& key_events() const noexcept { return key_events_; }
    /// Reconciliation state, created on the first Cascade or hash frame.
    const reconcile::CascadeResponder* reconciliation() const noexcept { return reconcile_.get(); }

private:
    transport::Frame accept_announcement(const transport::Frame& request);

    double alpha_;
    std::uint64_t seed_;
    std::vector<SentEvent> sent_;
    std::vector<std::uint8_t> announced_;
    bool sifted_ = false;
    Bits key_;
    std::vector<std::uint32_t> key_events_;
    std::unique_ptr<reconcile::CascadeResponder> reconcile_;
};

class BobPeer {
public:
    BobPeer(std::uint64_t seed, double threshold);

    /// Picks a basis, measures the received signal and applies the threshold.
    const EventRecord& measure_event(const channel::Signal& received, double excess_noise);
    void adopt(const kernels::EventArrays& events);

    /// Re-applies selection to every recorded event.
    void set_threshold(double threshold);
    double threshold() const noexcept { return threshold_; }
    std::uint64_t seed() const noexcept { return seed_; }
    const std::vector<EventRecord>& measured() const noexcept { return measured_; }

    wire::BasisAnnouncement announcement() const;

private:
    std::uint64_t seed_;
    double threshold_;
    std::vector<EventRecord> measured_;
};

/// Bob announces the bases of his selected events; Alice keeps her sign bit in
/// each announced basis and acknowledges with a SiftResponse.
RawKeyPair sift(const BobPeer& bob, AlicePeer& alice, transport::RequestChannel& channel);

/// Rebuilds the raw key pair from recorded peers and a transcript.
RawKeyPair replay_sift(const std::vector<SentEvent>& alice_events, const std::vector<EventRecord>& bob_records,
                       std::span<const std::uint8_t> transcript);

enum class ThresholdUnits { outcome, sent_alpha, received_alpha };

struct ThresholdSpec {
    bool automatic = true;
    double value = 0.0;
    ThresholdUnits units = ThresholdUnits::outcome;

    friend bool operator==(const ThresholdSpec&, const ThresholdSpec&) = default;
};

struct SessionConfig {
    double alpha = 0.6;
    double eta = 1.0;
    double excess_noise = 0.0;
    ThresholdSpec threshold;
    std::uint64_t n_events = 0;
    double event_duration = 5e-4;
    double dead_time_fraction = 0.0;
    std::uint64_t seed = 1;
    bool eve_observer = true;
    info::AdvantageEstimator estimator = info::AdvantageEstimator::per_event;
    Exec exec = Exec::parallel;
};

/// Seeds of the individual parties, derived from the master seed.
struct SessionSeeds {
    std::uint64_t alice, bob, eve, cascade, amplification;
};
SessionSeeds derive_seeds(std::uint64_t master) noexcept;

/// Threshold in outcome units for a spec; `auto` solves I_AB = I_AE.
double resolve_threshold(const ThresholdSpec& spec, double alpha, double eta, double excess_noise);

struct SessionResult {
    std::unique_ptr<AlicePeer> alice;
    std::unique_ptr<BobPeer> bob;
    kernels::EventArrays events;
    RawKeyPair keys;
    SessionReport report;
};

/// prepare -> channel -> measure -> post-select -> sift over `link`. A
/// transport failure propagates as TransportError; the frames sent before it
/// remain in the link's transcript.
SessionResult run_session(const SessionConfig& config, transport::LoopbackLink& link);

} // namespace cvqkd::protocol
