#include "cvqkd/protocol.hpp"

#include <cmath>
#include <string>

#include "cvqkd/error.hpp"
#include "cvqkd/rng.hpp"

namespace cvqkd::protocol {

using transport::Frame;
using wire::MessageType;

namespace {

struct SiftState {
    std::vector<std::uint8_t> announced;
    Bits key;
    std::vector<std::uint32_t> ids;
};

void apply_announcement(const wire::BasisAnnouncement& a, const std::vector<SentEvent>& sent, SiftState& st) {
    st.announced.resize(sent.size(), 0);
    for (std::size_t i = 0; i < a.event_ids.size(); ++i) {
        const std::uint32_t id = a.event_ids[i];
        if (id >= sent.size())
            throw ProtocolError("basis announcement names unknown event " + std::to_string(id));
        if (st.announced[id])
            throw ProtocolError("event " + std::to_string(id) + " announced twice");
        if (!st.ids.empty() && id < st.ids.back())
            throw ProtocolError("basis announcement is not in event order");
        st.announced[id] = 1;
        st.key.push_back(sent[id].bit_in(a.bases[i]));
        st.ids.push_back(id);
    }
}

} // namespace

std::optional<std::uint8_t> bit_from_outcome(double x) noexcept {
    if (x > 0.0)
        return 1;
    if (x < 0.0)
        return 0;
    return std::nullopt;
}

bool passes_threshold(double x, double threshold) noexcept {
    return x != 0.0 && std::abs(x) >= threshold;
}

// --- Alice -------------------------------------------------------------------

AlicePeer::AlicePeer(double alpha, std::uint64_t seed) : alpha_(alpha), seed_(seed) {
    if (!(alpha > 0.0) || !std::isfinite(alpha))
        throw DomainError("alpha must be > 0");
}

channel::Signal AlicePeer::prepare() {
    const auto id = static_cast<std::uint32_t>(sent_.size());
    const auto bits = kernels::alice_bits(seed_, id);
    sent_.push_back({id, bits.s2, bits.s3});
    return channel::signal_from_bits(alpha_, bits.s2, bits.s3);
}

void AlicePeer::adopt(const kernels::EventArrays& events) {
    sent_.clear();
    sent_.reserve(events.size());
    for (std::size_t i = 0; i < events.size(); ++i)
        sent_.push_back({static_cast<std::uint32_t>(i), events.s2_bit[i], events.s3_bit[i]});
}

Frame AlicePeer::respond(const Frame& request) {
    switch (request.type) {
    case MessageType::BasisAnnouncement:
        return accept_announcement(request);
    case MessageType::CascadeParityRequest:
    case MessageType::HashCheck:
        if (!sifted_)
            throw ProtocolError("reconciliation requested before sifting");
        if (!reconcile_)
            reconcile_ = std::make_unique<reconcile::CascadeResponder>(key_);
        return reconcile_->respond(request);
    default:
        throw ProtocolError(std::string("Alice does not accept ") + wire::type_name(request.type));
    }
}

Frame AlicePeer::accept_announcement(const Frame& request) {
    if (reconcile_)
        throw ProtocolError("basis announcement after reconciliation started");
    const auto a = wire::parse_basis_announcement(request);
    SiftState st{std::move(announced_), std::move(key_), std::move(key_events_)};
    apply_announcement(a, sent_, st);
    announced_ = std::move(st.announced);
    key_ = std::move(st.key);
    key_events_ = std::move(st.ids);
    sifted_ = true;
    return wire::to_frame(wire::SiftResponse{static_cast<std::uint32_t>(a.event_ids.size())});
}

// --- Bob ---------------------------------------------------------------------

BobPeer::BobPeer(std::uint64_t seed, double threshold) : seed_(seed), threshold_(threshold) {
    if (!(threshold >= 0.0))
        throw DomainError("threshold must be >= 0");
}

const EventRecord& BobPeer::measure_event(const channel::Signal& received, double excess_noise) {
    const auto id = static_cast<std::uint32_t>(measured_.size());
    const auto m = kernels::bob_outcome(seed_, id, received, excess_noise);
    measured_.push_back({id, m.basis, m.x, passes_threshold(m.x, threshold_), bit_from_outcome(m.x)});
    return measured_.back();
}

void BobPeer::adopt(const kernels::EventArrays& events) {
    measured_.clear();
    measured_.reserve(events.size());
    for (std::size_t i = 0; i < events.size(); ++i) {
        const double x = events.bob_x[i];
        measured_.push_back({static_cast<std::uint32_t>(i), static_cast<channel::Basis>(events.basis[i]), x,
                             passes_threshold(x, threshold_), bit_from_outcome(x)});
    }
}

void BobPeer::set_threshold(double threshold) {
    if (!(threshold >= 0.0))
        throw DomainError("threshold must be >= 0");
    threshold_ = threshold;
    for (auto& r : measured_)
        r.selected = passes_threshold(r.x, threshold_);
}

wire::BasisAnnouncement BobPeer::announcement() const {
    wire::BasisAnnouncement a;
    for (const auto& r : measured_) {
        if (!r.selected)
            continue;
        a.event_ids.push_back(r.event_id);
        a.bases.push_back(r.basis);
    }
    return a;
}

// --- sifting -----------------------------------------------------------------

RawKeyPair sift(const BobPeer& bob, AlicePeer& alice, transport::RequestChannel& channel) {
    const wire::BasisAnnouncement a = bob.announcement();
    const auto reply = wire::parse_sift_response(channel.exchange(wire::to_frame(a)));
    if (reply.accepted != a.event_ids.size())
        throw ProtocolError("Alice acknowledged a different number of events");

    RawKeyPair keys;
    keys.event_ids = a.event_ids;
    keys.bob_bits.reserve(a.event_ids.size());
    for (auto id : a.event_ids)
        keys.bob_bits.push_back(*bob.measured()[id].bit);
    keys.alice_bits = alice.key();
    if (alice.key_events() != keys.event_ids)
        throw ProtocolError("sifted event lists disagree");
    return keys;
}

RawKeyPair replay_sift(const std::vector<SentEvent>& alice_events, const std::vector<EventRecord>& bob_records,
                       std::span<const std::uint8_t> transcript) {
    SiftState st;
    RawKeyPair keys;
    for (const auto& frame : wire::decode_all(transcript)) {
        if (frame.type != MessageType::BasisAnnouncement)
            continue;
        const auto a = wire::parse_basis_announcement(frame);
        apply_announcement(a, alice_events, st);
        for (std::size_t i = 0; i < a.event_ids.size(); ++i) {
            const std::uint32_t id = a.event_ids[i];
            if (id >= bob_records.size() || !bob_records[id].bit || bob_records[id].basis != a.bases[i])
                throw ProtocolError("transcript does not match Bob's records at event " + std::to_string(id));
            keys.bob_bits.push_back(*bob_records[id].bit);
        }
    }
    keys.alice_bits = std::move(st.key);
    keys.event_ids = std::move(st.ids);
    return keys;
}

// --- session -----------------------------------------------------------------

SessionSeeds derive_seeds(std::uint64_t master) noexcept {
    const auto d = [master](std::uint64_t i) { return RngStream::derive(master, i)(); };
    return {d(1), d(2), d(3), d(4), d(5)};
}

double resolve_threshold(const ThresholdSpec& spec, double alpha, double eta, double excess_noise) {
    if (spec.automatic) {
        info::InfoParams p{alpha, eta, channel::kVacuumVariance + excess_noise, channel::kVacuumVariance};
        return info::solve_threshold(p);
    }
    if (!(spec.value >= 0.0) || !std::isfinite(spec.value))
        throw DomainError("threshold must be finite and >= 0");
    switch (spec.units) {
    case ThresholdUnits::outcome: return spec.value;
    case ThresholdUnits::sent_alpha: return spec.value * alpha;
    case ThresholdUnits::received_alpha: return spec.value * alpha * std::sqrt(eta);
    }
    return spec.value;
}

SessionResult run_session(const SessionConfig& config, transport::LoopbackLink& link) {
    const channel::ChannelParams ch{config.eta, config.excess_noise};
    ch.validate();
    if (config.n_events > 0xFFFFFFFFull)
        throw DomainError("event ids are 32-bit; too many events");

    const SessionSeeds seeds = derive_seeds(config.seed);
    const double t = resolve_threshold(config.threshold, config.alpha, config.eta, config.excess_noise);

    SessionResult out;
    out.alice = std::make_unique<AlicePeer>(config.alpha, seeds.alice);
    out.bob = std::make_unique<BobPeer>(seeds.bob, t);

    const kernels::EventStageParams stage{config.alpha, config.eta, config.excess_noise,
                                          seeds.alice, seeds.bob, seeds.eve, config.eve_observer};
    kernels::events(stage, config.n_events, out.events, config.exec);
    out.alice->adopt(out.events);
    out.bob->adopt(out.events);

    transport::LoopbackSession session(link, *out.alice);
    out.keys = sift(*out.bob, *out.alice, session);

    SessionReport& r = out.report;
    r.alpha = config.alpha;
    r.eta = config.eta;
    r.excess_noise = config.excess_noise;
    r.n_events = config.n_events;
    r.event_duration = config.event_duration;
    r.dead_time_fraction = config.dead_time_fraction;
    r.threshold_auto = config.threshold.automatic;
    r.threshold = t;
    r.threshold_sent_alpha = t / config.alpha;
    r.threshold_received_alpha = t / (config.alpha * std::sqrt(config.eta));
    r.estimator = config.estimator;

    const auto& sent = out.alice->sent_events();
    std::uint64_t eve_errors = 0;
    for (const auto& rec : out.bob->measured()) {
        const std::uint8_t truth = sent[rec.event_id].bit_in(rec.basis);
        if (config.eve_observer && bit_from_outcome(out.events.eve_x[rec.event_id]) != truth)
            ++eve_errors;
        if (!rec.bit)
            continue;
        ++r.raw_count;
        r.pre_errors += *rec.bit != truth;
    }
    if (config.eve_observer && config.n_events > 0)
        r.eve_pre_error = static_cast<double>(eve_errors) / static_cast<double>(config.n_events);
    r.selected_count = out.keys.bob_bits.size();
    for (std::size_t i = 0; i < out.keys.bob_bits.size(); ++i)
        r.post_errors += out.keys.bob_bits[i] != out.keys.alice_bits[i];

    const info::InfoParams model{config.alpha, config.eta, ch.outcome_variance(), channel::kVacuumVariance};
    r.model_pre_error = info::mean_error(model.bob_amplitude(), model.sigma2);
    r.eve_info = info::eve_info(model);
    try {
        const auto stats = info::selection_stats(model, t);
        r.model_yield = stats.yield;
        r.model_post_error = stats.post_error;
        r.advantage_per_event = stats.advantage_per_event;
        r.advantage_bulk = stats.advantage_bulk;
    } catch (const DegenerateSelectionError&) {
        r.model_yield = 0.0;
        r.model_post_error = 0.0;
        r.advantage_per_event = r.advantage_bulk = -r.eve_info;
    }
    return out;
}

} // namespace cvqkd::protocol
