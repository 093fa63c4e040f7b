#include <cmath>
#include <limits>

#include "cvqkd/channel.hpp"
#include "cvqkd/kernels.hpp"
#include "cvqkd/rng.hpp"

namespace cvqkd::kernels {

AliceBits alice_bits(std::uint64_t seed, std::uint64_t event_id) {
    RngStream rng = RngStream::derive(seed, event_id);
    const bool s2 = rng.bit();
    const bool s3 = rng.bit();
    return {s2, s3};
}

channel::MeasurementOutcome bob_outcome(std::uint64_t seed, std::uint64_t event_id,
                                        const channel::Signal& received, double excess_noise) {
    RngStream rng = RngStream::derive(seed, event_id);
    const auto basis = rng.bit() ? channel::Basis::S3 : channel::Basis::S2;
    return channel::measure(received, basis, excess_noise, rng);
}

double eve_outcome(std::uint64_t seed, std::uint64_t event_id, const channel::Signal& tapped,
                   channel::Basis basis) {
    RngStream rng = RngStream::derive(seed, event_id);
    return channel::measure(tapped, basis, 0.0, rng).x;
}

void EventArrays::resize(std::size_t n) {
    s2_bit.resize(n);
    s3_bit.resize(n);
    basis.resize(n);
    bob_x.resize(n);
}

namespace {

void one_event(const EventStageParams& p, const channel::ChannelParams& ch, std::size_t i,
               EventArrays& out) {
    const AliceBits a = alice_bits(p.alice_seed, i);
    const channel::Signal sent = channel::signal_from_bits(p.alpha, a.s2, a.s3);
    const auto bob = bob_outcome(p.bob_seed, i, channel::apply_loss(sent, ch), p.excess_noise);
    out.s2_bit[i] = a.s2;
    out.s3_bit[i] = a.s3;
    out.basis[i] = static_cast<std::uint8_t>(bob.basis);
    out.bob_x[i] = bob.x;
    if (p.eve_observer)
        out.eve_x[i] = eve_outcome(p.eve_seed, i, channel::eve_tap(sent, ch), bob.basis);
}

void prepare(const EventStageParams& p, std::size_t n, EventArrays& out) {
    out.resize(n);
    out.eve_x.assign(p.eve_observer ? n : 0, 0.0);
}

} // namespace

namespace serial {

void events(const EventStageParams& p, std::size_t n, EventArrays& out) {
    const channel::ChannelParams ch{p.eta, p.excess_noise};
    ch.validate();
    prepare(p, n, out);
    for (std::size_t i = 0; i < n; ++i)
        one_event(p, ch, i, out);
}

} // namespace serial

namespace omp {

void events(const EventStageParams& p, std::size_t n, EventArrays& out) {
    const channel::ChannelParams ch{p.eta, p.excess_noise};
    ch.validate();
    prepare(p, n, out);
    const auto count = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < count; ++i)
        one_event(p, ch, static_cast<std::size_t>(i), out);
}

} // namespace omp

void events(const EventStageParams& p, std::size_t n, EventArrays& out, Exec exec) {
    if (exec == Exec::serial)
        serial::events(p, n, out);
    else
        omp::events(p, n, out);
}

} // namespace cvqkd::kernels
