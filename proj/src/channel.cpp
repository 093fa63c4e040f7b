#include "cvqkd/channel.hpp"

#include <cmath>

#include "cvqkd/error.hpp"
#include "cvqkd/kernels.hpp"

namespace cvqkd::channel {

void ChannelParams::validate() const {
    if (!(eta > 0.0 && eta <= 1.0))
        throw DomainError("channel transmission eta must lie in (0, 1]");
    if (!(excess_noise >= 0.0) || !std::isfinite(excess_noise))
        throw DomainError("excess noise must be finite and >= 0");
}

Signal signal_from_bits(double alpha, bool s2_bit, bool s3_bit) noexcept {
    return {s2_bit ? alpha : -alpha, s3_bit ? alpha : -alpha};
}

Signal apply_loss(const Signal& sig, const ChannelParams& ch) {
    ch.validate();
    const double k = std::sqrt(ch.eta);
    return {sig.s2_amp * k, sig.s3_amp * k};
}

Signal eve_tap(const Signal& sig, const ChannelParams& ch) {
    ch.validate();
    const double k = std::sqrt(1.0 - ch.eta);
    return {sig.s2_amp * k, sig.s3_amp * k};
}

MeasurementOutcome measure(const Signal& sig, Basis basis, double excess_noise, RngStream& rng) {
    const double sigma = std::sqrt(kVacuumVariance + excess_noise);
    return {basis, sig.along(basis) + sigma * rng.normal()};
}

PairedOutcome dual_detector_event(const Signal& sig, bool modulated, RngStream& rng) {
    double half = 0.0;
    if (modulated) {
        const double a = sig.s2_amp / std::sqrt(2.0);
        half = rng.bit() ? a : -a;
    }
    const Signal arm{half, 0.0};
    const double first = measure(arm, Basis::S2, 0.0, rng).x;
    const double second = measure(arm, Basis::S2, 0.0, rng).x;
    return {first, second};
}

double dual_detector_experiment(const Signal& sig, std::size_t n_events, bool modulated,
                                std::uint64_t seed, Exec exec) {
    if (n_events < 2)
        throw InsufficientDataError("dual-detector correlation needs at least two events");
    const kernels::Moments m =
        kernels::dual_detector({sig.s2_amp, modulated}, n_events, seed, exec);
    return m.correlation();
}

double dual_detector_correlation_limit(double alpha) noexcept {
    const double mu2 = alpha * alpha / 2.0;
    return mu2 / (mu2 + kVacuumVariance);
}

} // namespace cvqkd::channel
