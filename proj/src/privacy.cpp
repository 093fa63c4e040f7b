#include "cvqkd/privacy.hpp"

#include <cmath>

#include "cvqkd/error.hpp"
#include "cvqkd/kernels.hpp"
#include "cvqkd/wire.hpp"

namespace cvqkd::reconcile {

std::size_t final_key_length(std::size_t n_corrected, double advantage, std::uint64_t disclosed,
                             std::size_t safety_margin) {
    if (!(advantage >= 0.0 && advantage <= 1.0))
        throw DomainError("information advantage must lie in [0, 1]");
    if (disclosed >= n_corrected)
        return 0;
    const double remaining = static_cast<double>(n_corrected - disclosed);
    const double scaled = std::floor(remaining * advantage + 1e-9);
    if (scaled <= static_cast<double>(safety_margin))
        return 0;
    return static_cast<std::size_t>(scaled) - safety_margin;
}

FinalKey privacy_amplify(const Bits& corrected, double advantage, const LeakageLedger& leakage,
                         std::size_t safety_margin, std::uint64_t seed, Exec exec) {
    const std::size_t m = final_key_length(corrected.size(), advantage, leakage.total(), safety_margin);
    return {kernels::toeplitz(corrected, m, seed, exec)};
}

FinalKey amplify_over(transport::RequestChannel& channel, const Bits& corrected, double advantage,
                      const LeakageLedger& leakage, std::size_t safety_margin, std::uint64_t seed,
                      Exec exec) {
    FinalKey key = privacy_amplify(corrected, advantage, leakage, safety_margin, seed, exec);
    wire::HashCheck announce;
    announce.purpose = wire::HashPurpose::amplification;
    announce.seed = seed;
    announce.input_bits = static_cast<std::uint32_t>(corrected.size());
    announce.output_bits = static_cast<std::uint32_t>(key.length());
    const auto verdict = wire::parse_hash_verdict(channel.exchange(wire::to_frame(announce)));
    if (verdict.purpose != wire::HashPurpose::amplification || !verdict.accepted)
        throw ProtocolError("peer rejected the privacy-amplification parameters");
    return key;
}

} // namespace cvqkd::reconcile
