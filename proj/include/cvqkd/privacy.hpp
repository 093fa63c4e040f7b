#pragma once

#include <cstddef>
#include <cstdint>

#include "cvqkd/cascade.hpp"
#include "cvqkd/exec.hpp"
#include "cvqkd/transport.hpp"

namespace cvqkd::reconcile {

struct FinalKey {
    Bits bits;

    std::size_t length() const noexcept { return bits.size(); }
};

/// floor((n_corrected - disclosed) * advantage) - safety_margin, clamped at 0.
/// A 1e-9 guard absorbs binary rounding of decimal advantages (80 * 0.49).
std::size_t final_key_length(std::size_t n_corrected, double advantage, std::uint64_t disclosed,
                             std::size_t safety_margin);

/// Compresses `corrected` with a random binary Toeplitz matrix seeded by `seed`.
/// Throws DomainError unless 0 <= advantage <= 1.
FinalKey privacy_amplify(const Bits& corrected, double advantage, const LeakageLedger& leakage,
                         std::size_t safety_margin, std::uint64_t seed, Exec exec = Exec::parallel);

/// As privacy_amplify, announcing the hash seed and output length to Alice in
/// a HashCheck frame. Throws ProtocolError if she rejects it.
FinalKey amplify_over(transport::RequestChannel& channel, const Bits& corrected, double advantage,
                      const LeakageLedger& leakage, std::size_t safety_margin, std::uint64_t seed,
                      Exec exec = Exec::parallel);

} // namespace cvqkd::reconcile
