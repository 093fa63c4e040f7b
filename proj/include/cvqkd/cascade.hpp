#pragma once

// Interactive Cascade error correction. Bob corrects his string towards
// Alice's by asking her for parities of index ranges; every parity she returns
// is public and is charged to the leakage ledger.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "cvqkd/exec.hpp"
#include "cvqkd/transport.hpp"

namespace cvqkd::reconcile {

inline constexpr std::uint32_t kVerificationBits = 64;

struct CascadeConfig {
    int passes = 5;
    /// Block size of the first pass; nullopt picks it from `error_estimate`.
    std::optional<std::uint32_t> initial_block;
    double error_estimate = 0.06;
    std::uint64_t seed = 0;
};

struct LeakageLedger {
    std::uint64_t parity_bits_disclosed = 0;
    std::vector<std::uint64_t> per_pass;
    std::uint64_t verification_bits = 0;

    std::uint64_t total() const noexcept { return parity_bits_disclosed + verification_bits; }
};

struct CascadeResult {
    Bits corrected;
    LeakageLedger ledger;
    bool verified = false;   // final whole-string hash matched
    std::size_t corrections = 0;
    std::uint32_t initial_block = 0;
};

/// round(0.73 / error_rate), at least 4. Throws DomainError unless
/// 0 < error_rate < 0.5.
std::uint32_t choose_block_length(double error_rate);
/// As above, clamped to [4, key_length].
std::uint32_t choose_block_length(double error_rate, std::size_t key_length);

/// Fisher-Yates shuffle of 0..n-1 driven by RngStream(seed); entry k is the
/// original index placed at permuted position k.
std::vector<std::uint32_t> pass_permutation(std::size_t n, std::uint64_t seed);

/// 64-bit Toeplitz digest used for the final equality check.
Bits verification_digest(const Bits& key, std::uint64_t seed);

/// Alice's side: answers parity requests and hash checks on her reference key.
class CascadeResponder : public transport::Responder {
public:
    explicit CascadeResponder(Bits reference, Exec exec = Exec::parallel);

    transport::Frame respond(const transport::Frame& request) override;

    const Bits& reference() const noexcept { return reference_; }
    std::uint64_t parities_sent() const noexcept { return parities_sent_; }
    /// Set once an amplification HashCheck has been served.
    const std::optional<Bits>& final_key() const noexcept { return final_key_; }

private:
    struct PassView {
        std::vector<std::uint32_t> perm; // empty: identity
    };

    transport::Frame parity_response(const transport::Frame& request);
    transport::Frame hash_response(const transport::Frame& request);

    Bits reference_;
    Exec exec_;
    std::vector<std::optional<PassView>> passes_;
    std::uint64_t parities_sent_ = 0;
    std::optional<Bits> final_key_;
};

/// Bob's side. Runs all passes plus the final hash comparison over `channel`.
/// Throws DomainError if the key is shorter than the first block.
CascadeResult run_cascade(Bits bob_bits, const CascadeConfig& cfg, transport::RequestChannel& channel);

/// Both sides over an in-process link; the frames land in `link`'s transcript.
/// Throws DomainError on length mismatch.
CascadeResult cascade_reconcile(const Bits& alice_bits, const Bits& bob_bits,
                                const CascadeConfig& cfg, transport::LoopbackLink& link);

} // namespace cvqkd::reconcile
