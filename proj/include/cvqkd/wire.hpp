#pragma once

// Classical-channel framing:
//   "CVQK" | version (1) | type (1) | payload length (u32 big-endian) | payload
// Payload layouts are documented in docs/protocol.md.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "cvqkd/channel.hpp"

namespace cvqkd::wire {

using Bytes = std::vector<std::uint8_t>;

inline constexpr std::array<std::uint8_t, 4> kMagic{'C', 'V', 'Q', 'K'};
inline constexpr std::uint8_t kVersion = 0x01;
inline constexpr std::size_t kHeaderSize = 10;

enum class MessageType : std::uint8_t {
    BasisAnnouncement = 0x01,
    SiftResponse = 0x02,
    CascadeParityRequest = 0x10,
    CascadeParityResponse = 0x11,
    HashCheck = 0x20,
    HashVerdict = 0x21,
};

bool is_known_type(std::uint8_t tag) noexcept;
const char* type_name(MessageType t) noexcept;

struct Frame {
    MessageType type;
    Bytes payload;

    friend bool operator==(const Frame&, const Frame&) = default;
};

Bytes encode(const Frame& frame);

/// Payload length announced by a header. Throws ProtocolError on a bad magic,
/// version or type tag.
std::uint32_t parse_header(std::span<const std::uint8_t> header, MessageType& type);

/// Decodes one frame starting at `offset`, advancing it past the frame.
Frame decode(std::span<const std::uint8_t> bytes, std::size_t& offset);

/// Splits a transcript (concatenated frames) into frames.
std::vector<Frame> decode_all(std::span<const std::uint8_t> bytes);

// --- payloads --------------------------------------------------------------

struct BasisAnnouncement {
    std::vector<std::uint32_t> event_ids;
    std::vector<channel::Basis> bases;

    friend bool operator==(const BasisAnnouncement&, const BasisAnnouncement&) = default;
};

struct SiftResponse {
    std::uint32_t accepted = 0;

    friend bool operator==(const SiftResponse&, const SiftResponse&) = default;
};

struct PassSeed {
    std::uint32_t pass;
    std::uint64_t seed;

    friend bool operator==(const PassSeed&, const PassSeed&) = default;
};

/// Positions [begin, end) in the permuted order of `pass`.
struct ParityRange {
    std::uint32_t pass;
    std::uint32_t begin;
    std::uint32_t end;

    friend bool operator==(const ParityRange&, const ParityRange&) = default;
};

struct CascadeParityRequest {
    std::vector<PassSeed> new_passes;
    std::vector<ParityRange> ranges;

    friend bool operator==(const CascadeParityRequest&, const CascadeParityRequest&) = default;
};

struct CascadeParityResponse {
    std::vector<std::uint8_t> parities;

    friend bool operator==(const CascadeParityResponse&, const CascadeParityResponse&) = default;
};

enum class HashPurpose : std::uint8_t { verification = 0, amplification = 1 };

struct HashCheck {
    HashPurpose purpose = HashPurpose::verification;
    std::uint64_t seed = 0;
    std::uint32_t input_bits = 0;
    std::uint32_t output_bits = 0;
    std::vector<std::uint8_t> digest; // empty for amplification

    friend bool operator==(const HashCheck&, const HashCheck&) = default;
};

struct HashVerdict {
    HashPurpose purpose = HashPurpose::verification;
    bool accepted = false;

    friend bool operator==(const HashVerdict&, const HashVerdict&) = default;
};

Frame to_frame(const BasisAnnouncement& m);
Frame to_frame(const SiftResponse& m);
Frame to_frame(const CascadeParityRequest& m);
Frame to_frame(const CascadeParityResponse& m);
Frame to_frame(const HashCheck& m);
Frame to_frame(const HashVerdict& m);

BasisAnnouncement parse_basis_announcement(const Frame& f);
SiftResponse parse_sift_response(const Frame& f);
CascadeParityRequest parse_parity_request(const Frame& f);
CascadeParityResponse parse_parity_response(const Frame& f);
HashCheck parse_hash_check(const Frame& f);
HashVerdict parse_hash_verdict(const Frame& f);

/// Packs 0/1 values MSB-first, 8 per byte.
Bytes pack_bits(std::span<const std::uint8_t> bits);
std::vector<std::uint8_t> unpack_bits(std::span<const std::uint8_t> bytes, std::size_t count);

} // namespace cvqkd::wire
