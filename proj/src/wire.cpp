#include "cvqkd/wire.hpp"

#include <algorithm>
#include <string>

#include "cvqkd/error.hpp"

namespace cvqkd::wire {

namespace {

class Writer {
public:
    void u8(std::uint8_t v) { out_.push_back(v); }
    void u32(std::uint32_t v) {
        for (int s = 24; s >= 0; s -= 8)
            out_.push_back(static_cast<std::uint8_t>(v >> s));
    }
    void u64(std::uint64_t v) {
        u32(static_cast<std::uint32_t>(v >> 32));
        u32(static_cast<std::uint32_t>(v));
    }
    void bytes(std::span<const std::uint8_t> b) {
        for (auto x : b)
            out_.push_back(x);
    }
    Bytes take() { return std::move(out_); }

private:
    Bytes out_;
};

class Reader {
public:
    Reader(std::span<const std::uint8_t> in, const char* what) : in_(in), what_(what) {}

    std::uint8_t u8() {
        need(1);
        return in_[pos_++];
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i)
            v = (v << 8) | in_[pos_++];
        return v;
    }
    std::uint64_t u64() {
        const std::uint64_t hi = u32();
        return (hi << 32) | u32();
    }
    std::span<const std::uint8_t> bytes(std::size_t n) {
        need(n);
        auto s = in_.subspan(pos_, n);
        pos_ += n;
        return s;
    }
    void finish() const {
        if (pos_ != in_.size())
            throw ProtocolError(std::string(what_) + ": trailing bytes in payload");
    }

private:
    void need(std::size_t n) const {
        if (in_.size() - pos_ < n)
            throw ProtocolError(std::string(what_) + ": payload truncated");
    }

    std::span<const std::uint8_t> in_;
    const char* what_;
    std::size_t pos_ = 0;
};

void expect_type(const Frame& f, MessageType t) {
    if (f.type != t)
        throw ProtocolError(std::string("expected ") + type_name(t) + ", got " + type_name(f.type));
}

std::uint32_t checked_count(std::size_t n) {
    if (n > 0xFFFFFFFFu)
        throw ProtocolError("list too long for a 32-bit count");
    return static_cast<std::uint32_t>(n);
}

} // namespace

bool is_known_type(std::uint8_t tag) noexcept {
    switch (tag) {
    case 0x01: case 0x02: case 0x10: case 0x11: case 0x20: case 0x21:
        return true;
    default:
        return false;
    }
}

const char* type_name(MessageType t) noexcept {
    switch (t) {
    case MessageType::BasisAnnouncement: return "BasisAnnouncement";
    case MessageType::SiftResponse: return "SiftResponse";
    case MessageType::CascadeParityRequest: return "CascadeParityRequest";
    case MessageType::CascadeParityResponse: return "CascadeParityResponse";
    case MessageType::HashCheck: return "HashCheck";
    case MessageType::HashVerdict: return "HashVerdict";
    }
    return "unknown";
}

Bytes encode(const Frame& frame) {
    Writer w;
    w.bytes(kMagic);
    w.u8(kVersion);
    w.u8(static_cast<std::uint8_t>(frame.type));
    w.u32(checked_count(frame.payload.size()));
    w.bytes(frame.payload);
    return w.take();
}

std::uint32_t parse_header(std::span<const std::uint8_t> header, MessageType& type) {
    if (header.size() < kHeaderSize)
        throw ProtocolError("frame header truncated");
    if (!std::equal(kMagic.begin(), kMagic.end(), header.begin()))
        throw ProtocolError("bad frame magic");
    if (header[4] != kVersion)
        throw ProtocolError("unsupported frame version " + std::to_string(header[4]));
    if (!is_known_type(header[5]))
        throw ProtocolError("unknown message type tag " + std::to_string(header[5]));
    type = static_cast<MessageType>(header[5]);
    std::uint32_t len = 0;
    for (int i = 6; i < 10; ++i)
        len = (len << 8) | header[i];
    return len;
}

Frame decode(std::span<const std::uint8_t> bytes, std::size_t& offset) {
    if (offset > bytes.size())
        throw ProtocolError("decode offset past end of buffer");
    const auto rest = bytes.subspan(offset);
    MessageType type;
    const std::uint32_t len = parse_header(rest, type);
    if (rest.size() - kHeaderSize < len)
        throw ProtocolError("frame payload truncated");
    Frame f{type, Bytes(rest.begin() + kHeaderSize, rest.begin() + kHeaderSize + len)};
    offset += kHeaderSize + len;
    return f;
}

std::vector<Frame> decode_all(std::span<const std::uint8_t> bytes) {
    std::vector<Frame> frames;
    std::size_t offset = 0;
    while (offset < bytes.size())
        frames.push_back(decode(bytes, offset));
    return frames;
}

Bytes pack_bits(std::span<const std::uint8_t> bits) {
    Bytes out((bits.size() + 7) / 8, 0);
    for (std::size_t i = 0; i < bits.size(); ++i)
        if (bits[i] & 1)
            out[i / 8] |= static_cast<std::uint8_t>(0x80u >> (i % 8));
    return out;
}

std::vector<std::uint8_t> unpack_bits(std::span<const std::uint8_t> bytes, std::size_t count) {
    if (bytes.size() != (count + 7) / 8)
        throw ProtocolError("packed bit field has the wrong size");
    std::vector<std::uint8_t> bits(count);
    for (std::size_t i = 0; i < count; ++i)
        bits[i] = (bytes[i / 8] >> (7 - i % 8)) & 1;
    return bits;
}

Frame to_frame(const BasisAnnouncement& m) {
    if (m.event_ids.size() != m.bases.size())
        throw ProtocolError("basis announcement: id and basis lists differ in length");
    Writer w;
    w.u32(checked_count(m.event_ids.size()));
    for (auto id : m.event_ids)
        w.u32(id);
    std::vector<std::uint8_t> b(m.bases.size());
    std::transform(m.bases.begin(), m.bases.end(), b.begin(),
                   [](channel::Basis x) { return static_cast<std::uint8_t>(x); });
    w.bytes(pack_bits(b));
    return {MessageType::BasisAnnouncement, w.take()};
}

BasisAnnouncement parse_basis_announcement(const Frame& f) {
    expect_type(f, MessageType::BasisAnnouncement);
    Reader r(f.payload, "BasisAnnouncement");
    const std::uint32_t n = r.u32();
    BasisAnnouncement m;
    m.event_ids.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i)
        m.event_ids.push_back(r.u32());
    for (auto b : unpack_bits(r.bytes((n + 7) / 8), n))
        m.bases.push_back(static_cast<channel::Basis>(b));
    r.finish();
    return m;
}

Frame to_frame(const SiftResponse& m) {
    Writer w;
    w.u32(m.accepted);
    return {MessageType::SiftResponse, w.take()};
}

SiftResponse parse_sift_response(const Frame& f) {
    expect_type(f, MessageType::SiftResponse);
    Reader r(f.payload, "SiftResponse");
    SiftResponse m{r.u32()};
    r.finish();
    return m;
}

Frame to_frame(const CascadeParityRequest& m) {
    Writer w;
    w.u32(checked_count(m.new_passes.size()));
    for (const auto& p : m.new_passes) {
        w.u32(p.pass);
        w.u64(p.seed);
    }
    w.u32(checked_count(m.ranges.size()));
    for (const auto& r : m.ranges) {
        w.u32(r.pass);
        w.u32(r.begin);
        w.u32(r.end);
    }
    return {MessageType::CascadeParityRequest, w.take()};
}

CascadeParityRequest parse_parity_request(const Frame& f) {
    expect_type(f, MessageType::CascadeParityRequest);
    Reader r(f.payload, "CascadeParityRequest");
    CascadeParityRequest m;
    const std::uint32_t np = r.u32();
    for (std::uint32_t i = 0; i < np; ++i) {
        const std::uint32_t pass = r.u32();
        m.new_passes.push_back({pass, r.u64()});
    }
    const std::uint32_t nr = r.u32();
    m.ranges.reserve(nr);
    for (std::uint32_t i = 0; i < nr; ++i) {
        ParityRange range{};
        range.pass = r.u32();
        range.begin = r.u32();
        range.end = r.u32();
        m.ranges.push_back(range);
    }
    r.finish();
    return m;
}

Frame to_frame(const CascadeParityResponse& m) {
    Writer w;
    w.u32(checked_count(m.parities.size()));
    w.bytes(pack_bits(m.parities));
    return {MessageType::CascadeParityResponse, w.take()};
}

CascadeParityResponse parse_parity_response(const Frame& f) {
    expect_type(f, MessageType::CascadeParityResponse);
    Reader r(f.payload, "CascadeParityResponse");
    const std::uint32_t n = r.u32();
    CascadeParityResponse m{unpack_bits(r.bytes((static_cast<std::size_t>(n) + 7) / 8), n)};
    r.finish();
    return m;
}

Frame to_frame(const HashCheck& m) {
    Writer w;
    w.u8(static_cast<std::uint8_t>(m.purpose));
    w.u64(m.seed);
    w.u32(m.input_bits);
    w.u32(m.output_bits);
    w.u32(checked_count(m.digest.size()));
    w.bytes(pack_bits(m.digest));
    return {MessageType::HashCheck, w.take()};
}

HashCheck parse_hash_check(const Frame& f) {
    expect_type(f, MessageType::HashCheck);
    Reader r(f.payload, "HashCheck");
    HashCheck m;
    const std::uint8_t purpose = r.u8();
    if (purpose > 1)
        throw ProtocolError("HashCheck: unknown purpose");
    m.purpose = static_cast<HashPurpose>(purpose);
    m.seed = r.u64();
    m.input_bits = r.u32();
    m.output_bits = r.u32();
    const std::uint32_t n = r.u32();
    m.digest = unpack_bits(r.bytes((static_cast<std::size_t>(n) + 7) / 8), n);
    r.finish();
    return m;
}

Frame to_frame(const HashVerdict& m) {
    Writer w;
    w.u8(static_cast<std::uint8_t>(m.purpose));
    w.u8(m.accepted ? 1 : 0);
    return {MessageType::HashVerdict, w.take()};
}

HashVerdict parse_hash_verdict(const Frame& f) {
    expect_type(f, MessageType::HashVerdict);
    Reader r(f.payload, "HashVerdict");
    HashVerdict m;
    const std::uint8_t purpose = r.u8();
    if (purpose > 1)
        throw ProtocolError("HashVerdict: unknown purpose");
    m.purpose = static_cast<HashPurpose>(purpose);
    const std::uint8_t v = r.u8();
    if (v > 1)
        throw ProtocolError("HashVerdict: verdict byte must be 0 or 1");
    m.accepted = v == 1;
    r.finish();
    return m;
}

} // namespace cvqkd::wire
