#pragma once

// Ordered, reliable, duplex byte streams and the request/response plumbing the
// peers use on top of them.

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <vector>

#include "cvqkd/wire.hpp"

namespace cvqkd::transport {

using wire::Bytes;
using wire::Frame;

class Endpoint {
public:
    virtual ~Endpoint() = default;
    virtual void write(std::span<const std::uint8_t> bytes) = 0;
    /// Blocks until exactly `n` bytes are available.
    virtual Bytes read(std::size_t n) = 0;
};

void send_frame(Endpoint& ep, const Frame& frame);
Frame receive_frame(Endpoint& ep);

enum class Side : std::uint8_t { alice, bob };

struct TranscriptEntry {
    Side sender;
    Frame frame;
};

/// Every frame written to a link, in send order.
class Transcript {
public:
    void append(Side sender, Frame frame);
    const std::vector<TranscriptEntry>& entries() const noexcept { return entries_; }
    /// Concatenated frames; this is the on-disk transcript format.
    Bytes bytes() const;
    std::size_t size() const noexcept { return entries_.size(); }

private:
    std::vector<TranscriptEntry> entries_;
};

/// In-process duplex link. Thread-safe: the two endpoints may be driven from
/// different threads.
class LoopbackLink {
public:
    explicit LoopbackLink(std::chrono::milliseconds read_timeout = std::chrono::seconds(5));
    ~LoopbackLink();
    LoopbackLink(const LoopbackLink&) = delete;
    LoopbackLink& operator=(const LoopbackLink&) = delete;

    Endpoint& alice();
    Endpoint& bob();

    /// Makes the write after `frames` successful writes throw TransportError.
    void fail_after(std::size_t frames);
    /// Wakes blocked readers with TransportError.
    void close();

    Transcript transcript() const;

private:
    struct Pipe {
        std::deque<std::uint8_t> data;
    };
    class End;

    void write(Side from, std::span<const std::uint8_t> bytes);
    Bytes read(Side to, std::size_t n);

    mutable std::mutex mu_;
    std::condition_variable cv_;
    Pipe to_alice_, to_bob_;
    Transcript transcript_;
    std::optional<std::size_t> fail_after_;
    std::size_t writes_ = 0;
    bool closed_ = false;
    std::chrono::milliseconds timeout_;
    std::unique_ptr<End> alice_, bob_;
};

/// Answers one request frame with one response frame.
class Responder {
public:
    virtual ~Responder() = default;
    virtual Frame respond(const Frame& request) = 0;
};

/// Reads one request, answers it.
void serve_one(Endpoint& ep, Responder& responder);

/// The requesting peer's view of the public channel.
class RequestChannel {
public:
    virtual ~RequestChannel() = default;
    virtual Frame exchange(const Frame& request) = 0;
};

/// Sends on an endpoint and blocks for the reply; the responder runs elsewhere.
class EndpointChannel : public RequestChannel {
public:
    explicit EndpointChannel(Endpoint& ep) : ep_(ep) {}
    Frame exchange(const Frame& request) override;

private:
    Endpoint& ep_;
};

/// Single-threaded session over a loopback link: each exchange writes the
/// request on Bob's end, lets the responder serve it on Alice's end, then
/// reads the reply. All bytes cross the link and land in its transcript.
class LoopbackSession : public RequestChannel {
public:
    LoopbackSession(LoopbackLink& link, Responder& alice) : link_(link), alice_(alice) {}
    Frame exchange(const Frame& request) override;

private:
    LoopbackLink& link_;
    Responder& alice_;
};

} // namespace cvqkd::transport
