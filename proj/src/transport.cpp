#include "cvqkd/transport.hpp"

#include "cvqkd/error.hpp"

namespace cvqkd::transport {

void send_frame(Endpoint& ep, const Frame& frame) {
    const Bytes bytes = wire::encode(frame);
    ep.write(bytes);
}

Frame receive_frame(Endpoint& ep) {
    Bytes header = ep.read(wire::kHeaderSize);
    wire::MessageType type;
    const std::uint32_t len = wire::parse_header(header, type);
    return {type, ep.read(len)};
}

void Transcript::append(Side sender, Frame frame) {
    entries_.push_back({sender, std::move(frame)});
}

Bytes Transcript::bytes() const {
    Bytes out;
    for (const auto& e : entries_) {
        const Bytes b = wire::encode(e.frame);
        out.insert(out.end(), b.begin(), b.end());
    }
    return out;
}

class LoopbackLink::End : public Endpoint {
public:
    End(LoopbackLink& link, Side side) : link_(link), side_(side) {}
    void write(std::span<const std::uint8_t> bytes) override { link_.write(side_, bytes); }
    Bytes read(std::size_t n) override { return link_.read(side_, n); }

private:
    LoopbackLink& link_;
    Side side_;
};

LoopbackLink::LoopbackLink(std::chrono::milliseconds read_timeout)
    : timeout_(read_timeout),
      alice_(std::make_unique<End>(*this, Side::alice)),
      bob_(std::make_unique<End>(*this, Side::bob)) {}

LoopbackLink::~LoopbackLink() = default;

Endpoint& LoopbackLink::alice() {
    return *alice_;
}

Endpoint& LoopbackLink::bob() {
    return *bob_;
}

void LoopbackLink::fail_after(std::size_t frames) {
    std::lock_guard lock(mu_);
    fail_after_ = frames;
}

void LoopbackLink::close() {
    {
        std::lock_guard lock(mu_);
        closed_ = true;
    }
    cv_.notify_all();
}

Transcript LoopbackLink::transcript() const {
    std::lock_guard lock(mu_);
    return transcript_;
}

void LoopbackLink::write(Side from, std::span<const std::uint8_t> bytes) {
    {
        std::lock_guard lock(mu_);
        if (closed_)
            throw TransportError("write on a closed link");
        if (fail_after_ && writes_ >= *fail_after_)
            throw TransportError("link failed after " + std::to_string(writes_) + " frames");
        ++writes_;
        // Writes carry whole frames (send_frame), so the transcript can keep
        // them as frames with their direction.
        std::size_t offset = 0;
        while (offset < bytes.size())
            transcript_.append(from, wire::decode(bytes, offset));
        Pipe& pipe = from == Side::alice ? to_bob_ : to_alice_;
        pipe.data.insert(pipe.data.end(), bytes.begin(), bytes.end());
    }
    cv_.notify_all();
}

Bytes LoopbackLink::read(Side to, std::size_t n) {
    std::unique_lock lock(mu_);
    Pipe& pipe = to == Side::alice ? to_alice_ : to_bob_;
    const bool ready = cv_.wait_for(lock, timeout_, [&] { return pipe.data.size() >= n || closed_; });
    if (!ready)
        throw TransportError("read timed out");
    if (pipe.data.size() < n)
        throw TransportError("link closed");
    Bytes out(pipe.data.begin(), pipe.data.begin() + static_cast<std::ptrdiff_t>(n));
    pipe.data.erase(pipe.data.begin(), pipe.data.begin() + static_cast<std::ptrdiff_t>(n));
    return out;
}

void serve_one(Endpoint& ep, Responder& responder) {
    const Frame request = receive_frame(ep);
    send_frame(ep, responder.respond(request));
}

Frame EndpointChannel::exchange(const Frame& request) {
    send_frame(ep_, request);
    return receive_frame(ep_);
}

Frame LoopbackSession::exchange(const Frame& request) {
    send_frame(link_.bob(), request);
    serve_one(link_.alice(), alice_);
    return receive_frame(link_.bob());
}

} // namespace cvqkd::transport
