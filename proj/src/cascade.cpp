#include "cvqkd/cascade.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "cvqkd/error.hpp"
#include "cvqkd/kernels.hpp"
#include "cvqkd/rng.hpp"
#include "cvqkd/wire.hpp"

namespace cvqkd::reconcile {

using transport::Frame;
using wire::MessageType;

std::uint32_t choose_block_length(double error_rate) {
    if (!(error_rate > 0.0 && error_rate < 0.5))
        throw DomainError("block-length rule needs an error rate in (0, 0.5)");
    const double k = std::round(0.73 / error_rate);
    return static_cast<std::uint32_t>(std::max(4.0, std::min(k, 4294967295.0)));
}

std::uint32_t choose_block_length(double error_rate, std::size_t key_length) {
    if (key_length < 4)
        throw DomainError("key too short for Cascade (needs at least 4 bits)");
    const std::uint32_t k = choose_block_length(error_rate);
    return static_cast<std::uint32_t>(std::min<std::size_t>(k, key_length));
}

std::vector<std::uint32_t> pass_permutation(std::size_t n, std::uint64_t seed) {
    std::vector<std::uint32_t> p(n);
    std::iota(p.begin(), p.end(), 0u);
    RngStream rng(seed);
    for (std::size_t i = n; i > 1; --i) {
        const std::size_t j = rng() % i;
        std::swap(p[i - 1], p[j]);
    }
    return p;
}

Bits verification_digest(const Bits& key, std::uint64_t seed) {
    return kernels::toeplitz(key, kVerificationBits, seed, Exec::serial);
}

// --- Alice -------------------------------------------------------------------

CascadeResponder::CascadeResponder(Bits reference, Exec exec)
    : reference_(std::move(reference)), exec_(exec) {
    passes_.emplace_back(PassView{}); // pass 0: identity
}

Frame CascadeResponder::respond(const Frame& request) {
    switch (request.type) {
    case MessageType::CascadeParityRequest:
        return parity_response(request);
    case MessageType::HashCheck:
        return hash_response(request);
    default:
        throw ProtocolError(std::string("reconciliation responder cannot handle ") +
                            wire::type_name(request.type));
    }
}

Frame CascadeResponder::parity_response(const Frame& request) {
    const auto req = wire::parse_parity_request(request);
    for (const auto& p : req.new_passes) {
        if (p.pass == 0)
            throw ProtocolError("pass 0 uses the identity order and takes no seed");
        if (p.pass >= passes_.size())
            passes_.resize(p.pass + 1);
        if (passes_[p.pass])
            throw ProtocolError("pass " + std::to_string(p.pass) + " announced twice");
        passes_[p.pass] = PassView{pass_permutation(reference_.size(), p.seed)};
    }
    wire::CascadeParityResponse resp;
    resp.parities.reserve(req.ranges.size());
    for (const auto& r : req.ranges) {
        if (r.pass >= passes_.size() || !passes_[r.pass])
            throw ProtocolError("parity request for unannounced pass " + std::to_string(r.pass));
        if (!(r.begin < r.end && r.end <= reference_.size()))
            throw ProtocolError("parity range out of bounds");
        const auto& perm = passes_[r.pass]->perm;
        std::uint8_t parity = 0;
        for (std::uint32_t k = r.begin; k < r.end; ++k)
            parity ^= reference_[perm.empty() ? k : perm[k]];
        resp.parities.push_back(parity);
    }
    parities_sent_ += resp.parities.size();
    return wire::to_frame(resp);
}

Frame CascadeResponder::hash_response(const Frame& request) {
    const auto check = wire::parse_hash_check(request);
    wire::HashVerdict verdict{check.purpose, false};
    if (check.input_bits != reference_.size())
        return wire::to_frame(verdict);
    if (check.purpose == wire::HashPurpose::verification) {
        verdict.accepted = check.output_bits == kVerificationBits &&
                           verification_digest(reference_, check.seed) == check.digest;
    } else {
        if (check.output_bits > reference_.size())
            return wire::to_frame(verdict);
        final_key_ = kernels::toeplitz(reference_, check.output_bits, check.seed, exec_);
        verdict.accepted = true;
    }
    return wire::to_frame(verdict);
}

// --- Bob ---------------------------------------------------------------------

namespace {

class BobCascade {
public:
    BobCascade(Bits bits, const CascadeConfig& cfg, transport::RequestChannel& channel)
        : bits_(std::move(bits)), cfg_(cfg), channel_(channel) {}

    CascadeResult run() {
        const std::size_t n = bits_.size();
        if (cfg_.passes < 1)
            throw DomainError("Cascade needs at least one pass");
        const std::uint32_t k1 = cfg_.initial_block ? *cfg_.initial_block
                                                    : choose_block_length(cfg_.error_estimate, n);
        if (k1 < 1 || n < k1)
            throw DomainError("key length " + std::to_string(n) + " is below the initial block size " +
                              std::to_string(k1));
        if (n > 0xFFFFFFFFu)
            throw DomainError("key too long for 32-bit positions");
        result_.initial_block = k1;
        result_.ledger.per_pass.assign(static_cast<std::size_t>(cfg_.passes), 0);

        for (int p = 0; p < cfg_.passes; ++p) {
            current_ = static_cast<std::size_t>(p);
            open_pass(p, k1);
            resolve();
        }
        verify();
        result_.corrected = std::move(bits_);
        return std::move(result_);
    }

private:
    struct Pass {
        std::vector<std::uint32_t> perm;  // empty: identity
        std::vector<std::uint32_t> where; // inverse of perm
        std::uint32_t block = 0;
        std::vector<std::uint8_t> alice_parity, bob_parity;
        std::size_t odd = 0;

        std::uint32_t at(std::uint32_t k) const { return perm.empty() ? k : perm[k]; }
        std::uint32_t position(std::uint32_t original) const {
            return where.empty() ? original : where[original];
        }
        std::size_t blocks() const { return alice_parity.size(); }
    };

    std::uint8_t bob_range_parity(const Pass& pass, std::uint32_t begin, std::uint32_t end) const {
        std::uint8_t parity = 0;
        for (std::uint32_t k = begin; k < end; ++k)
            parity ^= bits_[pass.at(k)];
        return parity;
    }

    std::vector<std::uint8_t> ask(wire::CascadeParityRequest req) {
        const std::size_t expected = req.ranges.size();
        const Frame reply = channel_.exchange(wire::to_frame(req));
        auto parities = wire::parse_parity_response(reply).parities;
        if (parities.size() != expected)
            throw ProtocolError("parity response count does not match the request");
        result_.ledger.parity_bits_disclosed += parities.size();
        result_.ledger.per_pass[current_] += parities.size();
        return parities;
    }

    void open_pass(int p, std::uint32_t k1) {
        const std::size_t n = bits_.size();
        Pass pass;
        wire::CascadeParityRequest req;
        if (p > 0) {
            const std::uint64_t seed = RngStream::derive(cfg_.seed, static_cast<std::uint64_t>(p))();
            pass.perm = pass_permutation(n, seed);
            pass.where.resize(n);
            for (std::uint32_t k = 0; k < n; ++k)
                pass.where[pass.perm[k]] = k;
            req.new_passes.push_back({static_cast<std::uint32_t>(p), seed});
        }
        const std::uint64_t grown = static_cast<std::uint64_t>(k1) << std::min(p, 32);
        pass.block = static_cast<std::uint32_t>(std::min<std::uint64_t>(grown, n));
        const std::size_t blocks = (n + pass.block - 1) / pass.block;
        for (std::size_t b = 0; b < blocks; ++b) {
            const auto begin = static_cast<std::uint32_t>(b * pass.block);
            const auto end = static_cast<std::uint32_t>(std::min<std::size_t>(n, begin + pass.block));
            req.ranges.push_back({static_cast<std::uint32_t>(p), begin, end});
        }
        pass.alice_parity = ask(std::move(req));
        pass.bob_parity.resize(blocks);
        for (std::size_t b = 0; b < blocks; ++b) {
            const auto begin = static_cast<std::uint32_t>(b * pass.block);
            const auto end = static_cast<std::uint32_t>(std::min<std::size_t>(n, begin + pass.block));
            pass.bob_parity[b] = bob_range_parity(pass, begin, end);
            pass.odd += pass.bob_parity[b] != pass.alice_parity[b];
        }
        passes_.push_back(std::move(pass));
    }

    // Binary-search every odd block of one pass in lock step, one request per
    // halving round, then apply the corrections and re-check earlier passes.
    void resolve() {
        for (;;) {
            auto it = std::find_if(passes_.begin(), passes_.end(), [](const Pass& p) { return p.odd > 0; });
            if (it == passes_.end())
                return;
            const auto q = static_cast<std::uint32_t>(it - passes_.begin());
            const Pass& pass = *it;

            struct Search {
                std::uint32_t begin, end;
            };
            std::vector<Search> active;
            const std::size_t n = bits_.size();
            for (std::size_t b = 0; b < pass.blocks(); ++b) {
                if (pass.alice_parity[b] == pass.bob_parity[b])
                    continue;
                const auto begin = static_cast<std::uint32_t>(b * pass.block);
                active.push_back({begin, static_cast<std::uint32_t>(std::min<std::size_t>(n, begin + pass.block))});
            }

            for (;;) {
                wire::CascadeParityRequest req;
                std::vector<std::size_t> which;
                for (std::size_t i = 0; i < active.size(); ++i) {
                    if (active[i].end - active[i].begin < 2)
                        continue;
                    const std::uint32_t mid = active[i].begin + (active[i].end - active[i].begin) / 2;
                    req.ranges.push_back({q, active[i].begin, mid});
                    which.push_back(i);
                }
                if (which.empty())
                    break;
                const auto alice = ask(std::move(req));
                for (std::size_t j = 0; j < which.size(); ++j) {
                    Search& s = active[which[j]];
                    const std::uint32_t mid = s.begin + (s.end - s.begin) / 2;
                    if (alice[j] != bob_range_parity(pass, s.begin, mid))
                        s.end = mid;
                    else
                        s.begin = mid;
                }
            }
            for (const Search& s : active)
                flip(pass.at(s.begin));
        }
    }

    void flip(std::uint32_t original) {
        bits_[original] ^= 1;
        ++result_.corrections;
        for (Pass& pass : passes_) {
            const std::size_t b = pass.position(original) / pass.block;
            const bool was_odd = pass.bob_parity[b] != pass.alice_parity[b];
            pass.bob_parity[b] ^= 1;
            if (was_odd)
                --pass.odd;
            else
                ++pass.odd;
        }
    }

    void verify() {
        wire::HashCheck check;
        check.purpose = wire::HashPurpose::verification;
        check.seed = RngStream::derive(cfg_.seed, 0xFFFF'FFFFULL)();
        check.input_bits = static_cast<std::uint32_t>(bits_.size());
        check.output_bits = kVerificationBits;
        check.digest = verification_digest(bits_, check.seed);
        const auto verdict = wire::parse_hash_verdict(channel_.exchange(wire::to_frame(check)));
        if (verdict.purpose != wire::HashPurpose::verification)
            throw ProtocolError("hash verdict answers the wrong check");
        result_.ledger.verification_bits += kVerificationBits;
        result_.verified = verdict.accepted;
    }

    Bits bits_;
    const CascadeConfig& cfg_;
    transport::RequestChannel& channel_;
    std::vector<Pass> passes_;
    std::size_t current_ = 0;
    CascadeResult result_;
};

} // namespace

CascadeResult run_cascade(Bits bob_bits, const CascadeConfig& cfg, transport::RequestChannel& channel) {
    return BobCascade(std::move(bob_bits), cfg, channel).run();
}

CascadeResult cascade_reconcile(const Bits& alice_bits, const Bits& bob_bits, const CascadeConfig& cfg,
                                transport::LoopbackLink& link) {
    if (alice_bits.size() != bob_bits.size())
        throw DomainError("Cascade inputs differ in length");
    CascadeResponder alice(alice_bits);
    transport::LoopbackSession session(link, alice);
    return run_cascade(bob_bits, cfg, session);
}

} // namespace cvqkd::reconcile
