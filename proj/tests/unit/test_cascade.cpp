#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "cvqkd/cascade.hpp"
#include "cvqkd/error.hpp"
#include "cvqkd/kernels.hpp"
#include "cvqkd/privacy.hpp"
#include "cvqkd/rng.hpp"
#include "gen.hpp"

using namespace cvqkd;
using namespace cvqkd::reconcile;
using wire::MessageType;

namespace {

std::uint64_t parity_bits_in(const transport::Transcript& t) {
    std::uint64_t n = 0;
    for (const auto& e : t.entries())
        if (e.frame.type == MessageType::CascadeParityResponse)
            n += wire::parse_parity_response(e.frame).parities.size();
    return n;
}

std::size_t differences(const Bits& a, const Bits& b) {
    std::size_t d = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        d += a[i] != b[i];
    return d;
}

} // namespace

TEST_CASE("block length rule") {
    CHECK(choose_block_length(0.06) == 12);
    CHECK(choose_block_length(0.076) == 10);
    CHECK(choose_block_length(0.49) == 4);
    CHECK(choose_block_length(0.01) == 73);
    CHECK(choose_block_length(0.01, 50) == 50);
    CHECK_THROWS_AS(choose_block_length(0.0), DomainError);
    CHECK_THROWS_AS(choose_block_length(0.5), DomainError);
    CHECK_THROWS_AS(choose_block_length(0.1, 3), DomainError);
}

TEST_CASE("pass permutations are seeded permutations") {
    const auto a = pass_permutation(1000, 5);
    auto sorted = a;
    std::sort(sorted.begin(), sorted.end());
    std::vector<std::uint32_t> id(1000);
    std::iota(id.begin(), id.end(), 0u);
    CHECK(sorted == id);
    CHECK(a == pass_permutation(1000, 5));
    CHECK(a != pass_permutation(1000, 6));
    CHECK(a != id);
}

TEST_CASE("a single flipped bit in a 32-bit key") {
    gen::Gen g(81);
    const Bits alice = g.bits(32);
    for (std::uint32_t pos : {0u, 13u, 31u}) {
        Bits bob = alice;
        bob[pos] ^= 1;
        CascadeConfig cfg;
        cfg.passes = 1;
        cfg.initial_block = 8;
        transport::LoopbackLink link;
        const auto r = cascade_reconcile(alice, bob, cfg, link);
        CHECK(r.corrected == alice);
        CHECK(r.corrections == 1);
        // 4 block parities, then 8 -> 4 -> 2 -> 1
        CHECK(r.ledger.parity_bits_disclosed == 4 + 3);
        CHECK(r.ledger.per_pass == std::vector<std::uint64_t>{7});
        CHECK(r.ledger.verification_bits == kVerificationBits);
        CHECK(r.verified);
    }
}

TEST_CASE("identical strings disclose only the top-level parities") {
    gen::Gen g(82);
    const Bits a = g.bits(1000);
    CascadeConfig cfg;
    cfg.initial_block = 12;
    transport::LoopbackLink link;
    const auto r = cascade_reconcile(a, a, cfg, link);
    CHECK(r.corrections == 0);
    std::uint64_t want = 0;
    for (int p = 0; p < cfg.passes; ++p) {
        const std::uint64_t k = std::min<std::uint64_t>(12u << p, 1000);
        want += (1000 + k - 1) / k;
    }
    CHECK(r.ledger.parity_bits_disclosed == want);
    CHECK(r.verified);
}

TEST_CASE("property: Cascade corrects random errors and the ledger matches the wire") {
    gen::Gen g(83);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t n = g.integer(64, 5000);
        const double p = g.uniform(0.005, 0.1);
        const Bits a = g.bits(n);
        const Bits b = g.noisy(a, p);
        CascadeConfig cfg;
        cfg.error_estimate = p;
        cfg.seed = g.integer(0, UINT64_MAX);
        transport::LoopbackLink link;
        const auto r = cascade_reconcile(a, b, cfg, link);
        const auto t = link.transcript();
        CHECK(r.ledger.parity_bits_disclosed == parity_bits_in(t));
        CHECK(std::accumulate(r.ledger.per_pass.begin(), r.ledger.per_pass.end(), std::uint64_t{0}) ==
              r.ledger.parity_bits_disclosed);
        CHECK(r.ledger.total() == r.ledger.parity_bits_disclosed + kVerificationBits);
        CHECK(r.corrections >= differences(a, b) - differences(a, r.corrected));
        if (r.verified)
            CHECK(r.corrected == a);
        CHECK(r.verified == (r.corrected == a));
    }
}

TEST_CASE("the pass seeds travel in the requests") {
    gen::Gen g(84);
    const Bits a = g.bits(2000);
    CascadeConfig cfg;
    cfg.seed = 1234;
    cfg.error_estimate = 0.05;
    transport::LoopbackLink link;
    cascade_reconcile(a, g.noisy(a, 0.05), cfg, link);
    std::vector<std::uint32_t> announced;
    const auto transcript = link.transcript();
    for (const auto& e : transcript.entries())
        if (e.frame.type == MessageType::CascadeParityRequest)
            for (const auto& ps : wire::parse_parity_request(e.frame).new_passes) {
                announced.push_back(ps.pass);
                CHECK(ps.seed == RngStream::derive(1234, ps.pass)());
            }
    CHECK(announced == std::vector<std::uint32_t>{1, 2, 3, 4});
}

TEST_CASE("property: disclosure grows with the error rate") {
    double prev = 0.0;
    for (double p : {0.01, 0.03, 0.06, 0.10}) {
        gen::Gen g(85);
        double total = 0.0;
        for (int trial = 0; trial < 10; ++trial) {
            const Bits a = g.bits(10000);
            CascadeConfig cfg;
            cfg.error_estimate = p;
            cfg.seed = static_cast<std::uint64_t>(trial);
            transport::LoopbackLink link;
            total += double(cascade_reconcile(a, g.noisy(a, p), cfg, link).ledger.total()) / 10000.0;
        }
        CHECK(total / 10.0 > prev);
        prev = total / 10.0;
    }
}

TEST_CASE("Cascade preconditions") {
    transport::LoopbackLink link;
    CascadeConfig cfg;
    CHECK_THROWS_AS(cascade_reconcile(Bits(10), Bits(11), cfg, link), DomainError);
    cfg.initial_block = 16;
    CHECK_THROWS_AS(cascade_reconcile(Bits(10), Bits(10), cfg, link), DomainError);
    cfg.initial_block.reset();
    cfg.passes = 0;
    CHECK_THROWS_AS(cascade_reconcile(Bits(10), Bits(10), cfg, link), DomainError);
}

TEST_CASE("the responder rejects requests it cannot answer") {
    CascadeResponder alice(Bits(100, 0));
    wire::CascadeParityRequest unannounced;
    unannounced.ranges = {{2, 0, 10}};
    CHECK_THROWS_AS(alice.respond(wire::to_frame(unannounced)), ProtocolError);
    wire::CascadeParityRequest out_of_range;
    out_of_range.ranges = {{0, 90, 101}};
    CHECK_THROWS_AS(alice.respond(wire::to_frame(out_of_range)), ProtocolError);
    wire::CascadeParityRequest pass_zero;
    pass_zero.new_passes = {{0, 5}};
    CHECK_THROWS_AS(alice.respond(wire::to_frame(pass_zero)), ProtocolError);
    CHECK_THROWS_AS(alice.respond(wire::to_frame(wire::SiftResponse{})), ProtocolError);
}

TEST_CASE("final key length arithmetic") {
    CHECK(final_key_length(249, 0.76, 0, 0) == 189);
    CHECK(final_key_length(80, 0.49, 0, 0) == 39);
    CHECK(final_key_length(1000, 0.0, 0, 0) == 0);
    CHECK(final_key_length(1000, 0.5, 200, 0) == 400);
    CHECK(final_key_length(1000, 0.5, 200, 50) == 350);
    CHECK(final_key_length(1000, 0.5, 200, 500) == 0);
    CHECK(final_key_length(100, 0.5, 150, 0) == 0);
}

TEST_CASE("privacy amplification") {
    gen::Gen g(86);
    const Bits key = g.bits(5000);
    LeakageLedger ledger;
    ledger.parity_bits_disclosed = 1000;
    ledger.verification_bits = 64;
    const auto k = privacy_amplify(key, 0.3, ledger, 10, 77);
    CHECK(k.length() == final_key_length(5000, 0.3, 1064, 10));
    CHECK(k.bits == privacy_amplify(key, 0.3, ledger, 10, 77, Exec::serial).bits);
    CHECK(privacy_amplify(key, 0.0, ledger, 0, 77).length() == 0);
    CHECK_THROWS_AS(privacy_amplify(key, 1.5, ledger, 0, 77), DomainError);
    CHECK_THROWS_AS(privacy_amplify(key, -0.1, ledger, 0, 77), DomainError);
}

TEST_CASE("property: one flipped input bit changes about half the hash output") {
    gen::Gen g(87);
    const std::size_t n = 2048, m = 256;
    const Bits key = g.bits(n);
    double changed = 0.0;
    const int trials = 400;
    for (int t = 0; t < trials; ++t) {
        const std::uint64_t seed = g.integer(0, UINT64_MAX);
        Bits flipped = key;
        flipped[g.integer(0, n - 1)] ^= 1;
        changed += double(differences(kernels::toeplitz(key, m, seed, Exec::parallel),
                                      kernels::toeplitz(flipped, m, seed, Exec::parallel)));
    }
    const double mean = changed / trials / double(m);
    const double sd = std::sqrt(0.25 / (double(m) * trials));
    CHECK(std::abs(mean - 0.5) < 5.0 * sd);
}

TEST_CASE("amplification over the channel yields the same key on both sides") {
    gen::Gen g(88);
    const Bits key = g.bits(3000);
    CascadeResponder alice(key);
    transport::LoopbackLink link;
    transport::LoopbackSession s(link, alice);
    LeakageLedger ledger;
    ledger.verification_bits = 64;
    const auto bob = amplify_over(s, key, 0.4, ledger, 0, 99);
    REQUIRE(alice.final_key().has_value());
    CHECK(*alice.final_key() == bob.bits);
    CHECK(bob.length() == final_key_length(3000, 0.4, 64, 0));
    const auto frames = link.transcript().entries();
    REQUIRE(frames.size() == 2);
    const auto check = wire::parse_hash_check(frames[0].frame);
    CHECK(check.purpose == wire::HashPurpose::amplification);
    CHECK(check.seed == 99);
    CHECK(check.output_bits == bob.length());
    CHECK(check.digest.empty());
}

TEST_CASE("verification digest") {
    gen::Gen g(89);
    const Bits a = g.bits(500);
    Bits b = a;
    b[250] ^= 1;
    CHECK(verification_digest(a, 3).size() == kVerificationBits);
    CHECK(verification_digest(a, 3) == verification_digest(a, 3));
    CHECK(verification_digest(a, 3) != verification_digest(b, 3));
}
