#include "doctest.h"

#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

#include "coex/protocol.hpp"
#include "coex/rng.hpp"

using namespace coex;

namespace {

UciPayload random_payload(Rng& rng, UciFormat fmt) {
    UciPayload p;
    p.c_rnti = static_cast<std::uint16_t>(rng.next_below(65536));
    p.harq_process = static_cast<std::uint8_t>(rng.next_below(16));
    p.ndi = static_cast<std::uint8_t>(rng.next_below(2));
    p.burst_len_sf = static_cast<std::uint8_t>(1 + rng.next_below(10));
    p.carrier_idx = static_cast<std::uint8_t>(rng.next_below(8));
    p.format = fmt;
    if (fmt == UciFormat::FULL) {
        p.a_csi = static_cast<std::uint8_t>(rng.next_below(256));
        p.harq_ack_bitmap = static_cast<std::uint16_t>(rng.next_below(65536));
    }
    return p;
}

}  // namespace

TEST_CASE("compact encoding lays fields out most-significant bit first") {
    UciPayload p;  // c_rnti 0, harq 0, ndi 0, burst_len 1, carrier 0
    std::vector<std::uint8_t> bits = encode_uci(p);
    REQUIRE(static_cast<int>(bits.size()) == kUciCompactBits);
    for (int i = 0; i < kUciCompactBits; ++i)
        CHECK(bits[i] == (i == 24 ? 1 : 0));  // burst_len occupies bits 21..24

    p.c_rnti = 0xFFFF;
    bits = encode_uci(p);
    for (int i = 0; i < 16; ++i) CHECK(bits[i] == 1);
    for (int i = 16; i < kUciCompactBits; ++i)
        CHECK(bits[i] == (i == 24 ? 1 : 0));
}

TEST_CASE("full encoding appends the optional fields") {
    UciPayload p;
    p.format = UciFormat::FULL;
    p.a_csi = 0xA5;
    p.harq_ack_bitmap = 0x8001;
    std::vector<std::uint8_t> bits = encode_uci(p);
    REQUIRE(static_cast<int>(bits.size()) == kUciFullBits);
    // a_csi = 10100101 at bits 28..35
    const int csi[] = {1, 0, 1, 0, 0, 1, 0, 1};
    for (int i = 0; i < 8; ++i) CHECK(bits[28 + i] == csi[i]);
    CHECK(bits[36] == 1);  // ack bitmap MSB
    CHECK(bits[51] == 1);  // ack bitmap LSB
    for (int i = 37; i < 51; ++i) CHECK(bits[i] == 0);
}

TEST_CASE("encode/decode round-trips ten thousand random payloads") {
    Rng rng(7);
    for (int i = 0; i < 10000; ++i) {
        const UciFormat fmt =
            rng.next_bernoulli(0.5) ? UciFormat::FULL : UciFormat::COMPACT;
        const UciPayload p = random_payload(rng, fmt);
        const std::vector<std::uint8_t> bits = encode_uci(p);
        CHECK(decode_uci(bits, fmt) == p);
    }
}

TEST_CASE("decoding a mismatched length raises the blind-detection error") {
    UciPayload p;
    std::vector<std::uint8_t> compact = encode_uci(p);
    CHECK_THROWS_AS(decode_uci(compact, UciFormat::FULL), UciLengthMismatch);
    p.format = UciFormat::FULL;
    p.a_csi = 1;
    p.harq_ack_bitmap = 2;
    std::vector<std::uint8_t> full = encode_uci(p);
    CHECK_THROWS_AS(decode_uci(full, UciFormat::COMPACT), UciLengthMismatch);
    compact.pop_back();
    CHECK_THROWS_AS(decode_uci(compact, UciFormat::COMPACT),
                    UciLengthMismatch);
}

TEST_CASE("encoding validates field ranges and format consistency") {
    UciPayload p;
    p.burst_len_sf = 0;
    CHECK_THROWS_AS(encode_uci(p), std::invalid_argument);
    p.burst_len_sf = 11;
    CHECK_THROWS_AS(encode_uci(p), std::invalid_argument);
    p = UciPayload{};
    p.harq_process = 16;
    CHECK_THROWS_AS(encode_uci(p), std::invalid_argument);
    p = UciPayload{};
    p.ndi = 2;
    CHECK_THROWS_AS(encode_uci(p), std::invalid_argument);
    p = UciPayload{};
    p.format = UciFormat::FULL;  // missing optionals
    CHECK_THROWS_AS(encode_uci(p), std::invalid_argument);
    p = UciPayload{};
    p.a_csi = 3;  // optional field on the compact format
    CHECK_THROWS_AS(encode_uci(p), std::invalid_argument);
}

TEST_CASE("subframe planner lands on the symbol grid") {
    const std::set<int> starts{1, 8};
    SubframePlan at_boundary = plan_subframe(0.0, starts);
    CHECK(at_boundary.kind == SubframeKind::SYNC_FULL);
    CHECK(at_boundary.start_symbol == 0);
    CHECK(at_boundary.reservation_us == 0.0);

    SubframePlan mid = plan_subframe(450.0, starts);
    CHECK(mid.kind == SubframeKind::SYNC_PARTIAL);
    CHECK(mid.start_symbol == 8);
    CHECK(std::fabs(mid.reservation_us - (8 * kSymbolUs - 450.0)) < 1e-9);
    CHECK(std::fabs(mid.reservation_us - 121.428571428571) < 1e-9);

    SubframePlan early = plan_subframe(30.0, starts);
    CHECK(early.start_symbol == 1);
    CHECK(std::fabs(early.reservation_us - (kSymbolUs - 30.0)) < 1e-9);

    // Exactly on an allowed boundary: zero reservation.
    SubframePlan exact = plan_subframe(kSymbolUs, starts);
    CHECK(exact.kind == SubframeKind::SYNC_PARTIAL);
    CHECK(exact.start_symbol == 1);
    CHECK(exact.reservation_us == 0.0);

    // Past every allowed start: reserve to the next subframe boundary.
    SubframePlan late = plan_subframe(990.0, starts);
    CHECK(late.kind == SubframeKind::SYNC_FULL);
    CHECK(late.start_symbol == 0);
    CHECK(std::fabs(late.reservation_us - 10.0) < 1e-12);

    SubframePlan no_pos = plan_subframe(600.0, {1});
    CHECK(no_pos.kind == SubframeKind::SYNC_FULL);
    CHECK(std::fabs(no_pos.reservation_us - 400.0) < 1e-12);

    SubframePlan async = plan_subframe(333.3, starts, false);
    CHECK(async.kind == SubframeKind::ASYNC);
    CHECK(async.start_symbol == 0);
    CHECK(async.reservation_us == 0.0);

    CHECK_THROWS_AS(plan_subframe(-0.1, starts), std::domain_error);
    CHECK_THROWS_AS(plan_subframe(1000.0, starts), std::domain_error);
    CHECK_THROWS_AS(plan_subframe(100.0, {3}), std::domain_error);
}

TEST_CASE("link adaptation picks the highest threshold at or below the "
          "report") {
    const std::vector<double> table = default_mcs_table();
    REQUIRE(table.size() == 8);
    CHECK(table.front() == 0.0);
    CHECK(table.back() == 14.0);
    CHECK(link_adaptation_step(-3.0, table) == 0);
    CHECK(link_adaptation_step(0.0, table) == 0);
    CHECK(link_adaptation_step(2.0, table) == 1);  // inclusive on ties
    CHECK(link_adaptation_step(3.9, table) == 1);
    CHECK(link_adaptation_step(100.0, table) == 7);
    CHECK_THROWS_AS(link_adaptation_step(5.0, {}), std::invalid_argument);
    CHECK_THROWS_AS(link_adaptation_step(5.0, {1.0, 1.0}),
                    std::invalid_argument);

    // Against a linear-scan oracle on random strictly increasing tables.
    Rng rng(11);
    for (int t = 0; t < 1000; ++t) {
        std::vector<double> th;
        double v = -20.0 + 10.0 * rng.next_unit();
        const int n = 1 + static_cast<int>(rng.next_below(12));
        for (int i = 0; i < n; ++i) {
            th.push_back(v);
            v += 0.25 + 5.0 * rng.next_unit();
        }
        const double snr = -25.0 + 60.0 * rng.next_unit();
        std::size_t expect = 0;
        for (std::size_t i = 0; i < th.size(); ++i)
            if (th[i] <= snr) expect = i;
        CHECK(link_adaptation_step(snr, th) == expect);
    }
}

TEST_CASE("new-data indicator toggles exactly after acknowledged data") {
    HarqProcessTable t{};
    harq_start_new(t, 3);
    CHECK(t[3].ndi == 0);  // first transmission keeps the initial indicator
    CHECK(t[3].pending);
    CHECK(t[3].tx_count == 0);
    CHECK_THROWS_AS(harq_start_new(t, 3), std::logic_error);

    harq_on_feedback(t, 3, false);
    harq_on_feedback(t, 3, false);
    harq_on_feedback(t, 3, false);
    CHECK(t[3].tx_count == 3);
    CHECK(t[3].ndi == 0);  // retransmissions never toggle
    CHECK(t[3].pending);

    harq_on_feedback(t, 3, true);
    CHECK_FALSE(t[3].pending);
    CHECK(t[3].ndi == 0);  // toggle is armed, not applied
    harq_start_new(t, 3);
    CHECK(t[3].ndi == 1);  // consumed by the next new data
    CHECK(t[3].tx_count == 0);

    CHECK_THROWS_AS(harq_on_feedback(t, 5, true), std::logic_error);
    CHECK_THROWS_AS(harq_start_new(t, 16), std::out_of_range);
    CHECK_THROWS_AS(harq_on_feedback(t, -1, true), std::out_of_range);
}

TEST_CASE("indicator trace property over random feedback sequences") {
    Rng rng(23);
    for (int trial = 0; trial < 1000; ++trial) {
        HarqProcessTable t{};
        const int pid = static_cast<int>(rng.next_below(16));
        std::uint8_t expect_ndi = 0;
        bool acked_last_cycle = false;
        bool pending = false;
        for (int op = 0; op < 40; ++op) {
            if (!pending) {
                if (acked_last_cycle) expect_ndi ^= 1;
                harq_start_new(t, pid);
                pending = true;
                acked_last_cycle = false;
                CHECK(t[pid].ndi == expect_ndi);
            } else {
                const bool ack = rng.next_bernoulli(0.4);
                harq_on_feedback(t, pid, ack);
                if (ack) {
                    pending = false;
                    acked_last_cycle = true;
                }
                CHECK(t[pid].ndi == expect_ndi);
            }
        }
    }
}
