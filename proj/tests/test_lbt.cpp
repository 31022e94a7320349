#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "coex/lbt.hpp"
#include "coex/monte_carlo.hpp"
#include "coex/rng.hpp"

using namespace coex;

namespace {

// Expected number of slots consumed per transmission attempt by the
// exponential-backoff machine fed i.i.d. busy slots (probability b), with
// attempt failure probability f, derived by renewal arguments:
//  - earning `d` consecutive idle slots costs E_d slots in expectation,
//  - each backoff decrement costs c = (1 + b E_d) / (1 - b) slots because a
//    busy slot restarts the defer,
//  - a stage-i cycle costs the defer plus the expected drawn counter
//    (counter 0 still spends one slot) times c,
//  - stages chain geometrically in f up to the cap m.
double renewal_attempt_rate(double b, double f, int w0, int m, int d) {
    const double pi = 1.0 - b;
    const double ed =
        d == 0 ? 0.0
               : (pi >= 1.0 ? d
                            : (1.0 - std::pow(pi, d)) /
                                  (std::pow(pi, d) * (1.0 - pi)));
    const double c = (1.0 + b * ed) / (1.0 - b);
    auto stage_cost = [&](int i) {
        const double w = w0 * std::pow(2.0, std::min(i, m));
        return ed + ((1.0 + w * (w - 1.0) / 2.0) / w) * c;
    };
    double slots_per_cycle = 0.0;
    for (int j = 0; j < m; ++j) slots_per_cycle += std::pow(f, j) * stage_cost(j);
    slots_per_cycle += std::pow(f, m) / (1.0 - f) * stage_cost(m);
    const double attempts_per_cycle = 1.0 / (1.0 - f);
    return attempts_per_cycle / slots_per_cycle;
}

}  // namespace

TEST_CASE("machine starts in defer with the drawn counter") {
    Cat4LbtState st = cat4_start(16, 4, 5);
    CHECK(st.phase == Cat4Phase::DEFER);
    CHECK(st.backoff_counter == 5);
    CHECK(st.cw == 16);
    CHECK(st.stage == 0);
    CHECK(st.defer_slots_remaining == 3);
    CHECK(cat4_start(16, 4, 0, 0).phase == Cat4Phase::BACKOFF);
    CHECK_THROWS_AS(cat4_start(16, 4, -1), std::out_of_range);
    CHECK_THROWS_AS(cat4_start(16, 4, 16), std::out_of_range);
    CHECK_THROWS_AS(cat4_start(0, 4, 0), std::invalid_argument);
    CHECK_THROWS_AS(cat4_start(16, -1, 0), std::invalid_argument);
}

TEST_CASE("idle slots walk defer then count the backoff down to an attempt") {
    Cat4LbtState st = cat4_start(16, 4, 5);
    // Three idle slots consume the defer.
    for (int i = 0; i < 3; ++i) CHECK(cat4_on_slot(st, false) == LbtAction::WAIT);
    CHECK(st.phase == Cat4Phase::BACKOFF);
    // Counter 5: the fifth idle backoff slot transmits.
    for (int i = 0; i < 4; ++i) CHECK(cat4_on_slot(st, false) == LbtAction::WAIT);
    CHECK(cat4_on_slot(st, false) == LbtAction::TRANSMIT);
    CHECK(st.phase == Cat4Phase::READY);
}

TEST_CASE("a zero draw transmits on the first idle backoff slot") {
    Cat4LbtState st = cat4_start(16, 4, 0);
    for (int i = 0; i < 3; ++i) cat4_on_slot(st, false);
    CHECK(cat4_on_slot(st, false) == LbtAction::TRANSMIT);
}

TEST_CASE("busy slots freeze the counter and restart the defer") {
    Cat4LbtState st = cat4_start(16, 4, 5);
    for (int i = 0; i < 3; ++i) cat4_on_slot(st, false);
    cat4_on_slot(st, false);  // counter 5 -> 4
    CHECK(st.backoff_counter == 4);
    CHECK(cat4_on_slot(st, true) == LbtAction::WAIT);
    CHECK(st.backoff_counter == 4);
    CHECK(st.phase == Cat4Phase::DEFER);
    CHECK(st.defer_slots_remaining == 3);
    // Defer must be re-earned before the counter moves again.
    for (int i = 0; i < 3; ++i) cat4_on_slot(st, false);
    CHECK(st.backoff_counter == 4);
    cat4_on_slot(st, false);
    CHECK(st.backoff_counter == 3);
}

TEST_CASE("stepping a machine outside a sensing phase is an error") {
    Cat4LbtState st = cat4_start(4, 2, 0, 0);
    CHECK(cat4_on_slot(st, false) == LbtAction::TRANSMIT);
    CHECK_THROWS_AS(cat4_on_slot(st, false), std::logic_error);
    Cat4LbtState fresh = cat4_start(4, 2, 1);
    CHECK_THROWS_AS(cat4_on_tx_result(fresh, true, 0), std::logic_error);
}

TEST_CASE("attempt results reset or escalate the contention window") {
    Cat4LbtState st = cat4_start(16, 4, 0, 0);
    cat4_on_slot(st, false);
    cat4_on_tx_result(st, false, 31);
    CHECK(st.stage == 1);
    CHECK(st.cw == 32);
    CHECK(st.backoff_counter == 31);
    CHECK(st.phase == Cat4Phase::BACKOFF);  // defer 0 re-enters backoff
    // Escalate to the cap and stay there.
    for (int k = 0; k < 6; ++k) {
        while (cat4_on_slot(st, false) != LbtAction::TRANSMIT) {
        }
        cat4_on_tx_result(st, false, 0);
        CHECK(st.cw <= 256);
    }
    CHECK(st.stage == 4);
    CHECK(st.cw == 256);
    // Success resets to the base window; the draw binds against it.
    while (cat4_on_slot(st, false) != LbtAction::TRANSMIT) {
    }
    CHECK_THROWS_AS(cat4_on_tx_result(st, true, 16), std::out_of_range);
    cat4_on_tx_result(st, true, 7);
    CHECK(st.stage == 0);
    CHECK(st.cw == 16);
    CHECK(st.backoff_counter == 7);
    // A failure draw binds against the escalated window.
    Cat4LbtState st2 = cat4_start(16, 4, 0, 0);
    cat4_on_slot(st2, false);
    CHECK_THROWS_AS(cat4_on_tx_result(st2, false, 32), std::out_of_range);
}

TEST_CASE("identical drivers replay identical attempt traces") {
    auto trace = [](std::uint64_t seed) {
        Rng rng(seed);
        Cat4LbtState st =
            cat4_start(16, 4, static_cast<int>(rng.next_below(16)));
        std::vector<int> attempts;
        for (int slot = 0; slot < 100000; ++slot) {
            if (cat4_on_slot(st, rng.next_bernoulli(0.3)) ==
                LbtAction::TRANSMIT) {
                attempts.push_back(slot);
                const bool ok = rng.next_bernoulli(0.8);
                const int stage =
                    ok ? 0 : std::min(st.stage + 1, st.m);
                const int cw = 16 << stage;
                cat4_on_tx_result(st, ok,
                                  static_cast<int>(rng.next_below(
                                      static_cast<std::uint64_t>(cw))));
            }
        }
        return attempts;
    };
    CHECK(trace(99) == trace(99));
    CHECK(trace(99) != trace(100));
}

TEST_CASE("measured attempt frequency matches the renewal-process rate") {
    struct Case {
        double b, f;
        int defer;
    };
    for (Case c : {Case{0.1, 0.1, 0}, Case{0.1, 0.1, 3}, Case{0.3, 0.2, 3},
                   Case{0.0, 0.0, 0}}) {
        const double expected = renewal_attempt_rate(c.b, c.f, 16, 4, c.defer);
        const double measured =
            attempt_rate_iid(c.b, c.f, 16, 4, c.defer, 2'000'000, 42);
        CHECK(std::fabs(measured / expected - 1.0) < 0.02);
    }
}

TEST_CASE("single-interval check passes on idle and fails terminally") {
    SingleSlotLbtState st = single_slot_start();
    CHECK(st.phase == SingleSlotPhase::SENSING);
    CHECK(single_slot_on_interval(st, false) == SingleSlotResult::PASS);
    CHECK(st.phase == SingleSlotPhase::PASS);
    CHECK_THROWS_AS(single_slot_on_interval(st, false), std::logic_error);

    SingleSlotLbtState st2 = single_slot_start();
    CHECK(single_slot_on_interval(st2, true) == SingleSlotResult::FAIL);
    CHECK(st2.phase == SingleSlotPhase::FAIL);
    CHECK_THROWS_AS(single_slot_on_interval(st2, true), std::logic_error);

    SingleSlotLbtState idle;
    CHECK_THROWS_AS(single_slot_on_interval(idle, false), std::logic_error);
}

TEST_CASE("default air-interface timings") {
    LbtTiming t;
    CHECK(t.slot_us == 9.0);
    CHECK(t.defer_us == 25.0);
    CHECK(t.single_interval_us == 25.0);
}
