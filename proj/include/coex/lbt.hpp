#pragma once
// Slot-stepped listen-before-talk state machines. The machines own no
// randomness and no clock: busy/idle verdicts and backoff draws are injected
// by the caller, so every trace is replayable.

#include <cstdint>

namespace coex {

enum class Cat4Phase { IDLE, DEFER, BACKOFF, READY };
enum class LbtAction { WAIT, TRANSMIT };

// Exponential-backoff LBT: after an initial defer period of consecutive idle
// slots, the backoff counter decrements on idle slots and freezes on busy
// slots (each busy slot restarts the defer). A transmission attempt happens
// on the idle slot that finds or drives the counter to zero. Failed attempts
// escalate the CCA stage (doubling the contention window) up to stage m.
struct Cat4LbtState {
    int w0 = 16;
    int m = 4;
    int stage = 0;
    int cw = 16;                   // w0 * 2^stage
    int backoff_counter = 0;
    Cat4Phase phase = Cat4Phase::IDLE;
    int defer_slots = 3;           // configured defer duration, in slots
    int defer_slots_remaining = 0;
};

Cat4LbtState cat4_start(int w0, int m, int rng_draw, int defer_slots = 3);
LbtAction cat4_on_slot(Cat4LbtState& st, bool cca_busy);
// success resets to stage 0; failure escalates to min(stage+1, m). The new
// backoff counter is drawn by the caller against the NEW contention window,
// i.e. rng_draw < w0 * 2^new_stage.
void cat4_on_tx_result(Cat4LbtState& st, bool success, int rng_draw);

enum class SingleSlotPhase { IDLE, SENSING, PASS, FAIL };
enum class SingleSlotResult { PASS, FAIL };

// One fixed-duration clear-channel check with no retry: the whole interval
// idle passes, any busy energy fails, and the verdict is terminal.
struct SingleSlotLbtState {
    SingleSlotPhase phase = SingleSlotPhase::IDLE;
};

SingleSlotLbtState single_slot_start();
SingleSlotResult single_slot_on_interval(SingleSlotLbtState& st, bool busy);

// Default air-interface timing (config-overridable).
struct LbtTiming {
    double slot_us = 9.0;
    double defer_us = 25.0;            // 16 us + one 9 us slot
    double single_interval_us = 25.0;
};

}  // namespace coex
