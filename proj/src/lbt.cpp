#include "coex/lbt.hpp"

#include <stdexcept>

namespace coex {

namespace {

void check_draw(int draw, int cw) {
    if (draw < 0 || draw >= cw)
        throw std::out_of_range("cat4 backoff draw must be in [0, cw)");
}

}  // namespace

Cat4LbtState cat4_start(int w0, int m, int rng_draw, int defer_slots) {
    if (w0 < 1) throw std::invalid_argument("cat4_start: w0 must be >= 1");
    if (m < 0) throw std::invalid_argument("cat4_start: m must be >= 0");
    if (defer_slots < 0)
        throw std::invalid_argument("cat4_start: defer_slots must be >= 0");
    check_draw(rng_draw, w0);
    Cat4LbtState st;
    st.w0 = w0;
    st.m = m;
    st.stage = 0;
    st.cw = w0;
    st.backoff_counter = rng_draw;
    st.defer_slots = defer_slots;
    st.defer_slots_remaining = defer_slots;
    st.phase = defer_slots > 0 ? Cat4Phase::DEFER : Cat4Phase::BACKOFF;
    return st;
}

LbtAction cat4_on_slot(Cat4LbtState& st, bool cca_busy) {
    if (st.phase != Cat4Phase::DEFER && st.phase != Cat4Phase::BACKOFF)
        throw std::logic_error("cat4_on_slot: machine is not sensing");
    if (cca_busy) {
        // Busy slot: counter frozen, defer restarts in full.
        st.defer_slots_remaining = st.defer_slots;
        st.phase = st.defer_slots > 0 ? Cat4Phase::DEFER : Cat4Phase::BACKOFF;
        return LbtAction::WAIT;
    }
    if (st.phase == Cat4Phase::DEFER) {
        if (--st.defer_slots_remaining <= 0) st.phase = Cat4Phase::BACKOFF;
        return LbtAction::WAIT;
    }
    // Idle slot in BACKOFF: a zero counter transmits, otherwise decrement and
    // transmit on the slot that reaches zero.
    if (st.backoff_counter == 0 || --st.backoff_counter == 0) {
        st.phase = Cat4Phase::READY;
        return LbtAction::TRANSMIT;
    }
    return LbtAction::WAIT;
}

void cat4_on_tx_result(Cat4LbtState& st, bool success, int rng_draw) {
    if (st.phase != Cat4Phase::READY)
        throw std::logic_error("cat4_on_tx_result: no attempt outstanding");
    if (success) {
        st.stage = 0;
    } else {
        st.stage = st.stage + 1 < st.m ? st.stage + 1 : st.m;
    }
    st.cw = st.w0 << st.stage;
    check_draw(rng_draw, st.cw);
    st.backoff_counter = rng_draw;
    st.defer_slots_remaining = st.defer_slots;
    st.phase = st.defer_slots > 0 ? Cat4Phase::DEFER : Cat4Phase::BACKOFF;
}

SingleSlotLbtState single_slot_start() {
    return SingleSlotLbtState{SingleSlotPhase::SENSING};
}

SingleSlotResult single_slot_on_interval(SingleSlotLbtState& st, bool busy) {
    if (st.phase != SingleSlotPhase::SENSING)
        throw std::logic_error("single_slot_on_interval: not sensing");
    st.phase = busy ? SingleSlotPhase::FAIL : SingleSlotPhase::PASS;
    return busy ? SingleSlotResult::FAIL : SingleSlotResult::PASS;
}

}  // namespace coex
