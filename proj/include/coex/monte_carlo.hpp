#pragma once
// Slot-synchronous Monte Carlo of contending LBT machines, used to measure
// per-slot attempt frequencies against the closed-form fixed point. The
// whole population advances one CCA slot at a time; a transmission occupies
// exactly one slot and its result is known immediately (the standard
// slotted-chain convention: no defer period, saturated arrivals).

#include <cstdint>
#include <vector>

#include "coex/analytic.hpp"
#include "coex/rng.hpp"
#include "coex/sim.hpp"

namespace coex {

struct MonteCarloConfig {
    int n_wifi = 0;              // nodes using the WiFi-chain comparison
    int n_cat4 = 2;              // nodes using the Cat.4-chain comparison
    int w0 = 16;
    int m = 4;
    SensingModel sensing = SensingModel::IDEAL;
    int mu = 1;
    double tnr_db = 13.0;
    double snr_per_tx = 10.0;
    std::int64_t slots = 2'000'000;
    std::uint64_t seed = 1;
};

struct ClassRate {
    std::int64_t attempts = 0;
    std::int64_t slots = 0;
    int nodes = 0;
    double rate() const {
        return slots > 0 && nodes > 0
                   ? static_cast<double>(attempts) / (static_cast<double>(slots) * nodes)
                   : 0.0;
    }
};

struct MonteCarloResult {
    ClassRate wifi;
    ClassRate cat4;
};

// Measures empirical per-slot attempt frequency per class over the requested
// number of slots. Sensing: a node's CCA in a slot is busy when any other
// node transmitted in that slot (IDEAL) or by an energy-detection draw
// against the count of concurrent transmitters.
MonteCarloResult monte_carlo_attempt_rate(const MonteCarloConfig& cfg);

// Same measurement for a single machine driven by i.i.d. busy slots of
// probability p_busy; attempts always fail with probability p_fail
// (independently), mirroring the chain's (p_b, p_f) parameterization.
double attempt_rate_iid(double p_busy, double p_fail, int w0, int m,
                        int defer_slots, std::int64_t slots,
                        std::uint64_t seed);

}  // namespace coex
