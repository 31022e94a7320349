// Slot-synchronous contention Monte Carlo. One iteration is one CCA slot:
// machines whose backoff would expire on an idle slot transmit in that slot
// (a transmission lasts exactly one slot and its outcome - collision iff
// more than one simultaneous transmitter - is applied immediately), all
// other machines sense the slot and step on the verdict.

#include "coex/monte_carlo.hpp"

#include <stdexcept>
#include <vector>

#include "coex/detection.hpp"
#include "coex/lbt.hpp"

namespace coex {

namespace {

constexpr std::uint32_t kKindWifi = 1;
constexpr std::uint32_t kKindCat4 = 2;
constexpr std::uint32_t kPurposeBackoff = 1;
constexpr std::uint32_t kPurposeSense = 2;

// True when the next idle slot would drive this machine to transmit.
bool would_transmit(const Cat4LbtState& st) {
    return st.phase == Cat4Phase::BACKOFF && st.backoff_counter <= 1;
}

}  // namespace

MonteCarloResult monte_carlo_attempt_rate(const MonteCarloConfig& cfg) {
    if (cfg.n_wifi < 0 || cfg.n_cat4 < 0 || cfg.n_wifi + cfg.n_cat4 < 1) {
        throw std::invalid_argument("monte carlo: need at least one node");
    }
    if (cfg.w0 < 1 || cfg.m < 0 || cfg.mu < 1 || cfg.slots < 1) {
        throw std::invalid_argument("monte carlo: bad parameters");
    }
    const int n = cfg.n_wifi + cfg.n_cat4;
    const bool ideal = (cfg.sensing == SensingModel::IDEAL);
    const double y = threshold_from_tnr_db(cfg.mu, cfg.tnr_db);
    std::vector<double> p_busy(static_cast<std::size_t>(n) + 1);
    if (!ideal) {
        p_busy[0] = tail_idle(y, cfg.mu);
        for (int k = 1; k <= n; ++k) {
            p_busy[static_cast<std::size_t>(k)] =
                tail_busy(y, cfg.mu, k * cfg.snr_per_tx);
        }
    }

    std::vector<Cat4LbtState> st;
    std::vector<Rng> backoff;
    std::vector<Rng> sense;
    st.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const std::uint32_t kind = i < cfg.n_wifi ? kKindWifi : kKindCat4;
        const std::uint32_t idx =
            static_cast<std::uint32_t>(i < cfg.n_wifi ? i : i - cfg.n_wifi);
        backoff.push_back(
            make_stream(cfg.seed, stream_id(kind, idx, kPurposeBackoff)));
        sense.push_back(
            make_stream(cfg.seed, stream_id(kind, idx, kPurposeSense)));
        const int draw =
            static_cast<int>(backoff[static_cast<std::size_t>(i)].next_below(
                static_cast<std::uint64_t>(cfg.w0)));
        // Saturated stations with no defer period: the closest discrete
        // realization of the per-slot chain being checked against.
        st.push_back(cat4_start(cfg.w0, cfg.m, draw, 0));
    }

    std::int64_t attempts_wifi = 0;
    std::int64_t attempts_cat4 = 0;
    std::vector<int> tx;
    std::vector<char> in_tx(static_cast<std::size_t>(n), 0);
    tx.reserve(static_cast<std::size_t>(n));
    for (std::int64_t s = 0; s < cfg.slots; ++s) {
        tx.clear();
        for (int i = 0; i < n; ++i) {
            in_tx[static_cast<std::size_t>(i)] = 0;
            if (would_transmit(st[static_cast<std::size_t>(i)])) {
                tx.push_back(i);
                in_tx[static_cast<std::size_t>(i)] = 1;
            }
        }
        const int nt = static_cast<int>(tx.size());
        for (int i : tx) {
            cat4_on_slot(st[static_cast<std::size_t>(i)], false);
            if (i < cfg.n_wifi) {
                ++attempts_wifi;
            } else {
                ++attempts_cat4;
            }
        }
        for (int i = 0; i < n; ++i) {
            if (in_tx[static_cast<std::size_t>(i)]) continue;
            const bool busy =
                ideal ? nt >= 1
                      : sense[static_cast<std::size_t>(i)].next_bernoulli(
                            p_busy[static_cast<std::size_t>(nt)]);
            cat4_on_slot(st[static_cast<std::size_t>(i)], busy);
        }
        const bool ok = (nt == 1);
        for (int i : tx) {
            Cat4LbtState& machine = st[static_cast<std::size_t>(i)];
            const int new_stage =
                ok ? 0 : std::min(machine.stage + 1, machine.m);
            const int draw = static_cast<int>(
                backoff[static_cast<std::size_t>(i)].next_below(
                    static_cast<std::uint64_t>(machine.w0) << new_stage));
            cat4_on_tx_result(machine, ok, draw);
        }
    }

    MonteCarloResult res;
    res.wifi = {attempts_wifi, cfg.slots, cfg.n_wifi};
    res.cat4 = {attempts_cat4, cfg.slots, cfg.n_cat4};
    return res;
}

double attempt_rate_iid(double p_busy, double p_fail, int w0, int m,
                        int defer_slots, std::int64_t slots,
                        std::uint64_t seed) {
    if (w0 < 1 || m < 0 || defer_slots < 0 || slots < 1) {
        throw std::invalid_argument("attempt_rate_iid: bad parameters");
    }
    if (p_busy < 0.0 || p_busy > 1.0 || p_fail < 0.0 || p_fail > 1.0) {
        throw std::invalid_argument("attempt_rate_iid: probabilities in [0,1]");
    }
    Rng rng = make_stream(seed, stream_id(0, 0, 0));
    Cat4LbtState st = cat4_start(
        w0, m, static_cast<int>(rng.next_below(static_cast<std::uint64_t>(w0))),
        defer_slots);
    std::int64_t attempts = 0;
    for (std::int64_t s = 0; s < slots; ++s) {
        const bool busy = rng.next_bernoulli(p_busy);
        if (cat4_on_slot(st, busy) == LbtAction::TRANSMIT) {
            ++attempts;
            const bool ok = !rng.next_bernoulli(p_fail);
            const int new_stage = ok ? 0 : std::min(st.stage + 1, st.m);
            const int draw = static_cast<int>(rng.next_below(
                static_cast<std::uint64_t>(st.w0) << new_stage));
            cat4_on_tx_result(st, ok, draw);
        }
    }
    return static_cast<double>(attempts) / static_cast<double>(slots);
}

}  // namespace coex
