// Discrete-event engine. Transmissions are "chunks" (contiguous intervals
// with a planned end); overlap between chunks of different nodes is detected
// pairwise when the later chunk starts, so a burst knows at its final chunk
// end whether any part of it collided. Sensing is evaluated retrospectively
// at a global CCA-slot heartbeat: a backoff machine stepped at boundary t
// senses the window [t - slot, t). All event times are integer ticks and all
// randomness comes from per-node streams, so runs are bit-reproducible.

#include "coex/sim.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

#include "coex/protocol.hpp"

namespace coex {

namespace {

constexpr std::uint32_t kKindWifi = 1;
constexpr std::uint32_t kKindEnb = 2;
constexpr std::uint32_t kKindUe = 3;
constexpr std::uint32_t kPurposeArrival = 0;
constexpr std::uint32_t kPurposeBackoff = 1;
constexpr std::uint32_t kPurposeSense = 2;
constexpr std::uint32_t kPurposeLabel = 3;

// Same-tick processing order: chunk ends (burst results, channel release)
// first, then chunk starts, grant gates, new arrivals, and the CCA heartbeat
// last so it sees every queue state change made at its own tick.
enum : int {
    kEvChunkEnd = 0,
    kEvChunkStart = 1,
    kEvGate = 2,
    kEvArrival = 3,
    kEvSlot = 4,
};

struct Event {
    Tick tick = 0;
    int rank = 0;
    int node = -1;
    std::uint64_t seq = 0;
    int payload = 0;
};

struct EventAfter {
    bool operator()(const Event& a, const Event& b) const {
        if (a.tick != b.tick) return a.tick > b.tick;
        if (a.rank != b.rank) return a.rank > b.rank;
        if (a.node != b.node) return a.node > b.node;
        return a.seq > b.seq;
    }
};

struct Chunk {
    Tick start = 0;
    Tick end = 0;
    int node = -1;
    int burst = -1;
    std::int64_t payload_bits = 0;  // deliverable capacity when clean
    bool dirty = false;
};

struct Burst {
    int node = -1;
    int total = 0;
    int ended = 0;
    int dirty = 0;
    bool feeds_backoff = false;  // result escalates/resets the Cat.4 machine
    bool feeds_harq = false;     // result is ACK/NACK for HARQ process 0
    Tick resume_at = 0;          // owner may contend again from this tick
};

struct PendingGrant {
    int enb = -1;
    int ue = -1;
    int sf0_chunk = -1;
    Tick pusch_start = 0;
    int n_ul_sf = 0;
};

struct PreArrival {
    Tick tick = 0;
    int owner = -1;  // node whose queue receives the file
    int class_index = 0;
    const char* node_class = nullptr;
    const char* direction = nullptr;
};

struct Node {
    std::uint32_t kind = 0;
    int index = 0;  // within its class
    Rng backoff;
    Rng sense;
    std::deque<int> queue;  // file ids, head is in service
    std::int64_t queue_bits = 0;
    std::optional<Cat4LbtState> machine;
    Tick machine_since = 0;
    bool transmitting = false;
    Tick resume_at = 0;
    HarqProcessTable harq{};
    int rr = 0;              // eNB: round-robin cursor over served UEs
    bool grant_out = false;  // eNB: a grant's uplink slot is still pending
};

struct Engine {
    const ScenarioConfig& cfg;

    // Derived timing/geometry.
    Tick horizon = 0;
    Tick slot_ticks = kSlotTicks;
    Tick gap_ticks = 350;
    Tick mcot_ticks = 0;
    Tick delay_ticks = 0;
    Tick preamble_ticks = kSymbolTicks;
    int defer_slots = 3;
    int n_ul_sf_per_grant = 0;
    int nw = 0, ne = 0, nk = 0, n_nodes = 0;
    double y_thv = 0.0;
    bool ideal = false;
    std::vector<double> p_busy_by_n;

    RunMetrics m;
    std::vector<std::int64_t> remaining;  // per file id
    std::vector<Node> nodes;
    std::vector<Chunk> chunks;
    std::vector<int> live;
    std::vector<Burst> bursts;
    std::vector<PendingGrant> grants;
    std::vector<PreArrival> arrivals;
    std::priority_queue<Event, std::vector<Event>, EventAfter> events;
    std::uint64_t seq = 0;

    // Channel-airtime union accumulator (chunk starts are nondecreasing).
    Tick air_s = -1, air_e = -1;

    // Scratch for per-slot owner counting.
    std::vector<int> owners;

    explicit Engine(const ScenarioConfig& c) : cfg(c) {}

    int gid_wifi(int i) const { return i; }
    int gid_enb(int e) const { return nw + e; }
    int gid_ue(int u) const { return nw + ne + u; }

    ClassCounters& cnt(std::uint32_t kind) {
        return kind == kKindWifi ? m.wifi_ap : kind == kKindEnb ? m.enb : m.ue;
    }

    void push(Tick t, int rank, int node, int payload) {
        if (t <= horizon) events.push({t, rank, node, seq++, payload});
    }

    std::int64_t ticks_to_bits(Tick ticks) const {
        return std::llround(cfg.phy_rate_mbps * static_cast<double>(ticks) /
                            static_cast<double>(kTicksPerUs));
    }

    int new_burst(int node, bool feeds_backoff, bool feeds_harq) {
        bursts.push_back({node, 0, 0, 0, feeds_backoff, feeds_harq, 0});
        return static_cast<int>(bursts.size()) - 1;
    }

    int new_chunk(Tick s, Tick e, int node, int burst, std::int64_t bits) {
        if (e <= s) return -1;
        chunks.push_back({s, e, node, burst, bits, false});
        const int id = static_cast<int>(chunks.size()) - 1;
        bursts[burst].total += 1;
        push(s, kEvChunkStart, node, id);
        push(e, kEvChunkEnd, node, id);
        return id;
    }

    void mark_dirty(Chunk& c) {
        if (!c.dirty) {
            c.dirty = true;
            bursts[c.burst].dirty += 1;
        }
    }

    void flush_air() {
        if (air_s >= 0) {
            m.airtime_ticks +=
                std::min(air_e, horizon) - std::min(air_s, horizon);
        }
    }

    void on_chunk_start(int id) {
        Chunk& c = chunks[id];
        for (int x : live) {
            Chunk& o = chunks[x];
            if (o.node == c.node) continue;
            if (o.end > c.start) {
                mark_dirty(o);
                mark_dirty(c);
            }
        }
        live.push_back(id);
        if (air_s < 0) {
            air_s = c.start;
            air_e = c.end;
        } else if (c.start >= air_e) {
            flush_air();
            air_s = c.start;
            air_e = c.end;
        } else {
            air_e = std::max(air_e, c.end);
        }
    }

    void deliver(Node& nd, std::int64_t avail, Tick now) {
        while (avail > 0 && !nd.queue.empty()) {
            const int f = nd.queue.front();
            const std::int64_t d = std::min(avail, remaining[f]);
            remaining[f] -= d;
            nd.queue_bits -= d;
            m.bits_delivered += d;
            avail -= d;
            if (remaining[f] == 0) {
                m.files[f].completion = now;
                nd.queue.pop_front();
            }
        }
    }

    void finalize_burst(Burst& b) {
        Node& nd = nodes[b.node];
        nd.transmitting = false;
        nd.resume_at = std::max(nd.resume_at, b.resume_at);
        if (b.dirty > 0) cnt(nd.kind).collisions += 1;
        const bool clean = (b.dirty == 0);
        if (b.feeds_backoff && nd.machine) {
            const int new_stage =
                clean ? 0 : std::min(nd.machine->stage + 1, nd.machine->m);
            const int draw = static_cast<int>(nd.backoff.next_below(
                static_cast<std::uint64_t>(nd.machine->w0) << new_stage));
            cat4_on_tx_result(*nd.machine, clean, draw);
        }
        if (b.feeds_harq) harq_on_feedback(nd.harq, 0, clean);
    }

    void on_chunk_end(int id) {
        Chunk& c = chunks[id];
        if (!c.dirty && c.payload_bits > 0) {
            deliver(nodes[c.node], c.payload_bits, c.end);
        }
        Burst& b = bursts[c.burst];
        b.ended += 1;
        if (b.ended == b.total) finalize_burst(b);
    }

    int count_other_transmitters(int self, Tick a, Tick b) {
        owners.clear();
        for (int x : live) {
            const Chunk& c = chunks[x];
            if (c.node == self) continue;
            if (c.start < b && c.end > a) {
                if (std::find(owners.begin(), owners.end(), c.node) ==
                    owners.end()) {
                    owners.push_back(c.node);
                }
            }
        }
        return static_cast<int>(owners.size());
    }

    bool slot_verdict(int n_other, Rng& rng) {
        if (ideal) return n_other >= 1;
        const std::size_t k = std::min<std::size_t>(
            static_cast<std::size_t>(n_other), p_busy_by_n.size() - 1);
        return rng.next_bernoulli(p_busy_by_n[k]);
    }

    bool wants_channel(int gid) const {
        const Node& nd = nodes[gid];
        if (nd.kind == kKindWifi) return nd.queue_bits > 0;
        if (nd.kind == kKindUe) {
            return cfg.uplink_mode == UplinkMode::GUL && nd.queue_bits > 0;
        }
        if (nd.queue_bits > 0) return true;
        if (cfg.uplink_mode != UplinkMode::SUL || nd.grant_out ||
            n_ul_sf_per_grant < 1) {
            return false;
        }
        for (int j = 0; j < nk; ++j) {
            if (nodes[gid_ue(nd.index * nk + j)].queue_bits > 0) return true;
        }
        return false;
    }

    void launch_wifi(int gid, Tick t) {
        Node& nd = nodes[gid];
        const std::int64_t want =
            std::min<std::int64_t>(nd.queue_bits, ticks_to_bits(kSubframeTicks));
        Tick dur = static_cast<Tick>(
            std::ceil(static_cast<double>(want) * kTicksPerUs /
                      cfg.phy_rate_mbps));
        dur = std::clamp<Tick>(dur, 1, kSubframeTicks);
        const int bid = new_burst(gid, true, false);
        bursts[bid].resume_at = t + dur;
        new_chunk(t, t + dur, gid, bid, ticks_to_bits(dur));
    }

    void launch_enb(int gid, Tick t) {
        Node& nd = nodes[gid];
        const Tick mcot_end = t + mcot_ticks;

        // Pick the grant target (round-robin over served UEs with backlog).
        int grant_ue = -1;
        if (cfg.uplink_mode == UplinkMode::SUL && n_ul_sf_per_grant >= 1 &&
            !nd.grant_out) {
            for (int j = 0; j < nk; ++j) {
                const int off = (nd.rr + j) % nk;
                const int u = gid_ue(nd.index * nk + off);
                if (nodes[u].queue_bits > 0) {
                    grant_ue = u;
                    nd.rr = (off + 1) % nk;
                    break;
                }
            }
        }

        // Downlink region: up to the whole occupancy, or - when a grant is
        // issued - up to the UE's clear-channel gap before its uplink slot.
        const Tick region_end =
            grant_ue >= 0 ? t + delay_ticks - gap_ticks : mcot_end;
        const int bid = new_burst(gid, true, false);
        std::int64_t backlog = nd.queue_bits;
        int n_sf = 0;
        int sf0_id = -1;
        Tick last_end = t;
        for (Tick s = t; s < region_end; s += kSubframeTicks) {
            if (n_sf > 0 && backlog <= 0) break;  // early release
            const Tick e = std::min(s + kSubframeTicks, region_end);
            const std::int64_t cap = ticks_to_bits(e - s);
            const int cid = new_chunk(s, e, gid, bid, cap);
            if (n_sf == 0) sf0_id = cid;
            backlog -= cap;
            last_end = e;
            n_sf += 1;
        }
        if (n_sf == 0) {
            // Nothing to send after all (unreachable given wants_channel);
            // treat as an aborted occupancy.
            bursts.pop_back();
            nd.transmitting = false;
            nd.resume_at = t + slot_ticks;
            return;
        }
        if (grant_ue >= 0) {
            nd.grant_out = true;
            bursts[bid].resume_at = mcot_end;
            grants.push_back(
                {gid, grant_ue, sf0_id, t + delay_ticks, n_ul_sf_per_grant});
            push(t + delay_ticks, kEvGate, grant_ue,
                 static_cast<int>(grants.size()) - 1);
        } else {
            bursts[bid].resume_at = last_end;
        }
    }

    void launch_gul_ue(int gid, Tick t) {
        Node& nd = nodes[gid];
        const Tick mcot_end = t + mcot_ticks;
        const int bid = new_burst(gid, true, false);

        // Preamble, then alignment to the cell's subframe grid.
        Tick cur = t + preamble_ticks;
        new_chunk(t, cur, gid, bid, 0);
        const Tick off = cur % kSubframeTicks;
        const Tick sf_base = cur - off;
        const SubframePlan plan = plan_subframe(
            static_cast<double>(off) / kTicksPerUs, {1, 8}, true);
        Tick data_start;
        int start_symbol = 0;
        if (plan.kind == SubframeKind::SYNC_PARTIAL) {
            start_symbol = plan.start_symbol;
            data_start = sf_base + start_symbol * kSymbolTicks;
        } else {
            data_start = (off == 0) ? cur : sf_base + kSubframeTicks;
        }
        new_chunk(cur, data_start, gid, bid, 0);  // reservation filler

        // Data subframes: partial first, then full ones, bounded by the
        // occupancy limit and the actual backlog.
        std::int64_t need = nd.queue_bits;
        int n_data_sf = 0;
        Tick s = data_start;
        Tick last_end = data_start;
        std::vector<std::pair<Tick, Tick>> sf_spans;
        while (need > 0) {
            const Tick e = (n_data_sf == 0 && start_symbol > 0)
                               ? sf_base + kSubframeTicks
                               : s + kSubframeTicks;
            if (e > mcot_end) break;
            sf_spans.emplace_back(s, e);
            const std::int64_t uci =
                (n_data_sf == 0) ? kUciFullBits : kUciCompactBits;
            need -= std::max<std::int64_t>(ticks_to_bits(e - s) - uci, 0);
            n_data_sf += 1;
            last_end = e;
            s = e;
        }

        if (n_data_sf > 0) {
            // Self-reported control information rides the burst: the first
            // subframe carries the long format, the rest the short one. The
            // codec round-trip is asserted on the wire bits.
            bursts[bid].feeds_harq = true;
            if (!nd.harq[0].pending) harq_start_new(nd.harq, 0);
            UciPayload uci{};
            uci.c_rnti = static_cast<std::uint16_t>(0x4000 + nd.index);
            uci.harq_process = 0;
            uci.ndi = nd.harq[0].ndi;
            uci.burst_len_sf = static_cast<std::uint8_t>(
                std::clamp(n_data_sf, 1, 10));
            uci.carrier_idx = 0;
            uci.format = UciFormat::FULL;
            uci.a_csi = static_cast<std::uint8_t>(link_adaptation_step(
                10.0 * std::log10(cfg.snr_per_tx), default_mcs_table()));
            uci.harq_ack_bitmap = 0;
            if (decode_uci(encode_uci(uci), UciFormat::FULL) != uci) {
                throw std::logic_error("uplink control codec self-check failed");
            }
            UciPayload compact = uci;
            compact.format = UciFormat::COMPACT;
            compact.a_csi.reset();
            compact.harq_ack_bitmap.reset();
            if (decode_uci(encode_uci(compact), UciFormat::COMPACT) !=
                compact) {
                throw std::logic_error("uplink control codec self-check failed");
            }
            for (std::size_t k = 0; k < sf_spans.size(); ++k) {
                const auto [cs, ce] = sf_spans[k];
                const std::int64_t uci_bits =
                    (k == 0) ? kUciFullBits : kUciCompactBits;
                new_chunk(cs, ce, gid, bid,
                          std::max<std::int64_t>(
                              ticks_to_bits(ce - cs) - uci_bits, 0));
            }
        }
        bursts[bid].resume_at = last_end;
    }

    void launch(int gid, Tick t) {
        Node& nd = nodes[gid];
        nd.transmitting = true;
        cnt(nd.kind).access_attempts += 1;
        cnt(nd.kind).access_successes += 1;
        if (nd.kind == kKindWifi) {
            launch_wifi(gid, t);
        } else if (nd.kind == kKindEnb) {
            launch_enb(gid, t);
        } else {
            launch_gul_ue(gid, t);
        }
    }

    void on_gate(int gidx) {
        PendingGrant& g = grants[gidx];
        nodes[g.enb].grant_out = false;
        if (chunks[g.sf0_chunk].dirty) return;  // the grant itself was lost
        Node& ue = nodes[g.ue];
        m.ue.access_attempts += 1;
        const int n = count_other_transmitters(g.ue, g.pusch_start - gap_ticks,
                                               g.pusch_start);
        SingleSlotLbtState st = single_slot_start();
        const bool busy = channel_verdict(n, cfg.sensing, cfg.mu, y_thv,
                                          cfg.snr_per_tx, ue.sense);
        if (single_slot_on_interval(st, busy) == SingleSlotResult::PASS) {
            m.ue.access_successes += 1;
            const int bid = new_burst(g.ue, false, false);
            bursts[bid].resume_at =
                g.pusch_start + g.n_ul_sf * kSubframeTicks;
            ue.transmitting = true;
            for (int k = 0; k < g.n_ul_sf; ++k) {
                new_chunk(g.pusch_start + k * kSubframeTicks,
                          g.pusch_start + (k + 1) * kSubframeTicks, g.ue, bid,
                          ticks_to_bits(kSubframeTicks));
            }
        } else {
            m.ue.wasted_grants += g.n_ul_sf;
        }
    }

    void on_arrival(int idx) {
        const PreArrival& a = arrivals[idx];
        FileRecord rec;
        rec.node_class = a.node_class;
        rec.direction = a.direction;
        rec.node_index = a.class_index;
        rec.size_bits = cfg.file_size_bytes * 8;
        rec.arrival = a.tick;
        rec.completion = -1;
        const int fid = static_cast<int>(m.files.size());
        m.files.push_back(rec);
        remaining.push_back(rec.size_bits);
        Node& nd = nodes[a.owner];
        nd.queue.push_back(fid);
        nd.queue_bits += rec.size_bits;
        m.bits_generated += rec.size_bits;
    }

    void on_slot(Tick b) {
        // Retire chunks no sensing window can still reach.
        const Tick keep_after = b - std::max(gap_ticks, slot_ticks);
        for (std::size_t i = 0; i < live.size();) {
            if (chunks[live[i]].end <= keep_after) {
                live[i] = live.back();
                live.pop_back();
            } else {
                ++i;
            }
        }

        bool owners_built = false;
        int n_owners = 0;
        for (int gid = 0; gid < n_nodes; ++gid) {
            Node& nd = nodes[gid];
            if (nd.transmitting || b < nd.resume_at) continue;
            if (!wants_channel(gid)) {
                nd.machine.reset();
                continue;
            }
            if (nd.kind == kKindUe && cfg.uplink_mode != UplinkMode::GUL) {
                continue;
            }
            if (!nd.machine) {
                const int draw = static_cast<int>(
                    nd.backoff.next_below(static_cast<std::uint64_t>(cfg.w0)));
                nd.machine = cat4_start(cfg.w0, cfg.m, draw, defer_slots);
                nd.machine_since = b;
                continue;
            }
            if (nd.machine_since > b - slot_ticks) continue;
            if (!owners_built) {
                n_owners = count_other_transmitters(-1, b - slot_ticks, b);
                owners_built = true;
            }
            const bool self_on_air =
                std::find(owners.begin(), owners.end(), gid) != owners.end();
            const int n_other = n_owners - (self_on_air ? 1 : 0);
            const bool busy = slot_verdict(n_other, nd.sense);
            if (cat4_on_slot(*nd.machine, busy) == LbtAction::TRANSMIT) {
                launch(gid, b);
            }
        }
        push(b + slot_ticks, kEvSlot, -1, 0);
    }

    RunMetrics go() {
        horizon = std::llround(cfg.sim_duration_s * 1e6 * kTicksPerUs);
        slot_ticks = std::max<Tick>(
            1, std::llround(cfg.lbt_timing.slot_us * kTicksPerUs));
        gap_ticks = std::max<Tick>(
            1, std::llround(cfg.lbt_timing.single_interval_us * kTicksPerUs));
        defer_slots = static_cast<int>(
            std::llround(cfg.lbt_timing.defer_us / cfg.lbt_timing.slot_us));
        mcot_ticks = std::llround(cfg.mcot_ms * kSubframeTicks);
        delay_ticks = std::llround(cfg.grant_processing_delay_ms *
                                   kSubframeTicks);
        n_ul_sf_per_grant = std::max(
            0, static_cast<int>(std::floor(cfg.mcot_ms -
                                           cfg.grant_processing_delay_ms +
                                           1e-9)));
        nw = cfg.n_wifi_ap;
        ne = cfg.n_enb;
        nk = cfg.n_ue_per_enb;
        n_nodes = nw + ne + ne * nk;
        y_thv = threshold_from_tnr_db(cfg.mu, cfg.tnr_db);
        ideal = (cfg.sensing == SensingModel::IDEAL);
        if (!ideal) {
            p_busy_by_n.resize(static_cast<std::size_t>(n_nodes) + 1);
            p_busy_by_n[0] = tail_idle(y_thv, cfg.mu);
            for (int k = 1; k <= n_nodes; ++k) {
                p_busy_by_n[static_cast<std::size_t>(k)] =
                    tail_busy(y_thv, cfg.mu, k * cfg.snr_per_tx);
            }
        }

        nodes.reserve(static_cast<std::size_t>(n_nodes));
        for (int i = 0; i < nw; ++i) {
            nodes.push_back(Node{
                kKindWifi, i,
                make_stream(cfg.seed, stream_id(kKindWifi, i, kPurposeBackoff)),
                make_stream(cfg.seed, stream_id(kKindWifi, i, kPurposeSense)),
                {}, 0, {}, 0, false, 0, {}, 0, false});
        }
        for (int e = 0; e < ne; ++e) {
            nodes.push_back(Node{
                kKindEnb, e,
                make_stream(cfg.seed, stream_id(kKindEnb, e, kPurposeBackoff)),
                make_stream(cfg.seed, stream_id(kKindEnb, e, kPurposeSense)),
                {}, 0, {}, 0, false, 0, {}, 0, false});
        }
        for (int u = 0; u < ne * nk; ++u) {
            nodes.push_back(Node{
                kKindUe, u,
                make_stream(cfg.seed, stream_id(kKindUe, u, kPurposeBackoff)),
                make_stream(cfg.seed, stream_id(kKindUe, u, kPurposeSense)),
                {}, 0, {}, 0, false, 0, {}, 0, false});
        }

        // FTP Model 3 traffic: every WiFi AP and every UE is a traffic
        // source; each file is labelled downlink/uplink independently.
        // Downlink files of a UE queue at its serving eNB.
        const double p_dl = cfg.dl_split_pct / 100.0;
        for (int i = 0; i < nw; ++i) {
            Rng ar = make_stream(cfg.seed, stream_id(kKindWifi, i, kPurposeArrival));
            Rng lab = make_stream(cfg.seed, stream_id(kKindWifi, i, kPurposeLabel));
            for (double t :
                 ftp3_arrivals(ar, cfg.lambda_files_per_s, cfg.sim_duration_s)) {
                const bool dl = lab.next_bernoulli(p_dl);
                arrivals.push_back({std::llround(t * 1e6 * kTicksPerUs),
                                    gid_wifi(i), i, "wifi_ap",
                                    dl ? "dl" : "ul"});
            }
        }
        for (int u = 0; u < ne * nk; ++u) {
            Rng ar = make_stream(cfg.seed, stream_id(kKindUe, u, kPurposeArrival));
            Rng lab = make_stream(cfg.seed, stream_id(kKindUe, u, kPurposeLabel));
            const int serving = u / std::max(nk, 1);
            for (double t :
                 ftp3_arrivals(ar, cfg.lambda_files_per_s, cfg.sim_duration_s)) {
                const bool dl = lab.next_bernoulli(p_dl);
                if (dl) {
                    arrivals.push_back({std::llround(t * 1e6 * kTicksPerUs),
                                        gid_enb(serving), serving, "enb",
                                        "dl"});
                } else {
                    arrivals.push_back({std::llround(t * 1e6 * kTicksPerUs),
                                        gid_ue(u), u, "ue", "ul"});
                }
            }
        }
        for (std::size_t i = 0; i < arrivals.size(); ++i) {
            push(arrivals[i].tick, kEvArrival, arrivals[i].owner,
                 static_cast<int>(i));
        }
        push(slot_ticks, kEvSlot, -1, 0);

        while (!events.empty()) {
            const Event ev = events.top();
            events.pop();
            switch (ev.rank) {
                case kEvChunkEnd:
                    on_chunk_end(ev.payload);
                    break;
                case kEvChunkStart:
                    on_chunk_start(ev.payload);
                    break;
                case kEvGate:
                    on_gate(ev.payload);
                    break;
                case kEvArrival:
                    on_arrival(ev.payload);
                    break;
                default:
                    on_slot(ev.tick);
                    break;
            }
        }
        flush_air();

        m.horizon_ticks = horizon;
        m.mean_upt_dl_wifi = compute_upt(m.files, "wifi_ap", "dl");
        m.mean_upt_ul_wifi = compute_upt(m.files, "wifi_ap", "ul");
        m.mean_upt_dl_mf = compute_upt(m.files, "enb", "dl");
        m.mean_upt_ul_mf = compute_upt(m.files, "ue", "ul");
        return m;
    }
};

}  // namespace

void ScenarioConfig::validate() const {
    auto fail = [](const std::string& what) {
        throw std::invalid_argument("scenario config: " + what);
    };
    if (n_wifi_ap < 0) fail("n_wifi_ap must be >= 0");
    if (n_enb < 0) fail("n_enb must be >= 0");
    if (n_ue_per_enb < 0) fail("n_ue_per_enb must be >= 0");
    if (!(mcot_ms > 0.0) || mcot_ms > 100.0) fail("mcot_ms must be in (0, 100]");
    if (!(grant_processing_delay_ms >= 1.0) ||
        grant_processing_delay_ms > mcot_ms + 100.0) {
        fail("grant_processing_delay_ms must be >= 1");
    }
    if (lambda_files_per_s < 0.0) fail("lambda_files_per_s must be >= 0");
    if (file_size_bytes <= 0) fail("file_size_bytes must be > 0");
    if (dl_split_pct < 0 || dl_split_pct > 100) {
        fail("dl_split_pct must be in [0, 100]");
    }
    if (!(phy_rate_mbps > 0.0)) fail("phy_rate_mbps must be > 0");
    if (mu < 1) fail("mu must be >= 1");
    if (snr_per_tx < 0.0) fail("snr_per_tx must be >= 0");
    if (sim_duration_s < 0.0) fail("sim_duration_s must be >= 0");
    if (w0 < 1) fail("w0 must be >= 1");
    if (m < 0) fail("m must be >= 0");
    if (!(lbt_timing.slot_us > 0.0)) fail("slot_us must be > 0");
    if (lbt_timing.defer_us < 0.0) fail("defer_us must be >= 0");
    if (!(lbt_timing.single_interval_us > 0.0)) {
        fail("single_interval_us must be > 0");
    }
}

std::vector<double> ftp3_arrivals(Rng& rng, double lambda_per_s,
                                  double horizon_s) {
    std::vector<double> out;
    if (lambda_per_s <= 0.0 || horizon_s <= 0.0) return out;
    double t = 0.0;
    for (;;) {
        t += rng.next_exponential(lambda_per_s);
        if (t >= horizon_s) break;
        out.push_back(t);
    }
    return out;
}

bool channel_verdict(int n_transmitters, SensingModel model, int mu,
                     double y_thv, double snr_per_tx, Rng& rng) {
    if (n_transmitters < 0) {
        throw std::invalid_argument("channel_verdict: negative transmitter count");
    }
    if (model == SensingModel::IDEAL) return n_transmitters >= 1;
    const double p = n_transmitters == 0
                         ? tail_idle(y_thv, mu)
                         : tail_busy(y_thv, mu, n_transmitters * snr_per_tx);
    return rng.next_bernoulli(p);
}

std::optional<double> compute_upt(const std::vector<FileRecord>& files,
                                  const std::string& node_class,
                                  const std::string& direction) {
    double sum = 0.0;
    int n = 0;
    for (const FileRecord& f : files) {
        if (f.completion < 0 || f.node_class != node_class ||
            f.direction != direction || f.completion <= f.arrival) {
            continue;
        }
        sum += static_cast<double>(f.size_bits) * kTicksPerUs /
               static_cast<double>(f.completion - f.arrival);
        n += 1;
    }
    if (n == 0) return std::nullopt;
    return sum / n;
}

RunMetrics run(const ScenarioConfig& config) {
    config.validate();
    Engine eng(config);
    return eng.go();
}

}  // namespace coex
