#include "coex/protocol.hpp"

#include <algorithm>
#include <cmath>

namespace coex {

namespace {

void append_bits(std::vector<std::uint8_t>& out, std::uint32_t value,
                 int width) {
    for (int b = width - 1; b >= 0; --b)
        out.push_back(static_cast<std::uint8_t>((value >> b) & 1u));
}

std::uint32_t take_bits(const std::vector<std::uint8_t>& bits, std::size_t& pos,
                        int width) {
    std::uint32_t v = 0;
    for (int b = 0; b < width; ++b) v = (v << 1) | (bits[pos++] & 1u);
    return v;
}

void validate_payload(const UciPayload& p) {
    if (p.harq_process > 15)
        throw std::invalid_argument("uci: harq_process exceeds 4 bits");
    if (p.ndi > 1) throw std::invalid_argument("uci: ndi exceeds 1 bit");
    if (p.burst_len_sf < 1 || p.burst_len_sf > 10)
        throw std::invalid_argument("uci: burst_len_sf must be in 1..10");
    if (p.carrier_idx > 7)
        throw std::invalid_argument("uci: carrier_idx exceeds 3 bits");
    if (p.format == UciFormat::FULL) {
        if (!p.a_csi || !p.harq_ack_bitmap)
            throw std::invalid_argument("uci: FULL requires a_csi and ack bitmap");
    } else {
        if (p.a_csi || p.harq_ack_bitmap)
            throw std::invalid_argument("uci: COMPACT carries no optional fields");
    }
}

void check_process_id(int process_id) {
    if (process_id < 0 || process_id >= kHarqProcessCount)
        throw std::out_of_range("harq: process id must be in 0..15");
}

}  // namespace

std::vector<std::uint8_t> encode_uci(const UciPayload& p) {
    validate_payload(p);
    std::vector<std::uint8_t> bits;
    bits.reserve(p.format == UciFormat::FULL ? kUciFullBits : kUciCompactBits);
    append_bits(bits, p.c_rnti, 16);
    append_bits(bits, p.harq_process, 4);
    append_bits(bits, p.ndi, 1);
    append_bits(bits, p.burst_len_sf, 4);
    append_bits(bits, p.carrier_idx, 3);
    if (p.format == UciFormat::FULL) {
        append_bits(bits, *p.a_csi, 8);
        append_bits(bits, *p.harq_ack_bitmap, 16);
    }
    return bits;
}

UciPayload decode_uci(const std::vector<std::uint8_t>& bits, UciFormat format) {
    const std::size_t expected =
        format == UciFormat::FULL ? kUciFullBits : kUciCompactBits;
    if (bits.size() != expected)
        throw UciLengthMismatch("uci: bit count does not match the format "
                                "hypothesis; try the other predefined size");
    std::size_t pos = 0;
    UciPayload p;
    p.c_rnti = static_cast<std::uint16_t>(take_bits(bits, pos, 16));
    p.harq_process = static_cast<std::uint8_t>(take_bits(bits, pos, 4));
    p.ndi = static_cast<std::uint8_t>(take_bits(bits, pos, 1));
    p.burst_len_sf = static_cast<std::uint8_t>(take_bits(bits, pos, 4));
    p.carrier_idx = static_cast<std::uint8_t>(take_bits(bits, pos, 3));
    p.format = format;
    if (format == UciFormat::FULL) {
        p.a_csi = static_cast<std::uint8_t>(take_bits(bits, pos, 8));
        p.harq_ack_bitmap = static_cast<std::uint16_t>(take_bits(bits, pos, 16));
    }
    validate_payload(p);
    return p;
}

SubframePlan plan_subframe(double lbt_end_offset_us,
                           const std::set<int>& allowed_starts,
                           bool synchronous) {
    if (!(lbt_end_offset_us >= 0.0 && lbt_end_offset_us < 1000.0))
        throw std::domain_error("plan_subframe: offset must be in [0, 1000)");
    for (int s : allowed_starts)
        if (s != 1 && s != 8)
            throw std::domain_error("plan_subframe: allowed starts are {1, 8}");
    if (!synchronous) return {SubframeKind::ASYNC, 0, 0.0};
    if (lbt_end_offset_us == 0.0) return {SubframeKind::SYNC_FULL, 0, 0.0};
    for (int s : allowed_starts) {  // std::set iterates in increasing order
        double boundary = s * kSymbolUs;
        if (boundary >= lbt_end_offset_us)
            return {SubframeKind::SYNC_PARTIAL, s, boundary - lbt_end_offset_us};
    }
    return {SubframeKind::SYNC_FULL, 0, 1000.0 - lbt_end_offset_us};
}

std::size_t link_adaptation_step(double snr_report_db,
                                 const std::vector<double>& mcs_thresholds_db) {
    if (mcs_thresholds_db.empty())
        throw std::invalid_argument("link_adaptation_step: empty MCS table");
    for (std::size_t i = 1; i < mcs_thresholds_db.size(); ++i)
        if (!(mcs_thresholds_db[i - 1] < mcs_thresholds_db[i]))
            throw std::invalid_argument(
                "link_adaptation_step: thresholds must be strictly increasing");
    auto it = std::upper_bound(mcs_thresholds_db.begin(),
                               mcs_thresholds_db.end(), snr_report_db);
    if (it == mcs_thresholds_db.begin()) return 0;  // below every threshold
    return static_cast<std::size_t>(std::distance(mcs_thresholds_db.begin(), it)) - 1;
}

std::vector<double> default_mcs_table() {
    std::vector<double> t(8);
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = 2.0 * i;
    return t;
}

void harq_start_new(HarqProcessTable& t, int process_id) {
    check_process_id(process_id);
    HarqProcess& p = t[process_id];
    if (p.pending)
        throw std::logic_error("harq_start_new: process still pending");
    if (p.toggle_on_next) {
        p.ndi ^= 1u;
        p.toggle_on_next = false;
    }
    p.pending = true;
    p.tx_count = 0;
}

void harq_on_feedback(HarqProcessTable& t, int process_id, bool ack) {
    check_process_id(process_id);
    HarqProcess& p = t[process_id];
    if (!p.pending)
        throw std::logic_error("harq_on_feedback: feedback for idle process");
    if (ack) {
        p.pending = false;
        p.toggle_on_next = true;
    } else {
        ++p.tx_count;
    }
}

}  // namespace coex
