#pragma once
// Grant-less uplink control plane: the self-reported control information
// codec (two predefined sizes for blind length detection), uplink subframe
// planning against the 14-symbol/1 ms cell grid, link adaptation, and
// per-process HARQ bookkeeping with new-data-indicator toggling.

#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <vector>

namespace coex {

enum class UciFormat { COMPACT, FULL };

// Wire format, most-significant bit first, fields in declaration order:
//   COMPACT (28 bits): c_rnti 16, harq_process 4, ndi 1, burst_len_sf 4,
//                      carrier_idx 3
//   FULL    (52 bits): COMPACT fields + a_csi 8 + harq_ack_bitmap 16
struct UciPayload {
    std::uint16_t c_rnti = 0;
    std::uint8_t harq_process = 0;   // 4 bits
    std::uint8_t ndi = 0;            // 1 bit
    std::uint8_t burst_len_sf = 1;   // 4 bits, valid range 1..10
    std::uint8_t carrier_idx = 0;    // 3 bits
    UciFormat format = UciFormat::COMPACT;
    std::optional<std::uint8_t> a_csi{};             // FULL only
    std::optional<std::uint16_t> harq_ack_bitmap{};  // FULL only

    bool operator==(const UciPayload&) const = default;
};

constexpr int kUciCompactBits = 28;
constexpr int kUciFullBits = 52;

// Raised by decode_uci on a length/format mismatch: the caller should retry
// with the other size hypothesis (blind detection).
struct UciLengthMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<std::uint8_t> encode_uci(const UciPayload& p);
UciPayload decode_uci(const std::vector<std::uint8_t>& bits, UciFormat format);

enum class SubframeKind { SYNC_PARTIAL, SYNC_FULL, ASYNC };

struct SubframePlan {
    SubframeKind kind = SubframeKind::SYNC_FULL;
    int start_symbol = 0;        // 0 for SYNC_FULL/ASYNC, else in {1, 8}
    double reservation_us = 0.0; // filler signal between LBT end and start
};

constexpr double kSymbolUs = 1000.0 / 14.0;
constexpr int kSymbolsPerSubframe = 14;

// Plans the first uplink subframe after an LBT success at lbt_end_offset_us
// into the current 1 ms subframe. Synchronous mode picks the smallest
// allowed start symbol at or after the offset and fills the gap with a
// reservation signal; with no start position left, it reserves up to the
// next subframe boundary and starts a full subframe there. Asynchronous
// mode starts immediately with no reservation.
SubframePlan plan_subframe(double lbt_end_offset_us,
                           const std::set<int>& allowed_starts,
                           bool synchronous = true);

// Highest MCS index whose threshold is <= the reported SNR (inclusive on
// ties); index 0 when the report is below every threshold.
std::size_t link_adaptation_step(double snr_report_db,
                                 const std::vector<double>& mcs_thresholds_db);

// Default MCS ladder: 8 entries, 2 dB apart, starting at 0 dB.
std::vector<double> default_mcs_table();

struct HarqProcess {
    std::uint8_t ndi = 0;
    bool pending = false;
    std::uint32_t tx_count = 0;  // retransmissions since the last new data
    bool toggle_on_next = false; // set by ACK, consumed by the next new data
};

constexpr int kHarqProcessCount = 16;
using HarqProcessTable = std::array<HarqProcess, kHarqProcessCount>;

// Assigns new data to an idle process: NDI toggles exactly when the previous
// transmission on that process completed with an ACK.
void harq_start_new(HarqProcessTable& t, int process_id);
// ACK clears the pending flag and arms the NDI toggle for the next new data;
// NACK keeps the process pending, increments tx_count, and leaves NDI alone.
void harq_on_feedback(HarqProcessTable& t, int process_id, bool ack);

}  // namespace coex
