#pragma once
// Slot-level discrete-event coexistence simulator. WiFi APs, MF eNBs, and MF
// UEs share one channel with identical path loss between any two nodes; the
// clock is an integer tick of 1/14 us so that 9 us CCA slots (126 ticks),
// OFDM symbols (1000), subframes (14000), and the 25 us LBT interval (350)
// are all exact.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "coex/analytic.hpp"
#include "coex/lbt.hpp"
#include "coex/rng.hpp"

namespace coex {

using Tick = std::int64_t;

constexpr Tick kTicksPerUs = 14;
constexpr Tick kSlotTicks = 126;       // 9 us
constexpr Tick kSymbolTicks = 1000;    // 1000/14 us
constexpr Tick kSubframeTicks = 14000; // 1 ms

enum class SensingModel { IDEAL, ENERGY_DETECTION };

struct ScenarioConfig {
    int n_wifi_ap = 5;
    int n_enb = 5;
    int n_ue_per_enb = 1;
    UplinkMode uplink_mode = UplinkMode::SUL;
    double mcot_ms = 5.0;
    double grant_processing_delay_ms = 4.0;
    double lambda_files_per_s = 0.5;   // file arrival rate per traffic node
    std::int64_t file_size_bytes = 500000;
    int dl_split_pct = 50;             // DL share of arrivals; UL = 100 - DL
    double phy_rate_mbps = 50.0;       // abstract clean-subframe link rate
    SensingModel sensing = SensingModel::ENERGY_DETECTION;
    int mu = 1;
    double tnr_db = 13.0;
    double snr_per_tx = 10.0;
    std::uint64_t seed = 1;
    double sim_duration_s = 10.0;
    LbtTiming lbt_timing{};
    int w0 = 16;
    int m = 4;

    void validate() const;  // throws std::invalid_argument
};

struct ClassCounters {
    std::int64_t access_attempts = 0;
    std::int64_t access_successes = 0;
    std::int64_t collisions = 0;
    std::int64_t wasted_grants = 0;
    bool operator==(const ClassCounters&) const = default;
};

struct FileRecord {
    std::string node_class;   // "wifi_ap", "enb", "ue"
    std::string direction;    // "dl", "ul"
    int node_index = 0;
    std::int64_t size_bits = 0;
    Tick arrival = 0;
    Tick completion = -1;     // -1: still in flight at the horizon
    bool operator==(const FileRecord&) const = default;
};

struct RunMetrics {
    std::optional<double> mean_upt_dl_wifi;  // Mbps
    std::optional<double> mean_upt_ul_wifi;
    std::optional<double> mean_upt_dl_mf;
    std::optional<double> mean_upt_ul_mf;
    ClassCounters wifi_ap;
    ClassCounters enb;
    ClassCounters ue;
    std::vector<FileRecord> files;
    std::int64_t bits_generated = 0;
    std::int64_t bits_delivered = 0;
    Tick airtime_ticks = 0;   // channel time covered by >= 1 transmission
    Tick horizon_ticks = 0;
    bool operator==(const RunMetrics&) const = default;
};

// Runs one scenario; deterministic for a fixed (config, seed).
RunMetrics run(const ScenarioConfig& config);

// Poisson file-arrival process: i.i.d. exponential inter-arrival gaps.
std::vector<double> ftp3_arrivals(Rng& rng, double lambda_per_s,
                                  double horizon_s);

// Busy/idle verdict for a sensing node given the number of concurrent
// transmitters it can hear. IDEAL senses any transmitter; energy detection
// draws against the detection tail at gamma = n * snr_per_tx (false-alarm
// tail for n = 0).
bool channel_verdict(int n_transmitters, SensingModel model, int mu,
                     double y_thv, double snr_per_tx, Rng& rng);

// Mean user-perceived throughput in Mbps over the completed files of one
// (class, direction); absent when no file completed.
std::optional<double> compute_upt(const std::vector<FileRecord>& files,
                                  const std::string& node_class,
                                  const std::string& direction);

}  // namespace coex
