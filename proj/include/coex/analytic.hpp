#pragma once
// Closed-form channel-access model: per-slot transmit probabilities of the
// WiFi DCF chain and the Cat.4 LBT chain, coupled to the energy-detection
// busy probability through a damped fixed-point iteration.
//
// Conventions:
//  - q is the per-slot packet-arrival probability, W0 the initial contention
//    window, m the maximum backoff/CCA stage.
//  - p_b (channel detected busy) and p_f (transmission failure) are equated
//    by the model and solved as a single unknown.
//  - In SUL mode the contending population is n_wifi + n_enb; in GUL mode the
//    UEs contend as well: n_wifi + n_enb + n_ue.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "coex/detection.hpp"

namespace coex {

enum class UplinkMode { SUL, GUL };

struct BusyProbOptions {
    // Weigh transmitter counts with Binom(N, n) instead of Binom(N-1, n).
    // The N-1 default makes the weights a probability distribution over the
    // N-1 potential interferers seen by one observer.
    bool literal_binom = false;
    // Add the n = 0 false-alarm term (idle tail) to the busy probability.
    bool include_false_alarm = false;
};

struct ModelParams {
    double q = 1.0;
    int w0 = 16;
    int m = 4;
    int n_wifi = 0;
    int n_enb = 0;
    int n_ue = 0;
    double snr_per_tx = 10.0;  // P0rx / Pnoise per transmitter, linear
    int mu = 1;
    double tnr_db = 13.0;  // threshold-to-noise ratio, dB
    UplinkMode uplink_mode = UplinkMode::SUL;
    bool ideal_detection = false;  // tail == 1 whenever any node transmits
    BusyProbOptions busy_opts{};

    double y_thv() const { return threshold_from_tnr_db(mu, tnr_db); }
    void validate() const;  // throws std::invalid_argument on bad fields
};

struct FixedPointSolution {
    double p_tx_wifi = 0.0;
    double p_tx_cat4 = 0.0;
    double p_b = 0.0;
    double p_f = 0.0;
    double residual = 0.0;
    int iterations = 0;
    bool converged = false;
};

// Transmit probability of the WiFi DCF chain. Evaluates the printed closed
// form; switches to its algebraic limit when |1 - 2 p_f| < 1e-9 (the factor
// cancels between numerator and denominator there).
double p_tx_wifi(double q, int w0, int m, double p_b, double p_f);

// Transmit probability of the Cat.4 LBT chain (extra defer state).
double p_tx_cat4(double q, int w0, int m, double p_b, double p_f);

// Unchecked formula cores: evaluate the printed expressions and report the
// raw value and denominator without domain policing. Used by the solver
// (which clamps transient iterates) and by the transcription-agreement tests.
struct RawFormulaValue {
    double value;
    double denominator;
};
RawFormulaValue p_tx_wifi_raw(double q, int w0, int m, double p_b, double p_f);
RawFormulaValue p_tx_cat4_raw(double q, int w0, int m, double p_b, double p_f);

// Limit form of the WiFi chain at p_f = 1/2.
double p_tx_wifi_limit(double q, int w0, int m, double p_b);

// Probability that one observer among n_total homogeneous nodes (each
// transmitting with probability p_tx) detects the channel busy: transmitter
// counts are binomially weighted and each count n contributes the detection
// tail at aggregate SNR n * snr_per_tx.
double busy_prob(double p_tx, int n_total, int mu, double y_thv,
                 double snr_per_tx, const BusyProbOptions& opts = {});

// Heterogeneous-population generalization: class c has counts[c] nodes each
// transmitting with probability taus[c]. The common busy probability is the
// population-weighted average of the per-class observer views, each view a
// product of independent per-class binomials over the other nodes.
double busy_prob_mixed(const std::vector<int>& counts,
                       const std::vector<double>& taus, int mu, double y_thv,
                       double snr_per_tx, bool ideal_detection = false,
                       const BusyProbOptions& opts = {});

// Damped fixed-point iteration on p = p_b = p_f over the population selected
// by params.uplink_mode. alpha = 0.5, tolerance 1e-9 on the residual
// |busy(p) - p|, at most 10000 iterations, initial guess p = 0.1.
// Non-convergence is reported in the result, never thrown.
FixedPointSolution solve_fixed_point(const ModelParams& params);

// Scheduled-uplink access probability (1 - p_b) * p_tx_cat4: the eNB's Cat.4
// win discounted by the UE's second clear-channel check.
// Throws std::invalid_argument if the solution is not converged.
double access_prob_sul(const FixedPointSolution& sol);

// Grant-less uplink access probability: the UE's own Cat.4 transmit
// probability from a fixed point over the full wifi + enb + ue population.
double access_prob_gul(const ModelParams& params);

struct SweepRow {
    double q = 0.0;
    double p_tx_wifi = 0.0;   // from the SUL-population solve
    double p_tx_cat4 = 0.0;   // from the SUL-population solve
    double access_sul = 0.0;
    double access_gul = 0.0;
    double p_b = 0.0;         // from the SUL-population solve
    bool converged = false;   // both solves converged
    FixedPointSolution sol_sul{};
    FixedPointSolution sol_gul{};
};

// One row per grid point; rows are independent. Non-convergence is recorded
// in the row and the sweep continues. parallel=true fans rows out across
// OpenMP worker threads; results are ordered by the input grid either way.
std::vector<SweepRow> sweep(const ModelParams& params,
                            const std::vector<double>& q_grid,
                            bool parallel = true);

}  // namespace coex
