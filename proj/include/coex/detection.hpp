#pragma once
// Energy-detection statistics for LBT clear-channel assessment.
//
// The per-CCA energy measurement over mu complex samples is chi-square
// distributed in the normalized domain: central with 2*mu degrees of freedom
// when the channel is idle, non-central with non-centrality 2*gamma when n
// transmitters are active (gamma = n * P0rx/Pnoise). Busy/idle verdicts
// compare the measurement against a threshold y_thv, so the detection and
// false-alarm probabilities are the corresponding upper tails.

#include <stdexcept>

namespace coex {

struct DetectionParams {
    int mu = 1;          // time-bandwidth product (complex samples per CCA)
    double gamma = 0.0;  // aggregate SNR of the active transmitters, linear
    double y_thv = 0.0;  // threshold in the normalized energy domain
};

// Maps a threshold-to-noise ratio in dB to the normalized energy domain in
// which the idle statistic has mean 2*mu.
double threshold_from_tnr_db(int mu, double tnr_db);

// Density of the idle (central chi-square, 2*mu dof) energy statistic.
double pdf_idle(double y, int mu);

// Density of the busy (non-central chi-square, 2*mu dof, non-centrality
// 2*gamma) energy statistic. gamma must be > 0; route n=0 to pdf_idle.
double pdf_busy(double y, int mu, double gamma);

// P(idle statistic > t): regularized upper incomplete gamma Q(mu, t/2).
double tail_idle(double t, int mu);

// P(busy statistic > t): generalized Marcum Q_mu(sqrt(2*gamma), sqrt(t)).
double tail_busy(double t, int mu, double gamma);

// log of the modified Bessel function I_v(x) for integer order v >= 0,
// evaluated by its power series in log space (overflow-safe).
double log_bessel_i(int v, double x);

}  // namespace coex
