#include "coex/detection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace coex {

namespace {

constexpr double kSeriesEps = 1e-15;  // relative truncation for all series

void require(bool ok, const char* msg) {
    if (!ok) throw std::domain_error(msg);
}

// Regularized upper incomplete gamma Q(a, x) for integer a >= 1:
// Q(a, x) = exp(-x) * sum_{k=0}^{a-1} x^k / k!  (finite, exact form).
double upper_gamma_regularized(int a, double x) {
    if (x <= 0.0) return 1.0;
    double log_term = -x;  // k = 0 term in log space
    double sum = std::exp(log_term);
    for (int k = 1; k < a; ++k) {
        log_term += std::log(x) - std::log(static_cast<double>(k));
        sum += std::exp(log_term);
    }
    return sum > 1.0 ? 1.0 : sum;
}

}  // namespace

double threshold_from_tnr_db(int mu, double tnr_db) {
    require(mu >= 1, "threshold_from_tnr_db: mu must be >= 1");
    return 2.0 * mu * std::pow(10.0, tnr_db / 10.0);
}

double pdf_idle(double y, int mu) {
    require(y >= 0.0, "pdf_idle: y must be >= 0");
    require(mu >= 1, "pdf_idle: mu must be >= 1");
    if (y == 0.0) return mu == 1 ? 0.5 : 0.0;
    double log_pdf = (mu - 1) * std::log(y) - y / 2.0 -
                     mu * std::numbers::ln2 - std::lgamma(mu);
    return std::exp(log_pdf);
}

double log_bessel_i(int v, double x) {
    require(v >= 0, "log_bessel_i: order must be >= 0");
    require(x >= 0.0, "log_bessel_i: argument must be >= 0");
    if (x == 0.0) {
        return v == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
    }
    // I_v(x) = sum_k (x/2)^(2k+v) / (k! (k+v)!); accumulate in log space.
    double log_half_x = std::log(x / 2.0);
    double log_term = v * log_half_x - std::lgamma(v + 1.0);
    double log_sum = log_term;
    for (int k = 1; k < 100000; ++k) {
        log_term += 2.0 * log_half_x - std::log(static_cast<double>(k)) -
                    std::log(static_cast<double>(k + v));
        log_sum = std::max(log_sum, log_term) +
                  std::log1p(std::exp(-std::fabs(log_sum - log_term)));
        if (log_term < log_sum + std::log(kSeriesEps)) break;
    }
    return log_sum;
}

double pdf_busy(double y, int mu, double gamma) {
    require(y >= 0.0, "pdf_busy: y must be >= 0");
    require(mu >= 1, "pdf_busy: mu must be >= 1");
    require(gamma > 0.0, "pdf_busy: gamma must be > 0 (use pdf_idle for n=0)");
    if (y == 0.0) return mu == 1 ? 0.5 * std::exp(-gamma) : 0.0;
    double log_pdf = -std::numbers::ln2 +
                     0.5 * (mu - 1) * (std::log(y) - std::log(2.0 * gamma)) -
                     (2.0 * gamma + y) / 2.0 +
                     log_bessel_i(mu - 1, std::sqrt(2.0 * gamma * y));
    return std::exp(log_pdf);
}

double tail_idle(double t, int mu) {
    require(t >= 0.0, "tail_idle: t must be >= 0");
    require(mu >= 1, "tail_idle: mu must be >= 1");
    return upper_gamma_regularized(mu, t / 2.0);
}

double tail_busy(double t, int mu, double gamma) {
    require(t >= 0.0, "tail_busy: t must be >= 0");
    require(mu >= 1, "tail_busy: mu must be >= 1");
    require(gamma > 0.0, "tail_busy: gamma must be > 0 (use tail_idle for n=0)");
    if (t == 0.0) return 1.0;
    // Canonical non-central chi-square mixture:
    //   Q_mu(sqrt(2g), sqrt(t)) = sum_k Pois(k; g) * Q(mu + k, t/2),
    // with the gamma tail advanced by the recurrence
    //   Q(a+1, x) = Q(a, x) + exp(a ln x - x - lgamma(a+1)).
    const double x = t / 2.0;
    const double log_x = std::log(x);
    double pois = std::exp(-gamma);             // Pois(0; gamma)
    double q = upper_gamma_regularized(mu, x);  // Q(mu, x)
    double sum = pois * q;
    for (int k = 0; k < 100000; ++k) {
        // advance gamma tail: Q(mu+k+1, x) = Q(mu+k, x) + increment
        q += std::exp((mu + k) * log_x - x - std::lgamma(mu + k + 1.0));
        if (q > 1.0) q = 1.0;
        pois *= gamma / (k + 1);
        double term = pois * q;
        sum += term;
        if (k >= gamma && term < kSeriesEps * sum) break;
    }
    return sum > 1.0 ? 1.0 : sum;
}

}  // namespace coex
