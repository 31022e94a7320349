#include "coex/analytic.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace coex {

namespace {

constexpr double kHalfPointEps = 1e-9;    // |1 - 2 p_f| switch to limit form
constexpr double kDegenerateDen = 1e-300; // denominator magnitude floor
constexpr double kSolverAlpha = 0.5;
constexpr double kSolverTol = 1e-9;
constexpr int kSolverMaxIter = 10000;
constexpr double kSolverInitialGuess = 0.1;

void check_prob(double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0)) {
        std::ostringstream os;
        os << name << " must be in [0,1], got " << v;
        throw std::domain_error(os.str());
    }
}

[[noreturn]] void throw_degenerate(const char* fn, double q, int w0, int m,
                                   double p_b, double p_f, double den) {
    std::ostringstream os;
    os << fn << ": degenerate denominator " << den << " at q=" << q
       << " w0=" << w0 << " m=" << m << " p_b=" << p_b << " p_f=" << p_f;
    throw std::domain_error(os.str());
}

[[noreturn]] void throw_out_of_range(const char* fn, double q, int w0, int m,
                                     double p_b, double p_f, double value) {
    std::ostringstream os;
    os << fn << ": raw value " << value << " outside [0,1] at q=" << q
       << " w0=" << w0 << " m=" << m << " p_b=" << p_b << " p_f=" << p_f;
    throw std::domain_error(os.str());
}

double clamp01(double v) { return v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v); }

double binom_coeff(int n, int k) {
    return std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) -
                    std::lgamma(n - k + 1.0));
}

// Detection tail seen by an observer when n other nodes transmit.
double detect_tail(int n, int mu, double y_thv, double snr_per_tx,
                   bool ideal) {
    if (n == 0) return tail_idle(y_thv, mu);
    if (ideal) return 1.0;
    return tail_busy(y_thv, mu, n * snr_per_tx);
}

struct Population {
    std::vector<int> counts;         // node count per class
    std::vector<bool> is_wifi;       // class uses the WiFi chain formula
};

Population population_for(const ModelParams& p, UplinkMode mode) {
    Population pop;
    if (p.n_wifi > 0) {
        pop.counts.push_back(p.n_wifi);
        pop.is_wifi.push_back(true);
    }
    int cat4 = p.n_enb + (mode == UplinkMode::GUL ? p.n_ue : 0);
    if (cat4 > 0) {
        pop.counts.push_back(cat4);
        pop.is_wifi.push_back(false);
    }
    return pop;
}

struct IterationTaus {
    double wifi = 0.0;
    double cat4 = 0.0;
};

// Evaluate both chain formulas at the current iterate, clamping transient
// out-of-range values so the iteration can pass through ill-behaved regions.
IterationTaus taus_at(const ModelParams& p, double pb) {
    IterationTaus t;
    if (std::fabs(1.0 - 2.0 * pb) < kHalfPointEps) {
        t.wifi = clamp01(p_tx_wifi_limit(p.q, p.w0, p.m, pb));
        t.cat4 = clamp01(p_tx_cat4_raw(p.q, p.w0, p.m, pb, pb).value);
    } else {
        t.wifi = clamp01(p_tx_wifi_raw(p.q, p.w0, p.m, pb, pb).value);
        t.cat4 = clamp01(p_tx_cat4_raw(p.q, p.w0, p.m, pb, pb).value);
    }
    return t;
}

FixedPointSolution solve_population(const ModelParams& p, UplinkMode mode) {
    Population pop = population_for(p, mode);
    if (pop.counts.empty())
        throw std::invalid_argument("solve_fixed_point: empty population");

    const double y = p.y_thv();
    FixedPointSolution sol;
    double pb = kSolverInitialGuess;
    std::vector<double> taus(pop.counts.size(), 0.0);
    for (int it = 0; it < kSolverMaxIter; ++it) {
        IterationTaus t = taus_at(p, pb);
        for (size_t c = 0; c < pop.counts.size(); ++c)
            taus[c] = pop.is_wifi[c] ? t.wifi : t.cat4;
        double g = busy_prob_mixed(pop.counts, taus, p.mu, y, p.snr_per_tx,
                                   p.ideal_detection, p.busy_opts);
        double resid = std::fabs(g - pb);
        sol.p_tx_wifi = t.wifi;
        sol.p_tx_cat4 = t.cat4;
        sol.p_b = pb;
        sol.p_f = pb;
        sol.residual = resid;
        sol.iterations = it;
        if (resid < kSolverTol) {
            sol.converged = true;
            return sol;
        }
        pb = (1.0 - kSolverAlpha) * pb + kSolverAlpha * g;
    }
    sol.converged = false;
    return sol;
}

}  // namespace

void ModelParams::validate() const {
    if (!(q >= 0.0 && q <= 1.0))
        throw std::invalid_argument("ModelParams: q must be in [0,1]");
    if (w0 < 2) throw std::invalid_argument("ModelParams: w0 must be >= 2");
    if (m < 0) throw std::invalid_argument("ModelParams: m must be >= 0");
    if (n_wifi < 0 || n_enb < 0 || n_ue < 0)
        throw std::invalid_argument("ModelParams: node counts must be >= 0");
    if (n_wifi + n_enb + n_ue < 1)
        throw std::invalid_argument("ModelParams: need at least one node");
    if (!(snr_per_tx > 0.0))
        throw std::invalid_argument("ModelParams: snr_per_tx must be > 0");
    if (mu < 1) throw std::invalid_argument("ModelParams: mu must be >= 1");
}

RawFormulaValue p_tx_wifi_raw(double q, int w0, int m, double p_b,
                              double p_f) {
    double num = 2.0 * q * (1.0 - p_b) * (1.0 - 2.0 * p_f);
    double den = 2.0 * (1.0 - p_b) * (1.0 - p_f) * (1.0 - 2.0 * p_f) +
                 q * (w0 * p_f * (1.0 - std::pow(2.0 * p_f, m)) +
                      (1.0 + w0 - 2.0 * p_b) * (1.0 - 2.0 * p_f));
    return {num / den, den};
}

double p_tx_wifi_limit(double q, int w0, int m, double p_b) {
    // Limit of the printed expression as p_f -> 1/2: the (1 - 2 p_f) factor
    // cancels and the geometric sum W0 p_f (1-(2p_f)^m)/(1-2p_f) -> W0 m / 2.
    double num = 2.0 * q * (1.0 - p_b);
    double den = (1.0 - p_b) + q * (w0 * m / 2.0 + 1.0 + w0 - 2.0 * p_b);
    return num / den;
}

double p_tx_wifi(double q, int w0, int m, double p_b, double p_f) {
    check_prob(q, "q");
    check_prob(p_b, "p_b");
    check_prob(p_f, "p_f");
    if (std::fabs(1.0 - 2.0 * p_f) < kHalfPointEps) {
        double v = p_tx_wifi_limit(q, w0, m, p_b);
        if (v < 0.0 || v > 1.0)
            throw_out_of_range("p_tx_wifi", q, w0, m, p_b, p_f, v);
        return v;
    }
    RawFormulaValue r = p_tx_wifi_raw(q, w0, m, p_b, p_f);
    if (std::fabs(r.denominator) < kDegenerateDen)
        throw_degenerate("p_tx_wifi", q, w0, m, p_b, p_f, r.denominator);
    if (r.value < 0.0 || r.value > 1.0)
        throw_out_of_range("p_tx_wifi", q, w0, m, p_b, p_f, r.value);
    return r.value;
}

RawFormulaValue p_tx_cat4_raw(double q, int w0, int m, double p_b,
                              double p_f) {
    double Q = 2.0 * (1.0 - p_b) * (1.0 - p_f) * (1.0 - 2.0 * p_f);
    double P = p_b + p_f - p_b * p_f;
    double R = 1.0 - std::pow(p_f, m + 1);
    double num = 2.0 * q * (1.0 - p_b) * (1.0 - p_f) * R;
    double den =
        Q + q * (w0 * P * (1.0 - p_f) * (1.0 - std::pow(2.0 * p_f, m + 1)) +
                 P * R * (1.0 - 2.0 * p_b) * (1.0 - 2.0 * p_f) +
                 2.0 * R * (1.0 - p_b) * (1.0 - p_b) * (1.0 - p_f) *
                     (1.0 - 2.0 * p_f));
    return {num / den, den};
}

double p_tx_cat4(double q, int w0, int m, double p_b, double p_f) {
    check_prob(q, "q");
    check_prob(p_b, "p_b");
    check_prob(p_f, "p_f");
    RawFormulaValue r = p_tx_cat4_raw(q, w0, m, p_b, p_f);
    if (std::fabs(r.denominator) < kDegenerateDen)
        throw_degenerate("p_tx_cat4", q, w0, m, p_b, p_f, r.denominator);
    if (r.value < 0.0 || r.value > 1.0)
        throw_out_of_range("p_tx_cat4", q, w0, m, p_b, p_f, r.value);
    return r.value;
}

double busy_prob(double p_tx, int n_total, int mu, double y_thv,
                 double snr_per_tx, const BusyProbOptions& opts) {
    check_prob(p_tx, "p_tx");
    if (n_total < 1)
        throw std::domain_error("busy_prob: n_total must be >= 1");
    const int others = n_total - 1;
    double sum = 0.0;
    for (int n = 1; n <= others; ++n) {
        double coeff = opts.literal_binom ? binom_coeff(n_total, n)
                                          : binom_coeff(others, n);
        double w = coeff * std::pow(p_tx, n) * std::pow(1.0 - p_tx, others - n);
        sum += w * tail_busy(y_thv, mu, n * snr_per_tx);
    }
    if (opts.include_false_alarm)
        sum += std::pow(1.0 - p_tx, others) * tail_idle(y_thv, mu);
    return clamp01(sum);
}

double busy_prob_mixed(const std::vector<int>& counts,
                       const std::vector<double>& taus, int mu, double y_thv,
                       double snr_per_tx, bool ideal_detection,
                       const BusyProbOptions& opts) {
    if (counts.size() != taus.size() || counts.empty())
        throw std::invalid_argument("busy_prob_mixed: mismatched class vectors");
    const size_t n_classes = counts.size();
    int n_total = 0;
    for (int c : counts) n_total += c;
    if (n_total < 1)
        throw std::domain_error("busy_prob_mixed: empty population");

    // Tabulate per-class binomial pmfs once per observer view below; the
    // observer's own class has one fewer potential transmitter.
    double weighted = 0.0;
    for (size_t obs = 0; obs < n_classes; ++obs) {
        if (counts[obs] == 0) continue;
        std::vector<std::vector<double>> pmf(n_classes);
        for (size_t c = 0; c < n_classes; ++c) {
            int nodes = counts[c] - (c == obs ? 1 : 0);
            pmf[c].resize(nodes + 1);
            for (int k = 0; k <= nodes; ++k) {
                pmf[c][k] = binom_coeff(nodes, k) * std::pow(taus[c], k) *
                            std::pow(1.0 - taus[c], nodes - k);
            }
        }
        // Convolve class counts into the distribution of the total number of
        // simultaneous transmitters seen by this observer.
        std::vector<double> total{1.0};
        for (size_t c = 0; c < n_classes; ++c) {
            std::vector<double> next(total.size() + pmf[c].size() - 1, 0.0);
            for (size_t a = 0; a < total.size(); ++a)
                for (size_t b = 0; b < pmf[c].size(); ++b)
                    next[a + b] += total[a] * pmf[c][b];
            total = std::move(next);
        }
        double view = 0.0;
        for (size_t n = 1; n < total.size(); ++n) {
            // The literal-coefficient option inflates the printed weight of
            // n concurrent transmitters from (total-1 choose n) to
            // (total choose n), i.e. by total / (total - n); the proper
            // convolution above carries the former.
            const double literal_scale =
                opts.literal_binom
                    ? static_cast<double>(n_total) /
                          static_cast<double>(n_total - static_cast<int>(n))
                    : 1.0;
            view += literal_scale * total[n] *
                    detect_tail(static_cast<int>(n), mu, y_thv, snr_per_tx,
                                ideal_detection);
        }
        if (opts.include_false_alarm && !ideal_detection)
            view += total[0] * tail_idle(y_thv, mu);
        weighted += (static_cast<double>(counts[obs]) / n_total) * view;
    }
    return clamp01(weighted);
}

FixedPointSolution solve_fixed_point(const ModelParams& params) {
    params.validate();
    return solve_population(params, params.uplink_mode);
}

double access_prob_sul(const FixedPointSolution& sol) {
    if (!sol.converged)
        throw std::invalid_argument(
            "access_prob_sul: solution is not converged");
    return (1.0 - sol.p_b) * sol.p_tx_cat4;
}

double access_prob_gul(const ModelParams& params) {
    params.validate();
    FixedPointSolution sol = solve_population(params, UplinkMode::GUL);
    if (!sol.converged)
        throw std::invalid_argument(
            "access_prob_gul: fixed point did not converge");
    return sol.p_tx_cat4;
}

std::vector<SweepRow> sweep(const ModelParams& params,
                            const std::vector<double>& q_grid, bool parallel) {
    params.validate();
    if (q_grid.empty())
        throw std::invalid_argument("sweep: empty q grid");
    for (size_t i = 0; i + 1 < q_grid.size(); ++i)
        if (!(q_grid[i] < q_grid[i + 1]))
            throw std::invalid_argument("sweep: grid must be strictly increasing");
    for (double q : q_grid)
        if (!(q >= 0.0 && q <= 1.0))
            throw std::invalid_argument("sweep: grid values must be in [0,1]");

    std::vector<SweepRow> rows(q_grid.size());
    auto eval_row = [&](size_t i) {
        ModelParams p = params;
        p.q = q_grid[i];
        SweepRow row;
        row.q = p.q;
        row.sol_sul = solve_population(p, UplinkMode::SUL);
        row.sol_gul = solve_population(p, UplinkMode::GUL);
        row.p_tx_wifi = row.sol_sul.p_tx_wifi;
        row.p_tx_cat4 = row.sol_sul.p_tx_cat4;
        row.p_b = row.sol_sul.p_b;
        row.converged = row.sol_sul.converged && row.sol_gul.converged;
        row.access_sul =
            row.sol_sul.converged ? access_prob_sul(row.sol_sul) : 0.0;
        row.access_gul = row.sol_gul.converged ? row.sol_gul.p_tx_cat4 : 0.0;
        rows[i] = row;
    };

    if (parallel) {
#pragma omp parallel for schedule(dynamic)
        for (long i = 0; i < static_cast<long>(q_grid.size()); ++i)
            eval_row(static_cast<size_t>(i));
    } else {
        for (size_t i = 0; i < q_grid.size(); ++i) eval_row(i);
    }
    return rows;
}

}  // namespace coex
