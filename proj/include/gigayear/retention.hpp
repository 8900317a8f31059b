#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "gigayear/constants.hpp"

namespace gigayear {

// Single thermally activated bit: escape over a barrier deltaE at
// temperature T with attempt frequency f0.
struct RetentionModel {
    double f0;      // attempt frequency [1/s]
    double deltaE;  // energy barrier [J]
    double T;       // absolute temperature [K]

    void validate() const {
        if (!(f0 > 0.0))
            throw std::invalid_argument("RetentionModel: f0 must be > 0");
        if (!(deltaE >= 0.0))
            throw std::invalid_argument("RetentionModel: deltaE must be >= 0");
        if (!(T > 0.0))
            throw std::invalid_argument("RetentionModel: T must be > 0");
    }
};

// Accelerated-aging test plan: prove storage for time t at temperature T
// with error fraction alpha by testing for testTime at an elevated
// temperature, observing error fraction testAlpha.
struct TestPlan {
    double storageTime;   // t [s]
    double storageTemp;   // T [K]
    double alpha;         // target error fraction during storage
    double testTime;      // t_t [s]
    double testAlpha;     // observed error fraction during the test
    double f0;            // attempt frequency [1/s]

    void validate() const {
        if (!(storageTime > 0.0) || !(testTime > 0.0))
            throw std::invalid_argument("TestPlan: times must be > 0");
        if (!(storageTemp > 0.0))
            throw std::invalid_argument("TestPlan: storageTemp must be > 0");
        if (!(alpha > 0.0 && alpha < 1.0))
            throw std::invalid_argument("TestPlan: alpha must be in (0,1)");
        if (!(testAlpha > 0.0 && testAlpha < 1.0))
            throw std::invalid_argument("TestPlan: testAlpha must be in (0,1)");
        if (!(f0 > 0.0))
            throw std::invalid_argument("TestPlan: f0 must be > 0");
        if (!(storageTime * f0 / alpha > 1.0))
            throw std::domain_error("TestPlan: t*f0/alpha must exceed 1");
        if (!(testTime * f0 / testAlpha > 1.0))
            throw std::domain_error("TestPlan: t_t*f0/alpha_t must exceed 1");
    }
};

// Sequential chain of intermediate minima; step i is crossed at rate
// f0_i * exp(-barrier_i / kT), with no back-transitions.
struct CascadeModel {
    std::vector<double> barriers;  // [J]
    std::vector<double> f0;        // per-step attempt frequency [1/s]

    void validate() const {
        if (barriers.empty())
            throw std::invalid_argument("CascadeModel: barrier list is empty");
        if (f0.size() != barriers.size())
            throw std::invalid_argument("CascadeModel: f0 list size mismatch");
        for (double b : barriers)
            if (!(b >= 0.0))
                throw std::invalid_argument("CascadeModel: barriers must be >= 0");
        for (double f : f0)
            if (!(f > 0.0))
                throw std::invalid_argument("CascadeModel: f0 must be > 0");
    }
};

// Escape rate 1/tau [1/s].
inline double switching_rate(const RetentionModel& m) {
    m.validate();
    return m.f0 * std::exp(-m.deltaE / (k_boltzmann * m.T));
}

// Decay time tau = f0^-1 * exp(deltaE / kT) [s].
inline double decay_time(const RetentionModel& m) {
    m.validate();
    const double exponent = m.deltaE / (k_boltzmann * m.T) - std::log(m.f0);
    if (exponent > 700.0)
        throw std::overflow_error(
            "decay time exceeds representable time (log tau = " +
            std::to_string(exponent) + ")");
    return std::exp(exponent);
}

// P_sw = 1 - exp(-t/tau).  Evaluated through expm1 on the log-rate so
// probabilities near 0 keep full relative accuracy.
inline double switching_probability(const RetentionModel& m, double t) {
    m.validate();
    if (!(t >= 0.0))
        throw std::invalid_argument("switching_probability: t must be >= 0");
    if (t == 0.0) return 0.0;
    const double log_ratio =
        std::log(t) + std::log(m.f0) - m.deltaE / (k_boltzmann * m.T);
    if (log_ratio > 700.0) return 1.0;
    return -std::expm1(-std::exp(log_ratio));
}

// Barrier needed to hold error fraction alpha over time t, in units of kT:
// deltaE/kT = ln(t*f0/alpha).
inline double required_barrier(double t, double alpha, double f0) {
    if (!(t > 0.0) || !(alpha > 0.0 && alpha < 1.0) || !(f0 > 0.0))
        throw std::invalid_argument("required_barrier: invalid arguments");
    const double arg = std::log(t) + std::log(f0) - std::log(alpha);
    if (!(arg > 0.0))
        throw std::domain_error("required_barrier: t*f0/alpha must exceed 1");
    return arg;
}

// Test temperature T_t = T * ln(t*f0/alpha) / ln(t_t*f0/alpha_t).
inline double test_temperature(const TestPlan& p) {
    p.validate();
    const double num = required_barrier(p.storageTime, p.alpha, p.f0);
    const double den = required_barrier(p.testTime, p.testAlpha, p.f0);
    return p.storageTemp * num / den;
}

// Storage time proven by surviving a test: inverts the test-temperature
// relation, t = (alpha/f0) * exp((T_t/T) * ln(t_t*f0/alpha_t)).
inline double equivalent_storage_time(double testTemp, double testTime,
                                      double testAlpha, double storageTemp,
                                      double alpha, double f0) {
    if (!(testTemp > 0.0) || !(storageTemp > 0.0))
        throw std::invalid_argument("equivalent_storage_time: temperatures must be > 0");
    const double testBarrier = required_barrier(testTime, testAlpha, f0);
    const double exponent =
        (testTemp / storageTemp) * testBarrier + std::log(alpha) - std::log(f0);
    if (exponent > 700.0)
        throw std::overflow_error(
            "equivalent storage time exceeds representable time (log t = " +
            std::to_string(exponent) + ")");
    return std::exp(exponent);
}

// Linear barrier-vs-temperature hook: deltaE(T) = deltaE0 - slope*(T - 300 K).
inline double barrier_temperature_model(double deltaE0, double slope, double T) {
    const double result = deltaE0 - slope * (T - reference_temperature);
    if (!(result >= 0.0))
        throw std::domain_error("barrier_temperature_model: barrier became negative");
    return result;
}

namespace detail {

// CDF at t of a sum of exponentials (hypoexponential distribution) via the
// absorbing-chain matrix exponential, scaling and squaring on the upper
// triangular generator.  Handles repeated rates exactly.
inline double hypoexp_cdf_expm(const std::vector<double>& rates, double t) {
    const std::size_t n = rates.size();
    const std::size_t dim = n + 1;
    std::vector<double> q(dim * dim, 0.0);
    double maxAbs = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        q[i * dim + i] = -rates[i] * t;
        q[i * dim + i + 1] = rates[i] * t;
        maxAbs = std::max(maxAbs, rates[i] * t);
    }
    int s = 0;
    while (maxAbs > 0.5) { maxAbs *= 0.5; ++s; }
    const double scale = std::ldexp(1.0, -s);
    for (double& v : q) v *= scale;

    auto matmul = [dim](const std::vector<double>& a, const std::vector<double>& b) {
        std::vector<double> c(dim * dim, 0.0);
        for (std::size_t i = 0; i < dim; ++i)
            for (std::size_t k = i; k < dim; ++k) {
                const double aik = a[i * dim + k];
                if (aik == 0.0) continue;
                for (std::size_t j = k; j < dim; ++j)
                    c[i * dim + j] += aik * b[k * dim + j];
            }
        return c;
    };

    // Taylor series to order 16 at the scaled argument.
    std::vector<double> result(dim * dim, 0.0), term(dim * dim, 0.0);
    for (std::size_t i = 0; i < dim; ++i) result[i * dim + i] = term[i * dim + i] = 1.0;
    for (int k = 1; k <= 16; ++k) {
        term = matmul(term, q);
        for (double& v : term) v /= k;
        for (std::size_t i = 0; i < dim * dim; ++i) result[i] += term[i];
    }
    for (int i = 0; i < s; ++i) result = matmul(result, result);
    return std::min(1.0, std::max(0.0, result[0 * dim + n]));
}

}  // namespace detail

// Probability that the cascade has reached its final state within t.
inline double cascade_switch_probability(const CascadeModel& c, double T,
                                         double t) {
    c.validate();
    if (!(T > 0.0))
        throw std::invalid_argument("cascade_switch_probability: T must be > 0");
    if (!(t >= 0.0))
        throw std::invalid_argument("cascade_switch_probability: t must be >= 0");
    if (t == 0.0) return 0.0;

    const std::size_t n = c.barriers.size();
    std::vector<double> rates(n);
    for (std::size_t i = 0; i < n; ++i)
        rates[i] = switching_rate({c.f0[i], c.barriers[i], T});

    if (n == 1)
        return switching_probability({c.f0[0], c.barriers[0], T}, t);

    double minRate = rates[0], maxRate = rates[0];
    double minGap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        minRate = std::min(minRate, rates[i]);
        maxRate = std::max(maxRate, rates[i]);
        for (std::size_t j = i + 1; j < n; ++j)
            minGap = std::min(minGap,
                              std::abs(rates[i] - rates[j]) /
                                  std::max(rates[i], rates[j]));
    }

    // All rates equal to within tolerance: Erlang limit form.
    if ((maxRate - minRate) / maxRate < 1e-9) {
        double mean = 0.0;
        for (double r : rates) mean += r;
        mean /= static_cast<double>(n);
        const double x = mean * t;
        if (x > 1e6) return 1.0;
        return boost::math::gamma_p(static_cast<double>(n), x);
    }

    // Near-degenerate but not equal: the partial-fraction weights cancel
    // catastrophically, so fall back to the matrix exponential.
    if (minGap < 1e-6) return detail::hypoexp_cdf_expm(rates, t);

    // Distinct rates: P = 1 - sum_i w_i exp(-r_i t),
    // w_i = prod_{j!=i} r_j / (r_j - r_i).
    double survival = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double w = 1.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            w *= rates[j] / (rates[j] - rates[i]);
        }
        survival += w * std::exp(-rates[i] * t);
    }
    return std::min(1.0, std::max(0.0, 1.0 - survival));
}

}  // namespace gigayear
