#pragma once
// Shared error types and small numeric helpers used across the library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace ibpt {

struct domain_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct resonance_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct precision_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct convergence_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct overflow_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr double euler_gamma = 0.57721566490153286;

// log of the binomial coefficient, valid for real x in [0, n] via lgamma
inline double log_binomial(double n, double x) {
    if (x < 0.0 || x > n) return -std::numeric_limits<double>::infinity();
    return std::lgamma(n + 1.0) - std::lgamma(x + 1.0) - std::lgamma(n - x + 1.0);
}

inline double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    return std::exp(log_binomial(n, k));
}

// binomial weights p_d = C(n,d) 2^-n, d = 0..n, computed by recurrence
inline std::vector<double> binomial_weights(int n) {
    std::vector<double> p(static_cast<size_t>(n) + 1);
    for (int d = 0; d <= n; ++d)
        p[static_cast<size_t>(d)] = std::exp(log_binomial(n, d) - n * std::log(2.0));
    return p;
}

inline double sq(double x) { return x * x; }

// two-sided Kolmogorov-Smirnov distance between sorted samples and a cdf
template <class Cdf>
double ks_distance(std::vector<double> sorted_samples, Cdf&& cdf) {
    double ks = 0.0;
    const double n = static_cast<double>(sorted_samples.size());
    for (size_t i = 0; i < sorted_samples.size(); ++i) {
        const double f = cdf(sorted_samples[i]);
        ks = std::max(ks, std::abs(f - static_cast<double>(i) / n));
        ks = std::max(ks, std::abs(static_cast<double>(i + 1) / n - f));
    }
    return ks;
}

inline double median_of(std::vector<double> v) {
    if (v.empty()) throw domain_error("median of empty sample");
    std::sort(v.begin(), v.end());
    const size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace ibpt
