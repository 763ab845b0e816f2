#pragma once
// Uniform band shift induced by the transverse field, marked-subspace weight
// Q, resonance bookkeeping, and the smooth amplitude V(d) of the off-diagonal
// couplings near the band center.
//
// Sign convention: the band center sits below -n. We store
//   delta0 = -(shift magnitude)  ~  -b^2 - b^4/n,   e0 = -n + delta0,
// so that e0 < -n off resonance and delta0 -> 0 as b -> 0.

#include <cmath>
#include <optional>
#include <vector>

#include "ibpt/common.hpp"
#include "ibpt/driver.hpp"

namespace ibpt {

struct Resonance {
    int p = 0;          // driver-level index crossing the band
    double b_res = 0.0; // transverse field at the crossing
    double width = 0.0; // hybridization width in field units
};

struct BandSolution {
    double delta0 = 0.0;   // signed series value, negative for b < sqrt(n)
    double e0 = 0.0;       // band center, -n + delta0
    double q_weight = 1.0; // total weight on the marked subspace
    std::vector<Resonance> resonances;
    bool off_resonance = true;
};

namespace detail {

// self-consistency map for the (positive) shift magnitude
inline double shift_map(int n, double b, const std::vector<double>& pd, double delta) {
    double acc = 0.0;
    for (int d = 0; d <= n; ++d) {
        const int twist = n - 2 * d;
        if (twist == 0) continue;
        acc += pd[static_cast<size_t>(d)] * b * twist / (n + delta - b * twist);
    }
    return n * acc;
}

}  // namespace detail

struct BandShiftOptions {
    double rel_tol = 1e-12;
    int max_iter = 200;
    double guard_radii = 10.0;  // exclusion radius in units of resonance width
};

inline BandSolution band_shift(const DriverSpec& spec,
                               const BandShiftOptions& opt = {}) {
    spec.validate();
    const int n = spec.n;
    const double b = spec.b_perp;
    const auto pd = binomial_weights(n);

    // poles of the map in the shift variable
    std::vector<double> poles;
    for (int d = 0; d <= n; ++d) {
        const int twist = n - 2 * d;
        if (twist != 0) poles.push_back(b * twist - n);
    }
    std::sort(poles.begin(), poles.end());

    const double seed = b * b + b * b * b * b / n;
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    for (double p : poles) {
        if (p < seed) lo = std::max(lo, p);
        else hi = std::min(hi, p);
    }

    auto inside = [&](double x) { return x > lo && x < hi; };
    auto g = [&](double x) { return x - detail::shift_map(n, b, pd, x); };

    // damped fixed point, bisection fallback inside the pole-free bracket
    double delta = seed;
    bool converged = false;
    for (int it = 0; it < opt.max_iter; ++it) {
        const double next = detail::shift_map(n, b, pd, delta);
        if (!std::isfinite(next) || !inside(next)) break;
        if (std::abs(next - delta) <= opt.rel_tol * std::max(1.0, std::abs(next))) {
            delta = next;
            converged = true;
            break;
        }
        delta = next;
    }
    if (!converged) {
        // scan the whole pole-free interval of the seed; the series seed can
        // sit far from the root when b is large compared to n^(1/4)
        const double margin = 1e-9 * std::max(1.0, std::abs(seed));
        const double a = std::isfinite(lo) ? lo + margin : seed - 4.0 * b - 4.0;
        const double c = std::isfinite(hi) ? hi - margin
                                           : std::max(seed, a) + 4.0 * b + 4.0;
        const int scan = 512;
        bool found = false;
        double x0 = a, f0 = g(a);
        for (int k = 1; k <= scan && !found; ++k) {
            double x1 = a + (c - a) * k / scan;
            double f1 = g(x1);
            if (std::isfinite(f0) && std::isfinite(f1) && f0 * f1 <= 0.0) {
                for (int it = 0; it < 200; ++it) {
                    const double mid = 0.5 * (x0 + x1);
                    const double fm = g(mid);
                    if (fm == 0.0 ||
                        x1 - x0 < opt.rel_tol * std::max(1.0, std::abs(mid))) {
                        x0 = x1 = mid;
                        break;
                    }
                    if (f0 * fm <= 0.0) { x1 = mid; }
                    else { x0 = mid; f0 = fm; }
                }
                delta = 0.5 * (x0 + x1);
                found = converged = true;
            } else {
                x0 = x1;
                f0 = f1;
            }
        }
        if (!found)
            throw resonance_error("band_shift: no pole-free bracket around the seed");
    }

    BandSolution sol;
    sol.delta0 = -delta;
    sol.e0 = -static_cast<double>(n) - delta;

    // weight on the marked subspace
    double inv_q = 0.0;
    for (int d = 0; d <= n; ++d) {
        const int twist = n - 2 * d;
        inv_q += pd[static_cast<size_t>(d)] / sq(b * twist - n - delta);
    }
    inv_q *= static_cast<double>(n) * n;
    sol.q_weight = 1.0 / inv_q;

    // resonances b_p with the driver levels, widths ~ b_p 2^{-n/2} sqrt(C(n,p))
    for (int p = 0; 2 * p < n; ++p) {
        const double naive = static_cast<double>(n) / (n - 2 * p);
        if (naive > std::max(2.0 * b, 4.0)) break;
        double bp = naive;
        for (int it = 0; it < 64; ++it) {  // series-level refinement is enough here
            const double d2 = bp * bp + bp * bp * bp * bp / n;
            const double next = (n + d2) / (n - 2 * p);
            if (std::abs(next - bp) < 1e-13 * bp) { bp = next; break; }
            bp = next;
        }
        const double log2w = std::log2(bp) - 0.5 * n + 0.5 * log_binomial(n, p) / std::log(2.0);
        Resonance r;
        r.p = p;
        r.b_res = bp;
        r.width = log2w < -300.0 ? 0.0 : std::exp2(log2w);
        sol.resonances.push_back(r);
    }
    sol.off_resonance = true;
    for (const auto& r : sol.resonances)
        if (std::abs(b - r.b_res) <= opt.guard_radii * r.width) sol.off_resonance = false;

    return sol;
}

// --------------------------------------------------------------------------
// smooth amplitude of the off-diagonal couplings at the band center
// --------------------------------------------------------------------------

// V(d) = sqrt(A(d/n)) n^{5/4} e^{-n theta(b)} / sqrt(C(n,d)), with the
// typical value V_typ = V(n/2) evaluated by Stirling.
class Amplitude {
  public:
    Amplitude(const DriverSpec& spec, const BandSolution& band)
        : spec_(spec), e0_(band.e0), theta_b_(theta(spec)) {
        if (!band.off_resonance)
            throw resonance_error("Amplitude: band solution is on resonance");
        phase_center_ = wkb_phase(spec, e0_, 0.5 * spec.n);
        m0_ = turning_point(spec, e0_);
    }

    const DriverSpec& spec() const { return spec_; }
    double e0() const { return e0_; }
    double m0() const { return m0_; }
    double phase_center() const { return phase_center_; }

    double log_a(double rho) const {
        const double b = spec_.b_perp;
        const double u = upsilon(spec_, rho);
        if (u <= 0.0) throw domain_error("Amplitude: rho outside oscillatory window");
        return 0.5 * std::log(M_PI / 32.0) +
               (e0_ + spec_.n) / b * std::atanh(1.0 / b) -
               std::log(b * b - 1.0) - std::log(u) -
               4.0 * std::log(std::abs(std::sin(phase_center_)));
    }

    double log_v(double d) const {
        const double n = spec_.n;
        return 0.5 * log_a(d / n) + 1.25 * std::log(n) - n * theta_b_ -
               0.5 * log_binomial(n, d);
    }

    double log_v_typ() const {
        const double n = spec_.n;
        return 0.25 * std::log(M_PI / 2.0) + 0.5 * log_a(0.5) + 1.5 * std::log(n) -
               0.5 * n * std::log(2.0) - n * theta_b_;
    }

    double v(double d) const { return checked_exp(log_v(d)); }
    double v_typ() const { return checked_exp(log_v_typ()); }

  private:
    static double checked_exp(double lg) {
        const double v = std::exp(lg);
        if (v != 0.0 && v < std::numeric_limits<double>::min())
            throw overflow_error("Amplitude: value subnormal, use the log accessor");
        if (v == 0.0 && std::isfinite(lg))
            throw overflow_error("Amplitude: value underflows, use the log accessor");
        return v;
    }

    DriverSpec spec_;
    double e0_;
    double theta_b_;
    double phase_center_ = 0.0;
    double m0_ = 0.0;
};

}  // namespace ibpt
