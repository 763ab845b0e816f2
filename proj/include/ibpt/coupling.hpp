#pragma once
// Tunneling coupling coefficients c(E,d) between computational states at
// Hamming distance d, mediated by the transverse-field driver.
//
// Three routes are provided:
//   * coupling_exact      -- the alternating double sum, evaluated in
//                            extended precision (the summand magnitudes are
//                            exponentially larger than the result);
//   * resolvent_column    -- the tridiagonal spin-sector solve, related to
//                            c(E,d) by  c = delta_{d,0} - E G_{n/2-d,n/2} / sqrt(C(n,d));
//   * coupling_wkb        -- semiclassical asymptotics from driver.hpp.
// plus the closed zone-center formula and the forward-scattering estimate.

#include <cmath>
#include <string>
#include <thread>
#include <vector>

#include "ibpt/common.hpp"
#include "ibpt/driver.hpp"
#include "ibpt/mp.hpp"

namespace ibpt {

inline mpfr_prec_t default_coupling_precision(int n) {
    return std::max<mpfr_prec_t>(128, 4 * static_cast<mpfr_prec_t>(n));
}

inline void check_off_resonance(const DriverSpec& spec, double e) {
    for (int m = 0; m <= spec.n; ++m) {
        const double level = -spec.b_perp * (spec.n - 2 * m);
        if (std::abs(e - level) <= 1e-9 * spec.b_perp)
            throw resonance_error("energy within 1e-9 b of a driver level, m=" +
                                  std::to_string(m));
    }
}

// --------------------------------------------------------------------------
// spin-sector resolvent column
// --------------------------------------------------------------------------

// Solves (E - H_D) g = e_{n/2} in the maximal-spin sector, banded LU with
// partial pivoting at the given precision. Entry i corresponds to the spin
// projection m = -n/2 + i; the source sits at i = n (m = +n/2).
inline std::vector<double> resolvent_column(const DriverSpec& spec, double e,
                                            mpfr_prec_t prec = 0) {
    spec.validate();
    check_off_resonance(spec, e);
    if (prec == 0) prec = default_coupling_precision(spec.n);

    const int n = spec.n;
    const size_t sz = static_cast<size_t>(n) + 1;
    std::vector<MpReal> dia(sz, MpReal(e, prec));
    std::vector<MpReal> sub(sz, MpReal(prec));   // A[i][i-1]
    std::vector<MpReal> sup(sz, MpReal(prec));   // A[i][i+1]
    std::vector<MpReal> sup2(sz, MpReal(prec));  // fill-in A[i][i+2]
    std::vector<MpReal> rhs(sz, MpReal(prec));
    rhs[sz - 1] = MpReal(1.0, prec);

    MpReal b(spec.b_perp, prec);
    for (int i = 0; i + 1 <= n; ++i) {
        // coupling between sectors i and i+1: b * sqrt((n-i)(i+1))
        MpReal t(static_cast<double>(n - i) * static_cast<double>(i + 1), prec);
        t = t.sqrt() * b;
        sup[static_cast<size_t>(i)] = t;
        sub[static_cast<size_t>(i) + 1] = t;
    }

    for (size_t i = 0; i + 1 < sz; ++i) {
        if (sub[i + 1].abs() > dia[i].abs()) {  // partial pivot: swap rows i, i+1
            std::swap(dia[i], sub[i + 1]);
            std::swap(sup[i], dia[i + 1]);
            std::swap(sup2[i], sup[i + 1]);
            std::swap(rhs[i], rhs[i + 1]);
        }
        if (dia[i].is_zero()) throw resonance_error("resolvent: singular pivot");
        MpReal f = sub[i + 1] / dia[i];
        dia[i + 1] -= f * sup[i];
        sup[i + 1] -= f * sup2[i];
        rhs[i + 1] -= f * rhs[i];
    }

    std::vector<MpReal> g(sz, MpReal(prec));
    for (size_t ii = sz; ii-- > 0;) {
        MpReal acc = rhs[ii];
        if (ii + 1 < sz) acc -= sup[ii] * g[ii + 1];
        if (ii + 2 < sz) acc -= sup2[ii] * g[ii + 2];
        if (dia[ii].is_zero()) throw resonance_error("resolvent: singular pivot");
        g[ii] = acc / dia[ii];
    }

    std::vector<double> out(sz);
    for (size_t i = 0; i < sz; ++i) {
        const double v = g[i].to_double();
        if (!std::isfinite(v)) throw overflow_error("resolvent entry exceeds double range");
        out[i] = v;
    }
    return out;
}

// --------------------------------------------------------------------------
// exact double sum
// --------------------------------------------------------------------------

// c(E,d) via the grouped sum c = 2^-n sum_j K_j(d) * b(n-2j) / (b(n-2j) + E)
// where K_j(d) = [x^j] (1+x)^(n-d) (1-x)^d. The K_j are exact integers at
// this precision; all cancellation happens in the final j-sum and is
// accounted against the precision budget.
inline MpReal coupling_exact_mp(const DriverSpec& spec, double e, int d,
                                mpfr_prec_t prec = 0) {
    spec.validate();
    if (d < 0 || d > spec.n) throw domain_error("coupling_exact: d out of range");
    if (prec == 0) prec = default_coupling_precision(spec.n);
    const mpfr_prec_t iprec = std::max<mpfr_prec_t>(prec, spec.n + 64);

    const int n = spec.n;
    std::vector<MpReal> kraw(static_cast<size_t>(n) + 1, MpReal(iprec));
    kraw[0] = MpReal(1.0, iprec);
    int deg = 0;
    for (int s = 0; s < n - d; ++s, ++deg)  // multiply by (1+x)
        for (int j = deg + 1; j >= 1; --j)
            kraw[static_cast<size_t>(j)] += kraw[static_cast<size_t>(j) - 1];
    for (int s = 0; s < d; ++s, ++deg)      // multiply by (1-x)
        for (int j = deg + 1; j >= 1; --j)
            kraw[static_cast<size_t>(j)] -= kraw[static_cast<size_t>(j) - 1];

    MpReal sum(prec), sum_abs(prec);
    MpReal eh(e, prec);
    for (int j = 0; j <= n; ++j) {
        const int twist = n - 2 * j;
        if (twist == 0) continue;  // driver level at zero contributes nothing
        if (kraw[static_cast<size_t>(j)].is_zero()) continue;
        // resonance matters only for levels that actually enter the sum
        if (std::abs(e + spec.b_perp * twist) <= 1e-9 * spec.b_perp)
            throw resonance_error("coupling_exact: energy within 1e-9 b of the level m=" +
                                  std::to_string(j));
        MpReal lvl = MpReal(static_cast<double>(twist), prec) * MpReal(spec.b_perp, prec);
        MpReal term = kraw[static_cast<size_t>(j)] * lvl / (lvl + eh);
        sum += term;
        sum_abs += term.abs();
    }
    const double lost = sum_abs.log2_abs() - sum.log2_abs();
    if (std::isfinite(lost) && prec - lost < 30.0)
        throw precision_error("coupling_exact: cancellation exhausts precision (lost " +
                              std::to_string(lost) + " of " + std::to_string(prec) + " bits)");
    MpReal c = sum * mp_pow2(-n, prec);
    return c;
}

inline double coupling_exact(const DriverSpec& spec, double e, int d,
                             mpfr_prec_t prec = 0) {
    return coupling_exact_mp(spec, e, d, prec).to_double();
}

// --------------------------------------------------------------------------
// closed forms
// --------------------------------------------------------------------------

// zone-center value c(E, n/2) from the Gamma-function expression
inline double coupling_zone_center(const DriverSpec& spec, double e) {
    spec.validate();
    const double a = a_param(spec, e);
    if (!(a > 1.0)) throw domain_error("coupling_zone_center: requires -n b / E > 1");
    const double n = spec.n;
    const double s = std::sin(M_PI * (a - 1.0) * n / (4.0 * a));
    if (std::abs(s) < 1e-12)
        throw resonance_error("coupling_zone_center: pole of the zone-center formula");
    const double lg = (1.0 - n) * std::log(2.0) + std::log(M_PI) + std::log(a) -
                      std::log(a * a - 1.0) + std::lgamma(0.5 * n) -
                      std::log(std::abs(s)) - std::lgamma((a + 1.0) * n / (4.0 * a)) -
                      std::lgamma((a - 1.0) * n / (4.0 * a));
    return std::copysign(std::exp(lg), s);
}

// Stirling form of the same quantity,
// sqrt(n pi) 2^{-n/2} e^{-n theta(a)} / (2 sqrt(a^2-1) sin phi)
inline double coupling_zone_center_asymptotic(const DriverSpec& spec, double e) {
    spec.validate();
    const double a = a_param(spec, e);
    if (!(a > 1.0)) throw domain_error("coupling_zone_center_asymptotic: requires a > 1");
    const double n = spec.n;
    const double phi = M_PI * (a - 1.0) * n / (4.0 * a);
    const double s = std::sin(phi);
    if (std::abs(s) < 1e-12)
        throw resonance_error("coupling_zone_center_asymptotic: pole");
    const double lg = 0.5 * std::log(n * M_PI) - std::log(2.0) -
                      0.5 * std::log(a * a - 1.0) - 0.5 * n * std::log(2.0) -
                      n * theta_of_a(a) - std::log(std::abs(s));
    return std::copysign(std::exp(lg), s);
}

// forward-scattering estimate, valid for b << 1; magnitude only
inline double coupling_fsa(const DriverSpec& spec, double /*e*/, int d) {
    spec.validate();
    if (d < 0 || d > spec.n) throw domain_error("coupling_fsa: d out of range");
    const double n = spec.n;
    const double b2 = sq(spec.b_perp);
    const double lg = std::lgamma(d + 1.0) + d * std::log(spec.b_perp / n) +
                      b2 * (d * d * (3.0 * n - 2.0 * d) / (6.0 * n * n) + n / 12.0);
    return std::exp(lg);
}

// semiclassical coupling; throws within 2 lattice units of a turning point
inline double coupling_wkb(const DriverSpec& spec, double e, int d, const WkbData& wkb) {
    if (d < 0 || d > spec.n) throw domain_error("coupling_wkb: d out of range");
    const double m = 0.5 * spec.n - d;
    if (std::abs(std::abs(m) - wkb.m0) <= 2.0)
        throw domain_error("coupling_wkb: within 2 units of a turning point");
    const double g = wkb_resolvent(wkb, d);
    const double scale = -e * std::exp(-0.5 * log_binomial(spec.n, d));
    double c = scale * g;
    if (d == 0) c += 1.0;
    return c;
}

// --------------------------------------------------------------------------
// coupling table
// --------------------------------------------------------------------------

struct CouplingTable {
    DriverSpec spec;
    double energy = 0.0;
    int precision_bits = 0;
    std::vector<double> c_values;   // c(E,d), d = 0..n
    std::vector<double> resolvent;  // G_{m,n/2}, m = -n/2 + index
    std::vector<double> phase;      // oscillatory phase by d, NaN outside window

    double g_at_distance(int d) const {
        return resolvent[static_cast<size_t>(spec.n - d)];
    }
};

inline CouplingTable build_coupling_table(const DriverSpec& spec, double e,
                                          mpfr_prec_t prec = 0, int threads = 0) {
    spec.validate();
    if (prec == 0) prec = default_coupling_precision(spec.n);
    CouplingTable t;
    t.spec = spec;
    t.energy = e;
    t.precision_bits = static_cast<int>(prec);
    t.resolvent = resolvent_column(spec, e, prec);
    t.c_values.assign(static_cast<size_t>(spec.n) + 1, 0.0);

    if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
    threads = std::max(1, std::min(threads, spec.n + 1));
    auto worker = [&](int t0, int stride) {
        for (int d = t0; d <= spec.n; d += stride)
            t.c_values[static_cast<size_t>(d)] = coupling_exact(spec, e, d, prec);
    };
    if (threads == 1) {
        worker(0, 1);
    } else {
        std::vector<std::thread> pool;
        for (int k = 0; k < threads; ++k) pool.emplace_back(worker, k, threads);
        for (auto& th : pool) th.join();
    }

    t.phase.assign(static_cast<size_t>(spec.n) + 1,
                   std::numeric_limits<double>::quiet_NaN());
    if (spec.b_perp > 1.0 && a_param(spec, e) > 1.0) {
        const double m0 = turning_point(spec, e);
        for (int d = 0; d <= spec.n; ++d)
            if (std::abs(0.5 * spec.n - d) < m0)
                t.phase[static_cast<size_t>(d)] = wkb_phase(spec, e, d);
    }
    return t;
}

}  // namespace ibpt
