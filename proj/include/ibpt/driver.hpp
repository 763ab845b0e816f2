#pragma once
// Transverse-field driver: spin-sector geometry, tunneling exponent theta,
// semiclassical turning points and phases for the large-spin resolvent.
//
// The driver couples adjacent total-z-spin sectors with matrix element
// -b*sqrt(L^2 - m^2), L = (n+1)/2. For energies below the spectrum edge the
// resolvent column G_{m,n/2}(E) oscillates inside |m| < m0(E) and grows or
// decays exponentially outside; both branches are assembled here.

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <vector>

#include "ibpt/common.hpp"

namespace ibpt {

struct DriverSpec {
    int n = 1;            // qubit count
    double b_perp = 1.0;  // transverse field, classical energy unit = 1

    double l_param() const { return 0.5 * (n + 1); }

    void validate() const {
        if (n < 1) throw domain_error("DriverSpec: n must be >= 1");
        if (!(b_perp > 0.0)) throw domain_error("DriverSpec: b_perp must be > 0");
    }
};

// tunneling exponent theta as a function of the field-like argument a > 1
inline double theta_of_a(double a) {
    if (!(a > 1.0)) throw domain_error("theta_of_a: requires a > 1");
    return (2.0 * std::atanh(1.0 / a) + a * std::log1p(-1.0 / (a * a))) / (4.0 * a);
}

inline double theta(const DriverSpec& spec) { return theta_of_a(spec.b_perp); }

// large-field expansion 1/(4b^2) + 1/(24b^4) + 1/(60b^6)
inline double theta_series(double b_perp, int terms = 3) {
    const double x = 1.0 / (b_perp * b_perp);
    double t = 0.0;
    if (terms >= 1) t += x / 4.0;
    if (terms >= 2) t += x * x / 24.0;
    if (terms >= 3) t += x * x * x / 60.0;
    return t;
}

// a = -n b / E; the oscillatory regime requires a > 1
inline double a_param(const DriverSpec& spec, double e) {
    return -spec.n * spec.b_perp / e;
}

inline double upsilon(const DriverSpec& spec, double rho) {
    const double b2 = spec.b_perp * spec.b_perp;
    const double arg = 1.0 - sq(1.0 - 2.0 * rho) / (1.0 - 1.0 / b2);
    return arg > 0.0 ? std::sqrt(arg) : 0.0;
}

// turning point of the classical motion, m0 = sqrt(L^2 - (E/2b)^2)
inline double turning_point(const DriverSpec& spec, double e) {
    const double half = e / (2.0 * spec.b_perp);
    const double l = spec.l_param();
    if (std::abs(half) > l) throw domain_error("turning_point: |E/2b| exceeds L");
    return std::sqrt(l * l - half * half);
}

namespace detail {

inline double phase_integrand(double k, double m0, double l) {
    const double num = m0 * m0 - k * k;
    const double den = l * l - k * k;
    if (num <= 0.0) return 0.0;
    return std::asin(std::sqrt(num / den));
}

inline double decay_integrand(double k, double m0, double l) {
    const double num = k * k - m0 * m0;
    const double den = l * l - k * k;
    if (num <= 0.0) return 0.0;
    return std::asinh(std::sqrt(num / den));
}

template <class F>
double integrate(F&& f, double a, double b) {
    if (b <= a) return 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        f, a, b, 12, 1e-12);
}

}  // namespace detail

// oscillatory-window phase: integral of the local momentum from m = n/2-d up
// to the turning point, with the usual -pi/4 connection offset
inline double wkb_phase(const DriverSpec& spec, double e, double d) {
    const double m0 = turning_point(spec, e);
    const double m = 0.5 * spec.n - d;
    if (std::abs(m) > m0) throw domain_error("wkb_phase: d outside oscillatory window");
    const double l = spec.l_param();
    return detail::integrate([=](double k) { return detail::phase_integrand(k, m0, l); },
                             m, m0) -
           0.25 * M_PI;
}

// magnitude of the imaginary continuation of the phase, for |n/2-d| > m0
inline double wkb_phase_decay(const DriverSpec& spec, double e, double d) {
    const double m0 = turning_point(spec, e);
    const double m = std::abs(0.5 * spec.n - d);
    if (m <= m0) throw domain_error("wkb_phase_decay: d inside oscillatory window");
    const double l = spec.l_param();
    return detail::integrate([=](double k) { return detail::decay_integrand(k, m0, l); },
                             m0, m);
}

// closed-form phase for b >> 1; valid away from the interval ends
inline double wkb_phase_largefield(const DriverSpec& spec, double e, double d) {
    const double n = spec.n;
    const double rho = d / n;
    const double delta = e + n;
    const double chi = (1.0 - delta / n) * (1.0 - 2.0 / M_PI * std::asin(1.0 - 2.0 * rho));
    return 0.5 * M_PI * d - 0.25 * M_PI * n * chi / spec.b_perp;
}

// Phases, turning point and the matched normalization constant of the
// resolvent column at fixed energy. phase[d] holds the oscillatory phase
// inside the window and NaN outside; decay[d] holds the exponential rate
// magnitude outside the window and NaN inside.
struct WkbData {
    DriverSpec spec;
    double energy = 0.0;
    double theta_b = 0.0;       // theta(b_perp)
    double theta_a = 0.0;       // theta at a = -n b / E
    double m0 = 0.0;
    double phase_center = 0.0;  // phase at d = n/2
    double phase_total = 0.0;   // accumulated phase across the whole window
    double c_const = 0.0;       // normalization of the resolvent column
    std::vector<double> phase;
    std::vector<double> decay;

    double upsilon_at(double rho) const { return upsilon(spec, rho); }

    // smooth envelope coefficient of the squared coupling, A(rho)
    double envelope_a(double rho) const {
        const double b2 = spec.b_perp * spec.b_perp;
        const double u = upsilon_at(rho);
        if (u <= 0.0) throw domain_error("envelope_a: rho outside oscillatory window");
        const double s = std::sin(phase_center);
        return std::sqrt(M_PI / 32.0) *
               std::exp((energy + spec.n) / spec.b_perp * std::atanh(1.0 / spec.b_perp)) /
               ((b2 - 1.0) * u * sq(sq(s)));
    }
};

inline WkbData make_wkb_data(const DriverSpec& spec, double e) {
    spec.validate();
    if (!(spec.b_perp > 1.0))
        throw domain_error("make_wkb_data: oscillatory analysis requires b_perp > 1");
    const double a = a_param(spec, e);
    if (!(a > 1.0)) throw domain_error("make_wkb_data: requires -n b / E > 1");

    WkbData w;
    w.spec = spec;
    w.energy = e;
    w.theta_b = theta(spec);
    w.theta_a = theta_of_a(a);
    w.m0 = turning_point(spec, e);
    w.phase_center = wkb_phase(spec, e, 0.5 * spec.n);
    {
        const double l = spec.l_param(), m0 = w.m0;
        w.phase_total = detail::integrate(
            [=](double k) { return detail::phase_integrand(k, m0, l); }, -m0, m0);
    }

    const double n = spec.n;
    // The column follows sin(Phi_tot - phase(d)) across the window: the end
    // of the chain admits only the branch decaying away from the source, so
    // the oscillation is anchored at the far turning point. The amplitude is
    // matched at d = n/2 against the closed-form value of the column there.
    const double s_center = std::sin(w.phase_center);
    const double s_far = std::sin(w.phase_total - w.phase_center);
    if (std::abs(s_center) < 0.02 || std::abs(s_far) < 0.02)
        throw resonance_error("make_wkb_data: zone-center matching ill-conditioned");
    w.c_const = std::pow(2.0 * M_PI * n, 0.25) * a * std::sqrt(w.m0) *
                std::exp(-n * w.theta_a) /
                (2.0 * n * spec.b_perp * std::sqrt(a * a - 1.0) * s_center * s_far);

    const double nan = std::numeric_limits<double>::quiet_NaN();
    w.phase.assign(static_cast<size_t>(spec.n) + 1, nan);
    w.decay.assign(static_cast<size_t>(spec.n) + 1, nan);
    for (int d = 0; d <= spec.n; ++d) {
        const double m = 0.5 * n - d;
        if (std::abs(m) < w.m0)
            w.phase[static_cast<size_t>(d)] = wkb_phase(spec, e, d);
        else if (std::abs(m) > w.m0)
            w.decay[static_cast<size_t>(d)] = wkb_phase_decay(spec, e, d);
    }
    return w;
}

// WKB resolvent column entry G_{n/2-d, n/2}(E). The source side (m > m0)
// carries the exponentially growing branch; past the far turning point only
// the decaying branch survives, with the standard half-amplitude connection.
inline double wkb_resolvent(const WkbData& w, int d) {
    const double m = 0.5 * w.spec.n - d;
    const double am = std::abs(m);
    if (am < w.m0) {
        const double ph = w.phase[static_cast<size_t>(d)];
        return w.c_const * std::sin(w.phase_total - ph) /
               std::pow(w.m0 * w.m0 - m * m, 0.25);
    }
    if (m > w.m0) {
        const double dec = w.decay[static_cast<size_t>(d)];
        return w.c_const *
               (std::cos(w.phase_total) * std::exp(dec) +
                0.5 * std::sin(w.phase_total) * std::exp(-dec)) /
               std::pow(m * m - w.m0 * w.m0, 0.25);
    }
    if (m < -w.m0) {
        const double dec = w.decay[static_cast<size_t>(d)];
        return 0.5 * w.c_const * std::exp(-dec) /
               std::pow(m * m - w.m0 * w.m0, 0.25);
    }
    throw domain_error("wkb_resolvent: exactly at a turning point");
}

}  // namespace ibpt
