#pragma once
// Thin RAII wrapper around MPFR reals. Precision is carried per value; all
// arithmetic is performed at the precision of the destination operand.
// Only the operations needed by the coupling-coefficient evaluation are
// exposed; this is not a general bignum interface.

#include <mpfr.h>

#include <string>
#include <utility>

#include "ibpt/common.hpp"

namespace ibpt {

class MpReal {
  public:
    explicit MpReal(mpfr_prec_t prec = 128) { mpfr_init2(x_, prec); mpfr_set_zero(x_, 1); }
    MpReal(double v, mpfr_prec_t prec) { mpfr_init2(x_, prec); mpfr_set_d(x_, v, MPFR_RNDN); }
    MpReal(const MpReal& o) { mpfr_init2(x_, mpfr_get_prec(o.x_)); mpfr_set(x_, o.x_, MPFR_RNDN); }
    MpReal(MpReal&& o) noexcept { mpfr_init2(x_, 53); mpfr_swap(x_, o.x_); }
    MpReal& operator=(const MpReal& o) {
        if (this != &o) { mpfr_set_prec(x_, mpfr_get_prec(o.x_)); mpfr_set(x_, o.x_, MPFR_RNDN); }
        return *this;
    }
    MpReal& operator=(MpReal&& o) noexcept { mpfr_swap(x_, o.x_); return *this; }
    ~MpReal() { mpfr_clear(x_); }

    mpfr_ptr get() { return x_; }
    mpfr_srcptr get() const { return x_; }
    mpfr_prec_t prec() const { return mpfr_get_prec(x_); }

    double to_double() const { return mpfr_get_d(x_, MPFR_RNDN); }
    bool is_zero() const { return mpfr_zero_p(x_) != 0; }
    int sign() const { return mpfr_sgn(x_); }

    MpReal& operator+=(const MpReal& o) { mpfr_add(x_, x_, o.x_, MPFR_RNDN); return *this; }
    MpReal& operator-=(const MpReal& o) { mpfr_sub(x_, x_, o.x_, MPFR_RNDN); return *this; }
    MpReal& operator*=(const MpReal& o) { mpfr_mul(x_, x_, o.x_, MPFR_RNDN); return *this; }
    MpReal& operator/=(const MpReal& o) { mpfr_div(x_, x_, o.x_, MPFR_RNDN); return *this; }

    friend MpReal operator+(MpReal a, const MpReal& b) { a += b; return a; }
    friend MpReal operator-(MpReal a, const MpReal& b) { a -= b; return a; }
    friend MpReal operator*(MpReal a, const MpReal& b) { a *= b; return a; }
    friend MpReal operator/(MpReal a, const MpReal& b) { a /= b; return a; }

    friend bool operator<(const MpReal& a, const MpReal& b) { return mpfr_cmp(a.x_, b.x_) < 0; }
    friend bool operator>(const MpReal& a, const MpReal& b) { return mpfr_cmp(a.x_, b.x_) > 0; }

    MpReal abs() const { MpReal r(prec()); mpfr_abs(r.x_, x_, MPFR_RNDN); return r; }
    MpReal sqrt() const { MpReal r(prec()); mpfr_sqrt(r.x_, x_, MPFR_RNDN); return r; }

    // log2 of |x|, as a double (used for cancellation accounting)
    double log2_abs() const {
        if (is_zero()) return -std::numeric_limits<double>::infinity();
        long exp0;
        const double m = mpfr_get_d_2exp(&exp0, x_, MPFR_RNDN);
        return std::log2(std::abs(m)) + static_cast<double>(exp0);
    }

  private:
    mpfr_t x_;
};

// binomial coefficient C(n,k) exactly, at the given precision
inline MpReal mp_binomial(unsigned long n, unsigned long k, mpfr_prec_t prec) {
    MpReal r(prec);
    mpfr_t t;
    mpfr_init2(t, prec);
    mpfr_fac_ui(r.get(), n, MPFR_RNDN);
    mpfr_fac_ui(t, k, MPFR_RNDN);
    mpfr_div(r.get(), r.get(), t, MPFR_RNDN);
    mpfr_fac_ui(t, n - k, MPFR_RNDN);
    mpfr_div(r.get(), r.get(), t, MPFR_RNDN);
    mpfr_clear(t);
    return r;
}

inline MpReal mp_pow2(long e, mpfr_prec_t prec) {
    MpReal r(1.0, prec);
    mpfr_mul_2si(r.get(), r.get(), e, MPFR_RNDN);
    return r;
}

}  // namespace ibpt
