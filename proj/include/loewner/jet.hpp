#pragma once

// Truncated complex Taylor and Laurent expansions in one variable.
//
// A Jet1 of order D stores coefficients c[0..D] of sum_k c[k] z^k and all
// operations discard terms above z^D.  Binary operations on jets of unequal
// order truncate to the smaller order: coefficients beyond what both operands
// carry are not representable honestly, so they are never invented.

#include <algorithm>
#include <cassert>
#include <complex>
#include <cstddef>
#include <vector>

#include "loewner/errors.hpp"

namespace loewner {

using cx = std::complex<double>;

class Jet1 {
  public:
    Jet1() : c_(1, cx{0.0}) {}
    explicit Jet1(int order) : c_(static_cast<std::size_t>(order) + 1, cx{0.0}) {
        if (order < 0) throw ValidationError("jet order must be >= 0");
    }
    explicit Jet1(std::vector<cx> coeffs) : c_(std::move(coeffs)) {
        if (c_.empty()) throw ValidationError("jet needs at least one coefficient");
    }

    static Jet1 constant(cx v, int order) {
        Jet1 a(order);
        a.c_[0] = v;
        return a;
    }

    // the monomial v * z^k
    static Jet1 monomial(cx v, int k, int order) {
        Jet1 a(order);
        if (k <= order) a.c_[static_cast<std::size_t>(k)] = v;
        return a;
    }

    static Jet1 identity(int order) { return monomial(cx{1.0}, 1, order); }

    int order() const { return static_cast<int>(c_.size()) - 1; }

    cx coeff(int k) const {
        if (k < 0 || k > order()) return cx{0.0};
        return c_[static_cast<std::size_t>(k)];
    }

    cx& at(int k) {
        assert(k >= 0 && k <= order());
        return c_[static_cast<std::size_t>(k)];
    }

    const std::vector<cx>& coeffs() const { return c_; }

    Jet1 truncated(int new_order) const {
        if (new_order >= order()) return *this;
        if (new_order < 0) throw ValidationError("jet order must be >= 0");
        return Jet1(std::vector<cx>(c_.begin(), c_.begin() + new_order + 1));
    }

  private:
    std::vector<cx> c_;
};

inline Jet1 add(const Jet1& a, const Jet1& b) {
    int d = std::min(a.order(), b.order());
    Jet1 r(d);
    for (int k = 0; k <= d; ++k) r.at(k) = a.coeff(k) + b.coeff(k);
    return r;
}

inline Jet1 sub(const Jet1& a, const Jet1& b) {
    int d = std::min(a.order(), b.order());
    Jet1 r(d);
    for (int k = 0; k <= d; ++k) r.at(k) = a.coeff(k) - b.coeff(k);
    return r;
}

inline Jet1 scale(cx s, const Jet1& a) {
    Jet1 r = a;
    for (int k = 0; k <= r.order(); ++k) r.at(k) *= s;
    return r;
}

// Cauchy product truncated at the common order.
inline Jet1 mul(const Jet1& a, const Jet1& b) {
    int d = std::min(a.order(), b.order());
    Jet1 r(d);
    for (int i = 0; i <= d; ++i) {
        cx ai = a.coeff(i);
        if (ai == cx{0.0}) continue;
        for (int j = 0; j + i <= d; ++j) r.at(i + j) += ai * b.coeff(j);
    }
    return r;
}

inline Jet1 operator+(const Jet1& a, const Jet1& b) { return add(a, b); }
inline Jet1 operator-(const Jet1& a, const Jet1& b) { return sub(a, b); }
inline Jet1 operator*(const Jet1& a, const Jet1& b) { return mul(a, b); }
inline Jet1 operator*(cx s, const Jet1& a) { return scale(s, a); }

// d/dz, one order lower.  The top coefficient of the input has no derivative
// information above it, so the result order drops instead of padding a zero.
inline Jet1 derivative(const Jet1& a) {
    int d = std::max(0, a.order() - 1);
    Jet1 r(d);
    for (int k = 0; k <= d; ++k)
        r.at(k) = static_cast<double>(k + 1) * a.coeff(k + 1);
    return r;
}

// a^k for integer k >= 0 by repeated multiplication.
inline Jet1 power(const Jet1& a, int k) {
    if (k < 0) throw ValidationError("power wants a nonnegative exponent");
    Jet1 r = Jet1::constant(cx{1.0}, a.order());
    for (int i = 0; i < k; ++i) r = mul(r, a);
    return r;
}

// outer(inner) by Horner's scheme; needs inner(0) = 0 so that truncation
// commutes with substitution.
inline Jet1 compose(const Jet1& outer, const Jet1& inner) {
    if (inner.coeff(0) != cx{0.0})
        throw ValidationError("compose needs inner jet with zero constant term");
    int d = std::min(outer.order(), inner.order());
    Jet1 r = Jet1::constant(outer.coeff(outer.order()), d);
    Jet1 inner_t = inner.truncated(d);
    for (int k = outer.order() - 1; k >= 0; --k) {
        r = mul(r, inner_t);
        r.at(0) += outer.coeff(k);
    }
    return r;
}

// Multiplicative inverse of a jet with nonzero constant term.
inline Jet1 unit_reciprocal(const Jet1& a) {
    if (a.coeff(0) == cx{0.0})
        throw NumericalError("reciprocal of a jet with zero constant term");
    int d = a.order();
    Jet1 r(d);
    r.at(0) = 1.0 / a.coeff(0);
    for (int n = 1; n <= d; ++n) {
        cx s{0.0};
        for (int j = 1; j <= n; ++j) s += a.coeff(j) * r.coeff(n - j);
        r.at(n) = -s / a.coeff(0);
    }
    return r;
}

inline cx evaluate(const Jet1& a, cx z) {
    cx r = a.coeff(a.order());
    for (int k = a.order() - 1; k >= 0; --k) r = r * z + a.coeff(k);
    return r;
}

// ---------------------------------------------------------------------------
// Laurent jets: coefficients on a contiguous exponent window [low, high],
// low possibly negative.  Products track how far the truncated tails of the
// factors reach: if a is known on [la, ha] and b on [lb, hb], the product is
// known exactly on [la+lb, min(ha+lb, hb+la)].

class LaurentJet {
  public:
    LaurentJet(int low, std::vector<cx> coeffs)
        : low_(low), c_(std::move(coeffs)) {
        if (c_.empty()) throw ValidationError("laurent jet needs coefficients");
    }

    static LaurentJet from_taylor(const Jet1& a) {
        return LaurentJet(0, a.coeffs());
    }

    static LaurentJet zero(int low, int high) {
        return LaurentJet(low, std::vector<cx>(static_cast<std::size_t>(high - low) + 1, cx{0.0}));
    }

    int low() const { return low_; }
    int high() const { return low_ + static_cast<int>(c_.size()) - 1; }
    int pole_order() const { return std::max(0, -lowest_nonzero()); }

    cx coeff(int e) const {
        if (e < low() || e > high()) return cx{0.0};
        return c_[static_cast<std::size_t>(e - low_)];
    }

    cx& at(int e) {
        assert(e >= low() && e <= high());
        return c_[static_cast<std::size_t>(e - low_)];
    }

    // smallest exponent with a nonzero stored coefficient; low()-1 if none
    int lowest_nonzero() const {
        for (int e = low(); e <= high(); ++e)
            if (coeff(e) != cx{0.0}) return e;
        return low() - 1;
    }

    // restriction to a sub-window (coefficients outside are dropped, the
    // window must lie inside the known range)
    LaurentJet window(int lo, int hi) const {
        if (lo < low() || hi > high() || lo > hi)
            throw ValidationError("laurent window outside known exponent range");
        std::vector<cx> w(c_.begin() + (lo - low_), c_.begin() + (hi - low_) + 1);
        return LaurentJet(lo, std::move(w));
    }

  private:
    int low_;
    std::vector<cx> c_;  // c_[i] is the coefficient of z^(low_ + i)
};

inline LaurentJet add(const LaurentJet& a, const LaurentJet& b) {
    int lo = std::min(a.low(), b.low());
    int hi = std::min(a.high(), b.high());
    if (hi < lo) throw ValidationError("laurent add has empty common window");
    LaurentJet r = LaurentJet::zero(lo, hi);
    for (int e = lo; e <= hi; ++e) r.at(e) = a.coeff(e) + b.coeff(e);
    return r;
}

inline LaurentJet sub(const LaurentJet& a, const LaurentJet& b) {
    int lo = std::min(a.low(), b.low());
    int hi = std::min(a.high(), b.high());
    if (hi < lo) throw ValidationError("laurent sub has empty common window");
    LaurentJet r = LaurentJet::zero(lo, hi);
    for (int e = lo; e <= hi; ++e) r.at(e) = a.coeff(e) - b.coeff(e);
    return r;
}

inline LaurentJet mul(const LaurentJet& a, const LaurentJet& b) {
    int lo = a.low() + b.low();
    int hi = std::min(a.high() + b.low(), b.high() + a.low());
    if (hi < lo) throw ValidationError("laurent mul has empty result window");
    LaurentJet r = LaurentJet::zero(lo, hi);
    for (int i = a.low(); i <= a.high(); ++i) {
        cx ai = a.coeff(i);
        if (ai == cx{0.0}) continue;
        for (int j = b.low(); j <= b.high(); ++j) {
            int e = i + j;
            if (e > hi) break;
            r.at(e) += ai * b.coeff(j);
        }
    }
    return r;
}

inline LaurentJet scale(cx s, const LaurentJet& a) {
    LaurentJet r = a;
    for (int e = r.low(); e <= r.high(); ++e) r.at(e) *= s;
    return r;
}

// Reciprocal of a jet whose lowest nonzero term sits at exponent e0: factor
// z^e0 * (unit) and invert the unit part, giving a jet on [-e0, high - 2*e0].
inline LaurentJet reciprocal(const LaurentJet& a) {
    int e0 = a.lowest_nonzero();
    if (e0 < a.low())
        throw NumericalError("reciprocal of an identically zero jet");
    int n = a.high() - e0;  // unit part known to this order
    Jet1 unit(n);
    for (int k = 0; k <= n; ++k) unit.at(k) = a.coeff(e0 + k);
    Jet1 inv = unit_reciprocal(unit);
    LaurentJet r = LaurentJet::zero(-e0, -e0 + n);
    for (int k = 0; k <= n; ++k) r.at(-e0 + k) = inv.coeff(k);
    return r;
}

inline LaurentJet reciprocal(const Jet1& a) {
    return reciprocal(LaurentJet::from_taylor(a));
}

inline cx evaluate(const LaurentJet& a, cx z) {
    // positive part by Horner, negative part by Horner in 1/z
    cx pos{0.0};
    for (int e = a.high(); e >= std::max(0, a.low()); --e)
        pos = pos * z + a.coeff(e);
    cx neg{0.0};
    if (a.low() < 0) {
        cx w = 1.0 / z;
        cx zi = w;
        for (int e = -1; e >= a.low(); --e) {
            neg += a.coeff(e) * zi;
            zi *= w;
        }
    }
    return pos + neg;
}

}  // namespace loewner
