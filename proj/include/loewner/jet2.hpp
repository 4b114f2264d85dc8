#pragma once

// Bivariate Taylor jets truncated by total degree, plus 2x2 jet matrices.
// Used for the two-variable case: polynomial vector fields on the ball and
// the maps they generate.
//
// Storage is the dense triangle {(i, j) : i + j <= D} in graded order, flat
// index (i+j)(i+j+1)/2 + j.

#include <algorithm>
#include <array>
#include <cassert>
#include <complex>
#include <cstddef>
#include <vector>

#include "loewner/errors.hpp"
#include "loewner/jet.hpp"

namespace loewner {

class Jet2 {
  public:
    Jet2() : order_(0), c_(1, cx{0.0}) {}
    explicit Jet2(int order)
        : order_(order), c_(triangle_size(order), cx{0.0}) {
        if (order < 0) throw ValidationError("jet order must be >= 0");
    }

    static Jet2 constant(cx v, int order) {
        Jet2 a(order);
        a.c_[0] = v;
        return a;
    }

    // v * z1^i * z2^j
    static Jet2 monomial(cx v, int i, int j, int order) {
        Jet2 a(order);
        if (i + j <= order) a.at(i, j) = v;
        return a;
    }

    static std::size_t triangle_size(int order) {
        return static_cast<std::size_t>(order + 1) *
               static_cast<std::size_t>(order + 2) / 2;
    }

    int order() const { return order_; }

    cx coeff(int i, int j) const {
        if (i < 0 || j < 0 || i + j > order_) return cx{0.0};
        return c_[flat(i, j)];
    }

    cx& at(int i, int j) {
        assert(i >= 0 && j >= 0 && i + j <= order_);
        return c_[flat(i, j)];
    }

    Jet2 truncated(int new_order) const {
        if (new_order >= order_) return *this;
        Jet2 r(new_order);
        std::copy(c_.begin(), c_.begin() + triangle_size(new_order),
                  r.c_.begin());
        return r;
    }

  private:
    static std::size_t flat(int i, int j) {
        int d = i + j;
        return static_cast<std::size_t>(d) * (d + 1) / 2 +
               static_cast<std::size_t>(j);
    }

    int order_;
    std::vector<cx> c_;
};

inline Jet2 add(const Jet2& a, const Jet2& b) {
    int d = std::min(a.order(), b.order());
    Jet2 r(d);
    for (int s = 0; s <= d; ++s)
        for (int j = 0; j <= s; ++j)
            r.at(s - j, j) = a.coeff(s - j, j) + b.coeff(s - j, j);
    return r;
}

inline Jet2 sub(const Jet2& a, const Jet2& b) {
    int d = std::min(a.order(), b.order());
    Jet2 r(d);
    for (int s = 0; s <= d; ++s)
        for (int j = 0; j <= s; ++j)
            r.at(s - j, j) = a.coeff(s - j, j) - b.coeff(s - j, j);
    return r;
}

inline Jet2 scale(cx v, const Jet2& a) {
    Jet2 r = a;
    for (int s = 0; s <= r.order(); ++s)
        for (int j = 0; j <= s; ++j) r.at(s - j, j) *= v;
    return r;
}

inline Jet2 mul(const Jet2& a, const Jet2& b) {
    int d = std::min(a.order(), b.order());
    Jet2 r(d);
    for (int s1 = 0; s1 <= d; ++s1) {
        for (int j1 = 0; j1 <= s1; ++j1) {
            cx av = a.coeff(s1 - j1, j1);
            if (av == cx{0.0}) continue;
            for (int s2 = 0; s1 + s2 <= d; ++s2)
                for (int j2 = 0; j2 <= s2; ++j2)
                    r.at(s1 - j1 + s2 - j2, j1 + j2) += av * b.coeff(s2 - j2, j2);
        }
    }
    return r;
}

inline Jet2 operator+(const Jet2& a, const Jet2& b) { return add(a, b); }
inline Jet2 operator-(const Jet2& a, const Jet2& b) { return sub(a, b); }
inline Jet2 operator*(const Jet2& a, const Jet2& b) { return mul(a, b); }
inline Jet2 operator*(cx v, const Jet2& a) { return scale(v, a); }

// partial derivative in the first/second variable, one order lower
inline Jet2 d1(const Jet2& a) {
    int d = std::max(0, a.order() - 1);
    Jet2 r(d);
    for (int s = 0; s <= d; ++s)
        for (int j = 0; j <= s; ++j)
            r.at(s - j, j) = static_cast<double>(s - j + 1) * a.coeff(s - j + 1, j);
    return r;
}

inline Jet2 d2(const Jet2& a) {
    int d = std::max(0, a.order() - 1);
    Jet2 r(d);
    for (int s = 0; s <= d; ++s)
        for (int j = 0; j <= s; ++j)
            r.at(s - j, j) = static_cast<double>(j + 1) * a.coeff(s - j, j + 1);
    return r;
}

inline cx evaluate(const Jet2& a, cx z1, cx z2) {
    int d = a.order();
    std::vector<cx> p1(d + 1), p2(d + 1);
    p1[0] = p2[0] = cx{1.0};
    for (int k = 1; k <= d; ++k) {
        p1[k] = p1[k - 1] * z1;
        p2[k] = p2[k - 1] * z2;
    }
    cx r{0.0};
    for (int s = 0; s <= d; ++s)
        for (int j = 0; j <= s; ++j) {
            cx c = a.coeff(s - j, j);
            if (c != cx{0.0}) r += c * p1[s - j] * p2[j];
        }
    return r;
}

// 1/a for a with nonzero constant term, via the geometric series in
// u = a/a(0) - 1 (valuation >= 1, so D terms suffice).
inline Jet2 unit_reciprocal(const Jet2& a) {
    cx a0 = a.coeff(0, 0);
    if (a0 == cx{0.0})
        throw NumericalError("reciprocal of a jet with zero constant term");
    int d = a.order();
    Jet2 u = scale(1.0 / a0, a);
    u.at(0, 0) -= cx{1.0};
    Jet2 s = Jet2::constant({1.0}, d);
    for (int m = 0; m < d; ++m) {
        s = mul(u, s);
        s = scale({-1.0}, s);
        s.at(0, 0) += cx{1.0};
    }
    return scale(1.0 / a0, s);
}

// A polynomial map or map jet: two components.
struct Jet2Vec {
    Jet2 x1, x2;

    int order() const { return std::min(x1.order(), x2.order()); }

    static Jet2Vec identity(int order) {
        return {Jet2::monomial({1.0}, 1, 0, order),
                Jet2::monomial({1.0}, 0, 1, order)};
    }

    static Jet2Vec zero(int order) { return {Jet2(order), Jet2(order)}; }
};

inline Jet2Vec add(const Jet2Vec& a, const Jet2Vec& b) {
    return {add(a.x1, b.x1), add(a.x2, b.x2)};
}

inline Jet2Vec scale(cx v, const Jet2Vec& a) {
    return {scale(v, a.x1), scale(v, a.x2)};
}

inline std::array<cx, 2> evaluate(const Jet2Vec& a, cx z1, cx z2) {
    return {evaluate(a.x1, z1, z2), evaluate(a.x2, z1, z2)};
}

// Substitute a map jet into a polynomial map: component-wise
// sum_{i+j<=D} c_ij p1^i p2^j.  The point jet must fix the origin.
inline Jet2Vec compose_map(const Jet2Vec& field, const Jet2Vec& point) {
    if (point.x1.coeff(0, 0) != cx{0.0} || point.x2.coeff(0, 0) != cx{0.0})
        throw ValidationError("compose needs a point jet with zero constant term");
    int d = std::min(field.order(), point.order());
    Jet2 p1 = point.x1.truncated(d), p2 = point.x2.truncated(d);
    std::vector<Jet2> pow1(d + 1, Jet2(d)), pow2(d + 1, Jet2(d));
    pow1[0] = Jet2::constant({1.0}, d);
    pow2[0] = Jet2::constant({1.0}, d);
    for (int k = 1; k <= d; ++k) {
        pow1[k] = mul(pow1[k - 1], p1);
        pow2[k] = mul(pow2[k - 1], p2);
    }
    Jet2Vec r = Jet2Vec::zero(d);
    for (int s = 0; s <= d; ++s) {
        for (int j = 0; j <= s; ++j) {
            int i = s - j;
            cx c1 = field.x1.coeff(i, j);
            cx c2 = field.x2.coeff(i, j);
            if (c1 == cx{0.0} && c2 == cx{0.0}) continue;
            Jet2 m = mul(pow1[i], pow2[j]);
            if (c1 != cx{0.0}) r.x1 = add(r.x1, scale(c1, m));
            if (c2 != cx{0.0}) r.x2 = add(r.x2, scale(c2, m));
        }
    }
    return r;
}

// 2x2 matrix with jet entries (row major)
struct Mat2Jet {
    Jet2 m00, m01, m10, m11;

    static Mat2Jet identity(int order) {
        return {Jet2::constant({1.0}, order), Jet2(order), Jet2(order),
                Jet2::constant({1.0}, order)};
    }
};

inline Mat2Jet jacobian(const Jet2Vec& a) {
    return {d1(a.x1), d2(a.x1), d1(a.x2), d2(a.x2)};
}

inline Mat2Jet mul(const Mat2Jet& a, const Mat2Jet& b) {
    return {add(mul(a.m00, b.m00), mul(a.m01, b.m10)),
            add(mul(a.m00, b.m01), mul(a.m01, b.m11)),
            add(mul(a.m10, b.m00), mul(a.m11, b.m10)),
            add(mul(a.m10, b.m01), mul(a.m11, b.m11))};
}

inline Jet2Vec apply(const Mat2Jet& a, const Jet2Vec& v) {
    return {add(mul(a.m00, v.x1), mul(a.m01, v.x2)),
            add(mul(a.m10, v.x1), mul(a.m11, v.x2))};
}

// inverse of a matrix whose determinant has nonzero constant term
inline Mat2Jet inverse(const Mat2Jet& a) {
    Jet2 det = sub(mul(a.m00, a.m11), mul(a.m01, a.m10));
    Jet2 idet = unit_reciprocal(det);
    return {mul(a.m11, idet), scale({-1.0}, mul(a.m01, idet)),
            scale({-1.0}, mul(a.m10, idet)), mul(a.m00, idet)};
}

}  // namespace loewner
