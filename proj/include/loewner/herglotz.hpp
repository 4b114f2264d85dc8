#pragma once

// Admissible control values and piecewise-constant driving controls.
//
// Dimension 1: convex combinations of slit fields
//     h_kappa(z) = -z (kappa + z) / (kappa - z),   |kappa| = 1,
// the extreme points of the control set.  Each atom stores the angle of
// kappa, so unit modulus is exact by construction.
//
// Dimension 2: polynomial fields G(z) = -z + R(z) with R a polynomial whose
// terms all have total degree >= 2.  The linear part is -id structurally;
// dissipativity Re<G(z), z> <= 0 is checked on a fixed deterministic grid in
// the open ball.

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <string>
#include <variant>
#include <vector>

#include "loewner/errors.hpp"
#include "loewner/jet.hpp"
#include "loewner/jet2.hpp"
#include "loewner/random.hpp"

namespace loewner {

struct BoundaryAtom {
    double kappa_arg = 0.0;  // kappa = exp(i * kappa_arg)
    double weight = 1.0;

    cx kappa() const { return std::polar(1.0, kappa_arg); }
};

struct ControlValue1 {
    std::vector<BoundaryAtom> atoms;
};

// one monomial of the nonlinear part, acting on both components
struct PolyTerm2 {
    int deg1 = 0, deg2 = 0;        // exponents of z1, z2; deg1 + deg2 >= 2
    std::array<cx, 2> coeff{};     // contribution to (G1, G2)
};

struct ControlValueN {
    std::vector<PolyTerm2> terms;
};

using ControlPiece = std::variant<ControlValue1, ControlValueN>;

// Piecewise-constant control on [0, horizon]; piece k is active on
// [breakpoints[k], breakpoints[k+1]).  An empty control (horizon 0) drives
// the identity.
struct DrivingControl {
    double horizon = 0.0;
    std::vector<double> breakpoints{0.0};
    std::vector<ControlPiece> pieces;

    int dimension() const {
        if (pieces.empty()) return 1;
        return pieces.front().index() == 0 ? 1 : 2;
    }

    std::size_t piece_count() const { return pieces.size(); }

    // index of the piece active at time t in [0, horizon)
    std::size_t piece_at(double t) const {
        if (pieces.empty()) throw ValidationError("control has no pieces");
        std::size_t lo = 0, hi = pieces.size() - 1;
        while (lo < hi) {
            std::size_t mid = (lo + hi + 1) / 2;
            if (breakpoints[mid] <= t)
                lo = mid;
            else
                hi = mid - 1;
        }
        return lo;
    }
};

// --------------------------------------------------------------------------
// jets of control values

// h_kappa(z) = -z - 2 sum_{m>=1} conj(kappa)^m z^{m+1}
inline Jet1 slit_field(double kappa_arg, int order) {
    Jet1 h(order);
    if (order >= 1) h.at(1) = cx{-1.0};
    cx kbar = std::polar(1.0, -kappa_arg);
    cx p = kbar;
    for (int m = 1; m + 1 <= order; ++m) {
        h.at(m + 1) = -2.0 * p;
        p *= kbar;
    }
    return h;
}

inline Jet1 control_jet(const ControlValue1& v, int order) {
    Jet1 h(order);
    for (const auto& atom : v.atoms)
        h = add(h, scale(cx{atom.weight}, slit_field(atom.kappa_arg, order)));
    return h;
}

inline Jet2Vec control_jet(const ControlValueN& v, int order) {
    Jet2Vec g = scale(cx{-1.0}, Jet2Vec::identity(order));
    for (const auto& term : v.terms) {
        if (term.deg1 + term.deg2 > order) continue;
        if (term.coeff[0] != cx{0.0})
            g.x1 = add(g.x1, Jet2::monomial(term.coeff[0], term.deg1, term.deg2, order));
        if (term.coeff[1] != cx{0.0})
            g.x2 = add(g.x2, Jet2::monomial(term.coeff[1], term.deg1, term.deg2, order));
    }
    return g;
}

// --------------------------------------------------------------------------
// exact pointwise evaluation (no jets; rational / polynomial forms)

inline cx evaluate_control(const ControlValue1& v, cx z) {
    cx s{0.0};
    for (const auto& atom : v.atoms) {
        cx k = atom.kappa();
        s += atom.weight * (k + z) / (k - z);
    }
    return -z * s;
}

inline std::array<cx, 2> evaluate_control(const ControlValueN& v, cx z1, cx z2) {
    std::array<cx, 2> g{-z1, -z2};
    for (const auto& term : v.terms) {
        cx mono{1.0};
        for (int i = 0; i < term.deg1; ++i) mono *= z1;
        for (int j = 0; j < term.deg2; ++j) mono *= z2;
        g[0] += term.coeff[0] * mono;
        g[1] += term.coeff[1] * mono;
    }
    return g;
}

// --------------------------------------------------------------------------
// validation grids (fixed, deterministic)

inline const std::vector<cx>& disk_grid() {
    static const std::vector<cx> grid = [] {
        std::vector<cx> g;
        const double radii[] = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.97};
        for (double r : radii)
            for (int a = 0; a < 48; ++a)
                g.push_back(std::polar(r, 2.0 * std::numbers::pi * a / 48.0));
        for (int a = 0; a < 96; ++a)
            g.push_back(std::polar(0.995, 2.0 * std::numbers::pi * (a + 0.5) / 96.0));
        return g;
    }();
    return grid;
}

namespace detail {
inline double halton(std::size_t index, int base) {
    double f = 1.0, r = 0.0;
    while (index > 0) {
        f /= base;
        r += f * static_cast<double>(index % base);
        index /= base;
    }
    return r;
}
}  // namespace detail

// Low-discrepancy points in the unit ball of C^2 (= R^4): Halton points in
// the cube, rejected to the ball, plus a near-boundary shell.
inline const std::vector<std::array<cx, 2>>& ball_grid2() {
    static const std::vector<std::array<cx, 2>> grid = [] {
        std::vector<std::array<cx, 2>> g;
        const int bases[4] = {2, 3, 5, 7};
        std::size_t index = 1;
        while (g.size() < 512) {
            double v[4];
            double norm2 = 0.0;
            for (int k = 0; k < 4; ++k) {
                v[k] = 2.0 * detail::halton(index, bases[k]) - 1.0;
                norm2 += v[k] * v[k];
            }
            ++index;
            if (norm2 >= 1.0 || norm2 < 1e-4) continue;
            g.push_back({cx{v[0], v[1]}, cx{v[2], v[3]}});
        }
        std::size_t shell_start = g.size() - 128;
        for (std::size_t i = 0; i < 128; ++i) {
            auto p = g[shell_start + i];
            double n = std::sqrt(std::norm(p[0]) + std::norm(p[1]));
            double s = 0.995 / n;
            g.push_back({s * p[0], s * p[1]});
        }
        return g;
    }();
    return grid;
}

// --------------------------------------------------------------------------
// membership checks

struct FieldCheck {
    bool ok = false;
    double max_violation = 0.0;   // max over grid of Re<h(z), z>; <= tol when ok
    bool linear_is_minus_id = false;
};

namespace detail {
inline bool value_shape_ok(const ControlValue1& v) {
    double wsum = 0.0;
    for (const auto& atom : v.atoms) {
        if (!(atom.weight >= 0.0 && atom.weight <= 1.0)) return false;
        if (!std::isfinite(atom.kappa_arg)) return false;
        wsum += atom.weight;
    }
    return !v.atoms.empty() && std::abs(wsum - 1.0) <= 1e-12;
}

inline bool value_shape_ok(const ControlValueN& v) {
    for (const auto& term : v.terms) {
        if (term.deg1 < 0 || term.deg2 < 0 || term.deg1 + term.deg2 < 2)
            return false;
        if (!std::isfinite(std::abs(term.coeff[0])) ||
            !std::isfinite(std::abs(term.coeff[1])))
            return false;
    }
    return true;
}
}  // namespace detail

inline FieldCheck validate_control_value(const ControlValue1& v,
                                         double tol = 1e-10) {
    FieldCheck r;
    if (!detail::value_shape_ok(v)) return r;
    r.linear_is_minus_id = true;
    double worst = -1e300;
    for (cx z : disk_grid()) {
        double d = (evaluate_control(v, z) * std::conj(z)).real();
        worst = std::max(worst, d);
    }
    r.max_violation = worst;
    r.ok = worst <= tol;
    return r;
}

inline FieldCheck validate_control_value(const ControlValueN& v,
                                         double tol = 1e-10) {
    FieldCheck r;
    if (!detail::value_shape_ok(v)) return r;
    r.linear_is_minus_id = true;
    double worst = -1e300;
    for (const auto& p : ball_grid2()) {
        auto g = evaluate_control(v, p[0], p[1]);
        double d = (g[0] * std::conj(p[0]) + g[1] * std::conj(p[1])).real();
        worst = std::max(worst, d);
    }
    r.max_violation = worst;
    r.ok = worst <= tol;
    return r;
}

// generic candidate jet in one variable: h(0) = 0, h'(0) = -1, and
// dissipativity of the truncated polynomial on the grid
inline FieldCheck validate_field_jet(const Jet1& h, double tol = 1e-10) {
    FieldCheck r;
    if (h.coeff(0) != cx{0.0}) return r;
    r.linear_is_minus_id = std::abs(h.coeff(1) - cx{-1.0}) <= 1e-12;
    double worst = -1e300;
    for (cx z : disk_grid())
        worst = std::max(worst, (evaluate(h, z) * std::conj(z)).real());
    r.max_violation = worst;
    r.ok = r.linear_is_minus_id && worst <= tol;
    return r;
}

inline FieldCheck validate_field_jet(const Jet2Vec& h, double tol = 1e-10) {
    FieldCheck r;
    if (h.x1.coeff(0, 0) != cx{0.0} || h.x2.coeff(0, 0) != cx{0.0}) return r;
    r.linear_is_minus_id =
        std::abs(h.x1.coeff(1, 0) + cx{1.0}) <= 1e-12 &&
        std::abs(h.x2.coeff(0, 1) + cx{1.0}) <= 1e-12 &&
        std::abs(h.x1.coeff(0, 1)) <= 1e-12 && std::abs(h.x2.coeff(1, 0)) <= 1e-12;
    double worst = -1e300;
    for (const auto& p : ball_grid2()) {
        auto g = evaluate(h, p[0], p[1]);
        double d = (g[0] * std::conj(p[0]) + g[1] * std::conj(p[1])).real();
        worst = std::max(worst, d);
    }
    r.max_violation = worst;
    r.ok = r.linear_is_minus_id && worst <= tol;
    return r;
}

// --------------------------------------------------------------------------
// whole-control validation

// Structural checks only (cheap; no grid sweeps).  Integration entry points
// rely on this; the full dissipativity check runs at parse/sample boundaries.
inline void validate_control_shape(const DrivingControl& c) {
    if (!(c.horizon >= 0.0) || !std::isfinite(c.horizon))
        throw ValidationError("horizon must be finite and nonnegative");
    if (c.breakpoints.empty() || c.breakpoints.front() != 0.0)
        throw ValidationError("breakpoints must start at 0");
    if (c.breakpoints.size() != c.pieces.size() + 1)
        throw ValidationError("need exactly one more breakpoint than pieces");
    for (std::size_t k = 0; k + 1 < c.breakpoints.size(); ++k)
        if (!(c.breakpoints[k] < c.breakpoints[k + 1]))
            throw ValidationError("breakpoints must be strictly increasing");
    if (std::abs(c.breakpoints.back() - c.horizon) > 1e-12)
        throw ValidationError("last breakpoint must equal the horizon");
    if (c.pieces.empty() && c.horizon != 0.0)
        throw ValidationError("positive horizon needs at least one piece");

    for (std::size_t k = 0; k < c.pieces.size(); ++k) {
        if (c.pieces[k].index() != c.pieces.front().index())
            throw ValidationError("pieces must all share one dimension");
        bool ok = std::visit(
            [](const auto& v) { return detail::value_shape_ok(v); }, c.pieces[k]);
        if (!ok)
            throw ValidationError("piece " + std::to_string(k) +
                                  " has malformed atoms or polynomial terms");
    }
}

// Shape plus grid dissipativity of every piece.
inline void validate_control(const DrivingControl& c) {
    validate_control_shape(c);
    for (std::size_t k = 0; k < c.pieces.size(); ++k) {
        FieldCheck chk = std::visit(
            [](const auto& v) { return validate_control_value(v); }, c.pieces[k]);
        if (!chk.ok)
            throw ValidationError("piece " + std::to_string(k) +
                                  " is not an admissible control value (max grid violation " +
                                  std::to_string(chk.max_violation) + ")");
    }
}

// --------------------------------------------------------------------------
// admissible projection and seeded draws

namespace detail {
constexpr std::array<std::array<int, 2>, 3> kQuadraticDegrees{
    {{2, 0}, {1, 1}, {0, 2}}};
constexpr int kParamsPerPiece2 = 12;  // 3 monomials x 2 components x (re, im)
}  // namespace detail

// sum of Euclidean norms of the term coefficient pairs; below 1 the field
// -z + p(z) is dissipative on the whole unit ball
inline double quadratic_mass(const ControlValueN& v) {
    double s = 0.0;
    for (const auto& t : v.terms)
        s += std::sqrt(std::norm(t.coeff[0]) + std::norm(t.coeff[1]));
    return s;
}

inline ControlValueN project_to_admissible(ControlValueN v) {
    for (int tries = 0; tries < 100; ++tries) {
        if (quadratic_mass(v) <= 0.9 || validate_control_value(v).ok) return v;
        for (auto& t : v.terms) {
            t.coeff[0] *= 0.5;
            t.coeff[1] *= 0.5;
        }
    }
    throw ValidationError(
        "could not rescale the polynomial field to an admissible one");
}

// Deterministic control draw; sample i of a batch uses split_seed(seed, i).
inline DrivingControl random_control(int dimension, double horizon, int pieces,
                                     std::uint64_t seed) {
    if (dimension != 1 && dimension != 2)
        throw ValidationError("dimension must be 1 or 2");
    if (pieces < 1 || !(horizon > 0.0))
        throw ValidationError("need a positive horizon and at least one piece");
    Rng rng(seed);
    DrivingControl c;
    c.horizon = horizon;
    c.breakpoints = {0.0};
    double len = horizon / pieces;
    for (int j = 0; j < pieces; ++j) {
        c.breakpoints.push_back((j + 1) * len);
        if (dimension == 1) {
            ControlValue1 v;
            std::size_t m = 1 + static_cast<std::size_t>(rng.below(3));
            std::vector<double> w = rng.simplex(m);
            for (std::size_t a = 0; a < m; ++a)
                v.atoms.push_back(
                    {rng.uniform(0.0, 2.0 * std::numbers::pi), w[a]});
            c.pieces.push_back(v);
        } else {
            ControlValueN v;
            for (const auto& deg : detail::kQuadraticDegrees) {
                PolyTerm2 term;
                term.deg1 = deg[0];
                term.deg2 = deg[1];
                term.coeff = {0.3 * cx{rng.normal(), rng.normal()},
                              0.3 * cx{rng.normal(), rng.normal()}};
                v.terms.push_back(term);
            }
            c.pieces.push_back(project_to_admissible(v));
        }
    }
    c.breakpoints.back() = horizon;
    return c;
}

}  // namespace loewner
