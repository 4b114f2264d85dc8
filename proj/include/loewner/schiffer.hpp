#pragma once

// Coefficient-body boundary test for a normalized map jet F (F(0) = 0,
// F'(0) = 1) at target index N:
//
//   * the polynomial P(w) = sum_{k=1}^{N-1} [z^N](F^{k+1}) w^k,
//   * the boundary expression R(z) = (N-1) A_N
//         + sum_{k=1}^{N-1} (k A_k z^{k-N} + k conj(A_k) z^{N-k}),
//     with A_k = [z^k](F),
//   * the defect of the identity [z F'/F]^2 P(1/F) = R on the exponent
//     window [-(N-1), N-1], and
//   * the sign of R on the unit circle (nonnegative with a zero somewhere
//     for boundary candidates).
//
// The left-hand side has pole order at most N-1 for every normalized F: its
// factors are (1/F)^k with pole exactly k <= N-1 and a unit.  Above-window
// exponents of the left-hand side need not vanish for general F; they are
// not part of the defect.

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "loewner/errors.hpp"
#include "loewner/jet.hpp"
#include "loewner/search.hpp"

namespace loewner {

struct SchifferReport {
    int target_index = 0;
    int effective_order = 0;
    LaurentJet residual{0, {cx{0.0}}};  // window [-(N-1), N-1]
    double residual_norm = 0.0;
    double boundary_min = 0.0;
    double boundary_argmin = 0.0;
    double boundary_max_imag = 0.0;
    bool equation_ok = false;
    bool positivity_ok = false;

    bool satisfied() const { return equation_ok && positivity_ok; }
};

namespace detail {
inline void check_schiffer_input(const Jet1& F, int N, int min_order) {
    if (N < 2) throw ValidationError("target index must be at least 2");
    if (F.order() < min_order)
        throw ValidationError("jet order " + std::to_string(F.order()) +
                              " too small for target index " +
                              std::to_string(N) + "; need at least " +
                              std::to_string(min_order));
    if (std::abs(F.coeff(0)) > 1e-12 || std::abs(F.coeff(1) - cx{1.0}) > 1e-9)
        throw ValidationError("map jet must be normalized: F(0) = 0, F'(0) = 1");
}
}  // namespace detail

// Rescales a near-normalized map by 1/F'(0); integrated limit maps carry a
// linear coefficient off by the step-size drift, which the residual checks
// would otherwise reject.
inline Jet1 normalized_map(const Jet1& F) {
    cx d = F.coeff(1);
    if (std::abs(d - cx{1.0}) > 1e-6)
        throw ValidationError("map jet is not close to normalized");
    return scale(cx{1.0} / d, F);
}

// w-coefficients p[0..N-1] of P, p[0] = 0, p[k] = [z^N](F^{k+1})
inline std::vector<cx> schiffer_polynomial(const Jet1& F, int N) {
    detail::check_schiffer_input(F, N, N);
    std::vector<cx> p(static_cast<std::size_t>(N), cx{0.0});
    Jet1 Fk = F.truncated(N);  // F^1, truncation beyond z^N is irrelevant
    for (int k = 1; k <= N - 1; ++k) {
        Fk = mul(Fk, F.truncated(N));
        p[static_cast<std::size_t>(k)] = Fk.coeff(N);
    }
    return p;
}

inline LaurentJet schiffer_boundary(const Jet1& F, int N) {
    detail::check_schiffer_input(F, N, N);
    LaurentJet r = LaurentJet::zero(-(N - 1), N - 1);
    r.at(0) = static_cast<double>(N - 1) * F.coeff(N);
    for (int k = 1; k <= N - 1; ++k) {
        cx ak = F.coeff(k);
        r.at(k - N) = static_cast<double>(k) * ak;
        r.at(N - k) = static_cast<double>(k) * std::conj(ak);
    }
    return r;
}

inline SchifferReport schiffer_check(const Jet1& F, int N,
                                     int boundary_samples = 4096,
                                     double equation_tol = 1e-8) {
    detail::check_schiffer_input(F, N, 2 * N);
    SchifferReport rep;
    rep.target_index = N;
    rep.effective_order = F.order();

    // [z F'/F]^2: z F' carried on a valuation-1 window so the product
    // bookkeeping keeps the full usable order
    int d = F.order();
    std::vector<cx> zfp_c(static_cast<std::size_t>(d), cx{0.0});
    for (int k = 1; k <= d; ++k)
        zfp_c[static_cast<std::size_t>(k - 1)] = static_cast<double>(k) * F.coeff(k);
    LaurentJet zfp(1, std::move(zfp_c));
    LaurentJet ratio = mul(zfp, reciprocal(F));
    LaurentJet ratio2 = mul(ratio, ratio);

    std::vector<cx> p = schiffer_polynomial(F, N);
    LaurentJet invF = reciprocal(F);
    LaurentJet invF_pow = invF;
    LaurentJet psum = scale(p[1], invF);
    for (int k = 2; k <= N - 1; ++k) {
        invF_pow = mul(invF_pow, invF);
        psum = add(psum, scale(p[static_cast<std::size_t>(k)], invF_pow));
    }

    LaurentJet lhs = mul(ratio2, psum);
    LaurentJet rn = schiffer_boundary(F, N);
    rep.residual = sub(lhs.window(-(N - 1), N - 1), rn);
    for (int e = rep.residual.low(); e <= rep.residual.high(); ++e)
        rep.residual_norm = std::max(rep.residual_norm, std::abs(rep.residual.coeff(e)));
    rep.equation_ok = rep.residual_norm <= equation_tol;

    // scan R on the unit circle, then sharpen the minimum by golden section
    auto value = [&rn](double theta) {
        return evaluate(rn, std::polar(1.0, theta));
    };
    double best = 1e300, best_theta = 0.0;
    double step = 2.0 * std::numbers::pi / boundary_samples;
    for (int i = 0; i < boundary_samples; ++i) {
        cx v = value(i * step);
        rep.boundary_max_imag = std::max(rep.boundary_max_imag, std::abs(v.imag()));
        if (v.real() < best) {
            best = v.real();
            best_theta = i * step;
        }
    }
    double theta_star = golden_section_min(
        [&value](double th) { return value(th).real(); }, best_theta - step,
        best_theta + step);
    double v_star = value(theta_star).real();
    if (v_star < best) {
        best = v_star;
        best_theta = theta_star;
    }
    rep.boundary_min = best;
    rep.boundary_argmin =
        best_theta < 0.0 ? best_theta + 2.0 * std::numbers::pi : best_theta;
    rep.positivity_ok = rep.boundary_min >= -1e-8 && rep.boundary_min <= 1e-6;
    return rep;
}

}  // namespace loewner
