#pragma once

// First-order optimality along a trajectory.  For a stored flow phi_t with
// limit map F, the costate never needs its own backward solve: transporting
// a candidate field h through the linearized flow gives the time-t value
//
//     L_t(h) = [z^N]( F' * (phi_t')^{-1} * h(phi_t) )        (one variable)
//     L_t(h) = [z^alpha]_1( DF * (Dphi_t)^{-1} * h(phi_t) )  (two variables)
//
// An optimal control maximizes Re L_t over the admissible fields at almost
// every t.  Over the slit fields h_kappa the functional is a trigonometric
// polynomial in arg(kappa):
//
//     L_t(h_kappa) = -b_0 - 2 sum_{m=1}^{N-1} conj(kappa)^m b_m,
//     b_m = [z^N]( F' * (phi_t')^{-1} * phi_t^{m+1} ),
//
// so the exact maximum is found by a dense angle scan plus golden-section
// refinement.  In two variables no such kernel exists; the maximizer reports
// the best value over a multi-start search of the polynomial family and is
// flagged as a lower bound.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include "loewner/errors.hpp"
#include "loewner/herglotz.hpp"
#include "loewner/integrate.hpp"
#include "loewner/jet.hpp"
#include "loewner/jet2.hpp"
#include "loewner/search.hpp"

namespace loewner {

struct AdjointState {
    double t = 0.0;
    Jet1 transport;  // F' * (phi_t')^{-1}, order D-1
};

struct AdjointState2 {
    double t = 0.0;
    Mat2Jet transport;  // DF * (Dphi_t)^{-1}, order D-1
};

inline AdjointState adjoint_state(const Trajectory& traj, const Jet1& F,
                                  std::size_t t_index) {
    if (t_index >= traj.jets.size())
        throw ValidationError("trajectory index out of range");
    Jet1 dphi = derivative(traj.jets[t_index]);
    return {traj.times[t_index], mul(derivative(F), unit_reciprocal(dphi))};
}

inline AdjointState2 adjoint_state2(const Trajectory2& traj, const Jet2Vec& F,
                                    std::size_t t_index) {
    if (t_index >= traj.jets.size())
        throw ValidationError("trajectory index out of range");
    Mat2Jet dphi = jacobian(traj.jets[t_index]);
    return {traj.times[t_index], mul(jacobian(F), inverse(dphi))};
}

inline cx hamiltonian(const AdjointState& adj, const Trajectory& traj,
                      std::size_t t_index, const Jet1& h, int N) {
    if (t_index >= traj.jets.size())
        throw ValidationError("trajectory index out of range");
    if (N > adj.transport.order())
        throw ValidationError("transport order too small for target index");
    Jet1 hphi = compose(h, traj.jets[t_index]);
    return mul(adj.transport, hphi).coeff(N);
}

inline cx hamiltonian2(const AdjointState2& adj, const Trajectory2& traj,
                       std::size_t t_index, const Jet2Vec& h,
                       std::array<int, 2> alpha) {
    if (t_index >= traj.jets.size())
        throw ValidationError("trajectory index out of range");
    if (alpha[0] < 0 || alpha[1] < 0 || alpha[0] + alpha[1] < 2)
        throw ValidationError("target multi-index must have total degree >= 2");
    Jet2Vec hphi = compose_map(h, traj.jets[t_index]);
    Jet2Vec out = apply(adj.transport, hphi);
    return out.x1.coeff(alpha[0], alpha[1]);
}

struct HamiltonianMax {
    double value = 0.0;      // max over kappa of Re L_t(h_kappa)
    double kappa_arg = 0.0;  // attaining angle
};

inline HamiltonianMax maximize_hamiltonian(const AdjointState& adj,
                                           const Trajectory& traj,
                                           std::size_t t_index, int N,
                                           int grid = 1024) {
    if (t_index >= traj.jets.size())
        throw ValidationError("trajectory index out of range");
    if (N > adj.transport.order())
        throw ValidationError("transport order too small for target index");

    // b_m = [z^N](transport * phi^{m+1}); powers above N have valuation > N
    const Jet1& phi = traj.jets[t_index];
    std::vector<cx> b;
    Jet1 pw = phi;
    for (int m = 0; m <= N - 1; ++m) {
        pw = (m == 0) ? phi : mul(pw, phi);
        b.push_back(mul(adj.transport, pw).coeff(N));
    }

    auto neg_value = [&b, N](double theta) {
        cx kbar = std::polar(1.0, -theta);
        cx p = kbar;
        cx L = -b[0];
        for (int m = 1; m <= N - 1; ++m) {
            L -= 2.0 * b[static_cast<std::size_t>(m)] * p;
            p *= kbar;
        }
        return -L.real();
    };

    double best = 1e300, best_theta = 0.0;
    double step = 2.0 * std::numbers::pi / grid;
    for (int i = 0; i < grid; ++i) {
        double v = neg_value(i * step);
        if (v < best) {
            best = v;
            best_theta = i * step;
        }
    }
    double refined = golden_section_min(neg_value, best_theta - step,
                                        best_theta + step);
    double v_ref = neg_value(refined);
    if (v_ref < best) {
        best = v_ref;
        best_theta = refined;
    }
    if (best_theta < 0.0) best_theta += 2.0 * std::numbers::pi;
    if (best_theta >= 2.0 * std::numbers::pi)
        best_theta -= 2.0 * std::numbers::pi;
    return {-best, best_theta};
}

struct PmpReport {
    int target_index = 0;
    std::vector<double> times;
    std::vector<double> achieved;    // Re L_t at the control's own field
    std::vector<double> optimal;     // max over slit fields
    std::vector<double> argmax;      // angle attaining the max
    double max_gap = 0.0;
};

namespace detail {
// Chebyshev-style interior nodes plus endpoints and piece midpoints, snapped
// to stored trajectory indices
inline std::vector<std::size_t> pmp_sample_indices(const Trajectory& traj,
                                                   const DrivingControl& c,
                                                   int samples) {
    std::vector<double> ts{0.0, c.horizon};
    for (int i = 1; i <= samples; ++i) {
        double x = std::cos(std::numbers::pi * (2.0 * i - 1.0) / (2.0 * samples));
        ts.push_back(0.5 * c.horizon * (1.0 - x));
    }
    for (std::size_t k = 0; k + 1 < c.breakpoints.size(); ++k)
        ts.push_back(0.5 * (c.breakpoints[k] + c.breakpoints[k + 1]));

    std::vector<std::size_t> idx;
    for (double t : ts) {
        std::size_t lo = 0, hi = traj.times.size() - 1;
        while (lo < hi) {
            std::size_t mid = (lo + hi) / 2;
            if (traj.times[mid] < t)
                lo = mid + 1;
            else
                hi = mid;
        }
        if (lo > 0 &&
            std::abs(traj.times[lo - 1] - t) < std::abs(traj.times[lo] - t))
            --lo;
        idx.push_back(lo);
    }
    std::sort(idx.begin(), idx.end());
    idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
    return idx;
}
}  // namespace detail

// Samples Re L_t along the flow of the control and compares the value of the
// control's own field against the exact maximum over slit fields.
inline PmpReport pmp_check(const DrivingControl& c, int N, int samples = 64,
                           int order = 12, double step = 1.0 / 64) {
    if (c.dimension() != 1)
        throw ValidationError("first-order check needs a one-variable control");
    if (c.pieces.empty())
        throw ValidationError("control has no pieces to check");
    if (N < 2 || N > order - 1)
        throw ValidationError("target index must lie in [2, order - 1]");

    Trajectory traj = integrate(c, order, step);
    Jet1 F = scale(cx{std::exp(c.horizon)}, traj.jets.back());

    PmpReport rep;
    rep.target_index = N;
    for (std::size_t i : detail::pmp_sample_indices(traj, c, samples)) {
        double t = traj.times[i];
        AdjointState adj = adjoint_state(traj, F, i);
        double tq = std::min(t, c.horizon > 0 ? c.horizon * (1.0 - 1e-12) : 0.0);
        const auto& piece = std::get<ControlValue1>(c.pieces[c.piece_at(tq)]);
        Jet1 h = control_jet(piece, order);
        double ach = hamiltonian(adj, traj, i, h, N).real();
        HamiltonianMax mx = maximize_hamiltonian(adj, traj, i, N);
        rep.times.push_back(t);
        rep.achieved.push_back(ach);
        rep.optimal.push_back(mx.value);
        rep.argmax.push_back(mx.kappa_arg);
        rep.max_gap = std::max(rep.max_gap, mx.value - ach);
    }
    return rep;
}

}  // namespace loewner
