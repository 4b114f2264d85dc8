#pragma once

// Jet transport along a piecewise-constant driving control: classical RK4 on
// the coefficient vector of the evolving map jet phi_t (phi_0 = id), with
// fixed step size snapped to piece boundaries.
//
// Two independent solution paths exist on purpose.  The jet path advances
// truncated expansions through the autonomous field of each piece; the
// pointwise path advances single orbits using the exact rational (resp.
// polynomial) form of the field and never touches jet arithmetic.  Their
// agreement is a strong end-to-end consistency check.

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "loewner/errors.hpp"
#include "loewner/herglotz.hpp"
#include "loewner/jet.hpp"
#include "loewner/jet2.hpp"

namespace loewner {

struct Trajectory {
    std::vector<double> times;
    std::vector<Jet1> jets;  // map jets phi_t, zero constant term
    int order = 0;
};

struct Trajectory2 {
    std::vector<double> times;
    std::vector<Jet2Vec> jets;
    int order = 0;
};

// normalized limit map: coefficients of lim_t e^t phi_t
struct LimitMap {
    Jet1 jet;
    double horizon = 0.0;
    double tail_estimate = 0.0;
};

struct LimitMap2 {
    Jet2Vec jet;
    double horizon = 0.0;
    double tail_estimate = 0.0;
};

namespace detail {

// Allocation-free RK4 on Jet1 coefficient vectors.  The right-hand side is
// field(phi) with the field given by its own coefficient vector g (g[0] = 0),
// evaluated by Horner with truncated products.
class Flow1 {
  public:
    explicit Flow1(int order)
        : d_(order), k1_(n()), k2_(n()), k3_(n()), k4_(n()), yt_(n()),
          acc_(n()), scr_(n()) {}

    void rk4_step(std::vector<cx>& y, const std::vector<cx>& g, double h) {
        rhs(g, y, k1_);
        axpy(y, 0.5 * h, k1_, yt_);
        rhs(g, yt_, k2_);
        axpy(y, 0.5 * h, k2_, yt_);
        rhs(g, yt_, k3_);
        axpy(y, h, k3_, yt_);
        rhs(g, yt_, k4_);
        for (int i = 0; i <= d_; ++i)
            y[idx(i)] += (h / 6.0) * (k1_[idx(i)] + 2.0 * k2_[idx(i)] +
                                      2.0 * k3_[idx(i)] + k4_[idx(i)]);
    }

  private:
    std::size_t n() const { return static_cast<std::size_t>(d_) + 1; }
    static std::size_t idx(int i) { return static_cast<std::size_t>(i); }

    void axpy(const std::vector<cx>& y, double a, const std::vector<cx>& k,
              std::vector<cx>& out) {
        for (int i = 0; i <= d_; ++i) out[idx(i)] = y[idx(i)] + a * k[idx(i)];
    }

    // out = g(y) via Horner: acc = g_D; acc = acc * y + g_k
    void rhs(const std::vector<cx>& g, const std::vector<cx>& y,
             std::vector<cx>& out) {
        std::fill(acc_.begin(), acc_.end(), cx{0.0});
        acc_[0] = g[idx(d_)];
        for (int k = d_ - 1; k >= 0; --k) {
            mul_trunc(acc_, y, scr_);
            scr_[0] += g[idx(k)];
            acc_.swap(scr_);
        }
        out = acc_;
    }

    void mul_trunc(const std::vector<cx>& a, const std::vector<cx>& b,
                   std::vector<cx>& out) {
        std::fill(out.begin(), out.end(), cx{0.0});
        for (int i = 0; i <= d_; ++i) {
            cx ai = a[idx(i)];
            if (ai == cx{0.0}) continue;
            for (int j = 0; i + j <= d_; ++j) out[idx(i + j)] += ai * b[idx(j)];
        }
    }

    int d_;
    std::vector<cx> k1_, k2_, k3_, k4_, yt_, acc_, scr_;
};

// One RK4 step for the two-variable map jet.
inline Jet2Vec rk4_step2(const Jet2Vec& y, const Jet2Vec& field, double h) {
    Jet2Vec k1 = compose_map(field, y);
    Jet2Vec k2 = compose_map(field, add(y, scale(cx{0.5 * h}, k1)));
    Jet2Vec k3 = compose_map(field, add(y, scale(cx{0.5 * h}, k2)));
    Jet2Vec k4 = compose_map(field, add(y, scale(cx{h}, k3)));
    Jet2Vec incr = add(add(k1, k4), scale(cx{2.0}, add(k2, k3)));
    return add(y, scale(cx{h / 6.0}, incr));
}

// Walk the pieces of a control with a per-piece step count that lands steps
// exactly on the breakpoints.  body(piece_index, t_start, h, n_steps).
template <class Body>
void for_each_piece(const DrivingControl& c, double step, Body&& body) {
    for (std::size_t k = 0; k < c.pieces.size(); ++k) {
        double t0 = c.breakpoints[k];
        double len = c.breakpoints[k + 1] - t0;
        int n = std::max(1, static_cast<int>(std::lround(len / step)));
        body(k, t0, len / n, n);
    }
}

inline void check_step(double step) {
    if (!(step > 0.0) || !std::isfinite(step))
        throw ValidationError("step size must be positive and finite");
}

inline void check_order(int order) {
    if (order < 1) throw ValidationError("integration needs jet order >= 1");
}

// |c1(t) - e^{-t}| may drift by at most drift_tol per unit time
inline void check_drift(cx c1, double t, double drift_tol) {
    double drift = std::abs(c1 - cx{std::exp(-t)});
    if (drift > drift_tol * std::max(1.0, t))
        throw NumericalError(
            "normalization drift " + std::to_string(drift) + " at t = " +
            std::to_string(t) + "; step too coarse or control invalid");
}

}  // namespace detail

// --------------------------------------------------------------------------
// one complex variable

inline Trajectory integrate(const DrivingControl& c, int order = 12,
                            double step = 1.0 / 64,
                            double drift_tol = 1e-8) {
    detail::check_order(order);
    detail::check_step(step);
    validate_control_shape(c);
    if (c.dimension() != 1)
        throw ValidationError("control drives two variables; use integrate2");

    Trajectory traj;
    traj.order = order;
    traj.times.push_back(0.0);
    traj.jets.push_back(Jet1::identity(order));

    std::vector<cx> y = Jet1::identity(order).coeffs();
    detail::Flow1 flow(order);
    detail::for_each_piece(c, step, [&](std::size_t k, double t0, double h, int n) {
        const auto& piece = std::get<ControlValue1>(c.pieces[k]);
        std::vector<cx> g = control_jet(piece, order).coeffs();
        for (int s = 1; s <= n; ++s) {
            flow.rk4_step(y, g, h);
            double t = t0 + s * h;
            detail::check_drift(y[1], t, drift_tol);
            traj.times.push_back(t);
            traj.jets.push_back(Jet1(y));
        }
    });
    return traj;
}

// final jet only; no path storage
inline Jet1 integrate_final(const DrivingControl& c, int order = 12,
                            double step = 1.0 / 64,
                            double drift_tol = 1e-8) {
    detail::check_order(order);
    detail::check_step(step);
    validate_control_shape(c);
    if (c.dimension() != 1)
        throw ValidationError("control drives two variables; use integrate2");

    std::vector<cx> y = Jet1::identity(order).coeffs();
    detail::Flow1 flow(order);
    detail::for_each_piece(c, step, [&](std::size_t k, double t0, double h, int n) {
        const auto& piece = std::get<ControlValue1>(c.pieces[k]);
        std::vector<cx> g = control_jet(piece, order).coeffs();
        for (int s = 1; s <= n; ++s) {
            flow.rk4_step(y, g, h);
            detail::check_drift(y[1], t0 + s * h, drift_tol);
        }
    });
    return Jet1(y);
}

// Normalized limit: once the control ends, continue with the pure
// contraction -z, under which e^t phi_t is stationary coefficientwise.  The
// limit jet is therefore e^T * phi_T exactly, and the only tail error is the
// integrator's own; tail_estimate reports 0 accordingly.
inline LimitMap limit_map(const DrivingControl& c, int order = 12,
                          double step = 1.0 / 64) {
    Jet1 phi = integrate_final(c, order, step);
    return {scale(cx{std::exp(c.horizon)}, phi), c.horizon, 0.0};
}

// --------------------------------------------------------------------------
// two complex variables

inline Trajectory2 integrate2(const DrivingControl& c, int order = 6,
                              double step = 1.0 / 64,
                              double drift_tol = 1e-8) {
    detail::check_order(order);
    detail::check_step(step);
    validate_control_shape(c);
    if (c.dimension() != 2)
        throw ValidationError("control drives one variable; use integrate");

    Trajectory2 traj;
    traj.order = order;
    traj.times.push_back(0.0);
    traj.jets.push_back(Jet2Vec::identity(order));

    Jet2Vec y = Jet2Vec::identity(order);
    detail::for_each_piece(c, step, [&](std::size_t k, double t0, double h, int n) {
        const auto& piece = std::get<ControlValueN>(c.pieces[k]);
        Jet2Vec g = control_jet(piece, order);
        for (int s = 1; s <= n; ++s) {
            y = detail::rk4_step2(y, g, h);
            double t = t0 + s * h;
            detail::check_drift(y.x1.coeff(1, 0), t, drift_tol);
            detail::check_drift(y.x2.coeff(0, 1), t, drift_tol);
            traj.times.push_back(t);
            traj.jets.push_back(y);
        }
    });
    return traj;
}

inline LimitMap2 limit_map2(const DrivingControl& c, int order = 6,
                            double step = 1.0 / 64) {
    Trajectory2 traj = integrate2(c, order, step);
    return {scale(cx{std::exp(c.horizon)}, traj.jets.back()), c.horizon, 0.0};
}

// --------------------------------------------------------------------------
// pointwise orbits (jet-free path)

struct PathPoint {
    double t;
    cx z;
};

inline std::vector<PathPoint> pointwise_path(const DrivingControl& c, cx z0,
                                             double step = 1.0 / 64) {
    detail::check_step(step);
    validate_control_shape(c);
    if (c.dimension() != 1)
        throw ValidationError("control drives two variables; use pointwise_path2");
    if (std::abs(z0) >= 1.0)
        throw ValidationError("initial point must lie in the open unit disk");

    std::vector<PathPoint> path{{0.0, z0}};
    cx z = z0;
    detail::for_each_piece(c, step, [&](std::size_t k, double t0, double h, int n) {
        const auto& piece = std::get<ControlValue1>(c.pieces[k]);
        auto f = [&piece](cx w) { return evaluate_control(piece, w); };
        for (int s = 1; s <= n; ++s) {
            cx k1 = f(z);
            cx k2 = f(z + 0.5 * h * k1);
            cx k3 = f(z + 0.5 * h * k2);
            cx k4 = f(z + h * k3);
            z += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            if (!(std::abs(z) < 1.0))
                throw NumericalError("orbit left the unit disk at t = " +
                                     std::to_string(t0 + s * h) +
                                     "; step too coarse or control invalid");
            path.push_back({t0 + s * h, z});
        }
    });
    return path;
}

struct PathPoint2 {
    double t;
    std::array<cx, 2> z;
};

inline std::vector<PathPoint2> pointwise_path2(const DrivingControl& c,
                                               std::array<cx, 2> z0,
                                               double step = 1.0 / 64) {
    detail::check_step(step);
    validate_control_shape(c);
    if (c.dimension() != 2)
        throw ValidationError("control drives one variable; use pointwise_path");
    if (std::sqrt(std::norm(z0[0]) + std::norm(z0[1])) >= 1.0)
        throw ValidationError("initial point must lie in the open unit ball");

    std::vector<PathPoint2> path{{0.0, z0}};
    std::array<cx, 2> z = z0;
    auto norm2 = [](const std::array<cx, 2>& w) {
        return std::sqrt(std::norm(w[0]) + std::norm(w[1]));
    };
    detail::for_each_piece(c, step, [&](std::size_t k, double t0, double h, int n) {
        const auto& piece = std::get<ControlValueN>(c.pieces[k]);
        auto f = [&piece](const std::array<cx, 2>& w) {
            return evaluate_control(piece, w[0], w[1]);
        };
        auto saxpy = [](const std::array<cx, 2>& a, double s,
                        const std::array<cx, 2>& b) {
            return std::array<cx, 2>{a[0] + s * b[0], a[1] + s * b[1]};
        };
        for (int s = 1; s <= n; ++s) {
            auto k1 = f(z);
            auto k2 = f(saxpy(z, 0.5 * h, k1));
            auto k3 = f(saxpy(z, 0.5 * h, k2));
            auto k4 = f(saxpy(z, h, k3));
            for (int i = 0; i < 2; ++i)
                z[i] += (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            if (!(norm2(z) < 1.0))
                throw NumericalError("orbit left the unit ball at t = " +
                                     std::to_string(t0 + s * h) +
                                     "; step too coarse or control invalid");
            path.push_back({t0 + s * h, z});
        }
    });
    return path;
}

// --------------------------------------------------------------------------
// consistency between the two paths

inline double cross_check(const DrivingControl& c, cx z0, int order = 12,
                          double step = 1.0 / 64) {
    Jet1 phi = integrate_final(c, order, step);
    cx via_jet = evaluate(phi, z0);
    cx via_orbit = pointwise_path(c, z0, step).back().z;
    return std::abs(via_jet - via_orbit);
}

inline double cross_check2(const DrivingControl& c, std::array<cx, 2> z0,
                           int order = 6, double step = 1.0 / 64) {
    Trajectory2 traj = integrate2(c, order, step);
    auto via_jet = evaluate(traj.jets.back(), z0[0], z0[1]);
    auto via_orbit = pointwise_path2(c, z0, step).back().z;
    return std::max(std::abs(via_jet[0] - via_orbit[0]),
                    std::abs(via_jet[1] - via_orbit[1]));
}

}  // namespace loewner
