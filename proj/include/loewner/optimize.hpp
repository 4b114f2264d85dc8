#pragma once

// Coefficient-functional ascent over piecewise-constant controls, reachable
// set sampling, and the side-condition experiment.
//
// One-variable controls are parameterized by K atom angles (one slit per
// piece, equal piece lengths); two-variable controls by the complex
// coefficients of the quadratic monomials of each piece, rescaled until the
// field is admissible.  The search is simplex descent with seeded restarts,
// coordinate polish, and a quadratic penalty with lambda continuation when
// lower coefficients are pinned.  Restart traces log the final-stage ascent,
// so each trace is nondecreasing.

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <future>
#include <numbers>
#include <optional>
#include <utility>
#include <vector>

#include "loewner/errors.hpp"
#include "loewner/herglotz.hpp"
#include "loewner/integrate.hpp"
#include "loewner/jet.hpp"
#include "loewner/pontryagin.hpp"
#include "loewner/random.hpp"
#include "loewner/schiffer.hpp"
#include "loewner/search.hpp"

namespace loewner {

struct SideCondition {
    int index = 2;  // pins coefficient a_index of the limit map
    cx value;
};

struct OptimizeProblem {
    int dimension = 1;
    int target_index = 2;                 // a_N for one variable
    std::array<int, 2> target_alpha{2, 0};  // first-component multi-index
    int pieces = 8;
    double horizon = 0.0;                 // <= 0 picks 10 + target order
    double step = 1.0 / 64;
    int restarts = 8;
    std::uint64_t seed = 1;
    std::vector<SideCondition> conditions;  // one variable only, indices < N
    double condition_tol = 1e-4;
};

struct RestartTrace {
    int restart = 0;
    double value = 0.0;            // merit reached by this restart
    std::vector<double> history;   // nondecreasing ascent log
};

struct OptimizeResult {
    DrivingControl best_control;
    double best_value = 0.0;       // Re of the target coefficient, recomputed
    std::vector<cx> best_coefficients;  // limit-map coefficients (one variable)
    double constraint_violation = 0.0;  // max |a_k - A_k| over side conditions
    std::vector<RestartTrace> history;
    std::optional<double> pmp_gap_at_best;
    std::optional<SchifferReport> schiffer_at_best;
};

namespace detail {

inline int thread_budget() {
    const char* s = std::getenv("LOEWNER_THREADS");
    if (s == nullptr) return 1;
    int v = std::atoi(s);
    return v > 1 ? v : 1;
}

// fn(i) for i in [0, count), possibly on a small thread pool; each index
// writes only its own slot, so the merged result is order-independent
template <typename F>
void run_indexed(int count, F&& fn) {
    int threads = std::min(thread_budget(), count);
    if (threads <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::future<void>> workers;
    workers.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t)
        workers.push_back(std::async(std::launch::async, [&next, count, &fn] {
            for (int i = next++; i < count; i = next++) fn(i);
        }));
    for (auto& w : workers) w.get();
}

inline double wrap_angle(double a) {
    double two_pi = 2.0 * std::numbers::pi;
    a = std::fmod(a, two_pi);
    return a < 0.0 ? a + two_pi : a;
}

inline DrivingControl control_from_angles(const std::vector<double>& angles,
                                          double horizon) {
    DrivingControl c;
    c.horizon = horizon;
    c.breakpoints = {0.0};
    double len = horizon / static_cast<double>(angles.size());
    for (std::size_t j = 0; j < angles.size(); ++j) {
        c.breakpoints.push_back(static_cast<double>(j + 1) * len);
        c.pieces.push_back(ControlValue1{{{angles[j], 1.0}}});
    }
    c.breakpoints.back() = horizon;
    return c;
}

inline ControlValueN value_from_params(const double* p) {
    ControlValueN v;
    for (std::size_t m = 0; m < kQuadraticDegrees.size(); ++m) {
        PolyTerm2 term;
        term.deg1 = kQuadraticDegrees[m][0];
        term.deg2 = kQuadraticDegrees[m][1];
        term.coeff = {cx{p[4 * m], p[4 * m + 1]}, cx{p[4 * m + 2], p[4 * m + 3]}};
        v.terms.push_back(term);
    }
    return v;
}

inline DrivingControl control_from_params2(const std::vector<double>& x,
                                           int pieces, double horizon) {
    DrivingControl c;
    c.horizon = horizon;
    c.breakpoints = {0.0};
    double len = horizon / pieces;
    for (int j = 0; j < pieces; ++j) {
        c.breakpoints.push_back((j + 1) * len);
        c.pieces.push_back(project_to_admissible(
            value_from_params(x.data() + j * kParamsPerPiece2)));
    }
    c.breakpoints.back() = horizon;
    return c;
}

struct Objective1 {
    int order;
    int target;
    double horizon;
    double step;
    const std::vector<SideCondition>* conditions;
    double lambda = 0.0;

    double operator()(const std::vector<double>& angles) const {
        Jet1 f = limit_map(control_from_angles(angles, horizon), order, step).jet;
        double penalty = 0.0;
        for (const auto& c : *conditions)
            penalty += std::norm(f.coeff(c.index) - c.value);
        return -f.coeff(target).real() + lambda * penalty;
    }
};

struct Objective2 {
    std::array<int, 2> alpha;
    int pieces;
    double horizon;
    double step;

    double operator()(const std::vector<double>& x) const {
        LimitMap2 f = limit_map2(control_from_params2(x, pieces, horizon),
                                 alpha[0] + alpha[1], step);
        return -f.jet.x1.coeff(alpha[0], alpha[1]).real();
    }
};

// Least-norm Gauss-Newton on the pinned coefficients with adaptive
// Levenberg-Marquardt damping: drives a_k(theta) to the stored values along
// the smallest angle correction, re-solving with a heavier ridge whenever a
// step fails to descend.  Returns the final sum of squared mismatches.
inline double restore_conditions(std::vector<double>& x,
                                 const std::vector<SideCondition>& conditions,
                                 double horizon, int order, double step,
                                 int max_iters = 40, double tol = 9e-10) {
    auto residual = [&](const std::vector<double>& th, std::vector<double>& g) {
        Jet1 f = limit_map(control_from_angles(th, horizon), order, step).jet;
        g.clear();
        double v = 0.0;
        for (const auto& c : conditions) {
            cx d = f.coeff(c.index) - c.value;
            g.push_back(d.real());
            g.push_back(d.imag());
            v += std::norm(d);
        }
        return v;
    };

    std::vector<double> g, gp, trial, delta(x.size());
    double v = residual(x, g);
    const std::size_t K = x.size(), m = g.size();
    std::vector<double> J(m * K), A0(m * m), A(m * m), y(m);

    auto gn_rounds = [&](int iters) {
        double lm = 1e-10;  // ridge scale relative to the normal diagonal
        for (int it = 0; it < iters && v > tol; ++it) {
            const double h = 1e-6;
            trial = x;
            for (std::size_t j = 0; j < K; ++j) {
                trial[j] = x[j] + h;
                residual(trial, gp);
                for (std::size_t r = 0; r < m; ++r)
                    J[r * K + j] = (gp[r] - g[r]) / h;
                trial[j] = x[j];
            }

            double diag_max = 0.0;
            for (std::size_t r = 0; r < m; ++r) {
                for (std::size_t s = 0; s < m; ++s) {
                    double acc = 0.0;
                    for (std::size_t j = 0; j < K; ++j)
                        acc += J[r * K + j] * J[s * K + j];
                    A0[r * m + s] = acc;
                }
                diag_max = std::max(diag_max, A0[r * m + r]);
            }

            // delta = -J^T (J J^T + ridge)^{-1} g, re-solved with a larger
            // ridge until the step descends
            bool improved = false;
            for (int attempt = 0; attempt < 10 && !improved; ++attempt) {
                A = A0;
                double ridge = std::max(diag_max * lm, 1e-300);
                for (std::size_t r = 0; r < m; ++r) A[r * m + r] += ridge;

                y = g;
                for (std::size_t col = 0; col < m; ++col) {  // partial pivot
                    std::size_t piv = col;
                    for (std::size_t r = col + 1; r < m; ++r)
                        if (std::abs(A[r * m + col]) > std::abs(A[piv * m + col]))
                            piv = r;
                    for (std::size_t s = 0; s < m; ++s)
                        std::swap(A[col * m + s], A[piv * m + s]);
                    std::swap(y[col], y[piv]);
                    for (std::size_t r = col + 1; r < m; ++r) {
                        double f = A[r * m + col] / A[col * m + col];
                        for (std::size_t s = col; s < m; ++s)
                            A[r * m + s] -= f * A[col * m + s];
                        y[r] -= f * y[col];
                    }
                }
                for (std::size_t col = m; col-- > 0;) {
                    for (std::size_t s = col + 1; s < m; ++s)
                        y[col] -= A[col * m + s] * y[s];
                    y[col] /= A[col * m + col];
                }
                for (std::size_t j = 0; j < K; ++j) {
                    double acc = 0.0;
                    for (std::size_t r = 0; r < m; ++r)
                        acc += J[r * K + j] * y[r];
                    delta[j] = -acc;
                }

                trial = x;
                for (std::size_t j = 0; j < K; ++j) trial[j] += delta[j];
                double vt = residual(trial, gp);
                if (vt < v) {
                    x = trial;
                    g = gp;
                    v = vt;
                    improved = true;
                    lm = std::max(lm * 0.25, 1e-12);
                } else {
                    lm *= 16.0;
                }
            }
            if (!improved) break;
        }
    };

    gn_rounds(max_iters);
    if (v > tol) {
        // Pinned values taken from an extremal control sit on the boundary
        // of the reachable coefficient body, where the residual vanishes
        // only to second order and Gauss-Newton degrades to a linear rate.
        // A cyclic line-search pass walks through the degeneracy; a second
        // Gauss-Newton round then cleans up the remaining mismatch.
        auto scalar = [&](const std::vector<double>& th) {
            std::vector<double> tmp;
            return residual(th, tmp);
        };
        coordinate_polish(scalar, x, v, 0.6, 3, 40);
        v = residual(x, g);
        gn_rounds(max_iters);
    }
    return v;
}

inline void check_problem(const OptimizeProblem& p) {
    if (p.dimension != 1 && p.dimension != 2)
        throw ValidationError("dimension must be 1 or 2");
    if (p.pieces < 1) throw ValidationError("need at least one piece");
    if (p.restarts < 1) throw ValidationError("need at least one restart");
    if (p.dimension == 1) {
        if (p.target_index < 2)
            throw ValidationError("target coefficient index must be >= 2");
        for (const auto& c : p.conditions)
            if (c.index < 2 || c.index >= p.target_index)
                throw ValidationError(
                    "side conditions pin coefficients strictly below the target");
    } else {
        if (p.target_alpha[0] < 0 || p.target_alpha[1] < 0 ||
            p.target_alpha[0] + p.target_alpha[1] < 2)
            throw ValidationError("target multi-index must have total degree >= 2");
        if (!p.conditions.empty())
            throw ValidationError("side conditions are one-variable only");
    }
}

inline double resolved_horizon(const OptimizeProblem& p) {
    if (p.horizon > 0.0) return p.horizon;
    int n = p.dimension == 1 ? p.target_index
                             : p.target_alpha[0] + p.target_alpha[1];
    return 10.0 + n;
}

}  // namespace detail

inline OptimizeResult optimize(const OptimizeProblem& problem) {
    detail::check_problem(problem);
    const double horizon = detail::resolved_horizon(problem);
    const bool constrained = !problem.conditions.empty();

    const std::vector<double> lambdas =
        constrained ? std::vector<double>{1.0, 10.0, 100.0, 1e3, 1e4}
                    : std::vector<double>{0.0};

    int work_order = 2;
    std::size_t dims = 0;
    if (problem.dimension == 1) {
        work_order = problem.target_index;
        for (const auto& c : problem.conditions)
            work_order = std::max(work_order, c.index);
        dims = static_cast<std::size_t>(problem.pieces);
    } else {
        work_order = problem.target_alpha[0] + problem.target_alpha[1];
        dims = static_cast<std::size_t>(problem.pieces) *
               detail::kParamsPerPiece2;
    }

    auto make_objective = [&](double lambda) {
        return [&, lambda](const std::vector<double>& x) -> double {
            if (problem.dimension == 1) {
                detail::Objective1 obj{work_order, problem.target_index, horizon,
                                       problem.step, &problem.conditions, lambda};
                return obj(x);
            }
            detail::Objective2 obj{problem.target_alpha, problem.pieces, horizon,
                                   problem.step};
            return obj(x);
        };
    };

    std::vector<RestartTrace> traces(
        static_cast<std::size_t>(problem.restarts));
    std::vector<std::vector<double>> best_x(traces.size());

    detail::run_indexed(problem.restarts, [&](int r) {
        Rng rng(split_seed(problem.seed, static_cast<std::uint64_t>(r)));
        std::vector<double> x(dims);
        if (problem.dimension == 1) {
            for (double& v : x) v = rng.uniform(0.0, 2.0 * std::numbers::pi);
        } else {
            for (double& v : x) v = 0.3 * rng.normal();
        }

        NelderMeadResult nm;
        for (std::size_t stage = 0; stage < lambdas.size(); ++stage) {
            NelderMeadOptions opt;
            opt.max_iters = stage + 1 == lambdas.size() ? 2000 : 400;
            opt.init_scale = problem.dimension == 1 ? 0.5 : 0.1;
            nm = nelder_mead_min(make_objective(lambdas[stage]), x, opt);
            x = nm.x;
        }

        auto final_obj = make_objective(lambdas.back());
        double fx = nm.value;
        double radius = problem.dimension == 1 ? 0.2 : 0.05;
        coordinate_polish(final_obj, x, fx, radius);

        RestartTrace& trace = traces[static_cast<std::size_t>(r)];
        trace.restart = r;
        trace.value = -fx;
        trace.history.reserve(nm.best_history.size() + 1);
        for (double v : nm.best_history) trace.history.push_back(-v);
        trace.history.push_back(-fx);
        best_x[static_cast<std::size_t>(r)] = std::move(x);
    });

    std::size_t winner = 0;
    for (std::size_t r = 1; r < traces.size(); ++r)
        if (traces[r].value > traces[winner].value) winner = r;

    OptimizeResult res;
    res.history = std::move(traces);

    if (problem.dimension == 1) {
        std::vector<double> angles = best_x[winner];
        for (double& a : angles) a = detail::wrap_angle(a);
        res.best_control = detail::control_from_angles(angles, horizon);

        int diag_order = std::max(2 * problem.target_index, 8);
        Jet1 f = limit_map(res.best_control, diag_order, problem.step).jet;
        res.best_value = f.coeff(problem.target_index).real();
        res.best_coefficients = f.coeffs();
        for (const auto& c : problem.conditions)
            res.constraint_violation = std::max(
                res.constraint_violation, std::abs(f.coeff(c.index) - c.value));
        res.pmp_gap_at_best =
            pmp_check(res.best_control, problem.target_index, 24,
                      std::max(problem.target_index + 2, 6), problem.step)
                .max_gap;
        res.schiffer_at_best =
            schiffer_check(normalized_map(f), problem.target_index);
    } else {
        res.best_control = detail::control_from_params2(
            best_x[winner], problem.pieces, horizon);
        LimitMap2 f = limit_map2(res.best_control,
                                 problem.target_alpha[0] + problem.target_alpha[1],
                                 problem.step);
        res.best_value =
            f.jet.x1.coeff(problem.target_alpha[0], problem.target_alpha[1])
                .real();
    }
    return res;
}

// --------------------------------------------------------------------------
// reachable-set sampling

struct ReachablePoint {
    int id = 0;
    std::vector<cx> values;  // one entry per requested target
};

struct ReachableSample {
    int dimension = 1;
    std::vector<int> targets;                  // one-variable indices
    std::vector<std::array<int, 2>> targets2;  // two-variable multi-indices
    double horizon = 0.0;
    int pieces = 1;
    std::uint64_t seed = 0;
    std::vector<ReachablePoint> points;
};

inline ReachableSample sample_reachable(const std::vector<int>& targets,
                                        int count, double horizon, int pieces,
                                        std::uint64_t seed) {
    if (targets.empty()) throw ValidationError("need at least one target");
    for (int k : targets)
        if (k < 2) throw ValidationError("target coefficient index must be >= 2");
    if (count < 1) throw ValidationError("need at least one sample");

    int order = *std::max_element(targets.begin(), targets.end());
    ReachableSample out;
    out.dimension = 1;
    out.targets = targets;
    out.horizon = horizon;
    out.pieces = pieces;
    out.seed = seed;
    out.points.resize(static_cast<std::size_t>(count));
    detail::run_indexed(count, [&](int i) {
        DrivingControl c = random_control(
            1, horizon, pieces, split_seed(seed, static_cast<std::uint64_t>(i)));
        Jet1 f = limit_map(c, order).jet;
        ReachablePoint& pt = out.points[static_cast<std::size_t>(i)];
        pt.id = i;
        for (int k : targets) pt.values.push_back(f.coeff(k));
    });
    return out;
}

inline ReachableSample sample_reachable2(
    const std::vector<std::array<int, 2>>& targets, int count, double horizon,
    int pieces, std::uint64_t seed) {
    if (targets.empty()) throw ValidationError("need at least one target");
    int order = 0;
    for (const auto& a : targets) {
        if (a[0] < 0 || a[1] < 0 || a[0] + a[1] < 2)
            throw ValidationError("target multi-index must have total degree >= 2");
        order = std::max(order, a[0] + a[1]);
    }
    if (count < 1) throw ValidationError("need at least one sample");

    ReachableSample out;
    out.dimension = 2;
    out.targets2 = targets;
    out.horizon = horizon;
    out.pieces = pieces;
    out.seed = seed;
    out.points.resize(static_cast<std::size_t>(count));
    detail::run_indexed(count, [&](int i) {
        DrivingControl c = random_control(
            2, horizon, pieces, split_seed(seed, static_cast<std::uint64_t>(i)));
        LimitMap2 f = limit_map2(c, order);
        ReachablePoint& pt = out.points[static_cast<std::size_t>(i)];
        pt.id = i;
        for (const auto& a : targets)
            pt.values.push_back(f.jet.x1.coeff(a[0], a[1]));
    });
    return out;
}

// --------------------------------------------------------------------------
// side-condition experiment

struct TeichmuellerSample {
    int id = 0;
    double feasibility = 0.0;  // max |a_k - A_k| over the pinned range
    double value = 0.0;        // Re a_N of the restored control
    bool feasible = false;
};

struct TeichmuellerReport {
    int target_index = 0;
    double horizon = 0.0;
    int pieces = 0;
    cx reference_value;               // A_N of the base limit map
    std::vector<cx> reference_lower;  // A_2 .. A_{N-1}
    int requested = 0;
    int feasible = 0;
    int violations = 0;  // feasible samples with Re a_N > Re A_N + 1e-6
    double max_excess = -1e300;  // max over feasible of Re a_N - Re A_N
    bool inconclusive = false;
    std::vector<TeichmuellerSample> samples;
};

// Perturbs a first-order-optimal control, restores the pinned coefficients
// a_2..a_{N-1} by a damped least-norm Gauss-Newton pass, and records Re a_N
// for every restored control that lands back on the class.  The last
// perturbation additionally runs a lambda-continuation ascent on Re a_N to
// stress the bound from below.
inline TeichmuellerReport teichmueller_experiment(int N,
                                                  const DrivingControl& base,
                                                  int perturbations,
                                                  std::uint64_t seed) {
    if (N < 2) throw ValidationError("target coefficient index must be >= 2");
    if (perturbations < 0)
        throw ValidationError("perturbation count must be nonnegative");

    const double gate_step = 1.0 / 64;
    PmpReport gate = pmp_check(base, N, 32, std::max(N + 2, 6), gate_step);
    if (gate.max_gap > 1e-6)
        throw ValidationError(
            "base control fails the first-order optimality gate");

    const double horizon = base.horizon;
    const int pieces = 16;

    TeichmuellerReport rep;
    rep.target_index = N;
    rep.horizon = horizon;
    rep.pieces = pieces;
    rep.requested = perturbations;

    Jet1 ref = limit_map(base, N, gate_step).jet;
    rep.reference_value = ref.coeff(N);
    for (int k = 2; k < N; ++k) rep.reference_lower.push_back(ref.coeff(k));

    // re-discretized start: the adjoint-optimal angle at each piece midpoint
    Trajectory traj = integrate(base, std::max(N + 2, 6), gate_step);
    Jet1 F = scale(cx{std::exp(horizon)}, traj.jets.back());
    std::vector<double> base_angles(static_cast<std::size_t>(pieces));
    for (int j = 0; j < pieces; ++j) {
        double tm = (j + 0.5) * horizon / pieces;
        auto i = static_cast<std::size_t>(std::lround(tm / gate_step));
        AdjointState adj = adjoint_state(traj, F, i);
        base_angles[static_cast<std::size_t>(j)] =
            maximize_hamiltonian(adj, traj, i, N).kappa_arg;
    }

    std::vector<SideCondition> conditions;
    for (int k = 2; k < N; ++k)
        conditions.push_back({k, rep.reference_lower[static_cast<std::size_t>(k - 2)]});

    const double sigmas[] = {0.05, 0.1, 0.2, 0.35, 0.5};
    rep.samples.resize(static_cast<std::size_t>(perturbations));

    detail::run_indexed(perturbations, [&](int i) {
        Rng rng(split_seed(seed, static_cast<std::uint64_t>(i)));
        double sigma = sigmas[i % 5];
        std::vector<double> x = base_angles;
        for (double& a : x) a += sigma * rng.normal();

        if (!conditions.empty())
            detail::restore_conditions(x, conditions, horizon, N - 1, 1.0 / 32);

        if (i + 1 == perturbations && !conditions.empty()) {
            // stress run: constrained ascent toward the bound
            for (double lambda : {1.0, 10.0, 100.0, 1e3, 1e4}) {
                detail::Objective1 obj{N, N, horizon, 1.0 / 32, &conditions,
                                       lambda};
                NelderMeadOptions opt;
                opt.max_iters = 150;
                opt.init_scale = 0.02;
                NelderMeadResult nm = nelder_mead_min(
                    [&obj](const std::vector<double>& th) { return obj(th); }, x,
                    opt);
                x = nm.x;
            }
        }

        Jet1 f = limit_map(detail::control_from_angles(x, horizon), N,
                           gate_step)
                     .jet;
        TeichmuellerSample& s = rep.samples[static_cast<std::size_t>(i)];
        s.id = i;
        for (const auto& c : conditions)
            s.feasibility =
                std::max(s.feasibility, std::abs(f.coeff(c.index) - c.value));
        s.value = f.coeff(N).real();
        s.feasible = s.feasibility <= 1e-4;
    });

    for (const auto& s : rep.samples) {
        if (!s.feasible) continue;
        ++rep.feasible;
        double excess = s.value - rep.reference_value.real();
        rep.max_excess = std::max(rep.max_excess, excess);
        if (excess > 1e-6) ++rep.violations;
    }
    rep.inconclusive = perturbations > 0 && rep.feasible == 0;
    if (rep.feasible == 0) rep.max_excess = 0.0;
    return rep;
}

}  // namespace loewner
