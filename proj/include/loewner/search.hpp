#pragma once

// Derivative-free minimization primitives shared by the boundary scans, the
// adjoint maximizer, and the control optimizer.

#include <algorithm>
#include <cstddef>
#include <functional>
#include <numeric>
#include <vector>

#include "loewner/errors.hpp"

namespace loewner {

// Golden-section minimum of a unimodal function on [lo, hi].
// Returns the midpoint of the final bracket.
inline double golden_section_min(const std::function<double(double)>& f,
                                 double lo, double hi, int iters = 80) {
    const double gr = 0.6180339887498949;
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < iters; ++it) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - gr * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + gr * (hi - lo);
            f2 = f(x2);
        }
    }
    return 0.5 * (lo + hi);
}

struct NelderMeadOptions {
    int max_iters = 2000;
    double x_tol = 1e-10;        // simplex diameter
    double f_tol = 1e-14;        // value spread
    double init_scale = 0.5;     // initial simplex edge length
    double stop_below = -1e300;  // early exit once the best value drops here
};

struct NelderMeadResult {
    std::vector<double> x;
    double value = 0.0;
    int iterations = 0;
    std::vector<double> best_history;  // best value after each improvement
};

// Standard Nelder-Mead downhill simplex (reflect 1, expand 2, contract 1/2,
// shrink 1/2).
inline NelderMeadResult nelder_mead_min(
    const std::function<double(const std::vector<double>&)>& f,
    std::vector<double> x0, NelderMeadOptions opt = {}) {
    const std::size_t n = x0.size();
    if (n == 0) throw ValidationError("nelder-mead needs at least one variable");

    std::vector<std::vector<double>> xs(n + 1, x0);
    for (std::size_t i = 0; i < n; ++i) xs[i + 1][i] += opt.init_scale;
    std::vector<double> fs(n + 1);
    for (std::size_t i = 0; i <= n; ++i) fs[i] = f(xs[i]);

    NelderMeadResult res;
    res.best_history.push_back(*std::min_element(fs.begin(), fs.end()));

    std::vector<std::size_t> rank(n + 1);
    std::vector<double> centroid(n), xr(n), xe(n), xc(n);
    int it = 0;
    for (; it < opt.max_iters; ++it) {
        std::iota(rank.begin(), rank.end(), std::size_t{0});
        std::sort(rank.begin(), rank.end(),
                  [&fs](std::size_t a, std::size_t b) { return fs[a] < fs[b]; });
        std::size_t best = rank[0], worst = rank[n], second = rank[n - 1];

        if (fs[best] <= opt.stop_below) break;
        double diam = 0.0;
        for (std::size_t i = 0; i <= n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                diam = std::max(diam, std::abs(xs[i][j] - xs[best][j]));
        if (diam < opt.x_tol && fs[worst] - fs[best] < opt.f_tol) break;

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == worst) continue;
            for (std::size_t j = 0; j < n; ++j) centroid[j] += xs[i][j];
        }
        for (double& cj : centroid) cj /= static_cast<double>(n);

        for (std::size_t j = 0; j < n; ++j)
            xr[j] = centroid[j] + (centroid[j] - xs[worst][j]);
        double fr = f(xr);

        if (fr < fs[best]) {
            for (std::size_t j = 0; j < n; ++j)
                xe[j] = centroid[j] + 2.0 * (centroid[j] - xs[worst][j]);
            double fe = f(xe);
            if (fe < fr) {
                xs[worst] = xe;
                fs[worst] = fe;
            } else {
                xs[worst] = xr;
                fs[worst] = fr;
            }
        } else if (fr < fs[second]) {
            xs[worst] = xr;
            fs[worst] = fr;
        } else {
            bool outside = fr < fs[worst];
            const std::vector<double>& base = outside ? xr : xs[worst];
            for (std::size_t j = 0; j < n; ++j)
                xc[j] = centroid[j] + 0.5 * (base[j] - centroid[j]);
            double fc = f(xc);
            if (fc < std::min(fr, fs[worst])) {
                xs[worst] = xc;
                fs[worst] = fc;
            } else {
                for (std::size_t i = 0; i <= n; ++i) {
                    if (i == best) continue;
                    for (std::size_t j = 0; j < n; ++j)
                        xs[i][j] = xs[best][j] + 0.5 * (xs[i][j] - xs[best][j]);
                    fs[i] = f(xs[i]);
                }
            }
        }
        double cur_best = *std::min_element(fs.begin(), fs.end());
        if (cur_best < res.best_history.back())
            res.best_history.push_back(cur_best);
    }

    std::size_t bi = static_cast<std::size_t>(
        std::min_element(fs.begin(), fs.end()) - fs.begin());
    res.x = xs[bi];
    res.value = fs[bi];
    res.iterations = it;
    return res;
}

// Cyclic golden-section line search over each coordinate; cheap polish for
// smooth objectives after a simplex run.
inline void coordinate_polish(
    const std::function<double(const std::vector<double>&)>& f,
    std::vector<double>& x, double& fx, double radius, int sweeps = 3,
    int iters_per_coord = 48) {
    std::vector<double> trial = x;
    for (int s = 0; s < sweeps; ++s) {
        for (std::size_t j = 0; j < x.size(); ++j) {
            auto line = [&](double v) {
                trial = x;
                trial[j] = v;
                return f(trial);
            };
            double v = golden_section_min(line, x[j] - radius, x[j] + radius,
                                          iters_per_coord);
            trial = x;
            trial[j] = v;
            double fv = f(trial);
            if (fv < fx) {
                x[j] = v;
                fx = fv;
            }
        }
        radius *= 0.5;
    }
}

}  // namespace loewner
