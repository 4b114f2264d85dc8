#pragma once

// Deterministic random sources.  Everything downstream (control sampling,
// optimizer restarts, perturbation experiments) must reproduce byte-identical
// output from a seed, so the distribution transforms are written out here
// instead of using std::*_distribution, whose algorithms are
// implementation-defined.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace loewner {

// splitmix64; standard finalizer, used to derive independent sub-seeds so
// that parallel work items do not share or race a generator.
inline std::uint64_t split_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    // Uniform on [0, 1); 53-bit mantissa.
    double uniform() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    std::uint64_t bits() { return gen_(); }

    // integer in [0, n)
    std::uint64_t below(std::uint64_t n) {
        return gen_() % n;  // modulo bias irrelevant at these sizes
    }

    // Box-Muller (basic form, one value per pair of uniforms).
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * std::numbers::pi * u2);
    }

    // Dirichlet(1,...,1): uniform point on the probability simplex.
    std::vector<double> simplex(std::size_t n) {
        std::vector<double> w(n);
        double total = 0.0;
        for (auto& x : w) {
            double u = uniform();
            while (u <= 0.0) u = uniform();
            x = -std::log(u);
            total += x;
        }
        for (auto& x : w) x /= total;
        return w;
    }

  private:
    std::mt19937_64 gen_;
};

}  // namespace loewner
