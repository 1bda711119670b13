#pragma once

// Deterministic randomness for sweeps: a single 64-bit seed expanded by
// splitmix64 fully determines every sampled point and polynomial.

#include <cstdint>
#include <vector>

#include "field.hpp"
#include "jet.hpp"

namespace nj {

class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1)
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    std::size_t below(std::size_t bound) { return static_cast<std::size_t>(next() % bound); }

    std::vector<double> point(std::size_t n, double lo, double hi) {
        std::vector<double> x(n);
        for (auto& c : x) c = uniform(lo, hi);
        return x;
    }

private:
    std::uint64_t state_;
};

// Random polynomial of total degree <= max_degree in n variables with
// coefficients in [coeff_lo, coeff_hi], usable over reals and jets.
struct RandomPoly {
    std::vector<std::vector<unsigned>> exponents; // one entry per monomial
    std::vector<double> coeffs;

    template <class T>
    T eval(std::span<const T> x) const {
        T acc = make_scalar_like(0.0, x[0]);
        for (std::size_t m = 0; m < coeffs.size(); ++m) {
            T term = make_scalar_like(coeffs[m], x[0]);
            for (std::size_t v = 0; v < x.size(); ++v)
                if (exponents[m][v])
                    term = term * pow_int(x[v], static_cast<long>(exponents[m][v]));
            acc = acc + term;
        }
        return acc;
    }
};

inline ScalarField random_polynomial(SplitMix64& rng, std::size_t n, unsigned max_degree,
                                     double coeff_lo = -2.0, double coeff_hi = 2.0) {
    // enumerate exponent tuples with total degree <= max_degree
    RandomPoly poly;
    std::vector<unsigned> exp(n, 0);
    std::function<void(std::size_t, unsigned)> rec = [&](std::size_t v, unsigned left) {
        if (v == n) {
            poly.exponents.push_back(exp);
            return;
        }
        for (unsigned e = 0; e <= left; ++e) {
            exp[v] = e;
            rec(v + 1, left - e);
        }
        exp[v] = 0;
    };
    rec(0, max_degree);
    poly.coeffs.resize(poly.exponents.size());
    for (auto& c : poly.coeffs) c = rng.uniform(coeff_lo, coeff_hi);
    return ScalarField::from_generic(
        n, [poly](const auto& x) { return poly.eval(x); });
}

} // namespace nj
