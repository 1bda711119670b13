#pragma once

// Test-only oracles, independent of the implementation paths they
// check: central finite differences for gradients and Hessians,
// cofactor-expansion determinants, and random expression trees.

#include <nj/field.hpp>
#include <nj/linalg.hpp>
#include <nj/rng.hpp>

#include <functional>
#include <span>
#include <vector>

namespace oracle {

using RealFn = std::function<double(std::span<const double>)>;

inline std::vector<double> fd_gradient(const RealFn& f, std::span<const double> x,
                                       double h = 1e-4) {
    std::vector<double> g(x.size());
    std::vector<double> y(x.begin(), x.end());
    for (std::size_t i = 0; i < x.size(); ++i) {
        y[i] = x[i] + h;
        const double fp = f(y);
        y[i] = x[i] - h;
        const double fm = f(y);
        y[i] = x[i];
        g[i] = (fp - fm) / (2.0 * h);
    }
    return g;
}

inline std::vector<std::vector<double>> fd_hessian(const RealFn& f,
                                                   std::span<const double> x,
                                                   double h = 1e-3) {
    const std::size_t n = x.size();
    std::vector<std::vector<double>> H(n, std::vector<double>(n, 0.0));
    std::vector<double> y(x.begin(), x.end());
    const double f0 = f(y);
    for (std::size_t i = 0; i < n; ++i) {
        y[i] = x[i] + h;
        const double fp = f(y);
        y[i] = x[i] - h;
        const double fm = f(y);
        y[i] = x[i];
        H[i][i] = (fp - 2.0 * f0 + fm) / (h * h);
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            y[i] = x[i] + h; y[j] = x[j] + h; const double fpp = f(y);
            y[j] = x[j] - h; const double fpm = f(y);
            y[i] = x[i] - h; y[j] = x[j] + h; const double fmp = f(y);
            y[j] = x[j] - h; const double fmm = f(y);
            y[i] = x[i]; y[j] = x[j];
            H[i][j] = H[j][i] = (fpp - fpm - fmp + fmm) / (4.0 * h * h);
        }
    return H;
}

// determinant by cofactor expansion along the first row
inline double cofactor_det(const std::vector<std::vector<double>>& m) {
    const std::size_t n = m.size();
    if (n == 1) return m[0][0];
    double acc = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
        std::vector<std::vector<double>> minor;
        for (std::size_t r = 1; r < n; ++r) {
            std::vector<double> row;
            for (std::size_t cc = 0; cc < n; ++cc)
                if (cc != c) row.push_back(m[r][cc]);
            minor.push_back(std::move(row));
        }
        const double sign = (c % 2 == 0) ? 1.0 : -1.0;
        acc += sign * m[0][c] * cofactor_det(minor);
    }
    return acc;
}

// Random smooth expression tree of bounded depth, evaluable over reals
// and jets. Leaves are coordinates or constants; interior nodes are
// arithmetic or the safe transcendentals (sin, cos, exp of a damped
// argument so values stay in range).
inline nj::ScalarField random_expression(nj::SplitMix64& rng, std::size_t n,
                                         unsigned depth) {
    if (depth == 0 || rng.below(5) == 0) {
        if (rng.below(2) == 0) {
            const std::size_t v = rng.below(n);
            return nj::ScalarField::coordinate(n, v);
        }
        return nj::ScalarField::constant(n, rng.uniform(-2.0, 2.0));
    }
    const std::size_t pick = rng.below(6);
    nj::ScalarField a = random_expression(rng, n, depth - 1);
    switch (pick) {
    case 0: {
        nj::ScalarField b = random_expression(rng, n, depth - 1);
        return a + b;
    }
    case 1: {
        nj::ScalarField b = random_expression(rng, n, depth - 1);
        // damp products so magnitudes and high derivatives stay bounded
        return 0.5 * (a * b);
    }
    case 2:
        return nj::ScalarField::from_generic(n, [a](const auto& x) {
            using nj::sin;
            using std::sin;
            return sin(0.5 * a(x));
        });
    case 3:
        return nj::ScalarField::from_generic(n, [a](const auto& x) {
            using nj::cos;
            using std::cos;
            return cos(0.5 * a(x));
        });
    case 4:
        return nj::ScalarField::from_generic(n, [a](const auto& x) {
            using nj::exp;
            using nj::sin;
            using std::exp;
            using std::sin;
            return exp(sin(0.5 * a(x))); // bounded exponent
        });
    default:
        return nj::ScalarField::from_generic(n, [a](const auto& x) {
            return 0.5 * (a(x) * a(x));
        });
    }
}

} // namespace oracle
