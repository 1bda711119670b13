#pragma once

// Multi-Hamiltonian vector fields on flat Nambu-Jacobi structures,
// the characteristic distribution rank, and the Lie-derivative check
// L_{X^Box} Lambda = 0. The field is implemented twice on purpose: the
// printed component formula and the structural sharp-map composition;
// the test suite asserts their pointwise equality, which guards the
// sign bookkeeping.

#include <cstddef>
#include <span>
#include <vector>

#include "brackets.hpp"
#include "errors.hpp"
#include "field.hpp"
#include "jet.hpp"
#include "linalg.hpp"

namespace nj {

struct HamiltonianSystem {
    VnjStructure structure;
    std::vector<ScalarField> hamiltonians; // n-1 of them

    HamiltonianSystem(VnjStructure s, std::vector<ScalarField> hs)
        : structure(std::move(s)), hamiltonians(std::move(hs)) {
        if (hamiltonians.size() != structure.n - 1)
            throw invalid_input("HamiltonianSystem: need n-1 Hamiltonians");
    }

    std::size_t dim() const { return structure.n; }
};

namespace detail {

inline int sign_pm(long e) { return (e % 2 == 0) ? 1 : -1; }

// det of the Jacobian of the given jet rows over the given coordinate
// columns, as a double.
inline double jac_det_d(const std::vector<Jet2>& jets, const std::vector<std::size_t>& rows,
                        const std::vector<std::size_t>& cols) {
    SquareMatrix<double> m(rows.size(), 0.0);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j)
            m(i, j) = jets[rows[i]].grad(cols[j]);
    return det_generic(std::move(m));
}

inline std::vector<std::size_t> range_omit(std::size_t count, std::size_t omit) {
    std::vector<std::size_t> v;
    v.reserve(count - 1);
    for (std::size_t i = 0; i < count; ++i)
        if (i != omit) v.push_back(i);
    return v;
}

inline std::vector<std::size_t> range_n(std::size_t count) {
    std::vector<std::size_t> v(count);
    for (std::size_t i = 0; i < count; ++i) v[i] = i;
    return v;
}

} // namespace detail

// Component formula:
//   X = sum_{k<n} (-1)^(n-k) rhoL d(H1..H(n-1))/d(x^1..omit x^k..x^n) d/dx^k
//     + rhoL d(H1..H(n-1))/d(x^1..x^(n-1)) d/dx^n
//     + sum_i (-1)^(i-1) H_i rhoB d(H..omit H_i..)/d(x^1..x^(n-2)) d/dx^(n-1)
//     + sum_i sum_{j<=n-2} (-1)^(n-j+i-2) H_i rhoB d(H..omit H_i..)/d(x^1..omit x^j..x^(n-1)) d/dx^j
inline std::vector<double> ham_vf_components(const HamiltonianSystem& sys,
                                             std::span<const double> x) {
    const std::size_t n = sys.dim();
    auto seeds = seed_jets(x);
    std::vector<Jet2> jets;
    jets.reserve(n - 1);
    for (const auto& H : sys.hamiltonians) jets.push_back(H(std::span<const Jet2>(seeds)));
    const double rl = sys.structure.rho_lambda(x);
    const double rb = sys.structure.rho_box(x);
    const auto all_rows = detail::range_n(n - 1);

    std::vector<double> X(n, 0.0);
    // Lambda part
    for (std::size_t k = 1; k <= n - 1; ++k) {
        auto cols = detail::range_omit(n, k - 1);
        X[k - 1] += detail::sign_pm(static_cast<long>(n - k)) * rl *
                    detail::jac_det_d(jets, all_rows, cols);
    }
    X[n - 1] += rl * detail::jac_det_d(jets, all_rows, detail::range_n(n - 1));
    // Box parts
    for (std::size_t i = 1; i <= n - 1; ++i) {
        auto rows = detail::range_omit(n - 1, i - 1);
        const double Hi = jets[i - 1].value();
        X[n - 2] += detail::sign_pm(static_cast<long>(i - 1)) * Hi * rb *
                    detail::jac_det_d(jets, rows, detail::range_n(n - 2));
        for (std::size_t j = 1; j <= n - 2; ++j) {
            auto cols = detail::range_omit(n - 1, j - 1);
            X[j - 1] += detail::sign_pm(static_cast<long>(n - j + i - 2)) * Hi * rb *
                        detail::jac_det_d(jets, rows, cols);
        }
    }
    return X;
}

// Structural composition: X = sharpLambda(dH1 ^ ... ^ dH(n-1))
//   + sum_i (-1)^(i-1) H_i sharpBox(dH1 ^ ... omit dH_i ... ^ dH(n-1)),
// where component k of a sharp is the pairing with dx^k.
inline std::vector<double> ham_vf_composition(const HamiltonianSystem& sys,
                                              std::span<const double> x) {
    const std::size_t n = sys.dim();
    auto seeds = seed_jets(x);
    std::vector<Jet2> jets;
    for (const auto& H : sys.hamiltonians) jets.push_back(H(std::span<const Jet2>(seeds)));
    const double rl = sys.structure.rho_lambda(x);
    const double rb = sys.structure.rho_box(x);

    std::vector<double> X(n, 0.0);
    // Lambda(dH1,...,dH(n-1),dx^k) = rl * det of the n x n matrix whose
    // rows are the H-gradients and e_k.
    for (std::size_t k = 0; k < n; ++k) {
        SquareMatrix<double> m(n, 0.0);
        for (std::size_t i = 0; i < n - 1; ++i)
            for (std::size_t j = 0; j < n; ++j) m(i, j) = jets[i].grad(j);
        m(n - 1, k) = 1.0;
        X[k] += rl * det_generic(std::move(m));
    }
    // Box(dH...omit i..., dx^k) over coordinates 1..n-1 only.
    for (std::size_t omit = 0; omit < n - 1; ++omit) {
        const double Hi = jets[omit].value();
        for (std::size_t k = 0; k < n - 1; ++k) {
            SquareMatrix<double> m(n - 1, 0.0);
            std::size_t r = 0;
            for (std::size_t i = 0; i < n - 1; ++i) {
                if (i == omit) continue;
                for (std::size_t j = 0; j < n - 1; ++j) m(r, j) = jets[i].grad(j);
                ++r;
            }
            m(n - 2, k) = 1.0;
            X[k] += detail::sign_pm(static_cast<long>(omit)) * Hi * rb *
                    det_generic(std::move(m));
        }
    }
    return X;
}

inline std::vector<double> ham_vf(const HamiltonianSystem& sys, std::span<const double> x) {
    return ham_vf_components(sys, x);
}

// Directional derivative of f along the field X: sum_k X_k df/dx^k.
inline double apply_field(std::span<const double> X, const ScalarField& f,
                          std::span<const double> x) {
    Jet2 jf = f.jet_at(x);
    double acc = 0.0;
    for (std::size_t k = 0; k < X.size(); ++k) acc += X[k] * jf.grad(k);
    return acc;
}

// rank of Im(sharpLambda) + Im(sharpBox) at x. Columns are the sharps
// of all basis (n-1)-forms and (n-2)-forms.
inline int characteristic_rank(const VnjStructure& S, std::span<const double> x) {
    const std::size_t n = S.n;
    const double rl = S.rho_lambda(x);
    const double rb = S.rho_box(x);
    std::vector<Eigen::VectorXd> cols;
    // sharpLambda(basis (n-1)-form omitting dx^i): (-1)^(n-i) rl e_i
    for (std::size_t i = 1; i <= n; ++i) {
        Eigen::VectorXd c = Eigen::VectorXd::Zero(static_cast<int>(n));
        c(static_cast<int>(i - 1)) = detail::sign_pm(static_cast<long>(n - i)) * rl;
        cols.push_back(c);
    }
    // sharpBox(dx^{i1} ^ ... ^ dx^{i(n-2)}): component k is
    // Box(dx^{i1},...,dx^{i(n-2)},dx^k), a determinant over the first
    // n-1 coordinates. Enumerate (n-2)-subsets of {1..n}.
    std::vector<std::size_t> subset(n - 2);
    auto emit = [&]() {
        Eigen::VectorXd c = Eigen::VectorXd::Zero(static_cast<int>(n));
        for (std::size_t k = 0; k < n; ++k) {
            SquareMatrix<double> m(n - 1, 0.0);
            bool in_range = true;
            for (std::size_t r = 0; r < n - 2; ++r) {
                if (subset[r] >= n - 1) { in_range = false; break; }
                m(r, subset[r]) = 1.0;
            }
            if (!in_range || k >= n - 1) continue;
            m(n - 2, k) = 1.0;
            c(static_cast<int>(k)) = rb * det_generic(std::move(m));
        }
        cols.push_back(c);
    };
    // iterate sorted (n-2)-subsets
    for (std::size_t i = 0; i < n - 2; ++i) subset[i] = i;
    for (;;) {
        emit();
        // next combination
        std::size_t i = n - 2;
        while (i > 0 && subset[i - 1] == n - (n - 2) + (i - 1)) --i;
        if (i == 0) break;
        ++subset[i - 1];
        for (std::size_t j = i; j < n - 2; ++j) subset[j] = subset[j - 1] + 1;
    }
    Eigen::MatrixXd m(static_cast<int>(n), static_cast<int>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) m.col(static_cast<int>(c)) = cols[c];
    return numeric_rank(m, 1e-10);
}

// (L_X Lambda)(dg1,...,dgn) at x with X = sharpBox(df1 ^ ... ^ df(n-2)),
// expanded as X(Lambda(dg...)) - sum_i Lambda(dg1,...,d(X g_i),...,dgn).
// Restricted to constant rho coefficients; the directional derivative of
// the scalar Lambda(dg...) is a central finite difference (step 1e-5),
// everything else is exact via jets.
inline ScaledResidual lie_derivative_residual(const VnjStructure& S,
                                              std::span<const ScalarField> fs,
                                              std::span<const ScalarField> gs,
                                              std::span<const double> x) {
    const std::size_t n = S.n;
    if (fs.size() != n - 2) throw invalid_input("lie_derivative_residual: need n-2 fields");
    if (gs.size() != n) throw invalid_input("lie_derivative_residual: need n fields");

    // X as jets (value + exact gradient per component)
    auto seeds = seed_jets(x);
    std::vector<Jet2> fjets;
    for (const auto& f : fs) fjets.push_back(f(std::span<const Jet2>(seeds)));
    const Jet2 rb_jet = S.rho_box(std::span<const Jet2>(seeds));
    std::vector<Jet2> Xj;
    for (std::size_t k = 0; k < n; ++k) {
        SquareMatrix<Jet2> m(n - 1, Jet2(0.0, n));
        for (std::size_t i = 0; i < n - 2; ++i)
            for (std::size_t j = 0; j < n - 1; ++j) m(i, j) = jet_partial(fjets[i], j);
        if (k < n - 1) m(n - 2, k) = Jet2(1.0, n);
        Xj.push_back(rb_jet * det_generic(std::move(m)));
    }

    // scalar y -> Lambda(dg1,...,dgn)(y)
    auto lambda_scalar = [&](std::span<const double> y) {
        auto s2 = seed_jets(y);
        SquareMatrix<double> m(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            Jet2 gj = gs[i](std::span<const Jet2>(s2));
            for (std::size_t j = 0; j < n; ++j) m(i, j) = gj.grad(j);
        }
        return S.rho_lambda(y) * det_generic(std::move(m));
    };

    // X(Lambda(dg...)) by coordinate-wise central differences
    const double h = 1e-5;
    double directional = 0.0;
    std::vector<double> y(x.begin(), x.end());
    for (std::size_t k = 0; k < n; ++k) {
        y[k] = x[k] + h;
        const double fp = lambda_scalar(y);
        y[k] = x[k] - h;
        const double fm = lambda_scalar(y);
        y[k] = x[k];
        directional += Xj[k].value() * (fp - fm) / (2.0 * h);
    }

    // Lambda(dg1,...,d(X g_i),...,dgn), all derivatives exact:
    // grad(X g_i) = sum_k grad(X_k) dg_i/dx^k + X_k hess(g_i) row k.
    std::vector<Jet2> gjets;
    for (const auto& g : gs) gjets.push_back(g(std::span<const Jet2>(seeds)));
    const double rl = S.rho_lambda(x);
    double sum_terms = 0.0;
    double scale = std::max(1.0, std::abs(directional));
    for (std::size_t i = 0; i < n; ++i) {
        SquareMatrix<double> m(n, 0.0);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == i) {
                for (std::size_t c = 0; c < n; ++c) {
                    double v = 0.0;
                    for (std::size_t k = 0; k < n; ++k)
                        v += Xj[k].grad(c) * gjets[i].grad(k) +
                             Xj[k].value() * gjets[i].hess(k, c);
                    m(r, c) = v;
                }
            } else {
                for (std::size_t c = 0; c < n; ++c) m(r, c) = gjets[r].grad(c);
            }
        }
        const double term = rl * det_generic(std::move(m));
        sum_terms += term;
        scale = std::max(scale, std::abs(term));
    }
    return {directional - sum_terms, scale};
}

} // namespace nj
