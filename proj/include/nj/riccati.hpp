#pragma once

// The four-dimensional coupled Riccati system on
// O = { x in R^4 : x_i != x_j for i != j }: its three Hamiltonians
// H_l (l = 2,3,4), the F-factors of their partial derivatives, the
// empirically-installed conformal rescaling of the flat structure that
// makes bracket dynamics reproduce the componentwise Riccati right-hand
// side, and the associated Hamilton-Jacobi PDE.
//
// Index convention: the system's (H_1, H_2, H_3) are the l = 2, 3, 4
// Hamiltonians, in that order.

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "brackets.hpp"
#include "errors.hpp"
#include "field.hpp"
#include "fields.hpp"
#include "hj.hpp"
#include "jet.hpp"

namespace nj::riccati {

struct RiccatiParams {
    double a0 = 0.0, a1 = 0.0, a2 = 0.0, b1 = 0.0;

    // a1 = 0, a2 = -1, a0 = -b1: the family on which the off-diagonal
    // derivative factorization is exact.
    static RiccatiParams family(double b1) { return {-b1, 0.0, -1.0, b1}; }

    bool on_family(double tol = 1e-12) const {
        return std::abs(a1) < tol && std::abs(a2 + 1.0) < tol && std::abs(a0 + b1) < tol;
    }
};

constexpr double kDomainGap = 1e-9;

inline bool in_domain(std::span<const double> x) {
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = i + 1; j < x.size(); ++j)
            if (std::abs(x[i] - x[j]) <= kDomainGap) return false;
    return true;
}

inline void require_domain(std::span<const double> x) {
    if (x.size() != 4) throw invalid_input("riccati: need a 4-vector");
    if (!in_domain(x))
        throw domain_error("riccati: point has coinciding coordinates (outside O)");
}

// dx^i/dt = a0 + a1 x^i + a2 (x^i)^2, componentwise.
inline std::vector<double> riccati_rhs(std::span<const double> x, const RiccatiParams& p) {
    require_domain(x);
    std::vector<double> v(4);
    for (std::size_t i = 0; i < 4; ++i)
        v[i] = p.a0 + p.a1 * x[i] + p.a2 * x[i] * x[i];
    return v;
}

namespace detail {

template <class T>
T hamiltonian_eval(std::size_t l, std::span<const T> x, double b1) {
    // l in {2,3,4}, coordinates 1-based in the formulas
    T acc = make_scalar_like(0.0, x[0]);
    const T& xl = x[l - 1];
    for (std::size_t k = 1; k <= 4; ++k) {
        if (k == l) continue;
        const T& xk = x[k - 1];
        if (k < l)
            acc = acc + (xk * xl + make_scalar_like(b1, x[0])) / (xk - xl);
        else
            acc = acc + (xl * xk + make_scalar_like(b1, x[0])) / (xl - xk);
    }
    return acc;
}

} // namespace detail

inline double hamiltonian_l(std::size_t l, std::span<const double> x,
                            const RiccatiParams& p) {
    if (l < 2 || l > 4) throw invalid_input("hamiltonian_l: l must be 2, 3 or 4");
    require_domain(x);
    return detail::hamiltonian_eval<double>(l, x, p.b1);
}

inline ScalarField hamiltonian_field(std::size_t l, const RiccatiParams& p) {
    if (l < 2 || l > 4) throw invalid_input("hamiltonian_field: l must be 2, 3 or 4");
    const double b1 = p.b1;
    return ScalarField::from_generic(
        4, [l, b1](const auto& x) { return detail::hamiltonian_eval(l, x, b1); });
}

// The same Hamiltonian as expression-language text (parameter b1).
inline std::string hamiltonian_expr(std::size_t l) {
    if (l < 2 || l > 4) throw invalid_input("hamiltonian_expr: l must be 2, 3 or 4");
    std::string xx, inv;
    for (std::size_t k = 1; k <= 4; ++k) {
        if (k == l) continue;
        std::string num, den;
        if (k < l) {
            num = "x" + std::to_string(k) + "*x" + std::to_string(l);
            den = "(x" + std::to_string(k) + "-x" + std::to_string(l) + ")";
        } else {
            num = "x" + std::to_string(l) + "*x" + std::to_string(k);
            den = "(x" + std::to_string(l) + "-x" + std::to_string(k) + ")";
        }
        if (!xx.empty()) xx += " + ";
        xx += num + "/" + den;
        if (!inv.empty()) inv += " + ";
        inv += "1/" + den;
    }
    return xx + " + b1*(" + inv + ")";
}

// F_lj = 1/(x^l - x^j)^2 off the diagonal;
// F_ll = sum_{k<l} 1/(x^k-x^l)^2 - sum_{k>l} 1/(x^l-x^k)^2.
inline double f_factor(std::size_t l, std::size_t j, std::span<const double> x) {
    if (l < 1 || l > 4 || j < 1 || j > 4) throw invalid_input("f_factor: index out of range");
    require_domain(x);
    if (l != j) {
        const double d = x[l - 1] - x[j - 1];
        return 1.0 / (d * d);
    }
    double acc = 0.0;
    for (std::size_t k = 1; k <= 4; ++k) {
        if (k == l) continue;
        const double d = (k < l) ? x[k - 1] - x[l - 1] : x[l - 1] - x[k - 1];
        acc += (k < l ? 1.0 : -1.0) / (d * d);
    }
    return acc;
}

struct FactorizationReport {
    double measured = 0.0;  // dH_l/dx^j via jets
    double predicted = 0.0; // F_lj (a0 + a1 x^l + a2 (x^l)^2)
    double ratio = 0.0;
};

// Off-diagonal derivative against the factorized prediction. On the
// family a1 = 0, a2 = -1, a0 = -b1 the two agree exactly for j < l and
// differ by an overall sign for j > l (the k > l terms of H_l carry the
// opposite denominator orientation).
inline FactorizationReport verify_factorization(std::size_t l, std::size_t j,
                                                std::span<const double> x,
                                                const RiccatiParams& p) {
    if (l < 2 || l > 4 || j < 1 || j > 4 || j == l)
        throw invalid_input("verify_factorization: need l in {2,3,4}, j != l");
    require_domain(x);
    ScalarField H = hamiltonian_field(l, p);
    Jet2 jet = H.jet_at(x);
    FactorizationReport rep;
    rep.measured = jet.grad(j - 1);
    const double xl = x[l - 1];
    rep.predicted = f_factor(l, j, x) * (p.a0 + p.a1 * xl + p.a2 * xl * xl);
    rep.ratio = (rep.predicted != 0.0) ? rep.measured / rep.predicted : 0.0;
    return rep;
}

// Conformal factor candidate per component:
//   c_i(x) = riccati_rhs_i(x) / {H_1, H_2, H_3, x^i}_canonical.
inline std::array<double, 4> conformal_ratios(const RiccatiParams& p,
                                              std::span<const double> x) {
    require_domain(x);
    auto S = VnjStructure::canonical(4);
    std::vector<ScalarField> Hs{hamiltonian_field(2, p), hamiltonian_field(3, p),
                                hamiltonian_field(4, p)};
    auto rhs = riccati_rhs(x, p);
    std::array<double, 4> c{};
    for (std::size_t i = 0; i < 4; ++i) {
        std::vector<ScalarField> fs = Hs;
        fs.push_back(ScalarField::coordinate(4, i));
        const double br = lambda_bracket(S, fs, x);
        if (std::abs(br) < 1e-12)
            throw domain_error("riccati: degenerate point (bracket component ~ 0)");
        c[i] = rhs[i] / br;
    }
    return c;
}

// max_i |c_i - c_1| / |c_1|
inline double conformal_spread(const RiccatiParams& p, std::span<const double> x) {
    auto c = conformal_ratios(p, x);
    double spread = 0.0;
    for (std::size_t i = 1; i < 4; ++i)
        spread = std::max(spread, std::abs(c[i] - c[0]) / std::abs(c[0]));
    return spread;
}

// The Hamiltonian system with the empirical conformal factor installed:
// rho_lambda = rho_box = c_1(x), so that the Lambda-part of the dynamics
// reproduces the Riccati right-hand side.
inline HamiltonianSystem riccati_system(const RiccatiParams& p) {
    std::vector<ScalarField> Hs{hamiltonian_field(2, p), hamiltonian_field(3, p),
                                hamiltonian_field(4, p)};
    auto canonical = VnjStructure::canonical(4);
    std::vector<ScalarField> first_args = Hs;
    first_args.push_back(ScalarField::coordinate(4, 0));

    const double a0 = p.a0, a1 = p.a1, a2 = p.a2;
    ScalarField rho = ScalarField::from(
        4,
        [canonical, first_args, a0, a1, a2](std::span<const double> x) {
            require_domain(x);
            const double br = lambda_bracket(canonical, first_args, x);
            if (std::abs(br) < 1e-12)
                throw domain_error("riccati: degenerate point (bracket component ~ 0)");
            return (a0 + a1 * x[0] + a2 * x[0] * x[0]) / br;
        },
        [canonical, first_args, a0, a1, a2](std::span<const Jet2> ys) {
            std::vector<double> x(ys.size());
            for (std::size_t i = 0; i < ys.size(); ++i) x[i] = ys[i].value();
            require_domain(x);
            Jet2 br = lambda_bracket_jet(canonical, first_args, x);
            if (std::abs(br.value()) < 1e-12)
                throw domain_error("riccati: degenerate point (bracket component ~ 0)");
            Jet2 num = make_scalar_like(a0, ys[0]) + a1 * ys[0] + a2 * ys[0] * ys[0];
            return num / br;
        });

    return HamiltonianSystem(VnjStructure(4, rho, rho), std::move(Hs));
}

inline QuasiLinearPde riccati_hj(const RiccatiParams& p) {
    return assemble_hj_pde(riccati_system(p));
}

} // namespace nj::riccati
