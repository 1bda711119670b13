#pragma once

// Nambu-Poisson and Nambu-Jacobi brackets on flat coordinate leaves:
//   Lambda = rho_lambda d/dx1 ^ ... ^ d/dxn
//   Box    = rho_box    d/dx1 ^ ... ^ d/dx(n-1)
//   {f1,...,fn} = Lambda(df1,...,dfn)
//                 + sum_i (-1)^(i-1) f_i Box(df1,...,omit i,...,dfn)
// plus numerical checkers for the skew-symmetry, Leibniz and
// fundamental-identity axioms. Brackets evaluate over plain reals or
// over jets; the jet route carries the exact gradient of the bracket,
// which the fundamental identity needs for its outer bracket.

#include <cstddef>
#include <span>
#include <vector>

#include "errors.hpp"
#include "field.hpp"
#include "jet.hpp"
#include "linalg.hpp"

namespace nj {

struct VnjStructure {
    std::size_t n = 0;
    ScalarField rho_lambda;
    ScalarField rho_box;

    VnjStructure(std::size_t dim, ScalarField rl, ScalarField rb)
        : n(dim), rho_lambda(std::move(rl)), rho_box(std::move(rb)) {
        if (n < 3) throw invalid_input("VnjStructure: order must be >= 3");
    }

    // rho_lambda = rho_box = 1: the flat model in canonical coordinates.
    static VnjStructure canonical(std::size_t n) {
        return VnjStructure(n, ScalarField::constant(n, 1.0), ScalarField::constant(n, 1.0));
    }
};

struct ScaledResidual {
    double residual = 0.0;
    double scale = 1.0; // max |summand|, floored at 1
    double relative() const { return std::abs(residual) / scale; }
};

namespace detail {

// Jacobian entry d f_i / d x_j as the scalar type of the computation.
inline double jac_entry(const std::vector<Jet2>& jets, std::size_t i, std::size_t j, double) {
    return jets[i].grad(j);
}
inline Jet2 jac_entry(const std::vector<Jet2>& jets, std::size_t i, std::size_t j, const Jet2&) {
    return jet_partial(jets[i], j);
}

// rows: indices into jets; cols: coordinate indices.
template <class T>
T jacobian_det(const std::vector<Jet2>& jets, std::span<const std::size_t> rows,
               std::span<const std::size_t> cols, const T& like) {
    SquareMatrix<T> m(rows.size(), make_scalar_like(0.0, like));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j)
            m(i, j) = jac_entry(jets, rows[i], cols[j], like);
    return det_generic(std::move(m));
}

inline std::vector<std::size_t> iota(std::size_t count) {
    std::vector<std::size_t> v(count);
    for (std::size_t i = 0; i < count; ++i) v[i] = i;
    return v;
}

template <class T>
struct BracketInput; // T = double or Jet2

template <>
struct BracketInput<double> {
    std::span<const double> x;
    double rho(const ScalarField& f) const { return f(x); }
    double value(const std::vector<Jet2>& jets, std::size_t i) const {
        return jets[i].value();
    }
    double like() const { return 0.0; }
};

template <>
struct BracketInput<Jet2> {
    std::span<const double> x;
    std::vector<Jet2> seeds;
    explicit BracketInput(std::span<const double> pt) : x(pt), seeds(seed_jets(pt)) {}
    Jet2 rho(const ScalarField& f) const { return f(std::span<const Jet2>(seeds)); }
    Jet2 value(const std::vector<Jet2>& jets, std::size_t i) const { return jets[i]; }
    Jet2 like() const { return Jet2(0.0, x.size()); }
};

template <class T>
T lambda_impl(const VnjStructure& S, const std::vector<Jet2>& jets, const BracketInput<T>& in) {
    auto rows = iota(S.n), cols = iota(S.n);
    return in.rho(S.rho_lambda) * jacobian_det(jets, rows, cols, in.like());
}

template <class T>
T box_impl(const VnjStructure& S, const std::vector<Jet2>& jets,
           std::span<const std::size_t> rows, const BracketInput<T>& in) {
    auto cols = iota(S.n - 1);
    return in.rho(S.rho_box) * jacobian_det(jets, rows, cols, in.like());
}

template <class T>
T nj_impl(const VnjStructure& S, const std::vector<Jet2>& jets, const BracketInput<T>& in) {
    T acc = lambda_impl(S, jets, in);
    std::vector<std::size_t> rows(S.n - 1);
    for (std::size_t omit = 0; omit < S.n; ++omit) {
        std::size_t r = 0;
        for (std::size_t i = 0; i < S.n; ++i)
            if (i != omit) rows[r++] = i;
        T term = in.value(jets, omit) * box_impl(S, jets, rows, in);
        acc = (omit % 2 == 0) ? acc + term : acc - term; // (-1)^(i-1), 1-based i
    }
    return acc;
}

inline std::vector<Jet2> eval_jets(std::span<const ScalarField> fs,
                                   const std::vector<Jet2>& seeds) {
    std::vector<Jet2> jets;
    jets.reserve(fs.size());
    for (const auto& f : fs) jets.push_back(f(std::span<const Jet2>(seeds)));
    return jets;
}

} // namespace detail

// ---- brackets over plain reals -------------------------------------------

inline double lambda_bracket(const VnjStructure& S, std::span<const ScalarField> fs,
                             std::span<const double> x) {
    if (fs.size() != S.n) throw invalid_input("lambda_bracket: need n fields");
    detail::BracketInput<double> in{x};
    return detail::lambda_impl(S, detail::eval_jets(fs, seed_jets(x)), in);
}

inline double box_bracket(const VnjStructure& S, std::span<const ScalarField> fs,
                          std::span<const double> x) {
    if (fs.size() != S.n - 1) throw invalid_input("box_bracket: need n-1 fields");
    detail::BracketInput<double> in{x};
    return detail::box_impl(S, detail::eval_jets(fs, seed_jets(x)),
                            detail::iota(S.n - 1), in);
}

inline double nj_bracket(const VnjStructure& S, std::span<const ScalarField> fs,
                         std::span<const double> x) {
    if (fs.size() != S.n) throw invalid_input("nj_bracket: need n fields");
    detail::BracketInput<double> in{x};
    return detail::nj_impl(S, detail::eval_jets(fs, seed_jets(x)), in);
}

// ---- brackets over jets (exact value and gradient) -----------------------

inline Jet2 lambda_bracket_jet(const VnjStructure& S, std::span<const ScalarField> fs,
                               std::span<const double> x) {
    if (fs.size() != S.n) throw invalid_input("lambda_bracket: need n fields");
    detail::BracketInput<Jet2> in(x);
    return detail::lambda_impl(S, detail::eval_jets(fs, in.seeds), in);
}

inline Jet2 box_bracket_jet(const VnjStructure& S, std::span<const ScalarField> fs,
                            std::span<const double> x) {
    if (fs.size() != S.n - 1) throw invalid_input("box_bracket: need n-1 fields");
    detail::BracketInput<Jet2> in(x);
    return detail::box_impl(S, detail::eval_jets(fs, in.seeds), detail::iota(S.n - 1), in);
}

inline Jet2 nj_bracket_jet(const VnjStructure& S, std::span<const ScalarField> fs,
                           std::span<const double> x) {
    if (fs.size() != S.n) throw invalid_input("nj_bracket: need n fields");
    detail::BracketInput<Jet2> in(x);
    return detail::nj_impl(S, detail::eval_jets(fs, in.seeds), in);
}

// The bracket of fixed arguments as a ScalarField. When evaluated on
// jets the first-order data is exact; second-order data is truncated
// and must not be read.
inline ScalarField bracket_field(const VnjStructure& S, std::vector<ScalarField> fs) {
    const std::size_t n = S.n;
    return ScalarField::from(
        n,
        [S, fs](std::span<const double> x) {
            return nj_bracket(S, fs, x);
        },
        [S, fs](std::span<const Jet2> ys) {
            std::vector<double> x(ys.size());
            for (std::size_t i = 0; i < ys.size(); ++i) x[i] = ys[i].value();
            Jet2 b = nj_bracket_jet(S, fs, x);
            // chain through the incoming jets
            Jet2 r(b.value(), ys[0].dim());
            const std::size_t m = ys[0].dim();
            for (std::size_t k = 0; k < m; ++k) {
                double g = 0.0;
                for (std::size_t i = 0; i < ys.size(); ++i) g += b.grad(i) * ys[i].grad(k);
                r.set_grad(k, g);
            }
            for (std::size_t k = 0; k < m; ++k)
                for (std::size_t l = k; l < m; ++l) {
                    double h = 0.0;
                    for (std::size_t i = 0; i < ys.size(); ++i)
                        h += b.grad(i) * ys[i].hess(k, l);
                    for (std::size_t i = 0; i < ys.size(); ++i)
                        for (std::size_t j = 0; j < ys.size(); ++j)
                            h += b.hess(i, j) * ys[i].grad(k) * ys[j].grad(l);
                    r.set_hess(k, l, h);
                }
            return r;
        });
}

// ---- axiom residuals -----------------------------------------------------

inline int permutation_sign(std::span<const std::size_t> perm) {
    int sign = 1;
    for (std::size_t i = 0; i < perm.size(); ++i)
        for (std::size_t j = i + 1; j < perm.size(); ++j)
            if (perm[i] > perm[j]) sign = -sign;
    return sign;
}

// {f_1,...,f_n} - sign(perm) {f_perm(1),...,f_perm(n)}
inline ScaledResidual skew_residual(const VnjStructure& S, std::span<const ScalarField> fs,
                                    std::span<const double> x,
                                    std::span<const std::size_t> perm) {
    if (perm.size() != fs.size()) throw invalid_input("skew_residual: permutation arity");
    std::vector<ScalarField> permuted;
    permuted.reserve(fs.size());
    for (std::size_t p : perm) permuted.push_back(fs[p]);
    const double lhs = nj_bracket(S, fs, x);
    const double rhs = permutation_sign(perm) * nj_bracket(S, permuted, x);
    double scale = std::max({1.0, std::abs(lhs), std::abs(rhs)});
    return {lhs - rhs, scale};
}

// {f1 g1, f2,...} - f1 {g1,...} - g1 {f1,...} + f1 g1 {1, f2,...}
inline ScaledResidual leibniz_residual(const VnjStructure& S, const ScalarField& f1,
                                       const ScalarField& g1,
                                       std::span<const ScalarField> rest,
                                       std::span<const double> x) {
    if (rest.size() != S.n - 1) throw invalid_input("leibniz_residual: need n-1 fields");
    auto with_head = [&](const ScalarField& head) {
        std::vector<ScalarField> fs{head};
        fs.insert(fs.end(), rest.begin(), rest.end());
        return fs;
    };
    const double f1x = f1(x), g1x = g1(x);
    const auto prod_args = with_head(f1 * g1);
    const auto g1_args = with_head(g1);
    const auto f1_args = with_head(f1);
    const auto one_args = with_head(ScalarField::constant(S.n, 1.0));
    const double lhs = nj_bracket(S, prod_args, x);
    const double t1 = f1x * nj_bracket(S, g1_args, x);
    const double t2 = g1x * nj_bracket(S, f1_args, x);
    const double t3 = f1x * g1x * nj_bracket(S, one_args, x);
    double scale = std::max({1.0, std::abs(lhs), std::abs(t1), std::abs(t2), std::abs(t3)});
    return {lhs - t1 - t2 + t3, scale};
}

// {H1,...,H(n-1),{g1,...,gn}} - sum_i {g1,...,{H1,...,H(n-1),gi},...,gn}.
// Inner brackets enter as fields whose jet evaluation is exact to first
// order, so the outer Jacobians are exact.
inline ScaledResidual fundamental_identity_residual(const VnjStructure& S,
                                                    std::span<const ScalarField> Hs,
                                                    std::span<const ScalarField> gs,
                                                    std::span<const double> x) {
    if (Hs.size() != S.n - 1) throw invalid_input("fundamental identity: need n-1 Hamiltonians");
    if (gs.size() != S.n) throw invalid_input("fundamental identity: need n fields");
    std::vector<ScalarField> outer(Hs.begin(), Hs.end());
    outer.push_back(bracket_field(S, std::vector<ScalarField>(gs.begin(), gs.end())));
    const double lhs = nj_bracket(S, outer, x);
    double rhs = 0.0;
    double scale = std::max(1.0, std::abs(lhs));
    for (std::size_t i = 0; i < S.n; ++i) {
        std::vector<ScalarField> inner(Hs.begin(), Hs.end());
        inner.push_back(gs[i]);
        std::vector<ScalarField> args(gs.begin(), gs.end());
        args[i] = bracket_field(S, std::move(inner));
        const double term = nj_bracket(S, args, x);
        rhs += term;
        scale = std::max(scale, std::abs(term));
    }
    return {lhs - rhs, scale};
}

} // namespace nj
