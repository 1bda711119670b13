#pragma once

// Pointwise exterior algebra: k-forms with coefficients over sorted
// k-subsets in lexicographic order, interior products, annihilators of
// a subspace, the sharp map of the top multivector, and the
// j-Lagrangian test.
//
// Interior-product convention:
//   i_v (dx^{i1} ^ ... ^ dx^{ik}) = sum_m (-1)^(m-1) v^{i_m} (omit i_m).
// Iterated contraction applies the leftmost vector first.

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "brackets.hpp"
#include "errors.hpp"

namespace nj {

namespace detail {

// Sorted k-subsets of {0..n-1} in lexicographic order.
inline std::vector<std::vector<std::size_t>> k_subsets(std::size_t n, std::size_t k) {
    std::vector<std::vector<std::size_t>> out;
    if (k > n) return out;
    std::vector<std::size_t> cur(k);
    for (std::size_t i = 0; i < k; ++i) cur[i] = i;
    for (;;) {
        out.push_back(cur);
        if (k == 0) break;
        std::size_t i = k;
        while (i > 0 && cur[i - 1] == n - k + (i - 1)) --i;
        if (i == 0) break;
        ++cur[i - 1];
        for (std::size_t j = i; j < k; ++j) cur[j] = cur[j - 1] + 1;
    }
    return out;
}

inline std::uint64_t subset_mask(const std::vector<std::size_t>& s) {
    std::uint64_t m = 0;
    for (std::size_t i : s) m |= (1ULL << i);
    return m;
}

} // namespace detail

class KForm {
public:
    KForm(std::size_t n, std::size_t degree)
        : n_(n), k_(degree), subsets_(detail::k_subsets(n, degree)),
          coeffs_(subsets_.size(), 0.0) {
        if (degree > n) throw invalid_input("KForm: degree exceeds dimension");
        for (std::size_t i = 0; i < subsets_.size(); ++i)
            index_[detail::subset_mask(subsets_[i])] = i;
    }

    std::size_t dim() const { return n_; }
    std::size_t degree() const { return k_; }
    std::size_t basis_count() const { return coeffs_.size(); }
    const std::vector<std::size_t>& subset(std::size_t i) const { return subsets_[i]; }

    double coeff(std::size_t i) const { return coeffs_[i]; }
    double& coeff(std::size_t i) { return coeffs_[i]; }

    // coefficient by subset content (sorted 0-based indices)
    double coeff_of(const std::vector<std::size_t>& s) const {
        return coeffs_[index_.at(detail::subset_mask(s))];
    }
    void set_coeff(const std::vector<std::size_t>& s, double v) {
        coeffs_[index_.at(detail::subset_mask(s))] = v;
    }

    std::size_t index_of(std::uint64_t mask) const { return index_.at(mask); }

    double max_abs() const {
        double m = 0.0;
        for (double c : coeffs_) m = std::max(m, std::abs(c));
        return m;
    }

private:
    std::size_t n_, k_;
    std::vector<std::vector<std::size_t>> subsets_;
    std::vector<double> coeffs_;
    std::map<std::uint64_t, std::size_t> index_;
};

struct Subspace {
    std::size_t n = 0;
    std::vector<std::vector<double>> basis; // each of length n

    Subspace(std::size_t dim, std::vector<std::vector<double>> b)
        : n(dim), basis(std::move(b)) {
        Eigen::MatrixXd m(static_cast<int>(n), static_cast<int>(basis.size()));
        for (std::size_t c = 0; c < basis.size(); ++c) {
            if (basis[c].size() != n) throw invalid_input("Subspace: vector length mismatch");
            for (std::size_t r = 0; r < n; ++r)
                m(static_cast<int>(r), static_cast<int>(c)) = basis[c][r];
        }
        if (numeric_rank(m, 1e-10) != static_cast<int>(basis.size()))
            throw invalid_input("Subspace: basis vectors are not independent");
    }

    Eigen::MatrixXd matrix() const {
        Eigen::MatrixXd m(static_cast<int>(n), static_cast<int>(basis.size()));
        for (std::size_t c = 0; c < basis.size(); ++c)
            for (std::size_t r = 0; r < n; ++r)
                m(static_cast<int>(r), static_cast<int>(c)) = basis[c][r];
        return m;
    }
};

// Single interior product i_v form.
inline KForm contract_one(std::span<const double> v, const KForm& form) {
    if (v.size() != form.dim()) throw invalid_input("contract: vector length mismatch");
    if (form.degree() == 0) throw invalid_input("contract: degree 0 form");
    KForm out(form.dim(), form.degree() - 1);
    for (std::size_t idx = 0; idx < form.basis_count(); ++idx) {
        const double c = form.coeff(idx);
        if (c == 0.0) continue;
        const auto& s = form.subset(idx);
        for (std::size_t m = 0; m < s.size(); ++m) {
            std::vector<std::size_t> reduced;
            reduced.reserve(s.size() - 1);
            for (std::size_t t = 0; t < s.size(); ++t)
                if (t != m) reduced.push_back(s[t]);
            const double sign = (m % 2 == 0) ? 1.0 : -1.0;
            out.set_coeff(reduced, out.coeff_of(reduced) + sign * v[s[m]] * c);
        }
    }
    return out;
}

// Iterated interior product by v1 ^ ... ^ vj, leftmost vector applied first.
inline KForm contract(std::span<const std::vector<double>> vectors, const KForm& form) {
    if (vectors.size() > form.degree())
        throw invalid_input("contract: more vectors than form degree");
    KForm cur = form;
    for (const auto& v : vectors) cur = contract_one(v, cur);
    return cur;
}

// Basis of Ann^j(V) inside the (n-1)-forms: all alpha with
// i_{v1 ^ ... ^ vj} alpha = 0 for every j-tuple from V.
inline std::vector<KForm> annihilator(const Subspace& V, std::size_t j,
                                      double tol_rel = 1e-10) {
    const std::size_t n = V.n;
    if (j < 1 || j > n - 1) throw invalid_input("annihilator: j out of range");
    const KForm model(n, n - 1);
    const std::size_t dim_forms = model.basis_count(); // C(n, n-1) = n
    const std::size_t out_deg = n - 1 - j;
    const std::size_t out_count = detail::k_subsets(n, out_deg).size();

    // Alternation makes j-tuples with repeats vanish identically, so
    // j-combinations of the basis suffice. If dim V < j there are no
    // j-tuples of independent vectors but repeats still vanish, so every
    // form annihilates; use combinations of whatever basis there is.
    auto combos = detail::k_subsets(V.basis.size(), std::min<std::size_t>(j, V.basis.size()));
    if (V.basis.size() < j) combos.clear(); // no constraints

    std::vector<Eigen::VectorXd> rows;
    for (const auto& combo : combos) {
        std::vector<std::vector<double>> vecs;
        for (std::size_t bi : combo) vecs.push_back(V.basis[bi]);
        // columns: contraction of each basis (n-1)-form
        Eigen::MatrixXd block(static_cast<int>(out_count), static_cast<int>(dim_forms));
        for (std::size_t col = 0; col < dim_forms; ++col) {
            KForm unit(n, n - 1);
            unit.coeff(col) = 1.0;
            KForm res = contract(vecs, unit);
            for (std::size_t r = 0; r < out_count; ++r)
                block(static_cast<int>(r), static_cast<int>(col)) = res.coeff(r);
        }
        for (std::size_t r = 0; r < out_count; ++r)
            rows.push_back(block.row(static_cast<int>(r)));
    }

    Eigen::MatrixXd constraints(static_cast<int>(rows.size()), static_cast<int>(dim_forms));
    for (std::size_t r = 0; r < rows.size(); ++r)
        constraints.row(static_cast<int>(r)) = rows[r];
    Eigen::MatrixXd ns = rows.empty()
                             ? Eigen::MatrixXd::Identity(static_cast<int>(dim_forms),
                                                         static_cast<int>(dim_forms))
                             : null_space(constraints, tol_rel);

    std::vector<KForm> out;
    for (int c = 0; c < ns.cols(); ++c) {
        KForm f(n, n - 1);
        for (std::size_t r = 0; r < dim_forms; ++r) f.coeff(r) = ns(static_cast<int>(r), c);
        out.push_back(std::move(f));
    }
    return out;
}

// sharpLambda of an (n-1)-form: component i is
// (-1)^(n-i) rho_lambda(x) * (coefficient of the subset omitting i).
inline std::vector<double> sharp_lambda(const VnjStructure& S, const KForm& form,
                                        std::span<const double> x) {
    const std::size_t n = S.n;
    if (form.degree() != n - 1 || form.dim() != n)
        throw invalid_input("sharp_lambda: need an (n-1)-form in dimension n");
    const double rl = S.rho_lambda(x);
    std::vector<double> v(n, 0.0);
    for (std::size_t i = 1; i <= n; ++i) {
        std::vector<std::size_t> omit;
        for (std::size_t t = 0; t < n; ++t)
            if (t != i - 1) omit.push_back(t);
        const double sign = ((n - i) % 2 == 0) ? 1.0 : -1.0;
        v[i - 1] = sign * rl * form.coeff_of(omit);
    }
    return v;
}

// sharpLambda Ann^j(T_xN) == sharpLambda Lambda^(n-1)(T*_xM) ∩ T_xN ?
inline bool is_j_lagrangian(const VnjStructure& S, const Subspace& V, std::size_t j,
                            std::span<const double> x, double tol_rel = 1e-10) {
    const std::size_t n = S.n;
    if (V.n != n) throw invalid_input("is_j_lagrangian: dimension mismatch");

    auto ann = annihilator(V, j, tol_rel);
    Eigen::MatrixXd lhs(static_cast<int>(n), static_cast<int>(ann.size()));
    for (std::size_t c = 0; c < ann.size(); ++c) {
        auto v = sharp_lambda(S, ann[c], x);
        for (std::size_t r = 0; r < n; ++r)
            lhs(static_cast<int>(r), static_cast<int>(c)) = v[r];
    }

    // image of sharpLambda on all basis (n-1)-forms
    Eigen::MatrixXd image(static_cast<int>(n), static_cast<int>(n));
    const KForm model(n, n - 1);
    for (std::size_t c = 0; c < n; ++c) {
        KForm unit(n, n - 1);
        unit.coeff(c) = 1.0;
        auto v = sharp_lambda(S, unit, x);
        for (std::size_t r = 0; r < n; ++r)
            image(static_cast<int>(r), static_cast<int>(c)) = v[r];
    }
    Eigen::MatrixXd rhs = span_intersection(image, V.matrix(), tol_rel);
    return same_span(lhs, rhs, tol_rel);
}

} // namespace nj
