#pragma once

// Dense linear algebra helpers. The determinant is hand-rolled and
// generic over the scalar type so Jacobian determinants of jets stay
// differentiable; rank / null-space / subspace questions with a
// singular-value cutoff are delegated to Eigen.

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "errors.hpp"
#include "jet.hpp"

namespace nj {

// Square matrix of differential scalars, row-major.
template <class T>
class SquareMatrix {
public:
    explicit SquareMatrix(std::size_t n, const T& fill) : n_(n), data_(n * n, fill) {}
    std::size_t size() const { return n_; }
    T& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
    const T& operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }

private:
    std::size_t n_;
    std::vector<T> data_;
};

// Determinant via LU with partial pivoting; pivots are chosen by the
// magnitude of the value component. A singular matrix yields 0.
template <class T>
T det_generic(SquareMatrix<T> m) {
    const std::size_t n = m.size();
    if (n == 0) throw invalid_input("det_generic: empty matrix");
    int sign = 1;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        double best = std::abs(scalar_value(m(col, col)));
        for (std::size_t r = col + 1; r < n; ++r) {
            double mag = std::abs(scalar_value(m(r, col)));
            if (mag > best) {
                best = mag;
                piv = r;
            }
        }
        if (best == 0.0) return make_scalar_like(0.0, m(0, 0));
        if (piv != col) {
            for (std::size_t j = 0; j < n; ++j) std::swap(m(piv, j), m(col, j));
            sign = -sign;
        }
        for (std::size_t r = col + 1; r < n; ++r) {
            T factor = m(r, col) / m(col, col);
            for (std::size_t j = col; j < n; ++j)
                m(r, j) = m(r, j) - factor * m(col, j);
        }
    }
    T det = m(0, 0);
    for (std::size_t i = 1; i < n; ++i) det = det * m(i, i);
    return sign < 0 ? -det : det;
}

// ---- Eigen-backed subspace utilities -------------------------------------

// Numerical rank: singular values below tol_rel * sigma_max are discarded.
inline int numeric_rank(const Eigen::MatrixXd& m, double tol_rel = 1e-10) {
    if (m.size() == 0) return 0;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    const auto& s = svd.singularValues();
    if (s.size() == 0 || s(0) == 0.0) return 0;
    int r = 0;
    for (int i = 0; i < s.size(); ++i)
        if (s(i) > tol_rel * s(0)) ++r;
    return r;
}

// Orthonormal basis of the null space of m (columns of the result).
inline Eigen::MatrixXd null_space(const Eigen::MatrixXd& m, double tol_rel = 1e-10) {
    if (m.rows() == 0 || m.cols() == 0)
        return Eigen::MatrixXd::Identity(m.cols(), m.cols());
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    const double cutoff = (s.size() && s(0) > 0.0) ? tol_rel * s(0) : 0.0;
    int rank = 0;
    for (int i = 0; i < s.size(); ++i)
        if (s(i) > cutoff && cutoff > 0.0) ++rank;
    return svd.matrixV().rightCols(m.cols() - rank);
}

// Columns of a spanning the same space? Mutual containment by ranks.
inline bool same_span(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                      double tol_rel = 1e-10) {
    const int ra = numeric_rank(a, tol_rel);
    const int rb = numeric_rank(b, tol_rel);
    if (ra != rb) return false;
    if (ra == 0) return true;
    Eigen::MatrixXd joint(a.rows(), a.cols() + b.cols());
    joint << a, b;
    return numeric_rank(joint, tol_rel) == ra;
}

// Basis (columns) of span(a) ∩ span(b): if a c1 = b c2 then (c1; c2) is
// in the null space of [a | -b].
inline Eigen::MatrixXd span_intersection(const Eigen::MatrixXd& a,
                                         const Eigen::MatrixXd& b,
                                         double tol_rel = 1e-10) {
    if (a.cols() == 0 || b.cols() == 0) return Eigen::MatrixXd(a.rows(), 0);
    Eigen::MatrixXd joint(a.rows(), a.cols() + b.cols());
    joint << a, -b;
    Eigen::MatrixXd ns = null_space(joint, tol_rel);
    Eigen::MatrixXd inter = a * ns.topRows(a.cols());
    // prune numerically-zero columns, reduce to an independent set
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(inter, Eigen::ComputeFullU);
    const auto& s = svd.singularValues();
    int r = 0;
    for (int i = 0; i < s.size(); ++i)
        if (s.size() && s(0) > 0.0 && s(i) > tol_rel * s(0)) ++r;
    return svd.matrixU().leftCols(r);
}

} // namespace nj
