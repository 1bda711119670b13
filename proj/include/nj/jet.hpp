#pragma once

// Second-order forward-mode jets: a scalar value carried together with
// its exact gradient and Hessian in n variables. Arithmetic propagates
// derivatives by the truncated Taylor rules, so any composed expression
// evaluated on seeds yields exact first and second partials (up to
// rounding). The value component performs the same double operations in
// the same order as a plain-real evaluation would.

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"

namespace nj {

class Jet2 {
public:
    Jet2() = default;

    // Constant jet: value c, zero derivatives.
    Jet2(double c, std::size_t n)
        : val_(c), n_(n), grad_(n, 0.0), hess_(n * n, 0.0) {}

    double value() const { return val_; }
    std::size_t dim() const { return n_; }

    double grad(std::size_t i) const { return grad_[i]; }
    double hess(std::size_t i, std::size_t j) const { return hess_[i * n_ + j]; }

    std::span<const double> grad() const { return grad_; }

    void set_grad(std::size_t i, double v) { grad_[i] = v; }
    // Writes both triangles so the matrix stays symmetric.
    void set_hess(std::size_t i, std::size_t j, double v) {
        hess_[i * n_ + j] = v;
        hess_[j * n_ + i] = v;
    }

    friend Jet2 operator+(const Jet2& a, const Jet2& b);
    friend Jet2 operator-(const Jet2& a, const Jet2& b);
    friend Jet2 operator*(const Jet2& a, const Jet2& b);
    friend Jet2 operator/(const Jet2& a, const Jet2& b);
    friend Jet2 operator-(const Jet2& a);

    friend Jet2 sin(const Jet2& u);
    friend Jet2 cos(const Jet2& u);
    friend Jet2 exp(const Jet2& u);
    friend Jet2 log(const Jet2& u);
    friend Jet2 sqrt(const Jet2& u);
    friend Jet2 pow_int(const Jet2& u, long k);

    friend Jet2 jet_partial(const Jet2& f, std::size_t j);

private:
    static void require_same_dim(const Jet2& a, const Jet2& b, const char* op) {
        if (a.n_ != b.n_)
            throw invalid_input(std::string(op) + ": jets of different dimension");
    }

    void check_finite(const char* op) const {
        if (!std::isfinite(val_))
            throw domain_error(std::string(op) + ": non-finite value");
        for (double g : grad_)
            if (!std::isfinite(g))
                throw domain_error(std::string(op) + ": non-finite gradient");
        for (double h : hess_)
            if (!std::isfinite(h))
                throw domain_error(std::string(op) + ": non-finite Hessian");
    }

    // f(u) with f' = d1, f'' = d2 at u.value().
    static Jet2 compose1(const Jet2& u, double f, double d1, double d2, const char* op) {
        Jet2 r(f, u.n_);
        const std::size_t n = u.n_;
        for (std::size_t i = 0; i < n; ++i)
            r.grad_[i] = d1 * u.grad_[i];
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                r.hess_[i * n + j] = d1 * u.hess_[i * n + j] + d2 * u.grad_[i] * u.grad_[j];
        r.check_finite(op);
        return r;
    }

    double val_ = 0.0;
    std::size_t n_ = 0;
    std::vector<double> grad_;
    std::vector<double> hess_; // row-major n*n, symmetric
};

inline Jet2 operator+(const Jet2& a, const Jet2& b) {
    Jet2::require_same_dim(a, b, "add");
    Jet2 r(a.val_ + b.val_, a.n_);
    const std::size_t n = a.n_;
    for (std::size_t i = 0; i < n; ++i) r.grad_[i] = a.grad_[i] + b.grad_[i];
    for (std::size_t i = 0; i < n * n; ++i) r.hess_[i] = a.hess_[i] + b.hess_[i];
    r.check_finite("add");
    return r;
}

inline Jet2 operator-(const Jet2& a, const Jet2& b) {
    Jet2::require_same_dim(a, b, "sub");
    Jet2 r(a.val_ - b.val_, a.n_);
    const std::size_t n = a.n_;
    for (std::size_t i = 0; i < n; ++i) r.grad_[i] = a.grad_[i] - b.grad_[i];
    for (std::size_t i = 0; i < n * n; ++i) r.hess_[i] = a.hess_[i] - b.hess_[i];
    r.check_finite("sub");
    return r;
}

inline Jet2 operator*(const Jet2& a, const Jet2& b) {
    Jet2::require_same_dim(a, b, "mul");
    Jet2 r(a.val_ * b.val_, a.n_);
    const std::size_t n = a.n_;
    for (std::size_t i = 0; i < n; ++i)
        r.grad_[i] = a.val_ * b.grad_[i] + b.val_ * a.grad_[i];
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            r.hess_[i * n + j] = a.val_ * b.hess_[i * n + j] + b.val_ * a.hess_[i * n + j]
                               + a.grad_[i] * b.grad_[j] + b.grad_[i] * a.grad_[j];
    r.check_finite("mul");
    return r;
}

inline Jet2 operator/(const Jet2& a, const Jet2& b) {
    Jet2::require_same_dim(a, b, "div");
    if (std::abs(b.val_) < 1e-300)
        throw domain_error("div: denominator magnitude below 1e-300");
    Jet2 r(a.val_ / b.val_, a.n_);
    const std::size_t n = a.n_;
    const double w = b.val_;
    const double q = r.val_; // a/b
    // (a/b)' = (a' - q b') / b ; (a/b)'' = (a'' - q b'' - q' b' - b' q') / b
    std::vector<double> qg(n);
    for (std::size_t i = 0; i < n; ++i) {
        qg[i] = (a.grad_[i] - q * b.grad_[i]) / w;
        r.grad_[i] = qg[i];
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            r.hess_[i * n + j] = (a.hess_[i * n + j] - q * b.hess_[i * n + j]
                                  - qg[i] * b.grad_[j] - qg[j] * b.grad_[i]) / w;
    r.check_finite("div");
    return r;
}

inline Jet2 operator-(const Jet2& a) {
    Jet2 r(-a.val_, a.n_);
    const std::size_t n = a.n_;
    for (std::size_t i = 0; i < n; ++i) r.grad_[i] = -a.grad_[i];
    for (std::size_t i = 0; i < n * n; ++i) r.hess_[i] = -a.hess_[i];
    return r;
}

inline Jet2 operator+(const Jet2& a, double c) { return a + Jet2(c, a.dim()); }
inline Jet2 operator+(double c, const Jet2& a) { return Jet2(c, a.dim()) + a; }
inline Jet2 operator-(const Jet2& a, double c) { return a - Jet2(c, a.dim()); }
inline Jet2 operator-(double c, const Jet2& a) { return Jet2(c, a.dim()) - a; }
inline Jet2 operator*(const Jet2& a, double c) { return a * Jet2(c, a.dim()); }
inline Jet2 operator*(double c, const Jet2& a) { return Jet2(c, a.dim()) * a; }
inline Jet2 operator/(const Jet2& a, double c) { return a / Jet2(c, a.dim()); }
inline Jet2 operator/(double c, const Jet2& a) { return Jet2(c, a.dim()) / a; }

inline Jet2 sin(const Jet2& u) {
    const double v = u.value();
    return Jet2::compose1(u, std::sin(v), std::cos(v), -std::sin(v), "sin");
}

inline Jet2 cos(const Jet2& u) {
    const double v = u.value();
    return Jet2::compose1(u, std::cos(v), -std::sin(v), -std::cos(v), "cos");
}

inline Jet2 exp(const Jet2& u) {
    const double e = std::exp(u.value());
    return Jet2::compose1(u, e, e, e, "exp");
}

inline Jet2 log(const Jet2& u) {
    const double v = u.value();
    if (!(v > 0.0)) throw domain_error("log: nonpositive argument");
    return Jet2::compose1(u, std::log(v), 1.0 / v, -1.0 / (v * v), "log");
}

inline Jet2 sqrt(const Jet2& u) {
    const double v = u.value();
    if (!(v > 0.0)) throw domain_error("sqrt: nonpositive argument");
    const double s = std::sqrt(v);
    return Jet2::compose1(u, s, 0.5 / s, -0.25 / (s * v), "sqrt");
}

// Integer power of a plain real by square-and-multiply. The jet version
// routes its value through the same function so the two evaluation
// paths stay bit-identical.
inline double pow_int(double x, long k) {
    if (k < 0) {
        if (x == 0.0) throw domain_error("pow: zero base with negative exponent");
        return 1.0 / pow_int(x, -k);
    }
    double r = 1.0, b = x;
    unsigned long e = static_cast<unsigned long>(k);
    while (e) {
        if (e & 1UL) r *= b;
        b *= b;
        e >>= 1;
    }
    return r;
}

inline Jet2 pow_int(const Jet2& u, long k) {
    const double v = u.value();
    if (k < 0 && v == 0.0) throw domain_error("pow: zero base with negative exponent");
    const double f = pow_int(v, k);
    const double d1 = (k == 0) ? 0.0 : static_cast<double>(k) * pow_int(v, k - 1);
    const double d2 = (k == 0 || k == 1)
                          ? 0.0
                          : static_cast<double>(k) * static_cast<double>(k - 1) * pow_int(v, k - 2);
    return Jet2::compose1(u, f, d1, d2, "pow");
}

inline std::vector<Jet2> seed_jets(std::span<const double> point) {
    if (point.empty()) throw invalid_input("seed_jets: empty point");
    for (double c : point)
        if (!std::isfinite(c)) throw invalid_input("seed_jets: non-finite coordinate");
    const std::size_t n = point.size();
    std::vector<Jet2> seeds;
    seeds.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        Jet2 j(point[i], n);
        j.set_grad(i, 1.0);
        seeds.push_back(std::move(j));
    }
    return seeds;
}

// The partial derivative of f along coordinate j, reinterpreted as a jet:
// value = grad[j], gradient = Hessian row j. The Hessian of the result
// would need third derivatives and is set to zero; callers must read at
// most first-order data from it.
inline Jet2 jet_partial(const Jet2& f, std::size_t j) {
    Jet2 r(f.grad_[j], f.n_);
    for (std::size_t i = 0; i < f.n_; ++i)
        r.grad_[i] = f.hess_[j * f.n_ + i];
    return r;
}

// Scalar helpers shared by code generic over double / Jet2.
inline double scalar_value(double x) { return x; }
inline double scalar_value(const Jet2& x) { return x.value(); }

inline double make_scalar_like(double c, double) { return c; }
inline Jet2 make_scalar_like(double c, const Jet2& like) { return Jet2(c, like.dim()); }

} // namespace nj
