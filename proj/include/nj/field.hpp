#pragma once

// ScalarField: an evaluable real function of n coordinates, callable
// over plain reals and over jets. Built from a parsed expression or
// from C++ callables (one templated lambda covers both scalar types).

#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "expr.hpp"
#include "jet.hpp"

namespace nj {

class ScalarField {
public:
    using RealFn = std::function<double(std::span<const double>)>;
    using JetFn = std::function<Jet2(std::span<const Jet2>)>;

    ScalarField() = default;

    ScalarField(ExprPtr e, std::size_t n, ParamEnv env = {})
        : n_(n),
          real_([e, env](std::span<const double> x) { return eval<double>(*e, x, env); }),
          jet_([e, env](std::span<const Jet2> x) { return eval<Jet2>(*e, x, env); }) {}

    static ScalarField from(std::size_t n, RealFn fr, JetFn fj) {
        ScalarField f;
        f.n_ = n;
        f.real_ = std::move(fr);
        f.jet_ = std::move(fj);
        return f;
    }

    // One templated callable instantiated for both scalar types.
    template <class F>
    static ScalarField from_generic(std::size_t n, F f) {
        return from(
            n, [f](std::span<const double> x) -> double { return f(x); },
            [f](std::span<const Jet2> x) -> Jet2 { return f(x); });
    }

    static ScalarField constant(std::size_t n, double c) {
        return from(
            n, [c](std::span<const double>) { return c; },
            [c](std::span<const Jet2> x) { return Jet2(c, x[0].dim()); });
    }

    static ScalarField coordinate(std::size_t n, std::size_t i) {
        return from(
            n, [i](std::span<const double> x) { return x[i]; },
            [i](std::span<const Jet2> x) { return x[i]; });
    }

    std::size_t dim() const { return n_; }
    bool valid() const { return static_cast<bool>(real_); }

    double operator()(std::span<const double> x) const { return real_(x); }
    Jet2 operator()(std::span<const Jet2> x) const { return jet_(x); }

    // Value, gradient and Hessian at a point: evaluate on seeds.
    Jet2 jet_at(std::span<const double> x) const { return jet_(seed_jets(x)); }

    friend ScalarField operator*(const ScalarField& a, const ScalarField& b) {
        return from(
            a.n_,
            [a, b](std::span<const double> x) { return a(x) * b(x); },
            [a, b](std::span<const Jet2> x) { return a(x) * b(x); });
    }

    friend ScalarField operator+(const ScalarField& a, const ScalarField& b) {
        return from(
            a.n_,
            [a, b](std::span<const double> x) { return a(x) + b(x); },
            [a, b](std::span<const Jet2> x) { return a(x) + b(x); });
    }

    friend ScalarField operator*(double c, const ScalarField& a) {
        return from(
            a.n_,
            [c, a](std::span<const double> x) { return c * a(x); },
            [c, a](std::span<const Jet2> x) { return c * a(x); });
    }

private:
    std::size_t n_ = 0;
    RealFn real_;
    JetFn jet_;
};

} // namespace nj
