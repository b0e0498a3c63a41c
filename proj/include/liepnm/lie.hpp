#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "liepnm/expr.hpp"
#include "liepnm/poly.hpp"

namespace liepnm::lie {

/// Infinitesimal generator X = xi(x,y) d/dx + eta(x,y) d/dy.
struct PolyVectorField {
    BivariatePoly xi;
    BivariatePoly eta;

    bool is_zero() const { return xi.is_zero() && eta.is_zero(); }

    PolyVectorField& operator+=(const PolyVectorField& o) {
        xi += o.xi;
        eta += o.eta;
        return *this;
    }
    PolyVectorField& operator-=(const PolyVectorField& o) {
        xi -= o.xi;
        eta -= o.eta;
        return *this;
    }
    PolyVectorField& operator*=(double s) {
        xi *= s;
        eta *= s;
        return *this;
    }
    friend PolyVectorField operator+(PolyVectorField a, const PolyVectorField& b) { return a += b; }
    friend PolyVectorField operator-(PolyVectorField a, const PolyVectorField& b) { return a -= b; }
    friend PolyVectorField operator*(double s, PolyVectorField a) { return a *= s; }
    friend PolyVectorField operator-(PolyVectorField a) { return a *= -1.0; }
    friend bool operator==(const PolyVectorField&, const PolyVectorField&) = default;

    std::string to_string() const;
};

/// xi * dp/dx + eta * dp/dy.
BivariatePoly apply(const PolyVectorField& v, const BivariatePoly& p);

/// [V1, V2] = (V1 xi2 - V2 xi1) d/dx + (V1 eta2 - V2 eta1) d/dy.
PolyVectorField commutator(const PolyVectorField& v1, const PolyVectorField& v2);

/// Coefficients (a, b) with w = a*v1 + b*v2, or nullopt if w is outside the span.
/// Throws Error when v1, v2 are linearly dependent.
std::optional<std::pair<double, double>> span_coefficients(const PolyVectorField& w, const PolyVectorField& v1,
                                                           const PolyVectorField& v2);

/// Coefficients c with w = sum_k c_k basis_k, or nullopt if w is outside the span.
/// Throws Error when the basis is linearly dependent.
std::optional<std::vector<double>> span_coefficients(const PolyVectorField& w, std::span<const PolyVectorField> basis);

/// Human-readable combination such as "-X1" or "2*X1 - X3"; "0" for zero.
std::string format_combination(std::span<const double> coefficients, const std::string& symbol = "X");

/// A two-dimensional algebra ordered so that [normal, complement] = lambda * normal.
struct SolvablePair {
    PolyVectorField normal;
    PolyVectorField complement;
    double lambda;
};

/// Reorder/recombine two generators into solvable order. Throws Error when the
/// bracket leaves span{v1, v2}.
SolvablePair solvable_2d_order(const PolyVectorField& v1, const PolyVectorField& v2);

/// Point of the jet space: (x, y, y1, ..., ym).
struct Jet {
    double x = 0.0;
    double y = 0.0;
    std::vector<double> derivs;

    std::vector<double> values() const;
};

/// Symbolic k-th extended infinitesimal as a polynomial in (x, y, y1, ..., yk),
/// built from eta^(k) = D eta^(k-1) - y_k D xi with D the total x-derivative.
JetPoly extended_infinitesimal_poly(const PolyVectorField& v, int k);

/// Numeric eta^(k) at a jet. Throws if the jet carries fewer than k derivatives.
double extended_infinitesimal(const PolyVectorField& v, int k, const Jet& jet);

/// ODE F(x, y, y1, ..., ym) = 0 given through analytic callables.
struct OdeSurface {
    int order = 1;
    /// y_m solved from the ODE given (x, y, y1..y_{m-1}).
    std::function<double(const Jet&)> solve_top;
    /// F at a full jet.
    std::function<double(const Jet&)> value;
    /// [F_x, F_y, F_y1, ..., F_ym] at a full jet.
    std::function<std::vector<double>(const Jet&)> gradient;
};

/// dy/dx = F(y/x).
OdeSurface first_order_homogeneous_surface(expr::Expression F);

/// (x - y) y'' + 2 y'(y' + 1) + (y')^{3/2} = 0, written as y'' + Q/(x - y) = 0.
OdeSurface second_order_example_surface();

/// Max over jets of |X^(m) F| with the top derivative taken from the ODE.
/// Jets may carry m-1 derivatives (top substituted) or m (checked on-surface to 1e-9).
double symmetry_residual(const OdeSurface& ode, const PolyVectorField& v, std::span<const Jet> jets);

}  // namespace liepnm::lie
