#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "liepnm/expr.hpp"
#include "liepnm/lie.hpp"

namespace liepnm::charts {

struct XY {
    double x;
    double y;
};

struct RS {
    double r;
    double s;
};

enum class FamilyKind { FirstOrderHomogeneous, SecondOrderExample };

/// Canonical coordinates (r, s) of a built-in generator, plus the envelope
/// s_lower(r) <= s <= s_upper(r) that encodes x in [x0, xT].
///
/// Both built-in charts have a constant envelope width and require
/// ds/dr > lower_slope(r) for x(r, s(r)) to increase with r.
class CanonicalChart {
public:
    /// s = log y, r = y/x. Envelope log r + log x0 <= s <= log r + log xT.
    static CanonicalChart first_order(double x0, double x_T);
    /// r = 1/y - 1/x, s = -1/y. Envelope -1/x0 - r <= s <= -1/xT - r.
    static CanonicalChart second_order(double x0, double x_T);

    FamilyKind kind() const { return kind_; }
    double x0() const { return x0_; }
    double x_T() const { return x_T_; }

    RS forward(XY p) const;
    XY inverse(RS q) const;
    /// ds/dr along a curve through p with slope dy/dx = y1.
    double slope_forward(XY p, double y1) const;

    double s_lower(double r) const;
    double s_upper(double r) const;
    double envelope_width() const;
    /// d s_lower / dr, which is also the strict lower bound on ds/dr.
    double lower_slope(double r) const;
    /// Sign required of dx/dr. +1 for both built-in charts.
    int monotone_sign() const { return 1; }

    /// Generator whose canonical coordinates these are (Xr = 0, Xs = 1).
    lie::PolyVectorField generator() const;
    /// First partials of the forward map at p.
    struct Partials {
        double r_x, r_y, s_x, s_y;
    };
    Partials partials(XY p) const;

private:
    CanonicalChart(FamilyKind kind, double x0, double x_T);
    FamilyKind kind_;
    double x0_;
    double x_T_;
};

/// Reduced right-hand side ds/dr = G(r). Throws ReductionError where G does not exist.
class ReducedIntegrand {
public:
    explicit ReducedIntegrand(std::function<double(double)> g) : g_(std::move(g)) {}
    double operator()(double r) const { return g_(r); }

private:
    std::function<double(double)> g_;
};

/// |denominator| below this is treated as singular.
inline constexpr double kSingularTolerance = 1e-12;

CanonicalChart chart_first_order(double x_T, double x0 = 1.0);
CanonicalChart chart_second_order(double x0, double x_T);

/// G(r) = F(r) / (-r^2 + r F(r)).
ReducedIntegrand reduced_rhs_first_order(const expr::Expression& F);

struct IntegrationConstant {
    double C;
    /// +1 when x/y >= 0, -1 otherwise.
    int branch;
};

/// Closed-form constant of |v| = e^{-C} (2 sqrt(w) + branch + 2/sqrt(w)),
/// v = 1/y - 1/x, w = y' x^2 / y^2.
IntegrationConstant integration_constant_second_order(double x0, double y0, double y0_prime);

/// The relation K(r) = p + 1/p with p = sqrt(u/(1+u)), u = ds/dr, where
/// K(r) = (|r| e^C - branch) / 2.
double second_order_k(const IntegrationConstant& ic, double r);

/// u = G(r) from K: p = (K - sqrt(K^2 - 4))/2 in (0,1), u = p^2/(1-p^2).
double solve_k_relation(double K, double r = 0.0);

ReducedIntegrand reduced_rhs_second_order(const IntegrationConstant& ic);

/// G at each design point; errors carry the offending index.
std::vector<double> information_first_order(const expr::Expression& F, std::span<const double> design);
std::vector<double> information_second_order(const IntegrationConstant& ic, std::span<const double> design);

/// One of the two supported ODE families with its initial data.
struct OdeFamily {
    FamilyKind kind = FamilyKind::FirstOrderHomogeneous;
    std::optional<expr::Expression> F;  // first-order only
    double x0 = 1.0;
    double x_T = 5.0;
    double y0 = 1.0;
    double y0_prime = 0.0;  // second-order only

    static OdeFamily first_order(expr::Expression F, double y0, double x_T, double x0 = 1.0);
    static OdeFamily second_order(double x0, double x_T, double y0, double y0_prime);

    CanonicalChart chart() const;
    ReducedIntegrand reduced_rhs() const;
    lie::OdeSurface surface() const;
    /// Built-in admitted generators (one for first order, X1..X3 for second order).
    std::vector<lie::PolyVectorField> generators() const;
    /// Canonical coordinate r of the initial point.
    double r0() const;
    /// G at design points with index-tagged errors.
    std::vector<double> information(std::span<const double> design) const;
};

}  // namespace liepnm::charts
