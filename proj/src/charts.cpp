#include "liepnm/charts.hpp"

#include <cmath>
#include <string>

#include "liepnm/error.hpp"

namespace liepnm::charts {

CanonicalChart::CanonicalChart(FamilyKind kind, double x0, double x_T) : kind_(kind), x0_(x0), x_T_(x_T) {
    if (!(x_T > x0)) throw ConfigError("chart needs x_T > x0");
    if (kind == FamilyKind::FirstOrderHomogeneous && !(x0 > 0.0))
        throw ConfigError("first-order chart needs x0 > 0");
    if (kind == FamilyKind::SecondOrderExample && !(x0 > 0.0))
        throw ConfigError("second-order chart needs 0 < x0 < x_T");
}

CanonicalChart CanonicalChart::first_order(double x0, double x_T) {
    return CanonicalChart(FamilyKind::FirstOrderHomogeneous, x0, x_T);
}

CanonicalChart CanonicalChart::second_order(double x0, double x_T) {
    return CanonicalChart(FamilyKind::SecondOrderExample, x0, x_T);
}

RS CanonicalChart::forward(XY p) const {
    if (kind_ == FamilyKind::FirstOrderHomogeneous) {
        if (!(p.y > 0.0)) throw DomainError("first-order chart needs y > 0");
        if (!(p.x > 0.0)) throw DomainError("first-order chart needs x > 0");
        return {p.y / p.x, std::log(p.y)};
    }
    if (p.x == 0.0 || p.y == 0.0) throw DomainError("second-order chart is singular at x = 0 or y = 0");
    return {1.0 / p.y - 1.0 / p.x, -1.0 / p.y};
}

XY CanonicalChart::inverse(RS q) const {
    if (kind_ == FamilyKind::FirstOrderHomogeneous) {
        if (!(q.r > 0.0)) throw DomainError("first-order chart needs r > 0");
        const double y = std::exp(q.s);
        return {y / q.r, y};
    }
    if (q.s == 0.0 || q.s + q.r == 0.0) throw DomainError("second-order chart is singular at s = 0 or s + r = 0");
    return {-1.0 / (q.s + q.r), -1.0 / q.s};
}

CanonicalChart::Partials CanonicalChart::partials(XY p) const {
    if (kind_ == FamilyKind::FirstOrderHomogeneous) {
        return {-p.y / (p.x * p.x), 1.0 / p.x, 0.0, 1.0 / p.y};
    }
    return {1.0 / (p.x * p.x), -1.0 / (p.y * p.y), 0.0, 1.0 / (p.y * p.y)};
}

double CanonicalChart::slope_forward(XY p, double y1) const {
    const Partials d = partials(p);
    const double den = d.r_x + d.r_y * y1;
    if (std::abs(den) < kSingularTolerance) throw DomainError("curve is tangent to an r-level set");
    return (d.s_x + d.s_y * y1) / den;
}

double CanonicalChart::s_lower(double r) const {
    if (kind_ == FamilyKind::FirstOrderHomogeneous) return std::log(r) + std::log(x0_);
    return -1.0 / x0_ - r;
}

double CanonicalChart::s_upper(double r) const {
    if (kind_ == FamilyKind::FirstOrderHomogeneous) return std::log(r) + std::log(x_T_);
    return -1.0 / x_T_ - r;
}

double CanonicalChart::envelope_width() const {
    if (kind_ == FamilyKind::FirstOrderHomogeneous) return std::log(x_T_) - std::log(x0_);
    return 1.0 / x0_ - 1.0 / x_T_;
}

double CanonicalChart::lower_slope(double r) const {
    if (kind_ == FamilyKind::FirstOrderHomogeneous) return 1.0 / r;
    return -1.0;
}

lie::PolyVectorField CanonicalChart::generator() const {
    if (kind_ == FamilyKind::FirstOrderHomogeneous) return {BivariatePoly::x(), BivariatePoly::y()};
    return {BivariatePoly::monomial(1.0, 2, 0), BivariatePoly::monomial(1.0, 0, 2)};
}

CanonicalChart chart_first_order(double x_T, double x0) { return CanonicalChart::first_order(x0, x_T); }

CanonicalChart chart_second_order(double x0, double x_T) { return CanonicalChart::second_order(x0, x_T); }

ReducedIntegrand reduced_rhs_first_order(const expr::Expression& F) {
    return ReducedIntegrand([F](double r) {
        const double f = F(r);
        const double den = -r * r + r * f;
        if (std::abs(den) < kSingularTolerance)
            throw ReductionError(ReductionError::Kind::Singular, r,
                                 "singular reduction at r = " + std::to_string(r) +
                                     " (F(r) = r: invariant solution of the scaling symmetry)");
        return f / den;
    });
}

IntegrationConstant integration_constant_second_order(double x0, double y0, double y0_prime) {
    if (x0 == 0.0 || y0 == 0.0) throw DomainError("initial point must have x0 != 0 and y0 != 0");
    const double v0 = 1.0 / y0 - 1.0 / x0;
    const double w0 = y0_prime * x0 * x0 / (y0 * y0);
    if (!(w0 > 0.0)) throw DomainError("w0 = y0' (x0/y0)^2 must be positive");
    if (v0 == 0.0) throw DomainError("v0 = 1/y0 - 1/x0 must be non-zero");
    const int branch = (x0 / y0 >= 0.0) ? 1 : -1;
    const double sw = std::sqrt(w0);
    const double c = 2.0 * sw + branch + 2.0 / sw;
    return {std::log(c) - std::log(std::abs(v0)), branch};
}

double second_order_k(const IntegrationConstant& ic, double r) {
    return (std::abs(r) * std::exp(ic.C) - ic.branch) / 2.0;
}

double solve_k_relation(double K, double r) {
    if (K < 2.0)
        throw ReductionError(ReductionError::Kind::NoRealSolution, r,
                             "no real solution of p + 1/p = K for K = " + std::to_string(K) + " < 2");
    if (K < 2.0 + kSingularTolerance)
        throw ReductionError(ReductionError::Kind::BlowUp, r, "ds/dr blows up (p -> 1) at K = 2");
    // Root in (0,1), written to avoid cancellation for large K.
    const double p = 2.0 / (K + std::sqrt(K * K - 4.0));
    const double p2 = p * p;
    const double u = p2 / (1.0 - p2);
    if (!std::isfinite(u)) throw ReductionError(ReductionError::Kind::BlowUp, r, "ds/dr is not finite");
    return u;
}

ReducedIntegrand reduced_rhs_second_order(const IntegrationConstant& ic) {
    return ReducedIntegrand([ic](double r) { return solve_k_relation(second_order_k(ic, r), r); });
}

namespace {

std::vector<double> tagged(const ReducedIntegrand& g, std::span<const double> design) {
    std::vector<double> out;
    out.reserve(design.size());
    for (std::size_t i = 0; i < design.size(); ++i) {
        try {
            out.push_back(g(design[i]));
        } catch (const Error& e) {
            throw DesignPointError(i, "design point " + std::to_string(i) + " (r = " + std::to_string(design[i]) +
                                          "): " + e.what());
        }
    }
    return out;
}

}  // namespace

std::vector<double> information_first_order(const expr::Expression& F, std::span<const double> design) {
    return tagged(reduced_rhs_first_order(F), design);
}

std::vector<double> information_second_order(const IntegrationConstant& ic, std::span<const double> design) {
    return tagged(reduced_rhs_second_order(ic), design);
}

OdeFamily OdeFamily::first_order(expr::Expression F, double y0, double x_T, double x0) {
    OdeFamily f;
    f.kind = FamilyKind::FirstOrderHomogeneous;
    f.F = std::move(F);
    f.x0 = x0;
    f.x_T = x_T;
    f.y0 = y0;
    return f;
}

OdeFamily OdeFamily::second_order(double x0, double x_T, double y0, double y0_prime) {
    OdeFamily f;
    f.kind = FamilyKind::SecondOrderExample;
    f.x0 = x0;
    f.x_T = x_T;
    f.y0 = y0;
    f.y0_prime = y0_prime;
    return f;
}

CanonicalChart OdeFamily::chart() const {
    return kind == FamilyKind::FirstOrderHomogeneous ? CanonicalChart::first_order(x0, x_T)
                                                     : CanonicalChart::second_order(x0, x_T);
}

ReducedIntegrand OdeFamily::reduced_rhs() const {
    if (kind == FamilyKind::FirstOrderHomogeneous) {
        if (!F) throw ConfigError("first-order family needs F");
        return reduced_rhs_first_order(*F);
    }
    return reduced_rhs_second_order(integration_constant_second_order(x0, y0, y0_prime));
}

lie::OdeSurface OdeFamily::surface() const {
    if (kind == FamilyKind::FirstOrderHomogeneous) {
        if (!F) throw ConfigError("first-order family needs F");
        return lie::first_order_homogeneous_surface(*F);
    }
    return lie::second_order_example_surface();
}

std::vector<lie::PolyVectorField> OdeFamily::generators() const {
    const auto x = BivariatePoly::x();
    const auto y = BivariatePoly::y();
    if (kind == FamilyKind::FirstOrderHomogeneous) return {{x, y}};
    return {
        {BivariatePoly::monomial(1.0, 2, 0), BivariatePoly::monomial(1.0, 0, 2)},
        {x, y},
        {BivariatePoly::constant(1.0), BivariatePoly::constant(1.0)},
    };
}

double OdeFamily::r0() const { return chart().forward({x0, y0}).r; }

std::vector<double> OdeFamily::information(std::span<const double> design) const {
    return tagged(reduced_rhs(), design);
}

}  // namespace liepnm::charts
