#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "liepnm/charts.hpp"

namespace liepnm::prior {

/// N equally spaced hat functions phi_j(r) = max(0, 1 - |r - t_j| / h).
/// Indices are zero-based.
class HatBasis {
public:
    HatBasis(double t_first, double t_last, std::size_t count);

    std::size_t size() const { return count_; }
    double spacing() const { return h_; }
    double first() const { return t_first_; }
    double last() const { return t_last_; }
    double knot(std::size_t j) const;
    std::vector<double> knots() const;

    double phi(std::size_t j, double r) const;
    /// Right derivative: +1/h on [t_j - h, t_j), -1/h on [t_j, t_j + h), 0 elsewhere.
    double phi_prime(std::size_t j, double r) const;

    /// Index k of the knot interval [t_k, t_{k+1}) containing r, clamped to [0, N-2].
    std::size_t interval(double r) const;
    /// Index of a knot within `tol` of r, if any.
    std::ptrdiff_t knot_at(double r, double tol) const;

private:
    double t_first_;
    double t_last_;
    std::size_t count_;
    double h_;
};

/// zeta(r) = sum_j z_j phi_j(r); exact at knots.
double zeta(const HatBasis& basis, std::span<const double> z, double r);
/// Right derivative of zeta.
double zeta_prime(const HatBasis& basis, std::span<const double> z, double r);

/// Membership in Z = {0 < z_1 <= z_2 <= ... <= z_N <= 1}.
bool is_feasible(std::span<const double> z);
/// Closed relaxation {0 <= z_1 <= ... <= z_N <= 1} with slack `tol`.
bool is_feasible_closed(std::span<const double> z, double tol);

/// Transformed solution s(r) = s_lower(r) + width * zeta(r) of a coefficient vector.
class TransformedCurve {
public:
    TransformedCurve(charts::CanonicalChart chart, HatBasis basis, std::vector<double> z);

    double operator()(double r) const;
    double slope(double r) const;
    double zeta_at(double r) const { return zeta(basis_, z_, r); }
    const std::vector<double>& coefficients() const { return z_; }

private:
    charts::CanonicalChart chart_;
    HatBasis basis_;
    std::vector<double> z_;
};

/// Tolerance of the closed feasibility check used by s_from_zeta.
inline constexpr double kFeasibilityTolerance = 1e-9;

/// Throws Error when z is outside the closed constraint set (tolerance above)
/// or has the wrong length.
TransformedCurve s_from_zeta(const charts::CanonicalChart& chart, const HatBasis& basis, std::vector<double> z);

}  // namespace liepnm::prior
